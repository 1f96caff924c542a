import random
from itertools import permutations

import pytest

from diagcert.errors import NotEuclideanError, UsageError
from diagcert.linalg import (ColAdd, EquivalenceCertificate, RingMatrix,
                             RowScale, RowSwap, Workbench, apply_elementary,
                             determinant, fitting_ideal, inverse_unimodular,
                             smith_normal_form, verify_certificate)


def perm_det(m):
    """Independent determinant oracle: permutation expansion."""
    ring = m.ring
    n = m.nrows
    total = ring.zero()
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = ring.one()
        for i in range(n):
            term = term * m.rows[i][perm[i]]
        total = total + term if sign > 0 else total - term
    return total


def rand_matrix(rng, ring, n, degree=1, height=4):
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            e = ring.zero()
            for _ in range(rng.randint(0, 2)):
                exp = tuple(rng.randint(0, degree) for _ in range(ring.nvars))
                e = e + ring.monomial(exp, ring.coeffs.from_int(
                    rng.randint(-height, height)))
            row.append(e)
        rows.append(row)
    return RingMatrix(ring, rows)


def test_determinant_fixtures(zx, qxy):
    assert str(determinant(RingMatrix.parse(zx, [["2", "x"], ["0", "3"]]))) == "6"
    assert str(determinant(RingMatrix.parse(qxy, [["x", "y"], ["0", "x"]]))) == "x^2"
    diag = RingMatrix.diagonal(qxy, [qxy.parse("x"), qxy.parse("y - 1"),
                                     qxy.parse("x + y")])
    assert determinant(diag) == qxy.parse("x * (y - 1) * (x + y)")


def test_determinant_not_square(qxy):
    with pytest.raises(UsageError):
        determinant(RingMatrix.parse(qxy, [["x", "y"]]))


def test_determinant_vs_permutation_oracle(zz, qxy):
    rng = random.Random(31)
    for _ in range(25):
        m = rand_matrix(rng, zz, rng.randint(2, 4))
        assert determinant(m) == perm_det(m)
    for _ in range(15):
        m = rand_matrix(rng, qxy, rng.randint(2, 3))
        assert determinant(m) == perm_det(m)


def test_determinant_multiplicative_on_products(qxy):
    rng = random.Random(32)
    for _ in range(10):
        a = rand_matrix(rng, qxy, 2)
        b = rand_matrix(rng, qxy, 2)
        assert determinant(a * b) == determinant(a) * determinant(b)


def test_fitting_ideal_fixtures(zx, qxy):
    tri = RingMatrix.parse(zx, [["2", "x"], ["0", "3"]])
    assert [str(g) for g in fitting_ideal(tri, 1).groebner()] == ["1"]
    jor = RingMatrix.parse(qxy, [["x", "y"], ["0", "x"]])
    assert sorted(str(g) for g in fitting_ideal(jor, 1).groebner()) == ["x", "y"]
    assert [str(g) for g in fitting_ideal(jor, 2).groebner()] == ["x^2"]
    assert fitting_ideal(jor, 0).is_unit_ideal()
    with pytest.raises(UsageError):
        fitting_ideal(jor, 3)


def test_fitting_invariance_under_equivalence_and_transpose(qxy):
    from diagcert.testkit import random_recipe
    rng = random.Random(33)
    for trial in range(6):
        m = rand_matrix(rng, qxy, 2)
        recipe = random_recipe(qxy, 2, 4, seed=330 + trial)
        bench = Workbench(m)
        from diagcert.linalg import op_from_json
        for op_data in recipe.ops:
            bench.apply(op_from_json(qxy, op_data))
        scrambled = bench.matrix()
        assert verify_certificate(bench.certificate()).valid
        for k in range(0, 3):
            assert fitting_ideal(m, k) == fitting_ideal(scrambled, k)
            assert fitting_ideal(m, k) == fitting_ideal(m.transpose(), k)


def test_apply_elementary_fixtures(zx):
    tri = RingMatrix.parse(zx, [["2", "x"], ["0", "3"]])
    out = apply_elementary(tri, ColAdd(1, 0, zx.parse("x + 2")))
    assert out == RingMatrix.parse(zx, [["2", "3*x + 4"], ["0", "3"]])
    diag = RingMatrix.parse(zx, [["2", "0"], ["0", "3"]])
    swapped = apply_elementary(diag, RowSwap(0, 1))
    assert swapped == RingMatrix.parse(zx, [["0", "3"], ["2", "0"]])
    scaled = apply_elementary(tri, RowScale(0, zx.parse("-1")))
    assert scaled == RingMatrix.parse(zx, [["-2", "-x"], ["0", "3"]])


def test_scale_by_non_unit_rejected(zx):
    tri = RingMatrix.parse(zx, [["2", "x"], ["0", "3"]])
    with pytest.raises(UsageError):
        apply_elementary(tri, RowScale(0, zx.parse("2")))
    with pytest.raises(UsageError):
        apply_elementary(tri, RowScale(0, zx.parse("x")))


def test_verify_certificate_identity_and_tampered(zx):
    tri = RingMatrix.parse(zx, [["2", "x"], ["0", "3"]])
    ident = RingMatrix.identity(zx, 2)
    cert = EquivalenceCertificate(tri, ident, ident, tri)
    assert verify_certificate(cert).valid
    bad = EquivalenceCertificate(
        tri, ident, ident,
        RingMatrix.parse(zx, [["2", "x + 1"], ["0", "3"]]))
    check = verify_certificate(bad)
    assert not check.valid and "entry" in check.reason


def test_verify_hand_certificate(zx):
    tri = RingMatrix.parse(zx, [["2", "x"], ["0", "3"]])
    p = RingMatrix.parse(zx, [["1", "-x - 1"], ["-3", "3*x + 4"]])
    q = RingMatrix.parse(zx, [["x + 2", "-2*x - 3"], ["1", "-2"]])
    d = RingMatrix.parse(zx, [["1", "0"], ["0", "-6"]])
    assert verify_certificate(EquivalenceCertificate(tri, p, q, d)).valid
    assert str(determinant(p)) == "1"
    assert str(determinant(q)) == "-1"


def test_verify_rejects_non_unit_transform(zx):
    tri = RingMatrix.parse(zx, [["2", "x"], ["0", "3"]])
    p = RingMatrix.parse(zx, [["2", "0"], ["0", "1"]])
    target = p * tri
    check = verify_certificate(
        EquivalenceCertificate(tri, p, RingMatrix.identity(zx, 2), target))
    assert not check.valid and "unit" in check.reason


def test_inverse_unimodular(zx):
    p = RingMatrix.parse(zx, [["1", "-x - 1"], ["-3", "3*x + 4"]])
    assert p * inverse_unimodular(p) == RingMatrix.identity(zx, 2)


def test_snf_fixtures(zz, qx):
    s = smith_normal_form(RingMatrix.parse(zz, [["2", "4"], ["6", "8"]]))
    assert [str(d) for d in s.invariant_factors] == ["2", "4"]
    s = smith_normal_form(RingMatrix.parse(zz, [["6", "0"], ["0", "2"]]))
    assert [str(d) for d in s.invariant_factors] == ["2", "6"]
    s = smith_normal_form(RingMatrix.parse(qx, [["x", "0"], ["0", "x"]]))
    assert [str(d) for d in s.invariant_factors] == ["x", "x"]


def test_snf_rejects_non_euclidean(qxy):
    with pytest.raises(NotEuclideanError):
        smith_normal_form(RingMatrix.parse(qxy, [["x", "y"], ["0", "x"]]))


def test_snf_over_univariate_field_random(qx, f5x):
    rng = random.Random(34)
    for ring in (qx, f5x):
        for _ in range(10):
            m = rand_matrix(rng, ring, rng.randint(2, 3), degree=2, height=3)
            form = smith_normal_form(m)
            assert verify_certificate(form.certificate).valid
            from diagcert.rings import exact_divide
            for a, b in zip(form.invariant_factors, form.invariant_factors[1:]):
                assert exact_divide(b, a) is not None


def test_snf_deterministic(zz):
    m = RingMatrix.parse(zz, [["4", "6", "8"], ["2", "10", "4"], ["6", "0", "2"]])
    a = smith_normal_form(m).certificate.to_json()
    b = smith_normal_form(m).certificate.to_json()
    assert a == b


def test_snf_singular_matrix(zz):
    m = RingMatrix.parse(zz, [["1", "2"], ["2", "4"]])
    form = smith_normal_form(m)
    assert [str(d) for d in form.invariant_factors] == ["1"]
    assert str(form.certificate.target.rows[1][1]) == "0"
