import random

import pytest

from diagcert.errors import ParseError, UsageError
from diagcert.rings import RingDescriptor, ZZ, exact_divide, gcd, lcm


def rand_element(rng, ring, terms=3, degree=3, height=6):
    e = ring.zero()
    for _ in range(rng.randint(1, terms)):
        exp = tuple(rng.randint(0, degree) for _ in range(ring.nvars))
        e = e + ring.monomial(exp, ring.coeffs.from_int(rng.randint(-height, height)))
    return e


def test_product_fixture(zx):
    a = zx.parse("2*x + 3")
    b = zx.parse("3*x + 2")
    assert str(a * b) == "6*x^2 + 13*x + 6"


def test_difference_of_squares(qx):
    assert qx.parse("(x + 1) * (x - 1)") == qx.parse("x^2 - 1")


def test_additive_identity_random(qxy):
    rng = random.Random(1)
    for _ in range(50):
        a = rand_element(rng, qxy)
        assert a + qxy.zero() == a


def test_ring_laws_random():
    rng = random.Random(2)
    rings = [ZZ,
             RingDescriptor.polynomial("integers", ["x"], "lex"),
             RingDescriptor.polynomial("rationals", ["x", "y"], "grevlex"),
             RingDescriptor.polynomial(7, ["x", "y"], "lex")]
    for ring in rings:
        for _ in range(40):
            a = rand_element(rng, ring)
            b = rand_element(rng, ring)
            c = rand_element(rng, ring)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a
            if not b.is_zero():
                assert exact_divide(a * b, b) == a


def test_descriptor_mismatch(zx, qx):
    with pytest.raises(UsageError):
        zx.parse("x") + qx.parse("x")


def test_exact_divide_fixture(zx):
    q = exact_divide(zx.parse("6*x^2 + 13*x + 6"), zx.parse("2*x + 3"))
    assert q == zx.parse("3*x + 2")


def test_exact_divide_unit_divisor(qxy):
    rng = random.Random(3)
    for _ in range(20):
        a = rand_element(rng, qxy)
        assert exact_divide(a, qxy.one()) == a


def test_exact_divide_not_divisible(qx):
    assert exact_divide(qx.parse("x^2 + 1"), qx.parse("x + 1")) is None


def test_exact_divide_by_zero(qx):
    with pytest.raises(ZeroDivisionError):
        exact_divide(qx.parse("x"), qx.zero())


def test_gcd_fixtures(zz, zx, qxy):
    assert gcd(zz.from_int(4), zz.from_int(6)) == zz.from_int(2)
    assert gcd(zx.parse("2*x + 2"), zx.parse("4*x + 4")) == zx.parse("2*x + 2")
    assert gcd(qxy.parse("x^2*y"), qxy.parse("x*y^2")) == qxy.parse("x*y")


def test_gcd_divides_and_unit_invariance(qxy, zx):
    rng = random.Random(4)
    for ring in (qxy, zx):
        for _ in range(25):
            a = rand_element(rng, ring, terms=2, degree=2, height=4)
            b = rand_element(rng, ring, terms=2, degree=2, height=4)
            if a.is_zero() and b.is_zero():
                continue
            g = gcd(a, b)
            assert exact_divide(a, g) is not None
            assert exact_divide(b, g) is not None
            unit = ring.from_int(-1)
            if not a.is_zero():
                g2 = gcd(a.scale(unit.leading_coeff()), b)
                assert g2 == g


def test_gcd_both_zero(qx):
    with pytest.raises(UsageError):
        gcd(qx.zero(), qx.zero())


def test_gcd_common_divisor_divides_gcd(qxy):
    # any common divisor divides the gcd of multiples
    rng = random.Random(5)
    for _ in range(15):
        d = rand_element(rng, qxy, terms=2, degree=2, height=3)
        if d.is_zero():
            continue
        a = d * rand_element(rng, qxy, terms=2, degree=1, height=3)
        b = d * rand_element(rng, qxy, terms=2, degree=1, height=3)
        if a.is_zero() and b.is_zero():
            continue
        assert exact_divide(gcd(a, b), gcd(d, d)) is not None


def test_gcd_against_sympy(qxy):
    import sympy
    from fractions import Fraction
    x, y = sympy.symbols("x y")
    rng = random.Random(6)
    monos = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    for _ in range(40):
        def draw():
            e, se = qxy.zero(), 0
            for _ in range(rng.randint(1, 3)):
                c = rng.randint(-3, 3)
                i, j = rng.choice(monos)
                e = e + qxy.monomial((i, j), qxy.coeffs.from_int(c))
                se += c * x ** i * y ** j
            return e, se
        a, sa = draw()
        b, sb = draw()
        if a.is_zero() or b.is_zero():
            continue
        mine = gcd(a, b)
        theirs = sympy.gcd(sa, sb)
        poly = sympy.Poly(theirs, x, y, domain="QQ")
        terms = {tuple(exp): Fraction(c.p, c.q) for exp, c in poly.terms()}
        from diagcert.rings import RingElement
        expect = RingElement(qxy, terms).canonical_associate()[1]
        assert mine == expect, (str(a), str(b), str(mine), str(expect))


def test_lcm_fixture(zz):
    assert lcm(zz.from_int(4), zz.from_int(6)) == zz.from_int(12)


def test_units(zx, qx, qxy):
    assert zx.parse("-1").is_unit()
    assert not qx.parse("x").is_unit()
    assert qxy.parse("2").is_unit()
    assert not zx.parse("2").is_unit()


def test_canonical_associate(qx, zx):
    unit, monic = qx.parse("-3*x").canonical_associate()
    assert str(unit) == "-3" and str(monic) == "x"
    unit, canon = zx.parse("-2*x - 2").canonical_associate()
    assert str(unit) == "-1" and str(canon) == "2*x + 2"
    unit, z = qx.zero().canonical_associate()
    assert z.is_zero() and unit == qx.one()


def test_parse_print_roundtrip(qxy, zx, f5x, zz):
    rng = random.Random(7)
    for ring in (qxy, zx, f5x, zz):
        for _ in range(60):
            a = rand_element(rng, ring)
            assert ring.parse(str(a)) == a


def test_parse_rationals_and_errors(qx, zx):
    assert qx.parse("1/2*x + 3/4") == qx.parse("2/4*x + 6/8")
    assert zx.parse("4/2*x") == zx.parse("2*x")
    with pytest.raises(ParseError):
        zx.parse("1/2*x")
    with pytest.raises(ParseError):
        qx.parse("x +")
    with pytest.raises(ParseError):
        qx.parse("y")          # unknown variable
    with pytest.raises(ParseError):
        qx.parse("x ^ -2")
    with pytest.raises(ParseError):
        qx.parse("")


def test_parse_error_position(qx):
    try:
        qx.parse("x + z*2")
    except ParseError as exc:
        assert exc.position == 4
    else:
        raise AssertionError("expected a parse error")


def test_prime_field_arithmetic(f5x):
    assert f5x.parse("7*x + 3/2") == f5x.parse("2*x + 4")
    assert f5x.parse("x").scale(f5x.coeffs.from_int(5)).is_zero()


def test_prime_field_modulus_checked():
    with pytest.raises(UsageError):
        RingDescriptor.polynomial(6, ["x"], "lex")


def test_descriptor_validation():
    with pytest.raises(UsageError):
        RingDescriptor.polynomial("rationals", ["x", "x"], "lex")
    with pytest.raises(UsageError):
        RingDescriptor.polynomial("rationals", ["X"], "lex")
    with pytest.raises(UsageError):
        RingDescriptor.polynomial("rationals", ["x"], "weird")


def test_monomial_order_grevlex(qxy):
    x2y = qxy.parse("x^2*y")
    xy2 = qxy.parse("x*y^2")
    assert (x2y + xy2).leading_term() == x2y.leading_term()


def test_ideal_equality_and_membership(zx, qxy):
    from diagcert.rings import IdealHandle
    a = IdealHandle(zx, [zx.parse("2"), zx.parse("x")])
    b = IdealHandle(zx, [zx.parse("x"), zx.parse("2"), zx.parse("x + 2")])
    assert a == b
    assert not a.contains(zx.one())
    assert a.contains(zx.parse("2*x + 4"))
    xy = IdealHandle(qxy, [qxy.parse("x"), qxy.parse("y")])
    assert xy.principal_generator() is None
    x2 = IdealHandle(qxy, [qxy.parse("x^2"), qxy.parse("x^3")])
    assert str(x2.principal_generator()) == "x^2"
