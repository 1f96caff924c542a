import pytest

from diagcert.errors import UsageError
from diagcert.filtration import (filtration_from_decomposition, sample_lattice,
                                 search_minimal_cyclic_filtration,
                                 verify_filtration)
from diagcert.groebner import FreeVector
from diagcert.homalg import (FPModule, annihilator, quotient_presentation)
from diagcert.linalg import RingMatrix


def vec(ring, *texts):
    return FreeVector(ring, tuple(ring.parse(t) for t in texts))


def ideal_strs(sample):
    return sorted(repr(i) for i in sample.ideals())


def test_sample_z4(zz):
    z4 = FPModule.from_matrix(RingMatrix.parse(zz, [["4"]]))
    sample = sample_lattice(z4)
    assert ideal_strs(sample) == ["(1)", "(2)", "(4)"]


def test_sample_jordan(qxy):
    M = FPModule.from_matrix(RingMatrix.parse(qxy, [["x", "y"], ["0", "x"]]))
    sample = sample_lattice(M)
    assert ideal_strs(sample) == ["(1)", "(x)", "(x^2)"]
    by_ideal = {repr(e.ideal): e for e in sample.entries}
    assert by_ideal["(x)"].principal and str(by_ideal["(x)"].principal_generator) == "x"
    assert by_ideal["(x^2)"].principal


def test_sample_diag23(zz):
    d23 = FPModule.from_matrix(RingMatrix.parse(zz, [["2", "0"], ["0", "3"]]))
    names = ideal_strs(sample_lattice(d23))
    assert "(2)" in names and "(3)" in names and "(6)" in names


def test_sample_reproducible(qxy):
    M = FPModule.from_matrix(RingMatrix.parse(qxy, [["x", "y"], ["0", "x"]]))
    a = sample_lattice(M).to_json()
    b = sample_lattice(M).to_json()
    assert a == b


def test_quotient_presentation_fixtures(qxy):
    M = FPModule.from_matrix(RingMatrix.parse(qxy, [["x", "y"], ["0", "x"]]))
    assert quotient_presentation(M, []).same_presentation(M)
    killed = quotient_presentation(M, [vec(qxy, "1", "0"), vec(qxy, "0", "1")])
    assert killed.is_zero()


def test_decomposition_coprime_pair(zz):
    out = filtration_from_decomposition([zz.from_int(2), zz.from_int(3)])
    ideals = [repr(i) for i in out.filtration.quotient_ideals()]
    assert ideals == ["(3)", "(2)"]    # 2 peeled first by the tie-break
    assert out.peel_order == (0, 1)
    assert not out.dropped_units


def test_decomposition_single_entry(qxy):
    out = filtration_from_decomposition([qxy.parse("x")])
    assert [repr(i) for i in out.filtration.quotient_ideals()] == ["(x)"]


def test_decomposition_nested_ideals(qxy):
    out = filtration_from_decomposition([qxy.parse("x"), qxy.parse("x^2")])
    # the smaller ideal (x^2) is peeled first, so it is the top quotient
    assert out.peel_order[0] == 1
    assert [repr(i) for i in out.filtration.quotient_ideals()] == ["(x)", "(x^2)"]


def test_decomposition_drops_units(qxy):
    out = filtration_from_decomposition([qxy.parse("1"), qxy.parse("x")])
    assert [str(u) for u in out.dropped_units] == ["1"]
    assert [repr(i) for i in out.filtration.quotient_ideals()] == ["(x)"]


def test_decomposition_rejects_zero(qxy):
    with pytest.raises(UsageError):
        filtration_from_decomposition([qxy.zero()])


def test_decomposition_passes_shared_verifier(zz, qxy):
    from diagcert.filtration import sample_basis_lattice
    for entries in ([zz.from_int(2), zz.from_int(3)],
                    [zz.from_int(2), zz.from_int(4)]):
        out = filtration_from_decomposition(entries)
        sample = sample_basis_lattice(out.module)
        assert verify_filtration(out.module, out.filtration, sample)
    out = filtration_from_decomposition([qxy.parse("x"), qxy.parse("x*y")])
    from diagcert.filtration import sample_basis_lattice as sbl
    assert verify_filtration(out.module, out.filtration, sbl(out.module))


def test_search_z4_minimal_is_length_one(zz):
    z4 = FPModule.from_matrix(RingMatrix.parse(zz, [["4"]]))
    result = search_minimal_cyclic_filtration(z4)
    assert result.verdict == "found"
    assert [repr(i) for i in result.found.quotient_ideals()] == ["(4)"]
    # the two-step chain through (2) was rejected as non-minimal
    assert any(r.reason == "not_minimal" and r.annihilator.get("groebner") == ["2"]
               for r in result.rejected)


def test_search_diag23_finds_cyclic_chain(zz):
    d23 = FPModule.from_matrix(RingMatrix.parse(zz, [["2", "0"], ["0", "3"]]))
    result = search_minimal_cyclic_filtration(d23)
    assert result.verdict == "found"
    assert [repr(i) for i in result.found.quotient_ideals()] == ["(6)"]
    gen = result.found.stages[0].new_generator
    assert [str(c) for c in gen.comps] == ["1", "1"]


def test_search_jordan_none_within_bounds(qxy):
    M = FPModule.from_matrix(RingMatrix.parse(qxy, [["x", "y"], ["0", "x"]]))
    result = search_minimal_cyclic_filtration(M)
    assert result.verdict == "none_within_bounds"
    # first displayed shape: a submodule with annihilator (x) was available
    # but rejected because the strictly smaller (x^2) was sampled
    assert any(r.reason == "not_minimal"
               and r.annihilator.get("groebner") == ["x"]
               and ["x^2"] in [s.get("groebner") for s in
                               r.detail.get("smaller_sampled", [])]
               for r in result.rejected)
    # second displayed shape: the chain through (x^2) dead-ends at a quotient
    # whose only annihilator (x, y) is outside the sampled lattice
    assert any(r.reason == "dead_end"
               and list(r.chain_annihilators) == ["(x^2)"]
               and any(sorted(b.get("groebner", [])) == ["x", "y"]
                       for b in r.detail.get("blocked_annihilators", []))
               for r in result.rejected)


def test_search_found_chains_reverify(zz):
    d23 = FPModule.from_matrix(RingMatrix.parse(zz, [["2", "0"], ["0", "3"]]))
    result = search_minimal_cyclic_filtration(d23)
    assert verify_filtration(d23, result.found, result.sample)


def test_search_triangular_int_is_cyclic(zx):
    M = FPModule.from_matrix(RingMatrix.parse(zx, [["2", "x"], ["0", "3"]]))
    result = search_minimal_cyclic_filtration(M)
    assert result.verdict == "found"
    assert [repr(i) for i in result.found.quotient_ideals()] == ["(6)"]


def test_quotient_annihilator_product_kills_module(zz):
    d24 = FPModule.from_matrix(RingMatrix.parse(zz, [["2", "0"], ["0", "4"]]))
    result = search_minimal_cyclic_filtration(d24)
    assert result.found is not None
    product = zz.one()
    for ideal in result.found.quotient_ideals():
        gen = ideal.principal_generator()
        assert gen is not None
        product = product * gen
    assert annihilator(d24).contains(product)


def test_search_deterministic(qxy):
    M = FPModule.from_matrix(RingMatrix.parse(qxy, [["x", "y"], ["0", "x"]]))
    a = search_minimal_cyclic_filtration(M).to_json()
    b = search_minimal_cyclic_filtration(M).to_json()
    assert a == b
