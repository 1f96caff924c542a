"""Cyclic filtrations: the sampled annihilator lattice, the greedy minimal
search, and the constructor that peels a diagonal decomposition.

Reading pinned here (and echoed in every report):
  * the lattice is sampled as exactly the element annihilators Ann(x) for x
    over a bounded, canonically ordered coefficient pool;
  * a filtration step is admissible when its cyclic quotient annihilator
    equals a sampled lattice ideal of the ambient module;
  * minimality is stagewise: a step is minimal when no sampled candidate at
    that stage offered a strictly smaller annihilator.  Tie-breaks between
    incomparable ideals follow the canonical generator order.
NoneWithinBounds is always bound-relative; it is never a nonexistence proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .bounds import Bounds
from .errors import InternalInvariantError, UsageError
from .groebner import FreeVector
from .homalg import FPModule, element_annihilator, quotient_presentation
from .linalg import RingMatrix
from .rings import IdealHandle, RingDescriptor, RingElement

SEARCH_DEPTH_LIMIT = 12


# ---------------------------------------------------------------------------
# element enumeration and lattice sampling


def _coefficient_values(ring, height):
    out = [ring.zero()]
    for c in range(1, height + 1):
        out.append(ring.from_int(c))
        out.append(ring.from_int(-c))
    return out


def _monomial_values(ring, degree, height):
    out = []
    if not ring.nvars:
        return out
    exps = []
    for total in range(1, degree + 1):
        exps.extend(_exps_of_degree(ring.nvars, total))
    exps.sort(key=ring.monomial_key)
    for exp in exps:
        for c in range(1, height + 1):
            out.append(ring.monomial(exp, ring.coeffs.from_int(c)))
            out.append(ring.monomial(exp, ring.coeffs.from_int(-c)))
    return out


def _exps_of_degree(nvars, total):
    if nvars == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in _exps_of_degree(nvars - 1, total - first):
            out.append((first,) + rest)
    return out


def enumerate_elements(ring: RingDescriptor, rank: int, bounds: Bounds):
    """Canonically ordered nonzero vectors: integer coefficient combinations
    first (by height then position), then single monomial multiples."""
    values = _coefficient_values(ring, bounds.height)
    order = {v: i for i, v in enumerate(values)}
    combos = [c for c in product(values, repeat=rank)
              if any(not x.is_zero() for x in c)]
    combos.sort(key=lambda c: (max(order[x] for x in c),
                               sum(order[x] for x in c),
                               tuple(order[x] for x in c)))
    out = [FreeVector(ring, c) for c in combos]
    for mono in _monomial_values(ring, bounds.degree, bounds.height):
        for i in range(rank):
            comps = [ring.zero()] * rank
            comps[i] = mono
            out.append(FreeVector(ring, comps))
    return out[:bounds.sample_elements]


@dataclass(frozen=True)
class SampleEntry:
    element: FreeVector
    ideal: IdealHandle
    principal: bool
    principal_generator: RingElement = None

    def to_json(self):
        out = {"element": [str(c) for c in self.element.comps],
               "annihilator": self.ideal.to_json(),
               "principal": self.principal}
        if self.principal_generator is not None:
            out["principal_generator"] = str(self.principal_generator)
        return out


@dataclass(frozen=True)
class AnnihilatorSample:
    module: FPModule
    entries: tuple
    bounds: Bounds
    policy: str = "pool"      # "pool": canonical enumeration; "basis": e_i only

    def ideals(self):
        """Distinct sampled annihilators, canonical order."""
        seen = []
        for e in self.entries:
            if all(e.ideal != s for s in seen):
                seen.append(e.ideal)
        return seen

    def proper_ideals(self):
        return [i for i in self.ideals() if i.is_proper()]

    def contains_ideal(self, ideal: IdealHandle) -> bool:
        return any(ideal == e for e in self.ideals())

    def to_json(self):
        return {"bounds": self.bounds.to_json(),
                "entries": [e.to_json() for e in self.entries]}


def sample_lattice(M: FPModule, bounds: Bounds = None) -> AnnihilatorSample:
    """Annihilators of pooled elements, deduplicated per ideal.

    Every recorded annihilator is re-certified by element_annihilator; the
    enumeration is canonical, so the sample is reproducible.
    """
    bounds = bounds or Bounds.default()
    entries = []
    seen_ideals = []
    handle = M.handle()
    if M.gens:
        unit = IdealHandle(M.ring, [M.ring.one()])
        seen_ideals.append(unit)
        entries.append(SampleEntry(FreeVector.zero(M.ring, M.gens), unit,
                                   True, M.ring.one()))
    for v in enumerate_elements(M.ring, M.gens, bounds):
        nf = handle.normal_form(v) if M.relations else v
        if nf.is_zero():
            continue  # the zero class is already recorded with the unit ideal
        ideal = element_annihilator(M, v)
        if all(ideal != s for s in seen_ideals):
            seen_ideals.append(ideal)
            gen = ideal.principal_generator()
            entries.append(SampleEntry(v, ideal, gen is not None, gen))
    return AnnihilatorSample(M, tuple(entries), bounds)


def sample_basis_lattice(M: FPModule, bounds: Bounds = None) -> AnnihilatorSample:
    """Cheap sub-sample: annihilators of the ambient basis vectors only.

    Used to verify decomposition-built filtrations, whose quotient ideals are
    basis-vector annihilators by construction.
    """
    bounds = bounds or Bounds.default()
    entries = [SampleEntry(FreeVector.zero(M.ring, M.gens),
                           IdealHandle(M.ring, [M.ring.one()]),
                           True, M.ring.one())] if M.gens else []
    seen = [entries[0].ideal] if entries else []
    for i in range(M.gens):
        v = M.basis_vector(i)
        ideal = element_annihilator(M, v)
        if all(ideal != s for s in seen):
            seen.append(ideal)
            gen = ideal.principal_generator()
            entries.append(SampleEntry(v, ideal, gen is not None, gen))
    return AnnihilatorSample(M, tuple(entries), bounds, policy="basis")


# ---------------------------------------------------------------------------
# filtrations


@dataclass(frozen=True)
class FiltrationStage:
    new_generator: FreeVector        # in the ambient free module of M
    quotient_ideal: IdealHandle
    minimality: dict = field(default_factory=dict)

    def to_json(self):
        return {"new_generator": [str(c) for c in self.new_generator.comps],
                "quotient_annihilator": self.quotient_ideal.to_json(),
                "minimality": self.minimality}


@dataclass(frozen=True)
class CyclicFiltration:
    """0 = M_0 < M_1 < ... < M_k = M with cyclic quotients M_i/M_{i-1}."""

    module: FPModule
    stages: tuple

    def submodule_generators(self, k: int):
        return [s.new_generator for s in self.stages[:k]]

    def quotient_ideals(self):
        return [s.quotient_ideal for s in self.stages]

    def to_json(self):
        return {"length": len(self.stages),
                "stages": [s.to_json() for s in self.stages]}


def verify_filtration(M: FPModule, filtration: CyclicFiltration,
                      sample: AnnihilatorSample) -> bool:
    """Re-check a filtration from scratch: strict inclusions, cyclic quotient
    annihilators as stated, lattice membership, and termination at M."""
    for k, stage in enumerate(filtration.stages):
        current = quotient_presentation(M, filtration.submodule_generators(k))
        nf = current.handle().normal_form(stage.new_generator)
        if nf.is_zero():
            return False  # inclusion not strict
        ideal = element_annihilator(current, stage.new_generator)
        if ideal != stage.quotient_ideal:
            return False
        if not ideal.is_proper():
            return False
        if not sample.contains_ideal(ideal):
            return False
    final = quotient_presentation(
        M, filtration.submodule_generators(len(filtration.stages)))
    return final.is_zero()


# ---------------------------------------------------------------------------
# construction from a diagonal decomposition


@dataclass
class DecompositionFiltration:
    filtration: CyclicFiltration
    module: FPModule
    dropped_units: tuple        # unit diagonal entries present zero summands
    peel_order: tuple           # indexes into the original entry list

    def to_json(self):
        return {"filtration": self.filtration.to_json(),
                "dropped_unit_entries": [str(u) for u in self.dropped_units],
                "peel_order": list(self.peel_order)}


def filtration_from_decomposition(lambdas) -> DecompositionFiltration:
    """Chain obtained by repeatedly peeling a divisibility-maximal entry.

    Among the remaining principal ideals, the smallest under inclusion (the
    entry every other remaining entry divides, when comparable) is peeled
    first; incomparable ties fall back to the canonical generator order.
    The complementary summands form the chain.
    """
    lambdas = list(lambdas)
    if not lambdas:
        raise UsageError("empty decomposition")
    ring = lambdas[0].ring
    for lam in lambdas:
        if lam.ring != ring:
            raise UsageError("decomposition entries over different rings")
        if lam.is_zero():
            raise UsageError("decomposition entries must be nonzero")
    matrix = RingMatrix.diagonal(ring, lambdas)
    M = FPModule.from_matrix(matrix)
    dropped = tuple(lam for lam in lambdas if lam.is_unit())
    remaining = [i for i, lam in enumerate(lambdas) if not lam.is_unit()]

    def _divides(a, b):
        from .rings import exact_divide
        return exact_divide(b, a) is not None

    peel = []
    pool = list(remaining)
    while pool:
        minimal = []
        for j in pool:
            # (lambda_j) is minimal when no other remaining ideal sits
            # strictly inside it
            strictly_inside = any(
                i != j and _divides(lambdas[j], lambdas[i])
                and not _divides(lambdas[i], lambdas[j])
                for i in pool)
            if not strictly_inside:
                minimal.append(j)
        minimal.sort(key=lambda j: (lambdas[j].total_degree(),
                                    lambdas[j].sort_key(), j))
        choice = minimal[0]
        peel.append(choice)
        pool.remove(choice)

    stages = []
    for step, idx in enumerate(reversed(peel)):
        lam = lambdas[idx]
        ideal = IdealHandle(ring, [lam.canonical_associate()[1]])
        evidence = {
            "construction": "decomposition_peel",
            "entry_index": idx,
            "entry": str(lam),
            "compared_against": [str(lambdas[j]) for j in peel[:len(peel) - 1 - step]],
        }
        stages.append(FiltrationStage(
            new_generator=FreeVector.basis(ring, len(lambdas), idx),
            quotient_ideal=ideal,
            minimality=evidence))
    filtration = CyclicFiltration(M, tuple(stages))
    sample = sample_basis_lattice(M)
    if not verify_filtration(M, filtration, sample):
        raise InternalInvariantError("decomposition filtration failed verification")
    return DecompositionFiltration(filtration=filtration, module=M,
                                   dropped_units=dropped,
                                   peel_order=tuple(peel))


# ---------------------------------------------------------------------------
# greedy-with-backtracking minimal search


@dataclass(frozen=True)
class RejectedCandidate:
    stage: int
    chain_annihilators: tuple      # annihilators of the chain prefix, as strings
    element: tuple                 # component strings
    annihilator: dict
    reason: str                    # "not_minimal" | "dead_end"
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"stage": self.stage,
                "chain_annihilators": list(self.chain_annihilators),
                "element": list(self.element),
                "annihilator": self.annihilator,
                "reason": self.reason,
                "detail": self.detail}


@dataclass
class FiltrationSearchResult:
    found: CyclicFiltration = None
    sample: AnnihilatorSample = None
    rejected: tuple = ()
    bounds: Bounds = None
    depth_limited: bool = False

    @property
    def verdict(self) -> str:
        return "found" if self.found is not None else "none_within_bounds"

    def to_json(self):
        out = {"verdict": self.verdict,
               "bounds": self.bounds.to_json() if self.bounds else None,
               "lattice_reading": "exact element annihilators, bounded sample",
               "minimality_reading":
                   "stagewise: no sampled strictly smaller annihilator",
               "rejected_candidates": [r.to_json() for r in self.rejected]}
        if self.found is not None:
            out["filtration"] = self.found.to_json()
        if self.depth_limited:
            out["depth_limited"] = True
        return out


def _normalize_candidate(ring, vec: FreeVector) -> FreeVector:
    for c in vec.comps:
        if not c.is_zero():
            unit = ring.from_coeff(ring.coeffs.canonical_unit(c.leading_coeff()))
            return vec.scale(unit.invert_unit())
    return vec


def _stage_candidates(M: FPModule, current_gens, sample, bounds):
    """Sampled elements of the current quotient with admissible annihilators,
    grouped as (ideal, [elements]), plus the inadmissible ones for reporting."""
    quotient = quotient_presentation(M, current_gens)
    handle = quotient.handle()
    seen = set()
    admissible = []      # list of [ideal, elements]
    blocked = []         # (element, ideal) with annihilator outside the lattice
    for v in enumerate_elements(M.ring, M.gens, bounds):
        nf = handle.normal_form(v)
        if nf.is_zero():
            continue
        nf = _normalize_candidate(M.ring, nf)
        if nf in seen:
            continue
        seen.add(nf)
        ideal = element_annihilator(quotient, nf)
        if not ideal.is_proper():
            continue
        if sample.contains_ideal(ideal):
            for group in admissible:
                if group[0] == ideal:
                    group[1].append(nf)
                    break
            else:
                admissible.append([ideal, [nf]])
        else:
            if all(b[1] != ideal for b in blocked):
                blocked.append((nf, ideal))
    return quotient, admissible, blocked


def search_minimal_cyclic_filtration(M: FPModule,
                                     bounds: Bounds = None) -> FiltrationSearchResult:
    """Greedy search preferring inclusion-minimal quotient annihilators, with
    backtracking across candidates in the minimal layer.  Rejections are
    recorded: non-minimal candidates and dead-ended chains both appear in the
    result for inspection."""
    bounds = bounds or Bounds.default()
    sample = sample_lattice(M, bounds)
    rejected = []
    state = {"depth_limited": False}

    def chain_strings(stages):
        return tuple(str(s.quotient_ideal) for s in stages)

    def recurse(current_gens, stages):
        quotient, admissible, blocked = _stage_candidates(
            M, current_gens, sample, bounds)
        if quotient.is_zero():
            return CyclicFiltration(M, tuple(stages))
        if len(stages) >= SEARCH_DEPTH_LIMIT:
            state["depth_limited"] = True
            return None
        stage_no = len(stages) + 1
        if not admissible:
            rejected.append(RejectedCandidate(
                stage=stage_no,
                chain_annihilators=chain_strings(stages),
                element=(),
                annihilator={},
                reason="dead_end",
                detail={"blocked_annihilators":
                        [b[1].to_json() for b in blocked]}))
            return None
        minimal_layer = []
        non_minimal = []
        for ideal, elements in admissible:
            strictly_smaller = any(
                other != ideal and other.is_subset_of(ideal)
                for other, _ in admissible)
            (minimal_layer if not strictly_smaller else non_minimal).append(
                (ideal, elements))
        for ideal, elements in non_minimal:
            rejected.append(RejectedCandidate(
                stage=stage_no,
                chain_annihilators=chain_strings(stages),
                element=tuple(str(c) for c in elements[0].comps),
                annihilator=ideal.to_json(),
                reason="not_minimal",
                detail={"smaller_sampled": [
                    other.to_json() for other, _ in admissible
                    if other != ideal and other.is_subset_of(ideal)]}))
        minimal_layer.sort(key=lambda g: g[0].sort_key())
        layer_json = [ideal.to_json() for ideal, _ in minimal_layer]
        for ideal, elements in minimal_layer:
            for v in elements:
                stage = FiltrationStage(
                    new_generator=v,
                    quotient_ideal=ideal,
                    minimality={"stage_minimal_layer": layer_json,
                                "no_smaller_sampled": True})
                outcome = recurse(current_gens + [v], stages + [stage])
                if outcome is not None:
                    return outcome
                rejected.append(RejectedCandidate(
                    stage=stage_no,
                    chain_annihilators=chain_strings(stages),
                    element=tuple(str(c) for c in v.comps),
                    annihilator=ideal.to_json(),
                    reason="dead_end",
                    detail={"note": "no admissible continuation"}))
        return None

    found = recurse([], [])
    if found is not None and not verify_filtration(M, found, sample):
        raise InternalInvariantError("search filtration failed verification")
    return FiltrationSearchResult(found=found, sample=sample,
                                  rejected=tuple(rejected), bounds=bounds,
                                  depth_limited=state["depth_limited"])
