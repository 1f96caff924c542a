"""Independent certificate verification.

This module is the trust anchor for every Yes verdict, so it deliberately
shares no code with the construction paths beyond ring arithmetic: matrix
products and determinants are reimplemented here from scratch (cofactor
expansion, no Bareiss, no Workbench).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    reason: str = ""

    def __bool__(self):
        return self.valid


def _grid(matrix):
    return [list(r) for r in matrix.rows]


def _mul(ring, a, b):
    if len(a[0]) != len(b):
        return None
    out = []
    for i in range(len(a)):
        row = []
        for j in range(len(b[0])):
            acc = ring.zero()
            for k in range(len(b)):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def _det(ring, a):
    n = len(a)
    if n == 1:
        return a[0][0]
    acc = ring.zero()
    for j in range(n):
        if a[0][j].is_zero():
            continue
        minor = [[a[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = a[0][j] * _det(ring, minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def check_equivalence(left, source, right, target) -> CheckResult:
    """Valid iff det(left), det(right) are units and left*source*right == target."""
    ring = source.ring
    for mat, name in ((left, "left"), (right, "right"), (target, "target")):
        if mat.ring != ring:
            return CheckResult(False, f"{name} matrix is over a different ring")
    p, m, q, d = _grid(left), _grid(source), _grid(right), _grid(target)
    if len(p) != len(p[0]) or len(p[0]) != len(m):
        return CheckResult(False, "left transform has wrong shape")
    if len(q) != len(q[0]) or len(m[0]) != len(q):
        return CheckResult(False, "right transform has wrong shape")
    if len(d) != len(m) or len(d[0]) != len(q[0]):
        return CheckResult(False, "target has wrong shape")
    det_p = _det(ring, p)
    if not det_p.is_unit():
        return CheckResult(False, f"det(left) = {det_p} is not a unit")
    det_q = _det(ring, q)
    if not det_q.is_unit():
        return CheckResult(False, f"det(right) = {det_q} is not a unit")
    prod = _mul(ring, _mul(ring, p, m), q)
    for i in range(len(d)):
        for j in range(len(d[0])):
            if prod[i][j] != d[i][j]:
                return CheckResult(
                    False,
                    f"product entry ({i},{j}) is {prod[i][j]}, target has {d[i][j]}")
    return CheckResult(True)


def check_ideal_mismatch(lhs, rhs) -> CheckResult:
    """Valid iff the two ideals really differ: some generator of one has a
    nonzero normal form against the other."""
    from .groebner import ideal_contains
    ring = lhs.ring
    for g in lhs.groebner():
        if not ideal_contains(ring, rhs.groebner(), g):
            return CheckResult(True, f"{g} lies in the first ideal only")
    for g in rhs.groebner():
        if not ideal_contains(ring, lhs.groebner(), g):
            return CheckResult(True, f"{g} lies in the second ideal only")
    return CheckResult(False, "ideals are equal")
