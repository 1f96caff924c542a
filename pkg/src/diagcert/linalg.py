"""Exact dense matrices over a ring, equivalence certificates, Smith form.

Certificates are never trusted: every constructor that emits one re-checks it
through the independent verifier (see verifier.py), which shares nothing with
this module beyond ring arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import (InternalInvariantError, NotEuclideanError, UsageError)
from .rings import IdealHandle, RingDescriptor, RingElement, exact_divide


class RingMatrix:
    """Immutable dense matrix with entries in one ring."""

    __slots__ = ("ring", "rows")

    def __init__(self, ring: RingDescriptor, rows):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise UsageError("matrix must have at least one row and column")
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise UsageError("ragged matrix")
            for e in r:
                if not isinstance(e, RingElement) or e.ring != ring:
                    raise UsageError("entry from the wrong ring")
        self.ring = ring
        self.rows = rows

    # constructors -----------------------------------------------------------
    @staticmethod
    def parse(ring: RingDescriptor, grid) -> "RingMatrix":
        return RingMatrix(ring, [[ring.parse(s) for s in row] for row in grid])

    @staticmethod
    def identity(ring: RingDescriptor, n: int) -> "RingMatrix":
        one, zero = ring.one(), ring.zero()
        return RingMatrix(ring, [[one if i == j else zero for j in range(n)]
                                 for i in range(n)])

    @staticmethod
    def diagonal(ring: RingDescriptor, entries) -> "RingMatrix":
        entries = list(entries)
        zero = ring.zero()
        return RingMatrix(ring, [[entries[i] if i == j else zero
                                  for j in range(len(entries))]
                                 for i in range(len(entries))])

    # shape ------------------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def entry(self, i: int, j: int) -> RingElement:
        return self.rows[i][j]

    def is_diagonal(self) -> bool:
        return all(self.rows[i][j].is_zero()
                   for i in range(self.nrows) for j in range(self.ncols) if i != j)

    def diagonal_entries(self):
        return [self.rows[i][i] for i in range(min(self.nrows, self.ncols))]

    # arithmetic -------------------------------------------------------------
    def __mul__(self, other: "RingMatrix") -> "RingMatrix":
        if self.ring != other.ring:
            raise UsageError("matrix ring mismatch")
        if self.ncols != other.nrows:
            raise UsageError("matrix dimension mismatch")
        zero = self.ring.zero()
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = zero
                for k in range(self.ncols):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return RingMatrix(self.ring, out)

    def __neg__(self):
        return RingMatrix(self.ring, [[-e for e in r] for r in self.rows])

    def transpose(self) -> "RingMatrix":
        return RingMatrix(self.ring, list(zip(*self.rows)))

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        return hash((self.ring, self.rows))

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in r) for r in self.rows)
        return f"[{body}]"

    def submatrix(self, row_idx, col_idx) -> "RingMatrix":
        return RingMatrix(self.ring, [[self.rows[i][j] for j in col_idx]
                                      for i in row_idx])

    def columns(self):
        """Columns as FreeVectors in R^nrows."""
        from .groebner import FreeVector
        return [FreeVector(self.ring, tuple(self.rows[i][j]
                                            for i in range(self.nrows)))
                for j in range(self.ncols)]

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(),
                "matrix": [[str(e) for e in r] for r in self.rows]}


# ---------------------------------------------------------------------------
# determinants


def _det_cofactor(rows, ring):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = ring.zero()
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = rows[0][j] * _det_cofactor(minor, ring)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def determinant(m: RingMatrix) -> RingElement:
    """Exact determinant by fraction-free elimination.

    Cross-checked against cofactor expansion for n <= 3; a failed exact
    division inside the elimination is an arithmetic bug and raises.
    """
    if not m.is_square():
        raise UsageError("determinant of a non-square matrix")
    ring = m.ring
    n = m.nrows
    a = [list(r) for r in m.rows]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if a[k][k].is_zero():
            pivot_row = None
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                return ring.zero()
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                q = exact_divide(num, prev)
                if q is None:
                    raise InternalInvariantError("Bareiss division failed")
                a[i][j] = q
            a[i][k] = ring.zero()
        prev = a[k][k]
    det = a[n - 1][n - 1]
    if sign < 0:
        det = -det
    if n <= 3:
        check = _det_cofactor([list(r) for r in m.rows], ring)
        if check != det:
            raise InternalInvariantError("determinant cross-check failed")
    return det


def adjugate(m: RingMatrix) -> RingMatrix:
    n = m.nrows
    ring = m.ring
    if n == 1:
        return RingMatrix(ring, [[ring.one()]])
    out = [[ring.zero()] * n for _ in range(n)]
    idx = list(range(n))
    for i in range(n):
        for j in range(n):
            minor = [[m.rows[r][c] for c in idx if c != j]
                     for r in idx if r != i]
            cof = _det_cofactor(minor, ring)
            if (i + j) % 2 == 1:
                cof = -cof
            out[j][i] = cof
    return RingMatrix(ring, out)


def inverse_unimodular(m: RingMatrix) -> RingMatrix:
    """Exact inverse of a matrix whose determinant is a unit."""
    det = determinant(m)
    if not det.is_unit():
        raise UsageError("matrix is not unimodular")
    inv_det = det.invert_unit()
    adj = adjugate(m)
    return RingMatrix(m.ring, [[inv_det * e for e in r] for r in adj.rows])


def fitting_ideal(m: RingMatrix, k: int) -> IdealHandle:
    """Ideal of all k x k minors; k = 0 gives the unit ideal."""
    if k < 0 or k > min(m.nrows, m.ncols):
        raise UsageError(f"minor size {k} out of range")
    ring = m.ring
    if k == 0:
        return IdealHandle(ring, [ring.one()])
    gens = []
    for rows_idx in combinations(range(m.nrows), k):
        for cols_idx in combinations(range(m.ncols), k):
            d = determinant(m.submatrix(rows_idx, cols_idx))
            if not d.is_zero():
                gens.append(d.canonical_associate()[1])
    return IdealHandle(ring, sorted(set(gens), key=lambda e: e.sort_key()))


# ---------------------------------------------------------------------------
# elementary operations


@dataclass(frozen=True)
class RowSwap:
    i: int
    j: int
    side = "left"

    def to_json(self):
        return {"op": "row_swap", "i": self.i, "j": self.j}


@dataclass(frozen=True)
class ColSwap:
    i: int
    j: int
    side = "right"

    def to_json(self):
        return {"op": "col_swap", "i": self.i, "j": self.j}


@dataclass(frozen=True)
class RowAdd:
    """row[dst] += mult * row[src]"""
    dst: int
    src: int
    mult: RingElement
    side = "left"

    def to_json(self):
        return {"op": "row_add", "dst": self.dst, "src": self.src,
                "mult": str(self.mult)}


@dataclass(frozen=True)
class ColAdd:
    """col[dst] += mult * col[src]"""
    dst: int
    src: int
    mult: RingElement
    side = "right"

    def to_json(self):
        return {"op": "col_add", "dst": self.dst, "src": self.src,
                "mult": str(self.mult)}


@dataclass(frozen=True)
class RowScale:
    i: int
    unit: RingElement
    side = "left"

    def to_json(self):
        return {"op": "row_scale", "i": self.i, "unit": str(self.unit)}


@dataclass(frozen=True)
class ColScale:
    i: int
    unit: RingElement
    side = "right"

    def to_json(self):
        return {"op": "col_scale", "i": self.i, "unit": str(self.unit)}


ELEMENTARY_OPS = (RowSwap, ColSwap, RowAdd, ColAdd, RowScale, ColScale)


def _validate_op(m: RingMatrix, op):
    n, c = m.nrows, m.ncols
    if isinstance(op, (RowSwap, RowAdd, RowScale)):
        limit = n
    else:
        limit = c
    idxs = []
    if isinstance(op, (RowSwap, ColSwap)):
        idxs = [op.i, op.j]
        if op.i == op.j:
            raise UsageError("swap needs two distinct indices")
    elif isinstance(op, (RowAdd, ColAdd)):
        idxs = [op.dst, op.src]
        if op.dst == op.src:
            raise UsageError("add needs two distinct indices")
        if op.mult.ring != m.ring:
            raise UsageError("multiplier from the wrong ring")
    else:
        idxs = [op.i]
        if op.unit.ring != m.ring:
            raise UsageError("unit from the wrong ring")
        if not op.unit.is_unit():
            raise UsageError(f"cannot scale by the non-unit {op.unit}")
    for i in idxs:
        if not 0 <= i < limit:
            raise UsageError("elementary operation index out of range")


def apply_elementary(m: RingMatrix, op) -> RingMatrix:
    """Apply one invertible elementary row or column operation."""
    _validate_op(m, op)
    rows = [list(r) for r in m.rows]
    if isinstance(op, RowSwap):
        rows[op.i], rows[op.j] = rows[op.j], rows[op.i]
    elif isinstance(op, ColSwap):
        for r in rows:
            r[op.i], r[op.j] = r[op.j], r[op.i]
    elif isinstance(op, RowAdd):
        rows[op.dst] = [a + op.mult * b
                        for a, b in zip(rows[op.dst], rows[op.src])]
    elif isinstance(op, ColAdd):
        for r in rows:
            r[op.dst] = r[op.dst] + op.mult * r[op.src]
    elif isinstance(op, RowScale):
        rows[op.i] = [op.unit * a for a in rows[op.i]]
    elif isinstance(op, ColScale):
        for r in rows:
            r[op.i] = op.unit * r[op.i]
    else:
        raise UsageError(f"unknown elementary operation {op!r}")
    return RingMatrix(m.ring, rows)


def op_from_json(ring: RingDescriptor, data) -> object:
    kind = data.get("op")
    if kind == "row_swap":
        return RowSwap(data["i"], data["j"])
    if kind == "col_swap":
        return ColSwap(data["i"], data["j"])
    if kind == "row_add":
        return RowAdd(data["dst"], data["src"], ring.parse(data["mult"]))
    if kind == "col_add":
        return ColAdd(data["dst"], data["src"], ring.parse(data["mult"]))
    if kind == "row_scale":
        return RowScale(data["i"], ring.parse(data["unit"]))
    if kind == "col_scale":
        return ColScale(data["i"], ring.parse(data["unit"]))
    raise UsageError(f"unknown elementary operation {kind!r}")


class Workbench:
    """Mutable (A, P, Q) state: P * source * Q = A at every moment."""

    def __init__(self, m: RingMatrix):
        self.source = m
        self.a = [list(r) for r in m.rows]
        self.p = [list(r) for r in RingMatrix.identity(m.ring, m.nrows).rows]
        self.q = [list(r) for r in RingMatrix.identity(m.ring, m.ncols).rows]
        self.transcript = []
        self.ring = m.ring

    def matrix(self) -> RingMatrix:
        return RingMatrix(self.ring, self.a)

    def apply(self, op):
        if isinstance(op, (RowScale, ColScale)) and not op.unit.is_unit():
            raise UsageError(f"cannot scale by the non-unit {op.unit}")
        self.transcript.append(op)
        if op.side == "left":
            self._apply_rows(self.a, op)
            self._apply_rows(self.p, op)
        else:
            self._apply_cols(self.a, op)
            self._apply_cols(self.q, op)

    @staticmethod
    def _apply_rows(rows, op):
        if isinstance(op, RowSwap):
            rows[op.i], rows[op.j] = rows[op.j], rows[op.i]
        elif isinstance(op, RowAdd):
            rows[op.dst] = [a + op.mult * b
                            for a, b in zip(rows[op.dst], rows[op.src])]
        elif isinstance(op, RowScale):
            rows[op.i] = [op.unit * a for a in rows[op.i]]
        else:
            raise UsageError(f"not a row operation: {op!r}")

    @staticmethod
    def _apply_cols(rows, op):
        if isinstance(op, ColSwap):
            for r in rows:
                r[op.i], r[op.j] = r[op.j], r[op.i]
        elif isinstance(op, ColAdd):
            for r in rows:
                r[op.dst] = r[op.dst] + op.mult * r[op.src]
        elif isinstance(op, ColScale):
            for r in rows:
                r[op.i] = op.unit * r[op.i]
        else:
            raise UsageError(f"not a column operation: {op!r}")

    def certificate(self) -> "EquivalenceCertificate":
        return EquivalenceCertificate(
            source=self.source,
            left=RingMatrix(self.ring, self.p),
            right=RingMatrix(self.ring, self.q),
            target=self.matrix(),
            transcript=tuple(self.transcript))


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class EquivalenceCertificate:
    """Witness that left * source * right = target with unimodular transforms."""

    source: RingMatrix
    left: RingMatrix
    right: RingMatrix
    target: RingMatrix
    transcript: tuple = ()

    def verify(self):
        from . import verifier
        return verifier.check_equivalence(self.left, self.source,
                                          self.right, self.target)

    def to_json(self) -> dict:
        out = {"ring": self.source.ring.to_json(),
               "source": [[str(e) for e in r] for r in self.source.rows],
               "left": [[str(e) for e in r] for r in self.left.rows],
               "right": [[str(e) for e in r] for r in self.right.rows],
               "target": [[str(e) for e in r] for r in self.target.rows]}
        if self.transcript:
            out["transcript"] = [op.to_json() for op in self.transcript]
        return out


def verify_certificate(cert: EquivalenceCertificate):
    """Re-check a certificate with independent arithmetic; never trusts it."""
    return cert.verify()


def compose_equivalences(first: EquivalenceCertificate,
                         second: EquivalenceCertificate) -> EquivalenceCertificate:
    """From P1*m*Q1 = A and P2*A*Q2 = B derive (P2*P1)*m*(Q1*Q2) = B."""
    if first.target != second.source:
        raise UsageError("certificates do not chain")
    return EquivalenceCertificate(
        source=first.source,
        left=second.left * first.left,
        right=first.right * second.right,
        target=second.target,
        transcript=first.transcript + second.transcript)


# ---------------------------------------------------------------------------
# Smith normal form


def _euclid_size(e: RingElement):
    """Size for pivot selection: |n| over Z, degree over univariate fields."""
    if e.ring.kind == "integers" or e.ring.nvars == 0:
        return abs(e.constant_coeff())
    return e.total_degree()


def _euclid_quot(a: RingElement, b: RingElement) -> RingElement:
    """Quotient with remainder strictly smaller than b (Euclidean division)."""
    ring = a.ring
    if ring.nvars == 0:
        q = a.constant_coeff() // b.constant_coeff()
        return ring.from_coeff(q)
    # univariate over a field
    dom = ring.coeffs
    q = ring.zero()
    r = a
    db = b.total_degree()
    lb = b.leading_coeff()
    while not r.is_zero() and r.total_degree() >= db:
        shift = r.total_degree() - db
        coeff = dom.exact_div(r.leading_coeff(), lb)
        term = ring.monomial((shift,), coeff)
        q = q + term
        r = r - term * b
    return q


@dataclass(frozen=True)
class SmithForm:
    """Diagonal certificate with the divisibility chain d1 | d2 | ..."""

    certificate: EquivalenceCertificate
    invariant_factors: tuple

    def to_json(self) -> dict:
        out = self.certificate.to_json()
        out["invariant_factors"] = [str(d) for d in self.invariant_factors]
        return out


def smith_normal_form(m: RingMatrix) -> SmithForm:
    """Smith normal form over Z, Q[x] or F_p[x], with a verified certificate."""
    ring = m.ring
    if not ring.is_euclidean():
        raise NotEuclideanError(
            f"{ring!r} has no division algorithm here; use the diagonalizer")
    bench = Workbench(m)
    n, c = m.nrows, m.ncols
    t = 0
    while t < min(n, c):
        progress = True
        while progress:
            a = bench.a
            best = None
            for i in range(t, n):
                for j in range(t, c):
                    if a[i][j].is_zero():
                        continue
                    size = _euclid_size(a[i][j])
                    if best is None or size < best[0]:
                        best = (size, i, j)
            if best is None:
                t = min(n, c)  # remaining block is zero
                progress = False
                break
            _, pi, pj = best
            if pi != t:
                bench.apply(RowSwap(t, pi))
            if pj != t:
                bench.apply(ColSwap(t, pj))
            a = bench.a
            pivot = a[t][t]
            dirty = False
            for i in range(t + 1, n):
                if a[i][t].is_zero():
                    continue
                q = _euclid_quot(a[i][t], pivot)
                bench.apply(RowAdd(i, t, -q))
                dirty = True
            a = bench.a
            for j in range(t + 1, c):
                if a[t][j].is_zero():
                    continue
                q = _euclid_quot(a[t][j], pivot)
                bench.apply(ColAdd(j, t, -q))
                dirty = True
            a = bench.a
            if dirty or any(not a[i][t].is_zero() for i in range(t + 1, n)) \
                    or any(not a[t][j].is_zero() for j in range(t + 1, c)):
                continue
            # row and column are clear; enforce divisibility into the block
            merge = None
            for i in range(t + 1, n):
                for j in range(t + 1, c):
                    if not a[i][j].is_zero() and \
                            exact_divide(a[i][j], pivot) is None:
                        merge = i
                        break
                if merge is not None:
                    break
            if merge is not None:
                bench.apply(RowAdd(t, merge, m.ring.one()))
                continue
            progress = False
        if t < min(n, c):
            t += 1
    # canonicalize the diagonal
    a = bench.a
    for i in range(min(n, c)):
        e = a[i][i]
        if e.is_zero():
            continue
        unit, _ = e.canonical_associate()
        if not unit.is_unit():
            raise InternalInvariantError("non-unit canonical factor")
        if unit != ring.one():
            bench.apply(RowScale(i, unit.invert_unit()))
    cert = bench.certificate()
    check = cert.verify()
    if not check.valid:
        raise InternalInvariantError(f"SNF certificate invalid: {check.reason}")
    diag = cert.target.diagonal_entries()
    factors = [d for d in diag if not d.is_zero()]
    for i in range(len(factors) - 1):
        if exact_divide(factors[i + 1], factors[i]) is None:
            raise InternalInvariantError("SNF divisibility chain broken")
    for k, d in enumerate(diag):
        if d.is_zero() and any(not e.is_zero() for e in diag[k:]):
            raise InternalInvariantError("zero before nonzero on SNF diagonal")
    return SmithForm(certificate=cert, invariant_factors=tuple(factors))
