"""Exact linear algebra over the rationals.

Row reduction with deterministic pivoting (first usable row, scanning
columns left to right); all results are Fractions, never floats.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

Vector = list
Matrix = list  # list of rows


def _as_fraction_rows(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form and the list of pivot columns."""
    m = _as_fraction_rows(rows)
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = ONE / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def null_space(rows) -> list[Vector]:
    """Basis of the right null space of the matrix, exact over the rationals.

    Each basis vector has a 1 in one free column and 0 in the others, so
    the result is deterministic and satisfies M v = 0 exactly.
    """
    m = _as_fraction_rows(rows)
    if not m:
        return []
    ncols = len(m[0])
    red, pivots = rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(rows, rhs) -> Vector | None:
    """One exact solution of M x = b, or None when inconsistent."""
    m = _as_fraction_rows(rows)
    b = [Fraction(x) for x in rhs]
    if len(m) != len(b):
        raise ValueError("dimension mismatch")
    if not m:
        return []
    aug = [row + [val] for row, val in zip(m, b)]
    red, pivots = rref(aug)
    ncols = len(m[0])
    if ncols in pivots:
        return None  # pivot in the constant column
    x = [ZERO] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


def in_span(v, vectors) -> tuple[bool, Vector | None]:
    """Whether ``v`` is a rational combination of ``vectors``.

    Returns the combination coefficients on success (aligned with the
    input list), found by solving the column system exactly.
    """
    v = [Fraction(x) for x in v]
    vecs = [[Fraction(x) for x in w] for w in vectors]
    if not vecs:
        return (not any(v)), ([] if not any(v) else None)
    n = len(v)
    for w in vecs:
        if len(w) != n:
            raise ValueError("dimension mismatch")
    cols = [[vecs[j][i] for j in range(len(vecs))] for i in range(n)]
    coeffs = solve(cols, v)
    if coeffs is None:
        return False, None
    return True, coeffs


class IncrementalSpan:
    """Row space maintained incrementally for rank and membership tests."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[Vector] = []  # in echelon form
        self.pivots: list[int] = []

    def _reduce(self, v) -> Vector:
        v = [Fraction(x) for x in v]
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def contains(self, v) -> bool:
        return not any(self._reduce(v))

    def add(self, v) -> bool:
        """Insert ``v``; True when it enlarged the span."""
        red = self._reduce(v)
        pivot = next((i for i, x in enumerate(red) if x), None)
        if pivot is None:
            return False
        inv = ONE / red[pivot]
        red = [x * inv for x in red]
        for i, (row, p) in enumerate(zip(self.rows, self.pivots)):
            if row[pivot]:
                f = row[pivot]
                self.rows[i] = [a - f * b for a, b in zip(row, red)]
        self.rows.append(red)
        self.pivots.append(pivot)
        order = sorted(range(len(self.pivots)), key=lambda i: self.pivots[i])
        self.rows = [self.rows[i] for i in order]
        self.pivots = [self.pivots[i] for i in order]
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)
