"""Exact dense linear algebra over Fraction / Cyc entries."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .scalars import simplify

Matrix = tuple  # tuple of row tuples


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    rows = [tuple(simplify(x) for x in r) for r in rows]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return tuple(rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if len(a[0]) != len(b):
        raise ValueError("shape mismatch")
    cols = list(zip(*b))
    return tuple(
        tuple(simplify(sum((x * y for x, y in zip(row, col)), Fraction(0))) for col in cols) for row in a
    )


def matpow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = matmul(out, a)
    return out


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(simplify(sum((x * y for x, y in zip(row, v)), Fraction(0))) for row in a)


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns, by exact Gauss-Jordan."""
    m = [[simplify(x) for x in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [simplify(x / lead) if x != 0 else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [simplify(x - f * y) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[tuple]:
    """Basis of {x : rows * x = 0}; one vector per free column, in column order."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = simplify(-row[f])
        basis.append(tuple(v))
    return basis


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def in_span(basis: Sequence[Sequence], v: Sequence) -> bool:
    if not any(x != 0 for x in v):
        return True
    if not basis:
        return False
    return rank(list(basis)) == rank(list(basis) + [list(v)])
