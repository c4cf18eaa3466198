"""Order-p linear involutions: validation, spectral construction, fixed points."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from . import linalg
from .scalars import Cyc, conductor_of, simplify


class InvolutionError(ValueError):
    pass


@dataclass(frozen=True)
class InvolutionMatrix:
    """An n x n exact matrix A with A^p = I and A^j != I for 0 < j < p."""

    matrix: tuple
    p: int

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def conductor(self) -> int:
        ms = {conductor_of(x) for row in self.matrix for x in row} - {1}
        if len(ms) > 1:
            raise InvolutionError("matrix mixes scalar fields")
        return ms.pop() if ms else 1

    def power(self, j: int) -> tuple:
        return linalg.matpow(self.matrix, j % self.p)

    def apply(self, v: Sequence) -> tuple:
        return linalg.matvec(self.matrix, v)

    def __repr__(self):
        return f"InvolutionMatrix({[[str(x) for x in r] for r in self.matrix]}, p={self.p})"


def validate_involution(M: Sequence[Sequence], p: int) -> InvolutionMatrix:
    m = linalg.as_matrix(M)
    n = len(m)
    if n == 0 or any(len(r) != n for r in m):
        raise InvolutionError("involution matrix must be square")
    if p < 2:
        raise InvolutionError(f"not an involution of order {p}: order must be at least 2")
    eye = linalg.identity(n)
    acc = eye
    for j in range(1, p):
        acc = linalg.matmul(acc, m)
        if acc == eye:
            raise InvolutionError(f"not an involution of order {p}: A^{j} = I")
    acc = linalg.matmul(acc, m)
    if acc != eye:
        raise InvolutionError(f"not an involution of order {p}: A^{p} != I")
    return InvolutionMatrix(m, p)


def build_from_spectral(U: Sequence[Sequence], eigen_exponents: Sequence[int], m: int) -> InvolutionMatrix:
    """``A = U^{-1} diag(zeta_m^e) U`` with p the lcm of the eigenvalue orders."""
    u = linalg.as_matrix(U)
    if len(eigen_exponents) != len(u):
        raise InvolutionError("one eigen-exponent per dimension required")
    try:
        uinv = linalg.inverse(u)
    except ValueError as exc:
        raise InvolutionError("U is singular") from exc
    p = 1
    for e in eigen_exponents:
        order = m // gcd(m, e % m)
        p = p * order // gcd(p, order)
    if p == 1:
        raise InvolutionError("identity is not an involution")
    n = len(u)
    lam = tuple(
        tuple(simplify(Cyc.zeta(m, e)) if i == j else Fraction(0) for j in range(n))
        for i, e in enumerate(eigen_exponents)
    )
    a = linalg.matmul(linalg.matmul(uinv, lam), u)
    return validate_involution(a, p)


def fixed_subspace(A: InvolutionMatrix) -> list[tuple]:
    """Basis of the fixed points {v : Av = v}."""
    n = A.n
    rows = [[A.matrix[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    return linalg.nullspace(rows, n)


def reflection(n: int = 2, axis: int = 1) -> InvolutionMatrix:
    """Reflection x_axis -> -x_axis, the involution of the bent-plate model."""
    return validate_involution([[(-1 if i == axis else 1) if i == j else 0 for j in range(n)] for i in range(n)], 2)
