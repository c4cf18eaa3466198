"""Symmetric tensor algebra S*V as sparse polynomials in symbol variables.

A symmetric tensor of order k over V = F^n is stored in the monomial basis,
so the tensor product becomes polynomial multiplication.  The polynomial
``p(y_1, ..., y_n)`` is also the symbol of the constant-coefficient operator
``p(d/dx_1, ..., d/dx_n)``.

The action of a linear map A on tensors (``A(v1 . v2) = Av1 . Av2``) is the
substitution ``y -> A^T y`` on symbols: the symbol of ``D_{Av}`` is
``(Av) . y = v . (A^T y)``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

from .scalars import format_scalar, parse_scalar, simplify, to_complex

MultiIndex = tuple


def _grlex_key(alpha):
    return (sum(alpha), alpha)


class Poly:
    """Sparse polynomial over exact scalars; zero coefficients are never stored."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], object] | Iterable = ()):
        self.dim = int(dim)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple, object] = {}
        for alpha, c in items:
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.dim:
                raise ValueError(f"multi-index {alpha} does not have length {self.dim}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            acc[alpha] = acc.get(alpha, 0) + c
        self.terms = {a: simplify(c) for a, c in acc.items() if c != 0}
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls(dim)

    @classmethod
    def const(cls, dim: int, c) -> "Poly":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c=1) -> "Poly":
        return cls(len(alpha), {tuple(alpha): c})

    @classmethod
    def linear(cls, v: Sequence) -> "Poly":
        """Symbol ``v . y`` of the directional derivative D_v."""
        n = len(v)
        return cls(n, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(v)})

    def _check(self, other: "Poly"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.dim, other)
        self._check(other)
        return Poly(self.dim, list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.dim, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if other == 0:
                return Poly(self.dim)
            return Poly(self.dim, {a: c * other for a, c in self.terms.items()})
        return poly_mul(self, other)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = Poly.const(self.dim, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.dim == other.dim and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Poly({self.dim}, {self.to_dict()!r})"

    def sorted_terms(self) -> list[tuple[tuple, object]]:
        """Terms in graded-lex order, highest degree first."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self.terms), default=-1)

    def to_dict(self) -> dict:
        return {a: c for a, c in self.sorted_terms()}

    def to_json_obj(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"alpha": list(a), "c": format_scalar(c)} for a, c in self.sorted_terms()],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping, conductor: int = 1) -> "Poly":
        return cls(obj["dim"], [(t["alpha"], parse_scalar(t["c"], conductor)) for t in obj["terms"]])

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    def format(self, var: str = "y") -> str:
        if not self.terms:
            return "0"
        out = []
        for alpha, c in self.sorted_terms():
            mono = "*".join(
                f"{var}{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(alpha) if e
            )
            cs = format_scalar(c)
            if not mono:
                out.append(cs)
            elif c == 1:
                out.append(mono)
            elif c == -1:
                out.append("-" + mono)
            else:
                out.append(f"({cs})*{mono}" if " " in cs else f"{cs}*{mono}")
        return " + ".join(out).replace("+ -", "- ")


def poly_mul(a: Poly, b: Poly) -> Poly:
    a._check(b)
    acc: dict[tuple, object] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            acc[e] = acc.get(e, 0) + ca * cb
    return Poly(a.dim, acc)


def linear_substitute(M: Sequence[Sequence], p: Poly) -> Poly:
    """Return ``p(M^T y)``, the action of M on the tensor p."""
    n = p.dim
    if len(M) != n or any(len(row) != n for row in M):
        raise ValueError(f"matrix must be {n}x{n} to act on a polynomial in {n} variables")
    # y_i -> sum_j M[j][i] y_j
    images = [Poly(n, {tuple(int(k == j) for k in range(n)): M[j][i] for j in range(n)}) for i in range(n)]
    powers: list[list[Poly]] = [[Poly.const(n, 1)] for _ in range(n)]
    out = Poly(n)
    for alpha, c in p.sorted_terms():
        term = Poly.const(n, c)
        for i, e in enumerate(alpha):
            pw = powers[i]
            while len(pw) <= e:
                pw.append(pw[-1] * images[i])
            if e:
                term = term * pw[e]
        out = out + term
    return out


def homogeneous_part(p: Poly, k: int) -> Poly:
    if k < 0:
        raise ValueError("degree must be non-negative")
    return Poly(p.dim, {a: c for a, c in p.terms.items() if sum(a) == k})


def sym_dimension(n: int, k: int) -> int:
    """Dimension of the k-th symmetric power of an n-dimensional space."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    return comb(n + k - 1, k)


def monomials(n: int, k: int) -> list[tuple]:
    """All multi-indices of degree exactly k in n variables, graded-lex descending."""
    out = []
    for combo in combinations_with_replacement(range(n), k):
        alpha = [0] * n
        for i in combo:
            alpha[i] += 1
        out.append(tuple(alpha))
    return sorted(out, reverse=True)


def monomials_upto(n: int, d: int) -> list[tuple]:
    return [a for k in range(d, -1, -1) for a in monomials(n, k)]


def eval_symbol(p: Poly, y: Sequence[complex]) -> complex:
    if len(y) != p.dim:
        raise ValueError(f"point has length {len(y)}, expected {p.dim}")
    acc = 0j
    for alpha, c in p.sorted_terms():
        t = to_complex(c)
        for yi, e in zip(y, alpha):
            if e:
                t *= complex(yi) ** e
        acc += t
    return acc


def laplacian_symbol(n: int, scale=1) -> Poly:
    return Poly(n, {tuple(2 * int(i == j) for j in range(n)): scale for i in range(n)})
