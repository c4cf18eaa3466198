"""Differential operators with a linear involution, as elements of (S*V)^p.

An :class:`InvOperator` with components ``(P_0, ..., P_{p-1})`` is the
operator ``sum_j (A*)^j D_{P_j}`` where ``A*`` is the pullback ``y -> y o A``
and ``D_P`` is the constant-coefficient operator with symbol ``P``.

Moving a derivative past a pullback uses ``D_w (A*)^j = (A*)^j D_{A^j w}``,
so composition is

    (RL)_t = sum_{l + j = t mod p} (A^j . Q_l) * P_j

where ``A^j . Q`` is :func:`linear_substitute`.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .involution import InvolutionMatrix, validate_involution
from .scalars import format_scalar, parse_scalar, simplify
from .symtensor import Poly, linear_substitute, monomials_upto

log = logging.getLogger(__name__)


class OperatorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class InvOperator:
    A: InvolutionMatrix
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != self.A.p:
            raise OperatorError(f"expected {self.A.p} components, got {len(comps)}")
        for c in comps:
            if c.dim != self.A.n:
                raise OperatorError(f"component of dimension {c.dim} on a {self.A.n}-dimensional involution")
        object.__setattr__(self, "components", comps)

    @property
    def p(self) -> int:
        return self.A.p

    @property
    def dim(self) -> int:
        return self.A.n

    @classmethod
    def from_components(cls, A: InvolutionMatrix, comps: Mapping[int, Poly] | Sequence[Poly]) -> "InvOperator":
        if isinstance(comps, Mapping):
            comps = [comps.get(j, Poly(A.n)) for j in range(A.p)]
        return cls(A, tuple(comps))

    @classmethod
    def identity(cls, A: InvolutionMatrix) -> "InvOperator":
        return cls.from_components(A, {0: Poly.const(A.n, 1)})

    @classmethod
    def zero(cls, A: InvolutionMatrix) -> "InvOperator":
        return cls.from_components(A, {})

    @classmethod
    def pullback(cls, A: InvolutionMatrix, j: int = 1) -> "InvOperator":
        return cls.from_components(A, {j % A.p: Poly.const(A.n, 1)})

    def _check(self, other: "InvOperator"):
        if self.A.p != other.A.p or self.A.matrix != other.A.matrix:
            raise OperatorError("operators are defined over different involutions")

    def __add__(self, other: "InvOperator") -> "InvOperator":
        self._check(other)
        return InvOperator(self.A, tuple(a + b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return InvOperator(self.A, tuple(-c for c in self.components))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "InvOperator":
        return InvOperator(self.A, tuple(p * c for p in self.components))

    def __matmul__(self, other: "InvOperator") -> "InvOperator":
        return op_compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, InvOperator):
            return NotImplemented
        return self.A == other.A and self.components == other.components

    def __hash__(self):
        return hash((self.A.matrix, self.components))

    def is_zero(self) -> bool:
        return not any(self.components)

    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    def __repr__(self):
        parts = [f"[{j}] {c.format()}" for j, c in enumerate(self.components) if c]
        return "InvOperator(" + ("; ".join(parts) or "0") + ")"

    def to_json_obj(self) -> dict:
        return {
            "dim": self.dim,
            "p": self.p,
            "conductor": self.A.conductor,
            "involution": [[format_scalar(x) for x in row] for row in self.A.matrix],
            "components": [c.to_json_obj() for c in self.components],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "InvOperator":
        m = obj.get("conductor", 1)
        A = validate_involution([[parse_scalar(str(x), m) for x in row] for row in obj["involution"]], obj["p"])
        return cls(A, tuple(Poly.from_json_obj(c, m) for c in obj["components"]))

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(), **kw)


def op_compose(R: InvOperator, L: InvOperator) -> InvOperator:
    """The operator product R L (apply L first)."""
    R._check(L)
    p = R.p
    powers = [R.A.power(j) for j in range(p)]
    out = [Poly(R.dim) for _ in range(p)]
    for l, Q in enumerate(R.components):
        if not Q:
            continue
        for j, P in enumerate(L.components):
            if not P:
                continue
            shifted = Q if j == 0 else linear_substitute(powers[j], Q)
            t = (l + j) % p
            out[t] = out[t] + shifted * P
    return InvOperator(R.A, tuple(out))


def is_pure_pde(T: InvOperator) -> bool:
    return not any(T.components[1:])


def op_commutator(L: InvOperator, R: InvOperator) -> InvOperator:
    """``LR - RL``."""
    return op_compose(L, R) - op_compose(R, L)


def reduce_order2(L: InvOperator) -> InvOperator:
    """Closed-form R for an order-2 involution: R = -A.P_0 + A* D_{P_1}.

    RL is then a pure PDE operator and R commutes with L.
    """
    if L.p != 2:
        raise OperatorError("closed-form reducer requires order-2 involution")
    P0, P1 = L.components
    R = InvOperator(L.A, (-linear_substitute(L.A.matrix, P0), P1))
    RL = op_compose(R, L)
    assert is_pure_pde(RL), "order-2 reducer produced an impure operator"
    assert op_commutator(L, R).is_zero(), "order-2 reducer does not commute with L"
    return R


@dataclass
class ReducerSpace:
    """Operators R of bounded degree with RL free of pullback terms.

    ``unknowns`` lists (component, multi-index) pairs, the coordinates of the
    vectors in ``basis``; ``constraints`` is the linear system they solve.
    """

    L: InvOperator
    max_degree: int
    unknowns: list
    constraints: list
    basis: list = field(default_factory=list)

    def __repr__(self):
        return f"ReducerSpace(L={self.L!r}, max_degree={self.max_degree}, dim={self.dim}, equations={len(self.constraints)})"

    @property
    def dim(self) -> int:
        return len(self.basis)

    def operator(self, vec: Sequence) -> InvOperator:
        comps: dict[int, dict] = {}
        for (l, alpha), c in zip(self.unknowns, vec):
            if c != 0:
                comps.setdefault(l, {})[alpha] = c
        return InvOperator.from_components(self.L.A, {l: Poly(self.L.dim, t) for l, t in comps.items()})

    def coordinates(self, R: InvOperator) -> tuple | None:
        """Coordinates of R in the unknown basis; None if R has too high a degree."""
        index = {u: i for i, u in enumerate(self.unknowns)}
        vec = [Fraction(0)] * len(self.unknowns)
        for l, P in enumerate(R.components):
            for alpha, c in P.terms.items():
                if (l, alpha) not in index:
                    return None
                vec[index[(l, alpha)]] = c
        return tuple(vec)

    def satisfies_constraints(self, R: InvOperator) -> bool:
        vec = self.coordinates(R)
        if vec is None:
            return False
        return all(simplify(sum((a * b for a, b in zip(row, vec)), Fraction(0))) == 0 for row in self.constraints)

    def contains(self, R: InvOperator) -> bool:
        vec = self.coordinates(R)
        return vec is not None and linalg.in_span(self.basis, vec)


def reducer_space(L: InvOperator, max_degree: int) -> ReducerSpace:
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    n, p = L.dim, L.p
    unknowns = [(l, alpha) for l in range(p) for alpha in monomials_upto(n, max_degree)]
    powers = [L.A.power(j) for j in range(p)]
    # column for each unknown: the non-identity components of (A*)^l D_{y^alpha} L
    columns = []
    rows_index: dict = {}
    for l, alpha in unknowns:
        mono = Poly.monomial(alpha)
        col = {}
        for j, P in enumerate(L.components):
            t = (l + j) % p
            if not P or t == 0:
                continue
            contrib = (mono if j == 0 else linear_substitute(powers[j], mono)) * P
            for beta, c in contrib.terms.items():
                key = (t, beta)
                col[key] = col.get(key, 0) + c
                rows_index.setdefault(key, len(rows_index))
        columns.append(col)
    keys = sorted(rows_index, key=lambda k: (k[0], sum(k[1]), k[1]))
    constraints = [[simplify(col.get(k, 0)) for col in columns] for k in keys]
    basis = linalg.nullspace(constraints, len(unknowns))
    return ReducerSpace(L, max_degree, unknowns, constraints, basis)


def find_reducer(L: InvOperator, max_degree: int) -> InvOperator | None:
    """Search for R of degree <= max_degree with RL a nonzero pure PDE operator."""
    space = reducer_space(L, max_degree)
    log.info("reducer nullspace dimension %d (max_degree=%d)", space.dim, max_degree)
    candidates = [space.operator(v) for v in space.basis]
    if len(space.basis) > 1:
        total = [simplify(sum(col, Fraction(0))) for col in zip(*space.basis)]
        candidates.append(space.operator(total))
    for R in candidates:
        RL = op_compose(R, L)
        # re-check independently of the linear solve
        if is_pure_pde(RL) and RL.components[0]:
            return R
    return None
