"""Green's-function kernels on the disk for the bent-plate and biharmonic models.

Kernels are :class:`KernelFn` objects evaluated on (field, source) pairs.
Internally every kernel works in Cartesian coordinates; ``__call__`` takes
polar ``(r, phi)`` tuples.  Three representations exist:

* closed forms (``func``), possibly log-singular on the diagonal;
* finite eigenfunction series (``modes``), ``sum_t c_t B_t(x) B_t(s)``
  with ``B_t`` in ``J_n(mu_nm r / rho) {cos, sin}(n phi)``;
* compositions ``int outer(x, s') inner(s', s) ds'`` (``parts``).

The reflection of the bent plate is fixed to A = diag(1, -1), which maps
``phi`` to ``-phi``: cosine modes are even under it, sine modes odd.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import QuadSpec, disk_nodes, local_nodes, map_chunks
from .specfun import bessel_j_orders, bessel_j_prime, bessel_zero_table

FOUR_PI = 4.0 * math.pi
_CHUNK = 2048


@dataclass(frozen=True)
class DiskSpec:
    rho: float = 1.0
    alpha: float = 1.0
    beta: float = 0.5

    def __post_init__(self):
        if not (self.rho > 0 and self.alpha > 0 and self.beta >= 0):
            raise ValueError("need rho > 0, alpha > 0, beta >= 0")

    def to_dict(self) -> dict:
        return {"rho": self.rho, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class SeriesTruncation:
    n_max: int = 20
    m_max: int = 20

    def __post_init__(self):
        if self.n_max < 0 or self.m_max < 1:
            raise ValueError("need n_max >= 0 and m_max >= 1")

    def to_dict(self) -> dict:
        return {"n_max": self.n_max, "m_max": self.m_max}


class KernelSingularity(ValueError):
    pass


@dataclass(frozen=True)
class ModalSeries:
    """``sum_t c_cos[t] C_t(x) C_t(s) + c_sin[t] S_t(x) S_t(s)``, n outer, m inner."""

    rho: float
    n: np.ndarray
    m: np.ndarray
    k: np.ndarray
    c_cos: np.ndarray
    c_sin: np.ndarray

    def basis(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Cosine and sine basis values, each of shape (n_modes, n_points)."""
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        r = np.hypot(x, y)
        phi = np.arctan2(y, x)
        ur, inv = np.unique(r, return_inverse=True)
        C = np.empty((self.n.size, r.size))
        S = np.empty_like(C)
        for n in np.unique(self.n):
            rows = np.nonzero(self.n == n)[0]
            arg = np.outer(self.k[rows], ur)
            J = bessel_j_orders([int(n)], np.minimum(arg, 1000.0))[0].reshape(arg.shape)[:, inv]
            C[rows] = J * np.cos(n * phi)[None, :]
            S[rows] = J * np.sin(n * phi)[None, :]
        return C, S

    def combine(self, Cx, Sx, a_cos, a_sin) -> np.ndarray:
        """``sum_t c_cos a_cos C_t(x) + c_sin a_sin S_t(x)`` in fixed mode order."""
        return (self.c_cos * a_cos) @ Cx + (self.c_sin * a_sin) @ Sx

    def scaled(self, f_cos: np.ndarray, f_sin: np.ndarray) -> "ModalSeries":
        return ModalSeries(self.rho, self.n, self.m, self.k, self.c_cos * f_cos, self.c_sin * f_sin)


@dataclass(frozen=True, eq=False)
class KernelFn:
    kind: str
    func: Callable | None = None
    spec: DiskSpec | None = None
    trunc: SeriesTruncation | None = None
    modes: ModalSeries | None = None
    parts: tuple | None = None
    quad: QuadSpec | None = None
    singular: bool = False
    laplacian: Callable | None = None
    meta: dict = field(default_factory=dict)

    @property
    def rho(self) -> float | None:
        return self.spec.rho if self.spec else None

    def xy(self, x, y, sx, sy) -> np.ndarray:
        """Vectorized evaluation on Cartesian (field, source) pairs."""
        x, y, sx, sy = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, sx, sy)))
        shape = x.shape
        x, y, sx, sy = (a.ravel() for a in (x, y, sx, sy))
        if self.func is not None:
            out = self.func(x, y, sx, sy)
        elif self.modes is not None:
            out = _modal_pairs(self.modes, x, y, sx, sy)
        elif self.parts is not None:
            out = _composite_pairs(self, x, y, sx, sy)
        else:
            raise ValueError(f"kernel {self.kind} has no evaluator")
        return np.asarray(out, dtype=float).reshape(shape)

    def polar(self, r, phi, rs, phis) -> np.ndarray:
        r, phi, rs, phis = (np.asarray(a, dtype=float) for a in (r, phi, rs, phis))
        return self.xy(r * np.cos(phi), r * np.sin(phi), rs * np.cos(phis), rs * np.sin(phis))

    def __call__(self, field_pt, source_pt) -> float:
        (r, phi), (rs, phis) = field_pt, source_pt
        if self.singular and math.isclose(r * math.cos(phi), rs * math.cos(phis), abs_tol=1e-15) and math.isclose(
            r * math.sin(phi), rs * math.sin(phis), abs_tol=1e-15
        ):
            raise KernelSingularity("kernel singularity: coincident field and source points")
        return float(self.polar(r, phi, rs, phis))

    def describe(self) -> dict:
        d = {"kind": self.kind}
        if self.spec:
            d["spec"] = self.spec.to_dict()
        if self.trunc:
            d["truncation"] = self.trunc.to_dict()
        if self.quad:
            d["quadrature"] = self.quad.to_dict()
            d["jacobian"] = self.quad.jacobian
        if self.parts:
            d["outer"] = self.parts[0].describe()
            d["inner"] = self.parts[1].describe()
        d.update(self.meta)
        return d


def _modal_pairs(ms: ModalSeries, x, y, sx, sy) -> np.ndarray:
    def chunk(a, b):
        Cx, Sx = ms.basis(x[a:b], y[a:b])
        Cs, Ss = ms.basis(sx[a:b], sy[a:b])
        return np.einsum("t,tp->p", ms.c_cos, Cx * Cs) + np.einsum("t,tp->p", ms.c_sin, Sx * Ss)

    return np.concatenate(map_chunks(chunk, x.size, _CHUNK)) if x.size else np.zeros(0)


# ---------------------------------------------------------------- heat model


def g1_poisson_disk(spec: DiskSpec) -> KernelFn:
    """Dirichlet Green's function of the Laplacian on the disk of radius rho."""
    rho = spec.rho
    rho2 = rho * rho

    def func(x, y, sx, sy):
        # |s|^2 (r^2 |s|^2 - 2 rho^2 x.s + rho^4) = |(|s|^2 - rho^2) x + rho^2 (x - s)|^2
        dx, dy = x - sx, y - sy
        d2 = dx * dx + dy * dy
        ss = sx * sx + sy * sy
        e = ss - rho2
        nx, ny = e * x + rho2 * dx, e * y + rho2 * dy
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(ss > 0, (nx * nx + ny * ny) / (ss * rho2 * d2), rho2 / d2)
            return -np.log(ratio) / FOUR_PI

    return KernelFn("poisson_disk", func=func, spec=spec, singular=True)


def eigen_norm_sq(n: int, mu: float, rho: float) -> float:
    """Squared L2 norm of J_n(mu r / rho) cos(n phi) over the disk."""
    return 0.5 * math.pi * rho * rho * (2.0 if n == 0 else 1.0) * bessel_j_prime(n, mu) ** 2


def _eigen_modes(spec: DiskSpec, trunc: SeriesTruncation):
    mu = bessel_zero_table(trunc.n_max, trunc.m_max)
    ns, ms, ks, norms = [], [], [], []
    for n in range(trunc.n_max + 1):
        for m in range(1, trunc.m_max + 1):
            z = float(mu[n, m - 1])
            ns.append(n)
            ms.append(m)
            ks.append(z / spec.rho)
            norms.append(eigen_norm_sq(n, z, spec.rho))
    return np.array(ns), np.array(ms), np.array(ks), np.array(norms)


def g2_helmholtz_disk(spec: DiskSpec, trunc: SeriesTruncation = SeriesTruncation()) -> KernelFn:
    """Truncated eigen-series for (-alpha^2 Lap + 2 alpha beta) v = f, v = 0 on the boundary."""
    n, m, k, norms = _eigen_modes(spec, trunc)
    a, b = spec.alpha, spec.beta
    c = 1.0 / (a * a * (k * k + 2.0 * b / a) * norms)
    c_sin = np.where(n > 0, c, 0.0)
    return KernelFn("helmholtz_disk", spec=spec, trunc=trunc, modes=ModalSeries(spec.rho, n, m, k, c, c_sin))


def heat_R_multipliers(spec: DiskSpec, trunc: SeriesTruncation) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of R = -alpha Lap + beta A* + beta Id on cosine and sine modes."""
    n, m, k, _ = _eigen_modes(spec, trunc)
    lap = spec.alpha * k * k
    return lap + 2.0 * spec.beta, lap


def apply_R_heat_termwise(spec: DiskSpec, trunc: SeriesTruncation = SeriesTruncation()) -> KernelFn:
    """R applied to the first variable of G2, mode by mode.

    ``Lap w = -(mu/rho)^2 w``; A* fixes cosine modes and negates sine modes.
    """
    g2 = g2_helmholtz_disk(spec, trunc)
    f_cos, f_sin = heat_R_multipliers(spec, trunc)
    return KernelFn("R_helmholtz_disk", spec=spec, trunc=trunc, modes=g2.modes.scaled(f_cos, f_sin))


def g3_compose(outer: KernelFn, inner: KernelFn, spec: DiskSpec, quad: QuadSpec = QuadSpec()) -> KernelFn:
    """``G(x, s) = int_B outer(x, s') inner(s', s) ds'`` by quadrature."""
    kind = f"compose({outer.kind},{inner.kind})"
    return KernelFn(kind, spec=spec, trunc=outer.trunc or inner.trunc, parts=(outer, inner), quad=quad)


def g3_heat_disk(spec: DiskSpec, trunc: SeriesTruncation = SeriesTruncation(), quad: QuadSpec = QuadSpec()) -> KernelFn:
    return g3_compose(g2_helmholtz_disk(spec, trunc), g1_poisson_disk(spec), spec, quad)


def g4_heat_disk(spec: DiskSpec, trunc: SeriesTruncation = SeriesTruncation(), quad: QuadSpec = QuadSpec()) -> KernelFn:
    """Green's function of alpha Lap u + beta (A* - Id) u = h, u = 0 on the boundary."""
    return g3_compose(apply_R_heat_termwise(spec, trunc), g1_poisson_disk(spec), spec, quad)


def measure_weight(quad: QuadSpec, x, y) -> np.ndarray:
    """Factor turning the area element into the composition's measure."""
    if quad.jacobian:
        return np.ones_like(np.asarray(x, dtype=float))
    return 1.0 / np.hypot(x, y)


def _inner_mode_integrals(comp: KernelFn, sx, sy):
    """``int B_t(s') inner(s', s) dmu(s')`` for each source point, local rule about s."""
    outer, inner = comp.parts
    q, rho = comp.quad, comp.spec.rho
    ms = outer.modes
    Ic = np.empty((ms.n.size, sx.size))
    Is = np.empty_like(Ic)
    for i in range(sx.size):
        nx, ny, w = local_nodes(sx[i : i + 1], sy[i : i + 1], rho, q.local_t, q.local_theta)
        nx, ny, w = nx[0], ny[0], w[0]
        vals = inner.xy(nx, ny, sx[i], sy[i]) * w * measure_weight(q, nx, ny)
        C, S = ms.basis(nx, ny)
        Ic[:, i] = C @ vals
        Is[:, i] = S @ vals
    return Ic, Is


def _composite_pairs(comp: KernelFn, x, y, sx, sy) -> np.ndarray:
    outer, inner = comp.parts
    q, rho = comp.quad, comp.spec.rho
    out = np.empty(x.size)
    if outer.modes is not None:
        pts = np.stack([sx, sy], axis=1)
        uniq, inv = np.unique(pts, axis=0, return_inverse=True)
        inv = inv.ravel()
        Ic, Is = _inner_mode_integrals(comp, uniq[:, 0], uniq[:, 1])
        Cx, Sx = outer.modes.basis(x, y)
        ms = outer.modes
        out = np.einsum("t,tp->p", ms.c_cos, Cx * Ic[:, inv]) + np.einsum("t,tp->p", ms.c_sin, Sx * Is[:, inv])
        return out
    nx, ny, w = disk_nodes(rho, q.n_r, q.n_phi)
    w = w * measure_weight(q, nx, ny)
    for i in range(x.size):
        out[i] = np.sum(outer.xy(x[i], y[i], nx, ny) * inner.xy(nx, ny, sx[i], sy[i]) * w)
    return out


# --------------------------------------------------------- biharmonic model


def biharm_family(mu: float, nu: float) -> KernelFn:
    """``(1/8pi) d^2 (mu + ln d) + nu/8pi`` with d = |eta - xi|."""

    def func(x, y, sx, sy):
        d = np.hypot(x - sx, y - sy)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (d * d * (mu + np.log(d)) + nu) / (8.0 * math.pi)

    def lap(x, y, sx, sy):
        d = np.hypot(x - sx, y - sy)
        return (1.0 + mu + np.log(d)) / (2.0 * math.pi)

    return KernelFn("biharm_family", func=func, singular=True, laplacian=lap, meta={"mu": mu, "nu": nu})


def biharm_g1() -> KernelFn:
    """Fundamental solution ``(1/8pi) d^2 ln d`` of the bi-Laplacian."""
    k = biharm_family(0.0, 0.0)
    return KernelFn("biharm_fundamental", func=k.func, singular=True, laplacian=k.laplacian, meta={"mu": 0.0, "nu": 0.0})


def biharm_navier_g3(rho: float) -> KernelFn:
    k = biharm_family(math.log(rho) - 1.0, rho * rho)
    return KernelFn("biharm_navier", func=k.func, singular=True, laplacian=k.laplacian, meta=dict(k.meta, rho=rho))


def biharm_apply_R(spec: DiskSpec, base: KernelFn) -> KernelFn:
    """``-alpha Lap G(eta, xi) + beta (Lap G)(A eta, xi)`` with A = diag(1, -1)."""
    if base.laplacian is None:
        raise ValueError(f"R cannot be applied analytically to a kernel of kind {base.kind!r}")
    lap = base.laplacian
    a, b = spec.alpha, spec.beta

    def func(x, y, sx, sy):
        return -a * lap(x, y, sx, sy) + b * lap(x, -y, sx, sy)

    return KernelFn(f"R_{base.kind}", func=func, spec=spec, singular=True, meta=dict(base.meta))


def printed_biharm_g2(spec: DiskSpec) -> KernelFn:
    """The closed form ``(beta - alpha)(ln d + 1)/(2 pi)``, valid where A eta = eta."""

    def func(x, y, sx, sy):
        return (spec.beta - spec.alpha) * (np.log(np.hypot(x - sx, y - sy)) + 1.0) / (2.0 * math.pi)

    return KernelFn("printed_biharm_g2", func=func, spec=spec, singular=True)


def printed_biharm_g4(rho: float) -> KernelFn:
    def func(x, y, sx, sy):
        return (math.log(rho) + np.log(np.hypot(x - sx, y - sy))) / (2.0 * math.pi)

    return KernelFn("printed_biharm_g4", func=func, singular=True)


def printed_biharm_g6(mu: float) -> KernelFn:
    def func(x, y, sx, sy):
        return (1.0 + mu + np.log(np.hypot(x - sx, y - sy))) / (2.0 * math.pi)

    return KernelFn("printed_biharm_g6", func=func, singular=True)


def biharm_discrepancy(spec: DiskSpec, base: KernelFn, printed: KernelFn, points) -> dict:
    """Compare the faithful R-applied kernel with a printed closed form.

    ``points`` is a sequence of Cartesian (eta, xi) pairs.  Pairs with
    eta on the fold axis and pairs off it are reported separately.
    """
    faithful = biharm_apply_R(spec, base)
    on, off = [], []
    for (ex, ey), (sx, sy) in points:
        diff = abs(float(faithful.xy(ex, ey, sx, sy)) - float(printed.xy(ex, ey, sx, sy)))
        (on if ey == 0.0 else off).append(diff)
    return {
        "kernel": faithful.kind,
        "printed": printed.kind,
        "on_axis_pairs": len(on),
        "on_axis_max_abs_diff": max(on, default=0.0),
        "off_axis_pairs": len(off),
        "off_axis_max_abs_diff": max(off, default=0.0),
    }


# ------------------------------------------------------------------- export


def grid_values(G: KernelFn, r: np.ndarray, phi: np.ndarray, source: tuple[float, float]) -> np.ndarray:
    """Kernel values at every (r_i, phi_k) for a fixed polar source point."""
    R, P = np.meshgrid(r, phi, indexing="ij")
    return G.polar(R, P, source[0], source[1])


def write_grid_csv(path, r: np.ndarray, phi: np.ndarray, values: np.ndarray) -> None:
    """Header ``r,phi,value``; rows r-major then phi; 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write("r,phi,value\n")
        for i, ri in enumerate(r):
            for k, pk in enumerate(phi):
                fh.write(f"{ri:.17g},{pk:.17g},{values[i, k]:.17g}\n")
