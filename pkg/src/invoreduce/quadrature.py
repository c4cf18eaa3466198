"""Quadrature rules on the disk of radius rho centered at the origin."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadSpec:
    """Tensor rule (Gauss-Legendre in r, trapezoid in phi) plus the local polar rule.

    ``local_t`` x ``local_theta`` nodes are used in polar coordinates centered
    at a kernel singularity.  ``jacobian=False`` drops the area factor r in
    kernel compositions, i.e. integrates with d(phi) d(r) literally.
    """

    n_r: int = 64
    n_phi: int = 256
    local_t: int = 24
    local_theta: int = 128
    jacobian: bool = True

    def to_dict(self) -> dict:
        return {
            "n_r": self.n_r,
            "n_phi": self.n_phi,
            "local_t": self.local_t,
            "local_theta": self.local_theta,
            "jacobian": self.jacobian,
        }


@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def disk_nodes(rho: float, n_r: int, n_phi: int):
    """Tensor nodes ``(x, y, w)`` with area weights, flattened r-major."""
    u, wu = gauss_legendre(n_r)
    r = rho * u
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    R, P = np.meshgrid(r, phi, indexing="ij")
    W = (rho * wu * r)[:, None] * np.full(n_phi, 2.0 * np.pi / n_phi)[None, :]
    return (R * np.cos(P)).ravel(), (R * np.sin(P)).ravel(), W.ravel()


def local_nodes(cx: np.ndarray, cy: np.ndarray, rho: float, n_t: int, n_theta: int):
    """Polar rule about each center (cx, cy) covering the disk.

    Along each ray the distance ``t = T(theta) u^2`` is used, so the area
    element ``t dt`` times a logarithmic singularity at the center stays
    smooth in ``u``.  Returns arrays of shape (n_centers, n_theta * n_t).
    """
    cx = np.asarray(cx, dtype=float).ravel()[:, None]
    cy = np.asarray(cy, dtype=float).ravel()[:, None]
    theta = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    ex, ey = np.cos(theta)[None, :], np.sin(theta)[None, :]
    b = cx * ex + cy * ey
    c = np.maximum(rho * rho - cx * cx - cy * cy, 0.0)
    T = -b + np.sqrt(b * b + c)  # (P, n_theta)
    u, wu = gauss_legendre(n_t)
    t = T[:, :, None] * (u * u)[None, None, :]
    w = t * (2.0 * T[:, :, None] * u[None, None, :]) * wu[None, None, :] * (2.0 * np.pi / n_theta)
    x = cx[:, :, None] + t * ex[:, :, None]
    y = cy[:, :, None] + t * ey[:, :, None]
    P = cx.shape[0]
    return x.reshape(P, -1), y.reshape(P, -1), w.reshape(P, -1)


def thread_count() -> int:
    n = int(os.environ.get("INVOREDUCE_THREADS", "0") or 0)
    return n if n > 0 else (os.cpu_count() or 1)


def map_chunks(fn, n: int, chunk: int) -> list:
    """Apply ``fn(start, stop)`` over fixed-size chunks; results in chunk order.

    Chunk boundaries do not depend on the thread count, so results are
    bit-identical however many threads run.
    """
    bounds = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    threads = min(thread_count(), len(bounds))
    if threads <= 1:
        return [fn(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda ab: fn(*ab), bounds))
