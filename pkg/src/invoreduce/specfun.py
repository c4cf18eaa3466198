"""Bessel functions of the first kind, their derivatives and positive zeros.

``bessel_j`` uses the ascending series for ``x <= 5`` and Miller's backward
recurrence, normalized by ``J_0 + 2 sum_k J_2k = 1``, above that.  Both
branches accept numpy arrays.
"""
from __future__ import annotations

import math

import numpy as np

SERIES_CUTOFF = 5.0
MAX_ORDER = 200
MAX_ARG = 1000.0
_BIG = 1e250
_SMALL = 1e-250


def _check(n, x):
    if not (0 <= n <= MAX_ORDER) or int(n) != n:
        raise ValueError(f"order {n} outside the validated range 0..{MAX_ORDER}")
    if np.any(x < 0) or np.any(x > MAX_ARG) or np.any(~np.isfinite(x)):
        raise ValueError(f"argument outside the validated range [0, {MAX_ARG}]")


def _series(n: int, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    if n == 0:
        out[~pos] = 1.0
    xp = x[pos]
    if xp.size == 0:
        return out
    half = 0.5 * xp
    term = np.exp(n * np.log(half) - math.lgamma(n + 1))
    q = half * half
    total = term.copy()
    # below the cutoff the largest term is under 10, so plain summation keeps
    # the absolute error near machine precision; 40 terms reach it
    for k in range(1, 41):
        term = -term * q / (k * (k + n))
        total += term
    out[pos] = total
    return out


def _start_order(nmax: int, x: float) -> int:
    # np.power, not **, so that the scalar and array paths agree exactly
    n0 = max(nmax, int(x)) + 20 + int(10.0 * np.power(x, 1.0 / 3.0))
    return n0 + (n0 % 2)


def _miller_scalar(orders: list[int], x: float) -> list[float]:
    want = {n: i for i, n in enumerate(orders)}
    out = [0.0] * len(orders)
    jp, jc, norm = 0.0, 1e-30, 0.0
    for k in range(_start_order(max(orders), x), 0, -1):
        if k in want:
            out[want[k]] = jc
        if k % 2 == 0:
            norm += 2.0 * jc
        jp, jc = jc, (2.0 * k / x) * jc - jp
        if abs(jc) > _BIG:
            jp, jc, norm = jp * _SMALL, jc * _SMALL, norm * _SMALL
            out = [v * _SMALL for v in out]
    if 0 in want:
        out[want[0]] = jc
    norm += jc
    return [v / norm for v in out]


def _miller(orders: list[int], x: np.ndarray) -> np.ndarray:
    """J_n(x) for every n in ``orders``, shape (len(orders), len(x)); x > 0.

    Each point starts the recurrence at its own order, so a value does not
    depend on the other points in the batch and matches the scalar path bit
    for bit.
    """
    if x.size == 1:
        return np.array(_miller_scalar(orders, float(x[0])))[:, None]
    want = {n: i for i, n in enumerate(orders)}
    out = np.zeros((len(orders), x.size))
    top = max(orders)
    start = np.maximum(top, x.astype(np.int64)) + 20 + (10.0 * np.power(x, 1.0 / 3.0)).astype(np.int64)
    start += start % 2
    jp = np.zeros_like(x)
    jc = np.zeros_like(x)
    norm = np.zeros_like(x)
    for k in range(int(start.max()), 0, -1):
        jc[start == k] = 1e-30
        if k in want:
            out[want[k]] = jc
        if k % 2 == 0:
            norm += 2.0 * jc
        jp, jc = jc, (2.0 * k / x) * jc - jp
        big = np.abs(jc) > _BIG
        if np.any(big):
            s = np.where(big, _SMALL, 1.0)
            jp *= s
            jc *= s
            norm *= s
            out *= s
    if 0 in want:
        out[want[0]] = jc
    norm += jc
    return out / norm


def bessel_j_orders(orders, x) -> np.ndarray:
    """Table of J_n(x): rows follow ``orders``, columns follow ``x`` (flattened)."""
    orders = [int(n) for n in orders]
    xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    for n in orders:
        _check(n, xa)
    out = np.empty((len(orders), xa.size))
    small = xa <= SERIES_CUTOFF
    if np.any(small):
        for i, n in enumerate(orders):
            out[i, small] = _series(n, xa[small])
    if np.any(~small):
        out[:, ~small] = _miller(orders, xa[~small])
    return out


def bessel_j(n: int, x):
    """J_n(x) for integer 0 <= n <= 200 and 0 <= x <= 1000."""
    xa = np.asarray(x, dtype=float)
    vals = bessel_j_orders([n], xa)[0]
    if xa.ndim == 0:
        return float(vals[0])
    return vals.reshape(xa.shape)


def bessel_j_prime(n: int, x):
    """J_n'(x) = (n/x) J_n(x) - J_{n+1}(x)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        if xa.ndim == 0 and xa == 0 and n == 1:
            return 0.5
        raise ValueError("derivative requires x > 0")
    tab = bessel_j_orders([n, n + 1], xa)
    vals = (n / xa.ravel()) * tab[0] - tab[1]
    if xa.ndim == 0:
        return float(vals[0])
    return vals.reshape(xa.shape)


def mcmahon_guess(n: int, m: int) -> float:
    beta = (m + 0.5 * n - 0.25) * math.pi
    mu = 4.0 * n * n
    return beta - (mu - 1) / (8 * beta) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * beta) ** 3)


class BesselZeroError(RuntimeError):
    pass


def _refine(n: int, a: float, b: float, guess: float) -> float:
    """Newton from ``guess`` inside the sign-change bracket [a, b], bisection fallback."""
    fa = bessel_j(n, a)
    x = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(50):
        f = bessel_j(n, x)
        if f == 0.0:
            return x
        if f * fa < 0:
            b = x
        else:
            a, fa = x, f
        step = f / bessel_j_prime(n, x)
        xn = x - step
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if abs(xn - x) <= 4e-16 * x:
            return xn
        x = xn
    if abs(bessel_j(n, x)) <= 1e-12 * (1 + x):
        return x
    raise BesselZeroError(f"zero of J_{n} did not converge in [{a}, {b}]")


_zero_cache: dict[int, list[float]] = {}


def _zeros(n: int, m: int) -> list[float]:
    """First m positive zeros of J_n, extending a per-order cache."""
    found = _zero_cache.setdefault(n, [])
    if len(found) >= m:
        return found[:m]
    # consecutive zeros are more than 3 apart, so a unit step never skips one
    if found:
        x = found[-1] + 1e-6
    else:
        x = float(n)
    f = bessel_j(n, x) if x > 0 else 1.0
    while len(found) < m:
        xs = x + np.arange(1, 65, dtype=float)
        fs = bessel_j(n, xs)
        prev_x, prev_f = x, f
        for xi, fi in zip(xs, fs):
            if prev_f * fi < 0:
                found.append(_refine(n, prev_x, float(xi), mcmahon_guess(n, len(found) + 1)))
                if len(found) == m:
                    break
            prev_x, prev_f = float(xi), float(fi)
        x, f = prev_x, prev_f
    return found[:m]


def bessel_zero(n: int, m: int) -> float:
    """The m-th positive zero of J_n (n <= 60, m <= 200)."""
    if not (0 <= n <= 60) or not (1 <= m <= 200):
        raise ValueError("bessel_zero supports 0 <= n <= 60 and 1 <= m <= 200")
    return _zeros(n, m)[m - 1]


def bessel_zero_table(n_max: int, m_max: int) -> np.ndarray:
    """Array ``mu[n, m-1]`` of zeros for n <= n_max, m <= m_max."""
    out = np.empty((n_max + 1, m_max))
    for n in range(n_max + 1):
        out[n] = _zeros(n, m_max)
    return out
