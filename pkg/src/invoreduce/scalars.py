"""Exact scalars: the rationals and cyclotomic fields Q(zeta_m).

Rationals are plain :class:`fractions.Fraction` values.  An element of
Q(zeta_m) is a :class:`Cyc`, stored as the coefficient vector of its
representative polynomial of degree < phi(m) in ``z = zeta_m``.

Rationals embed in every cyclotomic field, so ``Cyc`` arithmetic accepts
``int`` and ``Fraction`` operands.  Two ``Cyc`` values with different
conductors are never coerced into a common field.
"""
from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Sequence, Union

Scalar = Union[int, Fraction, "Cyc"]


class ScalarFieldError(ValueError):
    pass


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_divmod(a, b):
    """Polynomial long division over a field; ``b`` must be nonzero."""
    a = _poly_trim(a)
    b = _poly_trim(b)
    if not b:
        raise ZeroDivisionError("division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = [Fraction(x) for x in a]
    lead = Fraction(b[-1])
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] / lead
        q[shift] = f
        for i, y in enumerate(b):
            r[shift + i] -= f * y
        r = _poly_trim(r)
    return _poly_trim(q), r


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients (low degree first) of the m-th cyclotomic polynomial."""
    if m < 1:
        raise ValueError("conductor must be a positive integer")
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num, rem = _poly_divmod(num, cyclotomic_poly(d))
            assert not rem
    return tuple(int(x) for x in num)


def totient(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


def _reduce_mod(coeffs, m):
    phi = cyclotomic_poly(m)
    deg = len(phi) - 1
    c = [Fraction(x) for x in coeffs]
    # Phi_m is monic, so reduction is exact over the integers
    for top in range(len(c) - 1, deg - 1, -1):
        f = c[top]
        if f:
            shift = top - deg
            for i, y in enumerate(phi):
                c[shift + i] -= f * y
    c = c[:deg] + [Fraction(0)] * (deg - len(c))
    return tuple(c)


class Cyc:
    """Element of Q(zeta_m), immutable."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs: Sequence = (0,)):
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "coeffs", _reduce_mod(coeffs, self.m))

    def __setattr__(self, name, value):
        raise AttributeError("Cyc is immutable")

    @classmethod
    def zeta(cls, m: int, e: int = 1) -> "Cyc":
        e %= m
        return cls(m, [0] * e + [1])

    @classmethod
    def rational(cls, m: int, x) -> "Cyc":
        return cls(m, [Fraction(x)])

    def _coerce(self, other) -> "Cyc":
        if isinstance(other, Cyc):
            if other.m != self.m:
                raise ScalarFieldError("incompatible scalar fields")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyc(self.m, [other])
        return NotImplemented

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyc(self.m, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyc(self.m, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyc(self.m, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyc(self.m, _poly_mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "Cyc":
        a = _poly_trim(self.coeffs)
        if not a:
            raise ZeroDivisionError("division by zero")
        # extended Euclid: s*a + t*Phi = g, g a nonzero constant
        r0, r1 = list(cyclotomic_poly(self.m)), a
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            qs = _poly_mul(q, s1)
            n = max(len(s0), len(qs))
            s_new = [(s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0) for i in range(n)]
            r0, r1 = r1, r
            s0, s1 = s1, _poly_trim(s_new)
        g = Fraction(r1[0])
        return Cyc(self.m, [x / g for x in s1])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Cyc(self.m, [1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Cyc):
            if other.m != self.m:
                # equal only if both are the same rational number
                return self.is_rational() and other.is_rational() and self.coeffs[0] == other.coeffs[0]
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.m, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __complex__(self):
        return to_complex(self)

    def __repr__(self):
        return f"Cyc({self.m}, {format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, Cyc)) and not isinstance(x, bool)


def conductor_of(x) -> int:
    return x.m if isinstance(x, Cyc) else 1


def simplify(x):
    """Lower a Cyc whose value is rational to a Fraction; normalize ints."""
    if isinstance(x, Cyc):
        return Fraction(x.coeffs[0]) if x.is_rational() else x
    return Fraction(x)


def cyc_mul(a: Cyc, b: Cyc) -> Cyc:
    if a.m != b.m:
        raise ScalarFieldError("incompatible scalar fields")
    return a * b


def cyc_inv(a: Cyc) -> Cyc:
    return a.inverse()


def inv(x):
    if isinstance(x, Cyc):
        return x.inverse()
    if x == 0:
        raise ZeroDivisionError("division by zero")
    return Fraction(1) / Fraction(x)


def to_complex(a) -> complex:
    """Evaluate at zeta_m = exp(2*pi*i/m) in double precision."""
    if not isinstance(a, Cyc):
        return complex(float(a), 0.0)
    acc = 0j
    for k, c in enumerate(a.coeffs):
        if c:
            acc += float(c) * cmath.exp(2j * math.pi * k / a.m)
    return acc


def _format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Textual syntax: ``p/q`` for rationals, polynomials in ``z`` otherwise."""
    if not isinstance(x, Cyc):
        return _format_rational(Fraction(x))
    if x.is_rational():
        return _format_rational(x.coeffs[0])
    parts = []
    for k, c in enumerate(x.coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
        if k == 0:
            s = _format_rational(abs(c))
        elif abs(c) == 1:
            s = mono
        else:
            s = f"{_format_rational(abs(c))}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, s))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, s in parts[1:]:
        out += f" {sign} {s}"
    return out


def is_rational_value(x) -> bool:
    return isinstance(x, (int, Fraction, _RationalABC)) or (isinstance(x, Cyc) and x.is_rational())



_TERM = re.compile(r"([+-])(?:(\d+(?:/\d+)?)(?:\*(z(?:\^\d+)?))?|(z(?:\^\d+)?))")


def parse_scalar(text: str, conductor: int = 1):
    """Inverse of :func:`format_scalar`, e.g. ``"3/2 + 1/2*z"`` with conductor 4."""
    s = text.replace(" ", "")
    if s and s[0] not in "+-":
        s = "+" + s
    coeffs: dict[int, Fraction] = {}
    pos = 0
    while pos < len(s):
        mt = _TERM.match(s, pos)
        if not mt:
            raise ValueError(f"malformed scalar {text!r}")
        pos = mt.end()
        sign, num, mono1, mono2 = mt.groups()
        mono = mono1 or mono2
        k = 0 if not mono else (1 if mono == "z" else int(mono[2:]))
        if k and conductor == 1:
            raise ValueError("z requires a conductor > 1")
        c = Fraction(num) if num else Fraction(1)
        coeffs[k] = coeffs.get(k, Fraction(0)) + (c if sign == "+" else -c)
    if not coeffs:
        raise ValueError("empty scalar")
    if conductor == 1:
        return coeffs.get(0, Fraction(0))
    top = max(coeffs)
    return simplify(Cyc(conductor, [coeffs.get(k, 0) for k in range(top + 1)]))
