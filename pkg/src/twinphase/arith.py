"""Fixed-point reals for phase arithmetic modulo one.

A :class:`FixedReal` stores ``integer_part + frac_mantissa / 2**FRAC_BITS``
with Python integers, so products such as ``alpha * m`` for ``m`` up to
2**96 reduce modulo one exactly.  Phases are handed to numpy as the top
128 bits split into two ``uint64`` words; multiplying those words by a
small integer with wrap-around arithmetic gives ``frac(k * t)`` to about
2**-62 without touching floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy import integrate

from .errors import DomainError, PrecisionError

FRAC_BITS = 192
ONE = 1 << FRAC_BITS
MASK = ONE - 1
MAX_MULTIPLIER = 1 << 96
_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FixedReal:
    """``integer_part + frac_mantissa * 2**-FRAC_BITS``.

    ``error_ulps`` bounds the distance to the real number this value stands
    for, in units of 2**-FRAC_BITS (0 when the value is exact).
    ``exact_value`` keeps the rational an approximation came from, if any.
    """

    integer_part: int
    frac_mantissa: int
    error_ulps: int = 0
    exact_value: Fraction | None = None

    def __post_init__(self):
        if not 0 <= self.frac_mantissa < ONE:
            raise DomainError("frac_mantissa must lie in [0, 2**FRAC_BITS)")
        if self.error_ulps < 0:
            raise DomainError("error_ulps must be non-negative")

    @classmethod
    def from_scaled(cls, scaled: int, error_ulps: int = 0, exact_value=None) -> "FixedReal":
        return cls(scaled >> FRAC_BITS, scaled & MASK, error_ulps, exact_value)

    @classmethod
    def from_int(cls, n: int) -> "FixedReal":
        return cls(int(n), 0)

    @classmethod
    def from_fraction(cls, value) -> "FixedReal":
        """Round a rational down onto the grid; dyadic inputs are exact."""
        value = Fraction(value)
        num = value.numerator << FRAC_BITS
        scaled, rem = divmod(num, value.denominator)
        return cls.from_scaled(scaled, 0 if rem == 0 else 1, value)

    @classmethod
    def from_hex(cls, mantissa: str, bits: int) -> "FixedReal":
        """Value ``int(mantissa, 16) / 2**bits``."""
        raw = int(mantissa, 16)
        if bits < 0:
            raise DomainError("bits must be non-negative")
        return cls.from_fraction(Fraction(raw, 1 << bits))

    @property
    def scaled(self) -> int:
        return (self.integer_part << FRAC_BITS) + self.frac_mantissa

    @property
    def is_exact(self) -> bool:
        return self.error_ulps == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.scaled, ONE)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __add__(self, other):
        if isinstance(other, int):
            other = FixedReal.from_int(other)
        if not isinstance(other, FixedReal):
            return NotImplemented
        exact = None
        if self.exact_value is not None and other.exact_value is not None:
            exact = self.exact_value + other.exact_value
        return FixedReal.from_scaled(self.scaled + other.scaled,
                                     self.error_ulps + other.error_ulps, exact)

    __radd__ = __add__

    def __neg__(self):
        exact = -self.exact_value if self.exact_value is not None else None
        return FixedReal.from_scaled(-self.scaled, self.error_ulps, exact)

    def __sub__(self, other):
        if isinstance(other, int):
            other = FixedReal.from_int(other)
        return self + (-other)

    def __truediv__(self, k: int):
        if not isinstance(k, int) or k <= 0:
            return NotImplemented
        q, r = divmod(self.scaled, k)
        err = -(-self.error_ulps // k) + (1 if r else 0)
        exact = self.exact_value / k if self.exact_value is not None else None
        return FixedReal.from_scaled(q, err, exact)

    def frac(self) -> "UnitFrac":
        return UnitFrac(self.frac_mantissa)


@dataclass(frozen=True, order=True)
class UnitFrac:
    """A point ``value * 2**-FRAC_BITS`` of the unit circle [0, 1)."""

    value: int

    def __post_init__(self):
        if not 0 <= self.value < ONE:
            raise DomainError("UnitFrac value must lie in [0, 2**FRAC_BITS)")

    def __add__(self, other: "UnitFrac") -> "UnitFrac":
        return UnitFrac((self.value + other.value) & MASK)

    def __neg__(self) -> "UnitFrac":
        return UnitFrac((-self.value) & MASK)

    def __float__(self) -> float:
        return math.ldexp(float(self.value), -FRAC_BITS)

    def to_fraction(self) -> Fraction:
        return Fraction(self.value, ONE)

    def words(self) -> tuple[int, int]:
        return self.value >> (FRAC_BITS - 64), (self.value >> (FRAC_BITS - 128)) & _MASK64


def fixed_from_sqrt(d: int) -> FixedReal:
    """sqrt(d) rounded down to FRAC_BITS fractional bits (exact for squares)."""
    if d < 1:
        raise DomainError("fixed_from_sqrt needs d >= 1")
    target = d << (2 * FRAC_BITS)
    # math.isqrt is the integer Newton iteration, floor-exact.
    root = math.isqrt(target)
    exact = root * root == target
    return FixedReal.from_scaled(root, 0 if exact else 1,
                                 Fraction(root >> FRAC_BITS) if exact else None)


def frac_mul(alpha: FixedReal, m: int) -> UnitFrac:
    """frac(alpha * m), error at most (m + 1) * alpha.error_ulps ulps."""
    m = int(m)
    if m < 0:
        raise DomainError("frac_mul needs m >= 0")
    if m >= MAX_MULTIPLIER:
        raise DomainError(f"multiplier {m} exceeds the supported width 2**96")
    return UnitFrac((alpha.frac_mantissa * m) & MASK)


def frac_quadratic(alpha: FixedReal, beta: FixedReal | None, ns: Iterable[int]) -> list[int]:
    """Raw mantissas of frac(alpha * n**2 + beta) for each n."""
    a = alpha.frac_mantissa
    b = beta.frac_mantissa if beta is not None else 0
    out = []
    for n in ns:
        n = int(n)
        m = n * n
        if m >= MAX_MULTIPLIER:
            raise DomainError(f"n**2 = {m} exceeds the supported width 2**96")
        out.append((a * m + b) & MASK)
    return out


def dist_nearest_int(t: UnitFrac) -> float:
    """min(t, 1 - t) for t in [0, 1)."""
    v = t.value
    return math.ldexp(float(min(v, ONE - v)), -FRAC_BITS)


def to_words(values: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    """Split raw mantissas into (top 64 bits, next 64 bits) uint64 arrays."""
    values = list(values)
    hi = np.fromiter((v >> (FRAC_BITS - 64) for v in values), dtype=np.uint64, count=len(values))
    lo = np.fromiter(((v >> (FRAC_BITS - 128)) & _MASK64 for v in values),
                     dtype=np.uint64, count=len(values))
    return hi, lo


def scale_words(hi: np.ndarray, lo: np.ndarray, k) -> np.ndarray:
    """Top 64 bits of frac(k * t) for phases t given as words.

    ``k`` is a scalar or an array broadcastable against the words, with
    0 <= k < 2**32.  The result is within 2 units of 2**-64 of the truth.
    """
    kk = np.asarray(k, dtype=np.int64)
    if kk.size and (kk.min() < 0 or kk.max() >= (1 << 32)):
        raise DomainError("word scaling supports 0 <= k < 2**32")
    kk = kk.astype(np.uint64)
    with np.errstate(over="ignore"):
        return hi * kk + ((lo >> np.uint64(32)) * kk >> np.uint64(32))


def alpha_words(alpha: FixedReal) -> tuple[np.ndarray, np.ndarray]:
    """The fractional part of alpha as a pair of one-element word arrays."""
    w_hi, w_lo = UnitFrac(alpha.frac_mantissa).words()
    return np.array([w_hi], dtype=np.uint64), np.array([w_lo], dtype=np.uint64)


def words_distance(w: np.ndarray) -> np.ndarray:
    """||t|| for phases given as top-64-bit words."""
    return np.abs(np.ldexp(np.asarray(w, dtype=np.uint64).view(np.int64).astype(np.float64), -64))


def words_to_turns(w: np.ndarray) -> np.ndarray:
    """Phase in turns, centred in [-1/2, 1/2)."""
    return np.ldexp(w.view(np.int64).astype(np.float64), -64)


def expo(w: np.ndarray) -> np.ndarray:
    """e(t) = exp(2 pi i t) for phases given as top-64-bit words.

    Converting to float costs at most 2**-53 turns, inside the 2**-50
    per-term budget the rest of the package assumes.
    """
    ang = _TWO_PI * words_to_turns(np.asarray(w, dtype=np.uint64))
    return np.cos(ang) + 1j * np.sin(ang)


def e(t: float) -> complex:
    return complex(math.cos(_TWO_PI * t), math.sin(_TWO_PI * t))


def log_integral(x: float) -> float:
    """Li(x) = integral from 2 to x of dt / log t, by adaptive quadrature.

    Integrated in u = log t, split into unit-length pieces so each piece is
    smooth and well scaled.
    """
    if not x >= 2:
        raise DomainError("log_integral needs x >= 2")
    a, b = math.log(2.0), math.log(x)
    if b == a:
        return 0.0
    edges = np.linspace(a, b, max(2, int(math.ceil(b - a)) + 1))
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad(lambda u: math.exp(u) / u, lo, hi,
                                  epsabs=0.0, epsrel=1e-13, limit=200)
        if not err <= 1e-11 * abs(val):
            raise PrecisionError(f"quadrature error estimate {err} too large on [{lo}, {hi}]")
        pieces.append(val)
    return math.fsum(pieces)
