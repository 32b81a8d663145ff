"""Continued-fraction convergents of a fixed-point real."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .arith import FRAC_BITS, ONE, FixedReal
from .errors import DomainError, PrecisionError, WindowEmptyError


@dataclass(frozen=True)
class Convergent:
    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise DomainError("convergent denominator must be positive")
        if math.gcd(self.a, self.q) != 1:
            raise DomainError(f"{self.a}/{self.q} is not in lowest terms")

    def __str__(self):
        return f"{self.a}/{self.q}"


class Convergents(list):
    """A list of :class:`Convergent` with a ``truncated`` flag.

    ``truncated`` is set when alpha is rational and its expansion ran out
    before the requested count.
    """

    def __init__(self, items=(), truncated=False):
        super().__init__(items)
        self.truncated = truncated


def _digits(num: int, den: int) -> Iterator[int]:
    # Euclid on num/den; terminates for every rational input.
    while den:
        a, r = divmod(num, den)
        yield a
        num, den = den, r


def _interval_digits(lo: Fraction, hi: Fraction) -> Iterator[int]:
    """Partial quotients shared by every real in [lo, hi]."""
    ln, ld = lo.numerator, lo.denominator
    hn, hd = hi.numerator, hi.denominator
    while ld and hd:
        a_lo, r_lo = divmod(ln, ld)
        a_hi, r_hi = divmod(hn, hd)
        if a_lo != a_hi or r_lo == 0 or r_hi == 0:
            return
        yield a_lo
        # x -> 1/(x - a) reverses the order of the endpoints.
        ln, ld, hn, hd = hd, r_hi, ld, r_lo


def satisfies_dirichlet(alpha: FixedReal, conv: Convergent) -> bool:
    """Exact check of |alpha - a/q| < 1/q**2, accounting for alpha's error."""
    a, q = conv.a, conv.q
    if alpha.exact_value is not None:
        return abs(alpha.exact_value - Fraction(a, q)) * q * q < 1
    gap = abs(alpha.scaled * q - a * ONE) + alpha.error_ulps * q
    return gap * q < ONE


def iter_convergents(alpha: FixedReal) -> Iterator[Convergent]:
    """Yield the convergents of alpha in order.

    A convergent whose denominator repeats the previous one (first partial
    quotient equal to 1) replaces it, so denominators strictly increase.
    Raises PrecisionError once the fixed-point value no longer pins down
    the next partial quotient or once q**2 reaches 2**(FRAC_BITS - 8).
    """
    if alpha.exact_value is not None:
        digits = _digits(alpha.exact_value.numerator, alpha.exact_value.denominator)
        exact = True
    elif alpha.is_exact:
        digits = _digits(alpha.scaled, ONE)
        exact = True
    else:
        err = alpha.error_ulps
        digits = _interval_digits(Fraction(alpha.scaled - err, ONE), Fraction(alpha.scaled + err, ONE))
        exact = False
    guard = 1 << (FRAC_BITS - 8)
    p_prev, p = 1, None
    q_prev, q = 0, None
    first = None
    for digit in digits:
        if p is None:
            p, q = digit, 1
        else:
            p, p_prev = digit * p + p_prev, p
            q, q_prev = digit * q + q_prev, q
        if q * q >= guard:
            raise PrecisionError(f"denominator {q} exceeds the precision guard")
        conv = Convergent(p, q)
        if not satisfies_dirichlet(alpha, conv):
            raise PrecisionError(f"{conv} cannot be certified at {FRAC_BITS} bits")
        if q_prev == 0:
            first = conv
            continue
        if first is not None:
            if first.q < q:
                yield first
            first = None
        yield conv
    if first is not None:
        yield first
    if not exact:
        raise PrecisionError("fixed-point precision exhausted")


def convergents(alpha: FixedReal, count: int) -> Convergents:
    """The first ``count`` convergents of alpha.

    >>> [str(c) for c in convergents(fixed_from_sqrt(2), 5)]
    ['1/1', '3/2', '7/5', '17/12', '41/29']
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    out = Convergents()
    for conv in iter_convergents(alpha):
        out.append(conv)
        if len(out) == count:
            return out
    out.truncated = True
    return out


def select_denominator(alpha: FixedReal, q_min: float, q_max: float) -> Convergent:
    """Convergent with the largest q in the open window (q_min, q_max)."""
    if not q_min < q_max:
        raise DomainError("select_denominator needs q_min < q_max")
    best = below = None
    for conv in iter_convergents(alpha):
        if conv.q >= q_max:
            if best is not None:
                return best
            raise WindowEmptyError(f"no convergent denominator in ({q_min}, {q_max})", below, conv)
        if conv.q > q_min:
            best = conv
        else:
            below = conv
    if best is not None:
        return best
    raise WindowEmptyError(f"no convergent denominator in ({q_min}, {q_max})", below, None)
