"""A periodic bump chi on (-delta, delta) with closed-form Fourier coefficients.

chi is ``h_scale`` times the indicator of [-delta2, delta2] convolved with
r copies of the uniform density on [-w/2, w/2], periodised with period 1.
The parameters are tied together so that chi vanishes outside
(-delta, delta), has mean ``delta`` and stays below ``h_scale < 1``:

    r = ceil(log x),  h_scale = 2r / (2r + 1),
    delta2 = delta (2r + 1) / (4r),  w = delta (2r - 1) / (2 r**2),

and its coefficients are

    c(k) = h_scale sin(2 pi k delta2) / (pi k) * (sin(pi k w) / (pi k w))**r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class BumpSpec:
    delta: float
    r: int
    h_scale: float
    delta2: float
    w: float
    K: float
    coefficients: np.ndarray = field(repr=False)

    @property
    def cutoff(self) -> int:
        """Largest integer k with k <= K."""
        return self.coefficients.size - 1

    @property
    def plateau(self) -> float:
        """Half-width of the interval on which chi equals h_scale."""
        return max(0.0, self.delta2 - self.r * self.w / 2)

    def c(self, k: int) -> float:
        k = abs(int(k))
        if k <= self.cutoff:
            return float(self.coefficients[k])
        return float(_coefficients(self, np.array([k]))[0])

    def tail_bound(self, cutoff: int | None = None) -> float:
        """Upper bound for sum over |k| > cutoff of |c(k)|.

        Uses |c(k)| <= h_scale / (pi k) * (pi k w)**-r and bounds the sum over
        k > N of k**-(r+1) by (N+1)**-(r+1) + (N+1)**-r / r.
        """
        n1 = (self.cutoff if cutoff is None else int(cutoff)) + 1
        r = self.r
        log_env = math.log(2 * self.h_scale / math.pi) - r * math.log(math.pi * self.w)
        log_sum = math.log(n1 ** -(r + 1) + n1 ** -r / r) if n1 < 1e15 else -r * math.log(n1)
        return math.exp(log_env + log_sum)

    def abs_coefficient_sum(self) -> float:
        """sum over 0 < |k| <= cutoff of |c(k)|."""
        return 2.0 * float(np.sum(np.abs(self.coefficients[1:])))

    def csv_rows(self):
        yield ("k", "c_k")
        for k, ck in enumerate(self.coefficients):
            yield (k, float(ck))


def _coefficients(spec, ks: np.ndarray) -> np.ndarray:
    ks = ks.astype(np.float64)
    out = np.empty_like(ks)
    zero = ks == 0
    out[zero] = spec.delta
    k = ks[~zero]
    box = np.sin(2 * math.pi * k * spec.delta2) / (math.pi * k)
    # np.sinc(y) = sin(pi y) / (pi y)
    out[~zero] = spec.h_scale * box * np.sinc(k * spec.w) ** spec.r
    return out


def build_bump(delta: float, x: float) -> BumpSpec:
    """Bump of half-width delta with smoothing order r = ceil(log x).

    K = log(x)**2 / delta; coefficients are tabulated for 0 <= k <= K.
    """
    if not 0 < delta < 0.25:
        raise DomainError("build_bump needs 0 < delta < 1/4")
    if not x >= 100:
        raise DomainError("build_bump needs x >= 100")
    lx = math.log(x)
    r = math.ceil(lx)
    h = 2 * r / (2 * r + 1)
    delta2 = delta * (2 * r + 1) / (4 * r)
    w = delta * (2 * r - 1) / (2 * r * r)
    K = lx * lx / delta
    stub = BumpSpec(delta, r, h, delta2, w, K, np.zeros(1))
    coeffs = _coefficients(stub, np.arange(int(math.floor(K)) + 1))
    return BumpSpec(delta, r, h, delta2, w, K, coeffs)


def _irwin_hall_cdf(s: np.ndarray, r: int) -> np.ndarray:
    """CDF of a sum of r independent U(0, 1) variables.

    Evaluated on the lower half and reflected, which keeps the alternating
    sum's terms of order one.
    """
    s = np.asarray(s, dtype=np.float64)
    flip = s > r / 2
    u = np.where(flip, r - s, s)
    u = np.clip(u, 0.0, r / 2)
    total = np.zeros_like(u)
    for j in range(r // 2 + 1):
        d = u - j
        term = math.comb(r, j) * np.where(d > 0, d, 0.0) ** r
        total += term if j % 2 == 0 else -term
    total /= math.factorial(r)
    out = np.where(flip, 1.0 - total, total)
    return np.clip(out, 0.0, 1.0)


def centred(t) -> np.ndarray:
    """Reduce t modulo 1 into [-1/2, 1/2)."""
    t = np.asarray(t, dtype=np.float64)
    return t - np.floor(t + 0.5)


def bump_eval_direct(spec: BumpSpec, t) -> np.ndarray | float:
    """chi(t) from the piecewise-polynomial form (t taken modulo 1)."""
    scalar = np.ndim(t) == 0
    u = np.abs(centred(t))
    out = np.zeros_like(u)
    inside = u < spec.delta
    if inside.any():
        half = spec.r * spec.w / 2
        ui = u[inside]
        upper = _irwin_hall_cdf((spec.delta2 - ui + half) / spec.w, spec.r)
        lower = _irwin_hall_cdf((-spec.delta2 - ui + half) / spec.w, spec.r)
        val = spec.h_scale * (upper - lower)
        val = np.where(ui <= spec.plateau, spec.h_scale, val)
        out[inside] = val
    return float(out) if scalar else out


def bump_eval_words(spec: BumpSpec, hi_words: np.ndarray) -> np.ndarray:
    """chi at phases given as top-64-bit fixed-point words."""
    turns = np.ldexp(np.asarray(hi_words, dtype=np.uint64).view(np.int64).astype(np.float64), -64)
    return bump_eval_direct(spec, turns)


def bump_eval_fourier(spec: BumpSpec, t, cutoff: int) -> np.ndarray | float:
    """Partial Fourier sum delta + sum over 0 < |k| <= cutoff of c(k) e(k t)."""
    cutoff = int(cutoff)
    if cutoff < 0 or cutoff > spec.cutoff:
        raise DomainError(f"cutoff must lie in [0, {spec.cutoff}]")
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(centred(t))
    c = spec.coefficients[1:cutoff + 1]
    ks = np.arange(1, cutoff + 1, dtype=np.float64)
    out = np.empty(tt.size)
    block = max(1, 2_000_000 // max(cutoff, 1))
    for i in range(0, tt.size, block):
        chunk = tt[i:i + block]
        phase = np.outer(chunk, ks)
        phase -= np.floor(phase)
        out[i:i + block] = spec.delta + 2.0 * (np.cos(2 * math.pi * phase) @ c)
    return float(out[0]) if scalar else out.reshape(np.shape(t))
