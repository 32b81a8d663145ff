"""Exponential sums, the min-sums that bound them, and the bound on W.

Phases are always reduced modulo one in fixed point before any floating
point is involved, so the only float error in a sum is the final
``exp(2 pi i t)`` of each term and the summation itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _parallel
from .arith import (FRAC_BITS, ONE, FixedReal, alpha_words, dist_nearest_int, e, expo,
                    frac_mul, frac_quadratic, scale_words, to_words, words_distance)
from .bump import BumpSpec
from .diophantine import Convergent
from .errors import BudgetError, DomainError
from .params import SieveParams
from .primes import factor, prime_powers_in, tau_k_array
from .vaughan import BilinearComponent, VaughanDecomposition, vaughan_decompose  # noqa: F401

# progressions with at most this many terms are summed term by term
DIRECT_TERMS = 1000
# float evaluation budget for the sharp progression comparison
LEMMA3_SLACK = 1e-12
DEFAULT_BUDGET = 10**9
RESYNC = 32


# --- containers -------------------------------------------------------------

@dataclass(frozen=True)
class WeightTable:
    """Sieve weights d -> lambda(d); |lambda(d)| <= tau(d) is enforced."""

    weights: dict = field(default_factory=dict)

    def __post_init__(self):
        for d, lam in self.weights.items():
            if int(d) != d or d < 1:
                raise DomainError(f"weight index {d} is not a positive integer")
            if abs(lam) > _tau(int(d)):
                raise DomainError(f"|lambda({d})| = {abs(lam)} exceeds tau({d})")

    @classmethod
    def singleton(cls, d: int = 1, value: float = 1.0) -> "WeightTable":
        return cls({int(d): float(value)})

    @classmethod
    def from_rosser(cls, table) -> "WeightTable":
        return cls({int(d): float(w) for d, w in table.support.items()})

    def items(self):
        return sorted((d, lam) for d, lam in self.weights.items() if lam != 0)

    @property
    def max_d(self) -> int:
        return max(self.weights, default=0)

    def non_squarefree(self) -> list[int]:
        return [d for d, lam in self.items() if factor(d).mu == 0]

    def __len__(self):
        return len(self.weights)


def _tau(d: int) -> int:
    out = 1
    for _, k in factor(d).factors:
        out *= k + 1
    return out


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients k -> c(k) for k != 0 with |c(k)| <= 1."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        for k, c in self.coeffs.items():
            if int(k) != k or k == 0:
                raise DomainError(f"coefficient index {k} must be a non-zero integer")
            if abs(c) > 1 + 1e-12:
                raise DomainError(f"|c({k})| = {abs(c)} exceeds 1")

    @classmethod
    def unit(cls, K: float) -> "CoefficientTable":
        """c(k) = 1 for 0 < |k| <= K."""
        kmax = int(math.floor(K))
        return cls({k: 1.0 + 0j for k in range(-kmax, kmax + 1) if k})

    @classmethod
    def single(cls, k: int, value: complex = 1.0) -> "CoefficientTable":
        return cls({int(k): complex(value)})

    @classmethod
    def from_bump(cls, spec: BumpSpec, beta: FixedReal | None = None,
                  cutoff: int | None = None) -> "CoefficientTable":
        """c(k) e(beta k) for 0 < |k| <= cutoff, with c(-k) = c(k)."""
        cutoff = spec.cutoff if cutoff is None else int(cutoff)
        out = {}
        for k in range(1, cutoff + 1):
            ck = float(spec.coefficients[k])
            phase = e(float(frac_mul(beta, k))) if beta is not None else 1.0
            out[k] = ck * phase
            out[-k] = ck * complex(phase).conjugate()
        return cls(out)

    @property
    def max_abs_k(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def abs_sum(self) -> float:
        return math.fsum(abs(c) for c in self.coeffs.values())

    def __len__(self):
        return len(self.coeffs)


# --- progressions -----------------------------------------------------------

def _progression(X: int, d: int, a: int) -> tuple[int, int]:
    n0 = a if a >= 1 else d
    if n0 > X:
        return n0, 0
    return n0, (X - n0) // d + 1


def _check_progression(X, d, a):
    if int(X) != X or int(d) != d or int(a) != a:
        raise DomainError("X, d, a must be integers")
    if X < 1 or d < 1 or not 0 <= a < d:
        raise DomainError("need X >= 1, d >= 1 and 0 <= a < d")


def _exact_frac(alpha: FixedReal, m: int) -> Fraction | None:
    if alpha.exact_value is None:
        return None
    v = alpha.exact_value * m
    return v - math.floor(v)


def eval_progression_sum(alpha: FixedReal, X: int, d: int, a: int) -> complex:
    """sum over n <= X, n = a (mod d) of e(alpha n).

    Long progressions use the geometric-series closed form with the
    numerators N*y mod 2 and (N-1)*y/2 mod 1 reduced exactly in fixed point.
    """
    _check_progression(X, d, a)
    X, d, a = int(X), int(d), int(a)
    n0, N = _progression(X, d, a)
    if N == 0:
        return 0j
    if N <= DIRECT_TERMS:
        phases = [frac_mul(alpha, n0 + j * d).value for j in range(N)]
        hi, _ = to_words(phases)
        return complex(np.sum(expo(hi)))
    exact_step = _exact_frac(alpha, d)
    if exact_step == 0:
        return N * e(float(_exact_frac(alpha, n0)))
    Y = frac_mul(alpha, d).value
    start = frac_mul(alpha, n0).value
    if Y == 0:
        return N * e(math.ldexp(start, -FRAC_BITS))
    two = 2 * ONE
    num = math.sin(math.pi * math.ldexp((N * Y) % two, -FRAC_BITS))
    den = math.sin(math.pi * math.ldexp(Y, -FRAC_BITS))
    phase = (2 * start + Y * (N - 1)) % two
    return (num / den) * e(math.ldexp(phase, -FRAC_BITS - 1))


@dataclass(frozen=True)
class Lemma3Result:
    abs_sum: float
    bound: float
    passed: bool
    resonant: bool


def lemma3_check(alpha: FixedReal, X: int, d: int, a: int) -> Lemma3Result:
    """Compare |sum| with min(X/d + 1, 1/(2||alpha d||))."""
    s = abs(eval_progression_sum(alpha, X, d, a))
    exact = _exact_frac(alpha, int(d))
    if exact is not None:
        dist = float(min(exact, 1 - exact))
    else:
        dist = dist_nearest_int(frac_mul(alpha, int(d)))
    trivial = X / d + 1
    resonant = dist == 0
    bound = trivial if resonant else min(trivial, 1 / (2 * dist))
    return Lemma3Result(s, bound, s <= bound * (1 + LEMMA3_SLACK), resonant)


# --- single, double and triple min-sums --------------------------------------

def _distances(alpha: FixedReal, ms: np.ndarray) -> np.ndarray:
    """||alpha m|| for an int64 array of non-negative multipliers."""
    ms = np.asarray(ms, dtype=np.int64)
    if ms.size == 0:
        return np.zeros(0)
    top = int(ms.max())
    ex = alpha.exact_value
    if ex is not None and ex.denominator < (1 << 31) and top < (1 << 31):
        Q = ex.denominator
        r = ((ex.numerator % Q) * ms) % Q
        return np.minimum(r, Q - r) / Q
    if top < (1 << 32):
        hi, lo = alpha_words(alpha)
        return words_distance(scale_words(hi, lo, ms))
    flat = [dist_nearest_int(frac_mul(alpha, int(m))) for m in ms.ravel()]
    return np.array(flat).reshape(ms.shape)


def _min_terms(big: np.ndarray, dist: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        inv = np.where(dist > 0, 1.0 / np.where(dist > 0, dist, 1.0), np.inf)
    return np.minimum(big, inv)


def dyadic_range(M: float) -> np.ndarray:
    """Integers m with M/2 <= m < M."""
    lo = max(1, math.ceil(M / 2))
    hi = math.ceil(M)
    return np.arange(lo, hi, dtype=np.int64)


def lemma4_rhs(X: float, Y: float, q: int) -> float:
    return X * Y * (1 / q + 1 / Y + q / (X * Y)) * math.log(2 * X * q)


def eval_lemma4_sum(alpha: FixedReal, X: float, Y: float,
                    conv: Convergent) -> tuple[float, float]:
    """sum over n <= X of min(XY/n, 1/||alpha n||), and its ratio to its bound."""
    if not (X >= 1 and Y >= 1):
        raise DomainError("eval_lemma4_sum needs X, Y >= 1")
    ns = np.arange(1, int(math.floor(X)) + 1, dtype=np.int64)
    terms = _min_terms(X * Y / ns, _distances(alpha, ns))
    value = float(np.sum(terms))
    return value, value / lemma4_rhs(X, Y, conv.q)


def lemma5_rhs(x: float, M: float, J: float, q: int) -> list[float]:
    return [M * J, x / M ** 1.5, x / (M * math.sqrt(q)), math.sqrt(x * q) / M]


def eval_lemma5_sum(alpha: FixedReal, M: float, J: float, x: float, mu: int, zeta: int,
                    budget: int = 10**7) -> float:
    """sum_{m~M} tau_mu(m) sum_{j~J} tau_zeta(j) min{x/(m^2 j), 1/||alpha m^2 j||}."""
    if not (M >= 1 and J >= 1) or mu < 2 or zeta < 2:
        raise DomainError("eval_lemma5_sum needs M, J >= 1 and mu, zeta >= 2")
    if M * M * J > x:
        raise DomainError("eval_lemma5_sum needs M**2 J <= x")
    if M * J > budget:
        raise BudgetError(f"M*J = {M * J:.3g} exceeds budget {budget}")
    ms, js = dyadic_range(M), dyadic_range(J)
    if ms.size == 0 or js.size == 0:
        return 0.0
    tm = tau_k_array(int(ms[-1]), mu)[ms].astype(np.float64)
    tj = tau_k_array(int(js[-1]), zeta)[js].astype(np.float64)
    prod = np.outer(ms * ms, js)
    terms = _min_terms(x / prod, _distances(alpha, prod))
    return float(np.sum(tm[:, None] * tj[None, :] * terms))


def lemma7_rhs(x: float, M: float, S: float, J: float, q: int) -> tuple[list[float], list[float]]:
    """Terms of the two triple min-sum bounds, without the x**eps factor."""
    r9 = [M * S * J, x / (M ** 2.25 * S), x / (M ** 2 * S ** 1.125),
          x / (M ** 2 * S * q ** 0.125), x ** 0.875 * q ** 0.125 / (M ** 2 * S)]
    r10 = [M * S * J, x / (M ** 2.25 * S ** 0.75), x / (M ** 2 * S ** 0.75 * q ** 0.25),
           x ** 0.75 * q ** 0.25 / (M ** 2 * S ** 0.75)]
    return r9, r10


def eval_G(alpha: FixedReal, M: float, S: float, J: float, x: float, mu: int, sigma: int,
           zeta: int, q: int, budget: int = 10**7) -> tuple[float, float, float]:
    """The triple min-sum G and its ratios to its two bounds."""
    if min(mu, sigma, zeta) < 2:
        raise DomainError("eval_G needs mu, sigma, zeta >= 2")
    if not x > M ** 3 * S ** 2 * J:
        raise DomainError("eval_G needs x > M**3 S**2 J")
    if M * S * J > budget:
        raise BudgetError(f"M*S*J = {M * S * J:.3g} exceeds budget {budget}")
    ms, ss, js = dyadic_range(M), dyadic_range(S), dyadic_range(J)
    if min(ms.size, ss.size, js.size) == 0:
        return 0.0, 0.0, 0.0
    tm = tau_k_array(int(ms[-1]), mu)[ms].astype(np.float64)
    ts = tau_k_array(int(ss[-1]), sigma)[ss].astype(np.float64)
    tj = tau_k_array(int(js[-1]), zeta)[js].astype(np.float64)
    prod = (ms ** 3)[:, None, None] * (ss ** 2)[None, :, None] * js[None, None, :]
    terms = _min_terms(x / prod, _distances(alpha, prod))
    weight = tm[:, None, None] * ts[None, :, None] * tj[None, None, :]
    value = float(np.sum(weight * terms))
    r9, r10 = lemma7_rhs(x, M, S, J, q)
    return value, value / math.fsum(r9), value / math.fsum(r10)


# --- W(x) --------------------------------------------------------------------

def quadratic_words(alpha: FixedReal, beta: FixedReal | None, ns) -> tuple[np.ndarray, np.ndarray]:
    """Words of frac(alpha n**2 + beta), reduced exactly before truncation."""
    return to_words(frac_quadratic(alpha, beta, ns))


def inner_k_sum(hi: np.ndarray, lo: np.ndarray, coeffs: CoefficientTable,
                threads: int = 1) -> np.ndarray:
    """T(n) = sum_k c(k) e(k t_n) for phases t_n given as words."""
    by_abs: dict[int, list[complex]] = {}
    for k, c in coeffs.coeffs.items():
        slot = by_abs.setdefault(abs(k), [0j, 0j])
        slot[0 if k > 0 else 1] += complex(c)
    order = sorted(by_abs)

    def work(a, b):
        h, l = hi[a:b], lo[a:b]
        out = np.zeros(b - a, dtype=np.complex128)
        E1 = expo(scale_words(h, l, 1))
        E, prev = None, None
        for m in order:
            cp, cn = by_abs[m]
            # e(m t) = e((m-1) t) e(t); resynchronised with the exact phase
            # every RESYNC steps so the drift stays within RESYNC ulps
            if prev == m - 1 and m % RESYNC:
                E = E * E1
            else:
                E = expo(scale_words(h, l, m))
            prev = m
            if cp == cn:
                out += cp * (2.0 * E.real)
            else:
                out += cp * E + cn * np.conj(E)
        return out

    parts = _parallel.chunked_map(work, hi.size, threads)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.complex128)


def divisor_weight_sums(ns: np.ndarray, b: int, weights: WeightTable) -> np.ndarray:
    """L(n) = sum over d | n - b of lambda(d), for sorted ns."""
    if ns.size == 0:
        return np.zeros(0)
    lo, hi = int(ns[0]), int(ns[-1]) + 1
    full = np.zeros(hi - lo)
    for d, lam in weights.items():
        full[(b - lo) % d::d] += lam
    return full[ns - lo]


def eval_W_direct(params: SieveParams, weights: WeightTable, coeffs: CoefficientTable, b: int,
                  alpha: FixedReal, beta: FixedReal | None = None, threads: int = 1,
                  budget: int = DEFAULT_BUDGET) -> complex:
    """W = sum_d lambda(d) sum_k c(k) sum_{n~x, n=b (d)} e((alpha n^2 + beta) k) Lambda(n).

    n ~ x means x/2 <= n < x.  The k-sum is done once per prime power n and
    the d-sum through the divisors of n - b.  Weight d = 1 is allowed even
    when the level D is below 1.
    """
    if coeffs.max_abs_k > params.K:
        raise DomainError(f"coefficient index {coeffs.max_abs_k} exceeds K = {params.K:.6g}")
    if weights.max_d > max(params.D, 1.0):
        raise DomainError(f"weight index {weights.max_d} exceeds D = {params.D:.6g}")
    if len(coeffs) == 0 or len(weights) == 0:
        return 0j
    ns, lam = prime_powers_in(math.ceil(params.x / 2), math.ceil(params.x))
    work = ns.size * len({abs(k) for k in coeffs.coeffs})
    if work > budget:
        raise BudgetError(f"{work} phase evaluations exceed budget {budget}")
    hi, lo = quadratic_words(alpha, beta, ns)
    T = inner_k_sum(hi, lo, coeffs, threads)
    L = divisor_weight_sums(ns, int(b), weights)
    return complex(np.sum(T * (lam * L)))


def trivial_W_bound(params: SieveParams, weights: WeightTable, coeffs: CoefficientTable,
                    b: int) -> float:
    """sum_d |lambda(d)| sum_k |c(k)| sum_{n~x, n=b (d)} Lambda(n)."""
    ns, lam = prime_powers_in(math.ceil(params.x / 2), math.ceil(params.x))
    total = 0.0
    for d, w in weights.items():
        total += abs(w) * float(np.sum(lam[(ns - b) % d == 0]))
    return total * coeffs.abs_sum()


# --- W bound and its theta window ----------------------------------------------

@dataclass(frozen=True)
class Theorem1Bound:
    terms: tuple[float, ...]
    log_terms: tuple[float, ...]
    total: float
    eps: float
    x_eps: float

    @property
    def total_with_eps(self) -> float:
        return self.total * self.x_eps


def _exp(v: float) -> float:
    return math.exp(v) if v < 709.7 else math.inf


def theorem1_bound(params: SieveParams, q: float) -> Theorem1Bound:
    """The five terms of the W bound; x**eps with eps = log log x / log x kept apart."""
    if not q >= 2:
        raise DomainError("theorem1_bound needs q >= 2")
    lx, lK, lD, lq = math.log(params.x), math.log(params.K), math.log(params.Delta), math.log(q)
    logs = (
        lx + lK - lD / 32,
        lx + lK - lq / 32,
        15 / 16 * lx + 31 / 32 * lK + lq / 32,
        lx + lD / 2 + lK - lq / 4,
        lx / 2 + lD / 2 + 0.75 * lK + lq / 4,
    )
    terms = tuple(_exp(v) for v in logs)
    eps = math.log(lx) / lx
    return Theorem1Bound(terms, logs, math.fsum(terms), eps, _exp(eps * lx))


@dataclass(frozen=True)
class QWindow:
    """Open interval (exp(log_lo), exp(log_hi)) of admissible q."""

    log_lo: float
    log_hi: float

    @property
    def empty(self) -> bool:
        return not self.log_lo < self.log_hi

    @property
    def lo(self) -> float:
        return _exp(self.log_lo)

    @property
    def hi(self) -> float:
        return _exp(self.log_hi)

    @property
    def log_geometric_mean(self) -> float:
        return (self.log_lo + self.log_hi) / 2


def remark2_window(params: SieveParams) -> QWindow:
    """max{x^omega, Delta K^2} < q < min{x^2/K^31, x^2/(Delta^2 K^3)}, in log space."""
    lx, lK, lD = math.log(params.x), math.log(params.K), math.log(params.Delta)
    lower = max(params.omega_margin * lx, lD + 2 * lK)
    upper = min(2 * lx - 31 * lK, 2 * lx - 2 * lD - 3 * lK)
    return QWindow(lower, upper)
