"""Rosser weights, well-separable splits, the linear-sieve functions f and F,
and sieve bounds for weighted sequences."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, SplitError
from .primes import factor, simple_sieve

log = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329
UPPER, LOWER = "upper", "lower"


@dataclass(frozen=True, eq=False)
class RosserWeightTable:
    D: float
    z: float
    parity: str
    support: dict = field(repr=False)

    def weight(self, d: int) -> int:
        return self.support.get(int(d), 0)

    def __len__(self):
        return len(self.support)

    def csv_rows(self):
        yield ("d", "weight", "parity")
        for d in sorted(self.support):
            yield (d, self.support[d], self.parity)


def _check_level(D: float, z: float) -> None:
    if not D >= 2:
        raise DomainError("Rosser weights need D >= 2")
    if not 2 <= z <= math.sqrt(D) * (1 + 1e-12):
        raise DomainError(f"need 2 <= z <= D**(1/2); got z = {z}, D = {D}")


@lru_cache(maxsize=64)
def rosser_weights(D: float, z: float, parity: str) -> RosserWeightTable:
    """Rosser's weights for the beta = 2 sieve.

    d = p_1 ... p_r with z > p_1 > ... > p_r is kept when
    p_1 ... p_{l-1} p_l**3 <= D for every odd l (upper) or every even
    l (lower); the weight is mu(d).
    """
    if parity not in (UPPER, LOWER):
        raise DomainError("parity must be 'upper' or 'lower'")
    _check_level(D, z)
    primes = [int(p) for p in simple_sieve(math.ceil(z) - 1) if p < z]
    checked = 1 if parity == UPPER else 0
    support = {1: 1}

    # primes are ascending, so every test below fails monotonically in p
    def descend(prefix: int, below: int, depth: int, sign: int) -> None:
        l = depth + 1
        for i in range(below):
            p = primes[i]
            d = prefix * p
            if d > D:
                break
            if l % 2 == checked and prefix * p ** 3 > D:
                break
            support[d] = -sign
            descend(d, i, l, -sign)

    descend(1, len(primes), 0, 1)
    return RosserWeightTable(float(D), float(z), parity, dict(sorted(support.items())))


def _rough_part(n: int, z: float) -> list[int]:
    return [p for p, _ in factor(n).factors if p < z]


def sandwich_check(n: int, upper: RosserWeightTable,
                   lower: RosserWeightTable) -> tuple[int, int, int, bool]:
    """(sum_{d|n} lambda^-(d), [gcd(n, P(z)) = 1], sum_{d|n} lambda^+(d), lo <= mid <= hi)."""
    if upper.D != lower.D or upper.z != lower.z:
        raise DomainError("tables must share D and z")
    small = _rough_part(int(n), upper.z)
    lo = hi = 0
    for r in range(len(small) + 1):
        for combo in itertools.combinations(small, r):
            d = math.prod(combo)
            lo += lower.weight(d)
            hi += upper.weight(d)
    mid = int(not small)
    return lo, mid, hi, lo <= mid <= hi


def divisor_sums(limit: int, table: RosserWeightTable) -> np.ndarray:
    """sum over d | n of the table weight, for 0 <= n <= limit."""
    out = np.zeros(limit + 1, dtype=np.int64)
    for d, w in table.support.items():
        if d <= limit:
            out[::d] += w
    return out


def coprime_mask(limit: int, z: float) -> np.ndarray:
    """[gcd(n, P(z)) = 1] for 0 <= n <= limit."""
    mask = np.ones(limit + 1, dtype=bool)
    for p in simple_sieve(math.ceil(z) - 1):
        if p < z:
            mask[::int(p)] = False
    return mask


def sandwich_violations(limit: int, D: float, z: float) -> np.ndarray:
    """All 1 <= n <= limit at which the Rosser sandwich fails."""
    up = divisor_sums(limit, rosser_weights(D, z, UPPER))
    lo = divisor_sums(limit, rosser_weights(D, z, LOWER))
    mid = coprime_mask(limit, z).astype(np.int64)
    bad = (lo > mid) | (mid > up)
    bad[0] = False
    return np.flatnonzero(bad)


def well_separable_split(d: int, D: float, H: float, S: float) -> tuple[int, int]:
    """h <= H, s <= S with hs = d.

    Greedy over the prime factors in decreasing order; when greedy fails an
    exhaustive subset search runs and the event is logged.
    """
    d = int(d)
    if d < 1:
        raise DomainError("well_separable_split needs d >= 1")
    if not (H >= 1 and S >= 1) or abs(H * S - D) > 1e-9 * D:
        raise DomainError("need H, S >= 1 and HS = D")
    fc = factor(d)
    if fc.mu == 0:
        raise DomainError(f"{d} is not squarefree")
    primes = sorted((p for p, _ in fc.factors), reverse=True)
    h = s = 1
    for p in primes:
        if h * p <= H:
            h *= p
        else:
            s *= p
    if s <= S:
        return h, s
    for r in range(len(primes) + 1):
        for combo in itertools.combinations(primes, r):
            h = math.prod(combo)
            if h <= H and d // h <= S:
                log.warning("greedy split failed for d=%d (H=%g, S=%g); subset search found h=%d",
                            d, H, S, h)
                return h, d // h
    raise SplitError(f"{d} has no split with h <= {H}, s <= {S}", tuple(primes))


# --- sieve functions ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SieveFunctionTable:
    s_grid: np.ndarray = field(repr=False)
    F_values: np.ndarray = field(repr=False)
    f_values: np.ndarray = field(repr=False)
    step: float = 0.0

    def F(self, s):
        return _lookup(self, self.F_values, s)

    def f(self, s):
        return _lookup(self, self.f_values, s)

    def csv_rows(self):
        yield ("s", "F", "f")
        for row in zip(self.s_grid.tolist(), self.F_values.tolist(), self.f_values.tolist()):
            yield row


def _lookup(table, values, s):
    s_arr = np.asarray(s, dtype=np.float64)
    if np.any(s_arr <= 0):
        raise DomainError("sieve functions are defined for s > 0")
    top = table.s_grid[-1]
    if np.any(s_arr > top):
        raise DomainError(f"s beyond the tabulated range (0, {top}]")
    out = np.interp(s_arr, table.s_grid, values)
    return float(out) if out.ndim == 0 else out


def _trapezoid(per_unit: int, s_max: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    h = 1.0 / per_unit
    n = int(math.floor(s_max * per_unit + 1e-9))
    s = np.arange(1, n + 1) / per_unit
    two = 2 * per_unit  # index of s = 2
    c = 2 * math.exp(EULER_GAMMA)
    F = np.empty(n)
    f = np.zeros(n)
    F[:two] = c / s[:two]
    sF = s * F
    sf = s * f
    for i in range(two, n):
        j = i - per_unit  # node of s_i - 1
        sF[i] = sF[i - 1] + h / 2 * (f[j - 1] + f[j])
        sf[i] = sf[i - 1] + h / 2 * (F[j - 1] + F[j])
        F[i] = sF[i] / s[i]
        f[i] = sf[i] / s[i]
    return s, F, f


def sieve_functions(s_max: float = 10.0, step: float = 1e-3,
                    extrapolate: bool = True) -> SieveFunctionTable:
    """Integrate (sF)' = f(s-1), (sf)' = F(s-1) for s > 2 by the trapezoidal rule.

    Each unit interval is cut into ceil(1/step) equal pieces, so the
    integers (where the solutions have kinks) and the delayed points s - 1
    are grid nodes.  With ``extrapolate`` the run is repeated at half the
    step and the two are combined as (4 T(h/2) - T(h)) / 3, which removes
    the h**2 error term; without it the O(h**2) error swamps F - f beyond
    s of about 9.
    """
    if not 2 < s_max <= 20:
        raise DomainError("sieve_functions needs 2 < s_max <= 20")
    if not 1e-5 <= step <= 1e-2:
        raise DomainError("sieve_functions needs 1e-5 <= step <= 1e-2")
    per_unit = math.ceil(1 / step - 1e-9)
    s, F, f = _trapezoid(per_unit, s_max)
    if extrapolate:
        _, F2, f2 = _trapezoid(2 * per_unit, s_max)
        F = (4 * F2[1::2] - F) / 3
        f = (4 * f2[1::2] - f) / 3
        # exact initial data on (0, 2]
        two = 2 * per_unit
        F[:two] = 2 * math.exp(EULER_GAMMA) / s[:two]
        f[:two] = 0.0
    return SieveFunctionTable(s, F, f, 1.0 / per_unit)


@lru_cache(maxsize=4)
def _default_functions() -> SieveFunctionTable:
    return sieve_functions(20.0, 1e-3)


# --- weighted sequences and bounds ---------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightedSequence:
    ns: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    description: str = ""

    def __post_init__(self):
        if self.ns.shape != self.weights.shape:
            raise DomainError("ns and weights must have the same shape")
        if self.ns.size and (self.ns.min() < 1):
            raise DomainError("sequence elements must be positive")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
            raise DomainError("weights must be finite and non-negative")

    @classmethod
    def unweighted(cls, ns, description: str = "") -> "WeightedSequence":
        ns = np.asarray(ns, dtype=np.int64)
        return cls(ns, np.ones(ns.size), description)

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))


def twin_density(p: int) -> float:
    """omega(2) = 0 and omega(p) = p/(p - 1) for odd p."""
    return 0.0 if p == 2 else p / (p - 1)


def V_of_z(z: float, omega_fn: Callable[[int], float] = twin_density) -> float:
    """prod over p < z of (1 - omega(p)/p)."""
    out = 1.0
    for p in simple_sieve(math.ceil(z) - 1):
        p = int(p)
        if p < z:
            out *= 1 - omega_fn(p) / p
    return out


def coprime_to(ns: np.ndarray, z: float) -> np.ndarray:
    mask = np.ones(ns.size, dtype=bool)
    for p in simple_sieve(math.ceil(z) - 1):
        if p < z:
            mask &= ns % int(p) != 0
    return mask


def sieve_divisor_sums(ns: np.ndarray, table: RosserWeightTable) -> np.ndarray:
    """sum over d | n of the table weight, for each n in ns.

    Depends only on which primes below z divide n, so it is computed once per
    distinct z-smooth radical.
    """
    rad = np.ones(ns.size, dtype=np.int64)
    for p in simple_sieve(math.ceil(table.z) - 1):
        if p < table.z:
            rad[ns % int(p) == 0] *= int(p)
    keys, inverse = np.unique(rad, return_inverse=True)
    vals = np.empty(keys.size, dtype=np.int64)
    for i, r in enumerate(keys.tolist()):
        ps = [p for p, _ in factor(r).factors] if r > 1 else []
        total = 0
        for k in range(len(ps) + 1):
            for combo in itertools.combinations(ps, k):
                total += table.weight(math.prod(combo))
        vals[i] = total
    return vals[inverse]


@dataclass(frozen=True)
class SieveBounds:
    lower: float
    exact: float
    upper: float
    lower_by_d: float
    upper_by_d: float
    V: float
    s: float
    main_lower: float
    main_upper: float
    error_scale: float

    @property
    def sandwiched(self) -> bool:
        return self.lower <= self.exact <= self.upper


def sandwich_sums(ns: np.ndarray, weights: np.ndarray, z: float,
                  D: float) -> tuple[float, float, float]:
    """(sum w L^-, sum w [coprime], sum w L^+) with one summation tree for all three.

    Since L^- <= [coprime] <= L^+ pointwise and rounding is monotone, the
    floating-point results keep the order exactly.
    """
    lo_t = sieve_divisor_sums(ns, rosser_weights(float(D), float(z), LOWER))
    up_t = sieve_divisor_sums(ns, rosser_weights(float(D), float(z), UPPER))
    mid = coprime_to(ns, z)
    return (float(np.sum(weights * lo_t)), float(np.sum(weights * mid)),
            float(np.sum(weights * up_t)))


def sieve_bounds(A: WeightedSequence, z: float, D: float,
                 omega_fn: Callable[[int], float] = twin_density,
                 X: float | None = None) -> SieveBounds:
    """Rosser lower/upper bounds for S(A, z), the exact value, and the main terms."""
    if z < 2:
        total = A.total
        return SieveBounds(total, total, total, total, total, 1.0, math.inf, total, total, 0.0)
    lower, exact, upper = sandwich_sums(A.ns, A.weights, z, D)
    by_d = []
    for parity in (LOWER, UPPER):
        tab = rosser_weights(float(D), float(z), parity)
        acc = 0.0
        for d, w in tab.support.items():
            acc += w * float(np.sum(A.weights[A.ns % d == 0]))
        by_d.append(acc)
    X = A.total if X is None else X
    V = V_of_z(z, omega_fn)
    s = math.log(D) / math.log(z)
    fun = _default_functions()
    s_eval = min(s, float(fun.s_grid[-1]))
    return SieveBounds(lower, exact, upper, by_d[0], by_d[1], V, s,
                       X * V * fun.f(s_eval), X * V * fun.F(s_eval), math.log(D) ** (-1 / 3))


# --- Buchstab pieces --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BuchstabTerms:
    S1: float
    S2: float
    S3: float
    S4: float
    multiplicities: tuple = field(repr=False, default=())

    @property
    def combination(self) -> float:
        return self.S1 - 0.5 * self.S2 - 0.5 * self.S3 - self.S4

    def as_tuple(self):
        return self.S1, self.S2, self.S3, self.S4


def _primes_in(lo: float, hi: float) -> list[int]:
    if hi <= 2:
        return []
    return [int(p) for p in simple_sieve(math.ceil(hi) - 1) if lo <= p < hi]


def buchstab_multiplicities(ns: np.ndarray, x: float, z_exp: float = 1 / 12,
                            p1_exp: float = 1 / 3.1,
                            s4_exp: float = 1 / 12) -> tuple[np.ndarray, ...]:
    """How often each n is counted in S1..S4 (sifting by x**z_exp applied separately).

    S2: primes x^z_exp <= p1 < x^p1_exp dividing n.
    S3: pairs with x^z_exp <= p1 < x^p1_exp <= p2 < (x/p1)^(1/2), p1 p2 | n.
    S4: pairs with x^s4_exp <= p1 < p2 < (x/p1)^(1/2), p1 p2 | n.
    """
    z = x ** z_exp
    y = x ** p1_exp
    c1 = np.ones(ns.size, dtype=np.int64)
    c2 = np.zeros(ns.size, dtype=np.int64)
    c3 = np.zeros(ns.size, dtype=np.int64)
    c4 = np.zeros(ns.size, dtype=np.int64)
    for p1 in _primes_in(z, y):
        c2 += ns % p1 == 0
    p4_lo = x ** s4_exp
    p1_cands = sorted(set(_primes_in(z, y)) | set(_primes_in(p4_lo, math.sqrt(x))))
    for p1 in p1_cands:
        hit = np.flatnonzero(ns % p1 == 0)
        if hit.size == 0:
            continue
        sub = ns[hit] // p1
        top = math.sqrt(x / p1)
        if z <= p1 < y:
            for p2 in _primes_in(y, top):
                c3[hit] += sub % p2 == 0
        if p1 >= p4_lo:
            for p2 in _primes_in(p1 + 1, top):
                c4[hit] += sub % p2 == 0
    return c1, c2, c3, c4


def buchstab_terms(A: WeightedSequence, x: float, z_exp: float = 1 / 12,
                   p1_exp: float = 1 / 3.1, s4_exp: float = 1 / 12) -> BuchstabTerms:
    """S1..S4 by direct scan; every piece sifts by x**z_exp."""
    cs = buchstab_multiplicities(A.ns, x, z_exp, p1_exp, s4_exp)
    rough = coprime_to(A.ns, x ** z_exp)
    w = A.weights * rough
    vals = [float(np.sum(w * c)) for c in cs]
    return BuchstabTerms(*vals, multiplicities=cs)
