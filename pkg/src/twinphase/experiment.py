"""Primes p with p + 2 = P_2 and ||alpha p^2 + beta|| < p^-theta.

The pipeline builds the weighted sequence A = {p + 2} with weights
chi(alpha p^2 + beta), runs the Buchstab pieces S1..S4 by direct scan,
brackets each piece with Rosser weights, collects remainder statistics
and counts qualifying primes directly.

At any scale reachable here the level D of the parameter system is below 1,
so the sieve runs at a separate desk level ``x**level_exponent``.
"""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import __version__
from .arith import FixedReal, fixed_from_sqrt, log_integral, words_distance
from .bump import BumpSpec, build_bump, bump_eval_words
from .errors import BudgetError, DomainError
from .expsum import (CoefficientTable, WeightTable, divisor_weight_sums, eval_W_direct,
                     inner_k_sum, quadratic_words)
from .io import SCHEMA_VERSION, dumps
from .params import SieveParams, lemma1_params  # noqa: F401  (re-exported)
from .primes import big_omega_range, factor, prime_powers_in, sieve_primes
from .sieve import (LOWER, WeightedSequence, buchstab_terms, coprime_to, rosser_weights,
                    sandwich_sums, sieve_bounds, twin_density)

log = logging.getLogger(__name__)

THEOREM2_THETA = 1 / 1296
MAX_X = 10**9
METHODOLOGY = (
    "R2 uses c(k) e(beta k) with no extra factor delta on the k-sum. "
    "Remainders use the progression p = -2 (mod d). "
    "The sieve level is x**level_exponent because the parameter-system level D is below 1 "
    "at this scale. S4 starts at x**s4_exponent."
)


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: FixedReal
    alpha_label: str = "sqrt:2"
    beta: FixedReal = field(default_factory=lambda: FixedReal.from_int(0))
    theta: float = 0.3
    x: int = 10**6
    delta: float = 0.05
    z_exponent: float = 1 / 12
    p1_exponent: float = 1 / 3.1
    s4_exponent: float = 1 / 12
    level_exponent: float = 0.5
    rho: float | None = None
    q: int | None = None
    with_r2: bool = True
    r2_cutoff: int | None = None
    c0_cutoff: int = 10**8

    def __post_init__(self):
        if not self.theta >= 0:
            raise DomainError("theta must be non-negative")
        if not 100 <= self.x <= MAX_X:
            raise DomainError(f"x must lie in [100, {MAX_X}]")
        if self.theorem2 and self.rho is not None:
            self.params.validate()

    @classmethod
    def sqrt(cls, d: int = 2, **kw) -> "ExperimentConfig":
        return cls(alpha=fixed_from_sqrt(d), alpha_label=f"sqrt:{d}", **kw)

    @property
    def theorem2(self) -> bool:
        """Whether theta is in the P_2 twin range 0 < theta < 1/1296."""
        return 0 < self.theta < THEOREM2_THETA

    @property
    def params(self) -> SieveParams:
        rho = 33 * self.theta if self.rho is None else self.rho
        return SieveParams.from_exponents(self.x, self.theta, rho, strict=False)

    @property
    def level(self) -> float:
        return float(self.x) ** self.level_exponent

    @property
    def z(self) -> float:
        return min(float(self.x) ** self.z_exponent, math.sqrt(self.level))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha"] = self.alpha_label
        d["beta"] = [self.beta.frac_mantissa, self.beta.integer_part]
        return d


@lru_cache(maxsize=4)
def _primes_upto(n: int) -> np.ndarray:
    return sieve_primes(max(int(n), 2)).primes()


def _phase_hi(cfg: ExperimentConfig, ps: np.ndarray) -> np.ndarray:
    hi, _ = quadratic_words(cfg.alpha, cfg.beta, ps.tolist())
    return hi


# --- direct counts -----------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    p: int
    omega_p_plus_2: int
    dist: float
    p_to_minus_theta: float


def _p2_twins(x: int) -> tuple[np.ndarray, np.ndarray]:
    ps = _primes_upto(x)
    om = big_omega_range(3, x + 3)[ps - 1]  # p + 2 sits at offset p + 2 - 3
    keep = om <= 2
    return ps[keep], om[keep]


def count_good_primes(cfg: ExperimentConfig, cap: int = 100) -> tuple[int, list[Witness]]:
    """#{p <= x : Omega(p + 2) <= 2, ||alpha p^2 + beta|| < p^-theta} and the smallest witnesses."""
    if cfg.x > MAX_X:
        raise BudgetError(f"x = {cfg.x} exceeds the 1e9 budget")
    ps, om = _p2_twins(cfg.x)
    dist = words_distance(_phase_hi(cfg, ps))
    target = ps.astype(np.float64) ** -cfg.theta
    good = np.flatnonzero(dist < target)
    witnesses = [Witness(int(ps[i]), int(om[i]), float(dist[i]), float(target[i]))
                 for i in good[:cap]]
    return int(good.size), witnesses


def witness_rows(witnesses: list[Witness]):
    yield ("p", "omega_p_plus_2", "dist", "p_to_minus_theta")
    for w in witnesses:
        yield (w.p, w.omega_p_plus_2, w.dist, w.p_to_minus_theta)


def expected_count(cfg: ExperimentConfig) -> float:
    """sum over p <= x with p + 2 = P_2 of min(1, 2 p^-theta)."""
    ps, _ = _p2_twins(cfg.x)
    return float(np.sum(np.minimum(1.0, 2.0 * ps.astype(np.float64) ** -cfg.theta)))


# --- the weighted sequence -----------------------------------------------------

def build_sequence(cfg: ExperimentConfig, bump: BumpSpec | None = None) -> WeightedSequence:
    """Elements p + 2 for primes p <= x - 2, weighted by chi(alpha p^2 + beta)."""
    bump = build_bump(cfg.delta, cfg.x) if bump is None else bump
    ps = _primes_upto(cfg.x - 2)
    f = np.asarray(bump_eval_words(bump, _phase_hi(cfg, ps)), dtype=np.float64)
    return WeightedSequence(ps + 2, f, f"p + 2, p <= {cfg.x - 2}, chi(alpha p^2 + beta)")


# --- remainders ---------------------------------------------------------------

def _check_odd(d: int) -> None:
    if d < 1 or d % 2 == 0:
        raise DomainError("remainders need odd d >= 1")


def remainder_r1(d: int, x: float) -> float:
    """pi(x - 2; d, -2) - Li(x)/phi(d)."""
    d = int(d)
    _check_odd(d)
    ps = _primes_upto(int(x) - 2)
    count = int(np.count_nonzero((ps + 2) % d == 0))
    return count - log_integral(x) / factor(d).phi


def odd_squarefree_upto(D: float) -> list[int]:
    out = []
    for d in range(1, int(math.floor(D)) + 1, 2):
        if factor(d).mu != 0:
            out.append(d)
    return out


@dataclass(frozen=True)
class R1Stats:
    D: float
    count: int
    max_abs: float
    mean_abs: float
    sum_abs: float
    ratios: dict  # A -> sum_abs / (x / log(x)**A)


def r1_statistics(x: int, D: float) -> R1Stats:
    """|R1(d)| over odd squarefree d <= D."""
    ps = _primes_upto(int(x) - 2)
    shifted = ps + 2
    li = log_integral(x)
    vals = []
    for d in odd_squarefree_upto(D):
        cnt = int(np.count_nonzero(shifted % d == 0))
        vals.append(abs(cnt - li / factor(d).phi))
    arr = np.array(vals)
    total = float(np.sum(arr))
    lx = math.log(x)
    return R1Stats(float(D), arr.size, float(arr.max()), float(arr.mean()), total,
                   {A: total / (x / lx ** A) for A in (1, 2, 3)})


def _r2_coeffs(cfg: ExperimentConfig, bump: BumpSpec, cutoff: int | None) -> CoefficientTable:
    cutoff = bump.cutoff if cutoff is None else min(int(cutoff), bump.cutoff)
    return CoefficientTable.from_bump(bump, cfg.beta, cutoff)


def remainder_r2(d: int, cfg: ExperimentConfig, bump: BumpSpec | None = None,
                 cutoff: int | None = None, budget: float = 2e9) -> complex:
    """sum_{0<|k|<=K} c(k) e(beta k) sum_{p <= x-2, p = -2 (d)} e(alpha p^2 k)."""
    d = int(d)
    _check_odd(d)
    bump = build_bump(cfg.delta, cfg.x) if bump is None else bump
    coeffs = _r2_coeffs(cfg, bump, cutoff)
    if len(coeffs) == 0:
        return 0j
    if cfg.x / d * coeffs.max_abs_k > budget:
        raise BudgetError("(x/d) K exceeds the remainder budget")
    ps = _primes_upto(cfg.x - 2)
    ps = ps[(ps + 2) % d == 0]
    hi, lo = quadratic_words(cfg.alpha, None, ps.tolist())
    return complex(np.sum(inner_k_sum(hi, lo, coeffs)))


@dataclass(frozen=True)
class R2Sum:
    value: complex
    ratio_to_x: float
    lambda_path: complex
    prime_power_part: complex


def weighted_r2_sum(cfg: ExperimentConfig, weights: WeightTable, bump: BumpSpec | None = None,
                    cutoff: int | None = None, threads: int = 1) -> R2Sum:
    """sum_d lambda(d) R2(d), over primes and, separately, over prime powers with Lambda."""
    bump = build_bump(cfg.delta, cfg.x) if bump is None else bump
    coeffs = _r2_coeffs(cfg, bump, cutoff)
    if len(weights) == 0 or len(coeffs) == 0:
        return R2Sum(0j, 0.0, 0j, 0j)
    for d, _ in weights.items():
        _check_odd(d)
    ns, lam = prime_powers_in(2, cfg.x - 1)
    hi, lo = quadratic_words(cfg.alpha, None, ns.tolist())
    T = inner_k_sum(hi, lo, coeffs, threads)
    L = divisor_weight_sums(ns, -2, weights)
    is_prime = np.zeros(ns.size, dtype=bool)
    is_prime[np.searchsorted(ns, _primes_upto(cfg.x - 2))] = True
    TL = T * L
    value = complex(np.sum(np.where(is_prime, TL, 0)))
    lam_all = complex(np.sum(TL * lam))
    lam_primes = complex(np.sum(np.where(is_prime, TL * lam, 0)))
    return R2Sum(value, abs(value) / cfg.x, lam_all, lam_all - lam_primes)


# --- C0 ------------------------------------------------------------------------

@dataclass(frozen=True)
class TwinConstant:
    partial: float
    lower: float
    upper: float
    estimate: float
    cutoff: int


@lru_cache(maxsize=4)
def twin_constant(cutoff: int = 10**8, threads: int = 1) -> TwinConstant:
    """prod over 2 < p < cutoff of (1 - 1/(p-1)^2), with a bracket for the tail.

    The tail product over p >= P lies in [1 - 1/(P - 2), 1] since
    sum over m >= P - 1 of 1/m^2 <= 1/(P - 2); the estimate uses
    exp(-1/(P log P)) for it.
    """
    if cutoff < 4:
        raise DomainError("twin_constant needs cutoff >= 4")
    ps = sieve_primes(cutoff - 1, threads=threads).primes(3, cutoff - 1).astype(np.float64)
    partial = math.exp(math.fsum(np.log1p(-1.0 / (ps - 1.0) ** 2)))
    P = cutoff
    lower = partial * (1 - 1 / (P - 2))
    return TwinConstant(partial, lower, partial, partial * math.exp(-1 / (P * math.log(P))), cutoff)


# --- the full run -----------------------------------------------------------------

@dataclass
class ExperimentReport:
    config: dict
    direct_count: int
    expected_count: float
    witnesses: list
    S_exact: float
    S1: float
    S2: float
    S3: float
    S4: float
    decomposition: float
    decomposition_positive: bool
    pieces: dict
    lower_bound_estimate: float
    assembled_lower_ok: bool
    main_terms: dict
    r1_stats: dict
    r2_weighted: dict | None
    C0: float
    C0_bracket: list
    methodology: str = METHODOLOGY
    runtime: dict = field(default_factory=dict)
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        data = json.loads(text)
        if data.get("schema") != SCHEMA_VERSION:
            raise DomainError(f"unsupported report schema {data.get('schema')}")
        return cls(**data)


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    t0 = time.perf_counter()
    x = cfg.x
    bump = build_bump(cfg.delta, x)
    A = build_sequence(cfg, bump)
    exact = float(np.sum(A.weights * coprime_to(A.ns, x ** (1 / 3))))
    terms = buchstab_terms(A, x, cfg.z_exponent, cfg.p1_exponent, cfg.s4_exponent)

    z, D = cfg.z, cfg.level
    pieces = {}
    for name, c in zip(("S1", "S2", "S3", "S4"), terms.multiplicities):
        w = A.weights * c
        if z >= 2:
            lo, mid, hi = sandwich_sums(A.ns, w, z, D)
        else:
            lo = mid = hi = float(np.sum(w))
        pieces[name] = {"lower": lo, "exact": mid, "upper": hi, "sandwiched": lo <= mid <= hi}
    assembled = (pieces["S1"]["lower"] - 0.5 * pieces["S2"]["upper"]
                 - 0.5 * pieces["S3"]["upper"] - pieces["S4"]["upper"])

    X_main = cfg.delta * log_integral(x)
    if z >= 2:
        sb = sieve_bounds(A, z, D, twin_density, X_main)
        main = {"X": X_main, "V": sb.V, "s": sb.s, "lower": sb.main_lower,
                "upper": sb.main_upper, "error_scale": sb.error_scale}
    else:
        main = {"X": X_main, "V": 1.0, "s": None, "lower": None, "upper": None, "error_scale": None}

    count, wit = count_good_primes(cfg)
    r1 = asdict(r1_statistics(x, D))

    r2 = None
    if cfg.with_r2 and z >= 2:
        tab = rosser_weights(float(D), float(z), LOWER)
        weights = WeightTable({d: float(w) for d, w in tab.support.items() if d % 2})
        res = weighted_r2_sum(cfg, weights, bump, cfg.r2_cutoff, threads)
        r2 = {"value": res.value, "abs": abs(res.value), "ratio_to_x": res.ratio_to_x,
              "lambda_path": res.lambda_path, "prime_power_part": res.prime_power_part,
              "weights": "Rosser lower, odd d"}

    c0 = twin_constant(cfg.c0_cutoff, threads)
    log.info("experiment x=%d finished in %.2fs", x, time.perf_counter() - t0)
    return ExperimentReport(
        config=cfg.to_dict(), direct_count=count, expected_count=expected_count(cfg),
        witnesses=[asdict(w) for w in wit], S_exact=exact,
        S1=terms.S1, S2=terms.S2, S3=terms.S3, S4=terms.S4,
        decomposition=terms.combination, decomposition_positive=terms.combination > 0,
        pieces=pieces, lower_bound_estimate=assembled, assembled_lower_ok=assembled <= exact,
        main_terms=main, r1_stats=r1, r2_weighted=r2, C0=c0.estimate,
        C0_bracket=[c0.lower, c0.upper],
        runtime={"package_version": __version__, "theorem2_regime": cfg.theorem2},
    )


# --- trend diagnostics -------------------------------------------------------------

def lemma1_trend(theta: float = 0.004, denominators=(169, 985, 5741, 33461),
                 alpha: FixedReal | None = None, b: int = -2, threads: int = 1) -> list[dict]:
    """|W(q)|/q with the twisted-sum parameters at x = q, unit coefficients and weight d = 1."""
    alpha = fixed_from_sqrt(2) if alpha is None else alpha
    rows = []
    for q in denominators:
        params = lemma1_params(theta, q)
        coeffs = CoefficientTable.unit(params.K)
        W = eval_W_direct(params, WeightTable.singleton(1), coeffs, b, alpha, None, threads)
        rows.append({"q": int(q), "K": params.K, "D": params.D, "W_abs": abs(W),
                     "ratio": abs(W) / q})
    return rows


def r1_trend(xs=(10**5, 10**6, 10**7), level_exponent: float = 0.5) -> list[dict]:
    rows = []
    for x in xs:
        st = r1_statistics(int(x), float(x) ** level_exponent)
        rows.append({"x": int(x), "D": st.D, "sum_abs": st.sum_abs, "ratio": st.ratios[3]})
    return rows


def trend_ok(rows: list[dict], key: str = "ratio", factor: float = 2.0) -> bool:
    """Non-increasing within the given factor across consecutive rows."""
    vals = [r[key] for r in rows]
    return all(b <= factor * a for a, b in zip(vals, vals[1:]))
