import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twinphase.arith import ONE, FixedReal, fixed_from_sqrt, frac_quadratic, to_words
from twinphase.bump import build_bump
from twinphase.diophantine import select_denominator
from twinphase.errors import BudgetError, DomainError
from twinphase.expsum import (CoefficientTable, WeightTable, eval_G, eval_lemma4_sum,
                              eval_lemma5_sum, eval_progression_sum, eval_W_direct, inner_k_sum,
                              lemma3_check, lemma4_rhs, lemma7_rhs, remark2_window,
                              theorem1_bound, trivial_W_bound)
from twinphase.params import SieveParams
from twinphase.primes import tau_k, von_mangoldt
from twinphase.sieve import LOWER, rosser_weights

mpmath.mp.prec = 300
SQRT2 = fixed_from_sqrt(2)
HALF = FixedReal.from_fraction(Fraction(1, 2))
THIRD = FixedReal.from_fraction(Fraction(1, 3))


def mp_alpha(alpha):
    return mpmath.mpf(alpha.integer_part) + mpmath.mpf(alpha.frac_mantissa) / mpmath.mpf(ONE)


def mp_dist(v):
    f = v - mpmath.floor(v)
    return min(f, 1 - f)


def ep(phase_int):
    """e(phase / 2**192) from an exact integer phase."""
    return cmath.exp(2j * math.pi * ((phase_int % ONE) / ONE))


# --- progressions -------------------------------------------------------------

def test_progression_trivial():
    assert abs(eval_progression_sum(HALF, 10, 1, 0)) < 1e-12
    assert eval_progression_sum(FixedReal.from_int(0), 10, 2, 1) == pytest.approx(5)
    assert eval_progression_sum(SQRT2, 3, 7, 5) == 0
    with pytest.raises(DomainError):
        eval_progression_sum(SQRT2, 0, 3, 1)


@pytest.mark.parametrize("X,d,a", [(10**4, 3, 1), (10**4, 7, 0), (999, 5, 4), (5000, 1, 0)])
def test_progression_against_term_sum(X, d, a):
    al = mp_alpha(SQRT2)
    want = mpmath.mpc(0)
    n = a if a >= 1 else d
    while n <= X:
        want += mpmath.expjpi(2 * al * n)
        n += d
    got = eval_progression_sum(SQRT2, X, d, a)
    assert abs(got - complex(want)) < 1e-8


def test_lemma3_examples():
    r = lemma3_check(HALF, 10, 1, 0)
    assert r.bound == 1 and r.passed and r.abs_sum < 1e-12
    r = lemma3_check(THIRD, 30, 3, 1)
    assert r.resonant and r.bound == 30 / 3 + 1 and r.passed


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**6), st.integers(1, 5000), st.integers(0, 4999))
def test_lemma3_random(X, d, a):
    assert lemma3_check(SQRT2, X, d, a % d).passed


def test_progression_domain():
    with pytest.raises(DomainError):
        eval_progression_sum(SQRT2, 10, 0, 0)


# --- min-sums -------------------------------------------------------------------

def test_lemma4_single_term():
    conv = select_denominator(SQRT2, 1, 10)
    val, _ = eval_lemma4_sum(SQRT2, 1, 50, conv)
    assert val == pytest.approx(min(50, 1 / float(mp_dist(mp_alpha(SQRT2)))))


def test_lemma4_brute():
    X, Y = 1000, 100
    conv = select_denominator(SQRT2, 1, X)
    assert conv.q == 985
    al = mp_alpha(SQRT2)
    want = math.fsum(min(X * Y / n, 1 / float(mp_dist(al * n))) for n in range(1, X + 1))
    val, ratio = eval_lemma4_sum(SQRT2, X, Y, conv)
    assert val == pytest.approx(want, rel=1e-12)
    assert ratio == pytest.approx(val / lemma4_rhs(X, Y, conv.q))


def brute_lemma5(alpha, M, J, x, mu, zeta):
    al = mp_alpha(alpha)
    total = []
    for m in range(math.ceil(M / 2), math.ceil(M)):
        for j in range(math.ceil(J / 2), math.ceil(J)):
            dist = float(mp_dist(al * m * m * j))
            term = x / (m * m * j) if dist == 0 else min(x / (m * m * j), 1 / dist)
            total.append(tau_k(m, mu) * tau_k(j, zeta) * term)
    return math.fsum(total)


@pytest.mark.parametrize("M,J,x", [(4, 4, 1e3), (64, 64, 1e6), (9, 33, 1e5)])
def test_lemma5_brute(M, J, x):
    assert eval_lemma5_sum(SQRT2, M, J, x, 2, 2) == pytest.approx(brute_lemma5(SQRT2, M, J, x, 2, 2),
                                                                  rel=1e-12)


def test_lemma5_four_terms():
    # m in {2, 3}, j in {2, 3}
    al = mp_alpha(SQRT2)
    terms = [min(1e3 / (m * m * j), 1 / float(mp_dist(al * m * m * j)))
             * tau_k(m, 3) * tau_k(j, 2) for m in (2, 3) for j in (2, 3)]
    assert eval_lemma5_sum(SQRT2, 4, 4, 1e3, 3, 2) == pytest.approx(math.fsum(terms), rel=1e-12)


def test_lemma5_domain():
    with pytest.raises(DomainError):
        eval_lemma5_sum(SQRT2, 64, 64, 1e5, 2, 2)
    with pytest.raises(DomainError):
        eval_lemma5_sum(SQRT2, 4, 4, 1e3, 1, 2)
    with pytest.raises(BudgetError):
        eval_lemma5_sum(SQRT2, 10, 10, 1e9, 2, 2, budget=50)


def brute_G(alpha, M, S, J, x, mu, sigma, zeta):
    al = mp_alpha(alpha)
    rng = lambda V: range(math.ceil(V / 2), math.ceil(V))
    total = []
    for m in rng(M):
        for s in rng(S):
            for j in rng(J):
                n = m ** 3 * s * s * j
                dist = float(mp_dist(al * n))
                term = min(x / n, 1 / dist) if dist else x / n
                total.append(tau_k(m, mu) * tau_k(s, sigma) * tau_k(j, zeta) * term)
    return math.fsum(total)


@pytest.mark.parametrize("M,S,J,x", [(4, 4, 4, 1e5), (8, 8, 8, 1e7), (16, 4, 9, 1e8)])
def test_G_brute(M, S, J, x):
    q = select_denominator(SQRT2, 1, x).q
    val, r9, r10 = eval_G(SQRT2, M, S, J, x, 2, 2, 2, q)
    assert val == pytest.approx(brute_G(SQRT2, M, S, J, x, 2, 2, 2), rel=1e-12)
    t9, t10 = lemma7_rhs(x, M, S, J, q)
    assert r9 == pytest.approx(val / math.fsum(t9))
    assert r10 == pytest.approx(val / math.fsum(t10))


def test_G_domain():
    with pytest.raises(DomainError):
        eval_G(SQRT2, 8, 8, 8, 1e5, 2, 2, 2, 99)


# --- W ---------------------------------------------------------------------------

def naive_W(params, weights, coeffs, b, alpha, beta):
    a = alpha.frac_mantissa
    bb = beta.frac_mantissa if beta is not None else 0
    total = 0j
    for d, lam in weights.weights.items():
        for k, c in coeffs.coeffs.items():
            inner = 0j
            for n in range(math.ceil(params.x / 2), math.ceil(params.x)):
                if (n - b) % d:
                    continue
                L = von_mangoldt(n)
                if L:
                    inner += ep((a * n * n + bb) * k) * L
            total += lam * c * inner
    return total


def small_params(x=1e4, K=6.0, D=60.0):
    return SieveParams(x, 0.004, 0.14, x ** -0.004, K, x ** 0.14, D)


def test_W_empty():
    p = small_params()
    assert eval_W_direct(p, WeightTable.singleton(1), CoefficientTable({}), -2, SQRT2) == 0


def test_W_single_term():
    p = small_params()
    w, c = WeightTable.singleton(1), CoefficientTable.single(1)
    got = eval_W_direct(p, w, c, 0, SQRT2)
    want = naive_W(p, w, c, 0, SQRT2, None)
    assert abs(got - want) < 1e-8


def test_W_full_table():
    p = small_params()
    rng = np.random.default_rng(7)
    weights = WeightTable.from_rosser(rosser_weights(60.0, 7.0, LOWER))
    coeffs = CoefficientTable({k: complex(*rng.uniform(-0.7, 0.7, 2)) for k in range(-6, 7) if k})
    beta = fixed_from_sqrt(3)
    got = eval_W_direct(p, weights, coeffs, -2, SQRT2, beta, threads=3)
    want = naive_W(p, weights, coeffs, -2, SQRT2, beta)
    assert abs(got - want) <= 1e-6 * abs(want)
    assert abs(got) <= trivial_W_bound(p, weights, coeffs, -2)


def test_W_guards():
    p = small_params(D=0.5)
    with pytest.raises(DomainError):
        eval_W_direct(p, WeightTable.singleton(3), CoefficientTable.single(1), 0, SQRT2)
    with pytest.raises(DomainError):
        eval_W_direct(p, WeightTable.singleton(1), CoefficientTable.single(7), 0, SQRT2)
    with pytest.raises(BudgetError):
        eval_W_direct(p, WeightTable.singleton(1), CoefficientTable.unit(6), 0, SQRT2, budget=10)
    # the d = 1 weight stays usable below level 1
    assert eval_W_direct(p, WeightTable.singleton(1), CoefficientTable.single(1), 0, SQRT2) != 0


def test_table_validation():
    with pytest.raises(DomainError):
        WeightTable({4: 4.0})  # tau(4) = 3
    with pytest.raises(DomainError):
        WeightTable({0: 1.0})
    with pytest.raises(DomainError):
        CoefficientTable({0: 1.0})
    with pytest.raises(DomainError):
        CoefficientTable({2: 1.5})
    assert WeightTable({4: 1.0, 6: -1.0}).non_squarefree() == [4]


def test_from_bump_symmetry():
    spec = build_bump(0.05, 1e4)
    beta = fixed_from_sqrt(5)
    tab = CoefficientTable.from_bump(spec, beta, 40)
    for k in range(1, 41):
        assert tab.coeffs[-k] == pytest.approx(tab.coeffs[k].conjugate())
        assert abs(tab.coeffs[k]) == pytest.approx(abs(spec.c(k)))


def test_inner_k_sum_recurrence_accuracy():
    ns = list(range(10**5, 10**5 + 4000))
    hi, lo = to_words(frac_quadratic(SQRT2, None, ns))
    coeffs = CoefficientTable.unit(300)
    got = inner_k_sum(hi, lo, coeffs, threads=2)
    vals = frac_quadratic(SQRT2, None, ns[:50])
    for i, v in enumerate(vals):
        want = sum(ep(v * k) for k in range(-300, 301) if k)
        assert abs(got[i] - want) < 1e-11


def test_inner_k_sum_thread_invariance():
    ns = list(range(2, 20000))
    hi, lo = to_words(frac_quadratic(SQRT2, fixed_from_sqrt(7), ns))
    coeffs = CoefficientTable.from_bump(build_bump(0.05, 1e5), fixed_from_sqrt(7), 200)
    a = inner_k_sum(hi, lo, coeffs, threads=1)
    b = inner_k_sum(hi, lo, coeffs, threads=4)
    assert np.array_equal(a, b)


# --- W bound and its theta window -----------------------------------------------

def test_theorem1_regression():
    p = SieveParams.from_exponents(1e6, 1e-3, 0.04)
    b = theorem1_bound(p, 99)
    x, K, D, q = p.x, p.K, p.Delta, 99
    want = (x * K / D ** (1 / 32), x * K / q ** (1 / 32), x ** (15 / 16) * K ** (31 / 32) * q ** (1 / 32),
            x * D ** 0.5 * K / q ** 0.25, x ** 0.5 * D ** 0.5 * K ** 0.75 * q ** 0.25)
    for got, w in zip(b.terms, want):
        assert got == pytest.approx(w, rel=1e-12)
    assert b.total == pytest.approx(math.fsum(want), rel=1e-12)


def test_theorem1_q_monotonicity():
    p = SieveParams.from_exponents(1e6, 1e-3, 0.04)
    qs = [10.0 ** j for j in range(1, 60, 5)]
    terms = np.array([theorem1_bound(p, q).terms for q in qs])
    assert np.all(np.diff(terms[:, 1]) < 0) and np.all(np.diff(terms[:, 3]) < 0)
    assert np.all(np.diff(terms[:, 2]) > 0)
    assert np.all(terms[:, 0] == terms[0, 0])
    with pytest.raises(DomainError):
        theorem1_bound(p, 1)


def test_remark2_window():
    small = remark2_window(SieveParams.from_exponents(1e6, 1 / 1300, 32.5 / 1300))
    assert small.empty  # at x = 1e6 the K**31 condition closes the window
    p = SieveParams.from_exponents(1e100, 1 / 1300, 32.5 / 1300)
    w = remark2_window(p)
    assert not w.empty
    lx, lK, lD = math.log(p.x), math.log(p.K), math.log(p.Delta)
    assert w.log_lo == pytest.approx(max(0.01 * lx, lD + 2 * lK))
    assert w.log_hi == pytest.approx(min(2 * lx - 31 * lK, 2 * lx - 2 * lD - 3 * lK))
    b = theorem1_bound(p, math.exp(w.log_geometric_mean))
    assert b.total < p.x * p.K
