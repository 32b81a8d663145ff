import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twinphase import primes as P
from twinphase.errors import BudgetError, DomainError


def trial_division_is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def trial_factor(n):
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def test_small_tables():
    t = P.sieve_primes(10)
    assert t.primes().tolist() == [2, 3, 5, 7] and t.pi() == 4
    assert P.sieve_primes(100).pi() == sum(trial_division_is_prime(n) for n in range(101)) == 25


def test_million():
    t = P.sieve_primes(10**6)
    assert t.pi() == 78498
    assert t.pi() == int(np.count_nonzero(P.simple_sieve(10**6)))
    rng = np.random.default_rng(1)
    for n in rng.integers(0, 10**6, 300).tolist():
        assert t.is_prime(n) == trial_division_is_prime(n)


def test_segmented_threads_agree():
    a = P.sieve_primes(3 * 10**6, threads=1).primes()
    b = P.sieve_primes(3 * 10**6, threads=4).primes()
    assert np.array_equal(a, b)


def test_limit_guard():
    with pytest.raises(BudgetError):
        P.sieve_primes(1 << 41)


@pytest.mark.parametrize("n,omega_big,omega,mu,phi", [
    (12, 3, 2, 0, 4), (49, 2, 1, 0, 42), (1, 0, 0, 1, 1), (30, 3, 3, -1, 8), (97, 1, 1, -1, 96)])
def test_factor(n, omega_big, omega, mu, phi):
    f = P.factor(n)
    assert (f.omega_big, f.omega_small, f.mu, f.phi) == (omega_big, omega, mu, phi)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**9))
def test_factor_against_trial_division(n):
    fs = trial_factor(n)
    f = P.factor(n)
    assert f.omega_big == len(fs)
    assert f.omega_small == len(set(fs))
    assert math.prod(p ** k for p, k in f.factors) == n


def test_almost_prime_and_mangoldt():
    assert not P.is_almost_prime(45, 2)
    assert P.is_almost_prime(9, 2) and P.is_almost_prime(13, 2)
    assert P.von_mangoldt(8) == pytest.approx(math.log(2))
    assert P.von_mangoldt(6) == 0
    assert P.von_mangoldt(7) == pytest.approx(math.log(7))


def test_arrays_against_scalar_functions():
    n = 3000
    mu, lam = P.mobius_array(n), P.mangoldt_array(n)
    phi, om = P.euler_phi_array(n), P.big_omega_array(n)
    for m in range(1, n + 1):
        f = P.factor(m)
        assert mu[m] == f.mu and phi[m] == f.phi and om[m] == f.omega_big
        assert lam[m] == pytest.approx(P.von_mangoldt(m))
    assert np.array_equal(P.big_omega_range(1000, 2000), om[1000:2000])


def test_tau_k():
    assert P.tau_k(12, 2) == 6
    assert P.tau_k(8, 3) == 10
    t3 = P.tau_k_array(200, 3)
    brute = [sum(1 for a in range(1, m + 1) for b in range(1, m + 1) if m % (a * b) == 0)
             for m in range(1, 201)]
    assert t3[1:].tolist() == brute
    with pytest.raises(DomainError):
        P.tau_k(5, 1)


def test_divisor_moments():
    assert P.divisor_moment_check(10, 2, 1)[0] == 27
    assert P.divisor_moment_check(2, 2, 1)[0] == 3
    ratios = [P.divisor_moment_check(X, 2, 2)[1] for X in (10**3, 10**4, 10**5)]
    assert ratios[0] > ratios[1] > ratios[2] > 0


def test_prime_powers_in():
    ns, lam = P.prime_powers_in(2, 100)
    want = [n for n in range(2, 100) if P.von_mangoldt(n) > 0]
    assert ns.tolist() == want
    np.testing.assert_allclose(lam, [P.von_mangoldt(n) for n in want])
