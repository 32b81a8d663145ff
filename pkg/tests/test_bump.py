import math

import numpy as np
import pytest
from scipy import integrate

from twinphase.bump import build_bump, bump_eval_direct, bump_eval_fourier, centred
from twinphase.errors import DomainError


@pytest.fixture(scope="module")
def spec():
    return build_bump(0.01, 1e6)


def test_construction_invariants(spec):
    assert spec.r == math.ceil(math.log(1e6))
    assert spec.delta2 + spec.r * spec.w / 2 == pytest.approx(spec.delta, rel=1e-14)
    assert spec.h_scale * 2 * spec.delta2 == pytest.approx(spec.delta, rel=1e-14)
    assert 0 < spec.h_scale < 1
    assert spec.coefficients[0] == spec.delta
    assert spec.cutoff == math.floor(math.log(1e6) ** 2 / 0.01)


def test_rejects_bad_delta():
    for d in (0, 0.25, -1):
        with pytest.raises(DomainError):
            build_bump(d, 1e6)


def test_support(spec):
    assert bump_eval_direct(spec, 0.5) == 0
    assert bump_eval_direct(spec, spec.delta) == 0
    assert bump_eval_direct(spec, -spec.delta) == 0
    assert 0 < bump_eval_direct(spec, 0.0) < 1
    assert 0 < bump_eval_direct(spec, spec.delta - 1e-6)


def test_periodic_and_even(spec):
    t = np.linspace(-0.02, 0.02, 101)
    np.testing.assert_array_equal(bump_eval_direct(spec, t), bump_eval_direct(spec, -t))
    np.testing.assert_allclose(bump_eval_direct(spec, t + 3), bump_eval_direct(spec, t), atol=1e-15)


def test_mean_is_delta(spec):
    # independent check of c(0): integrate the direct form
    val, _ = integrate.quad(lambda t: bump_eval_direct(spec, t), -spec.delta, spec.delta,
                            points=[-spec.plateau, spec.plateau], limit=400, epsabs=1e-14)
    assert val == pytest.approx(spec.delta, rel=1e-9)


def test_coefficients_match_numeric_fourier(spec):
    for k in (1, 7, 50, 200):
        val, _ = integrate.quad(lambda t: bump_eval_direct(spec, t) * math.cos(2 * math.pi * k * t),
                                -spec.delta, spec.delta, limit=800, epsabs=1e-15)
        assert spec.c(k) == pytest.approx(val, abs=1e-12)


def test_tail_bound(spec):
    tb = spec.tail_bound()
    assert tb <= 1e-6
    # cross-check against direct summation of |c(k)| out to 10 K
    ks = np.arange(spec.cutoff + 1, 10 * spec.cutoff + 1)
    from twinphase.bump import _coefficients
    direct = 2 * float(np.sum(np.abs(_coefficients(spec, ks))))
    assert direct <= tb


def test_fourier_cutoff_zero_and_far_point(spec):
    t = np.linspace(0, 1, 17)
    np.testing.assert_allclose(bump_eval_fourier(spec, t, 0), spec.delta)
    assert abs(bump_eval_fourier(spec, 0.5, spec.cutoff)) <= spec.tail_bound() + 1e-13


def test_fourier_matches_direct_at_zero(spec):
    diff = abs(bump_eval_fourier(spec, 0.0, spec.cutoff) - bump_eval_direct(spec, 0.0))
    assert diff <= spec.tail_bound() + 1e-13
    with pytest.raises(DomainError):
        bump_eval_fourier(spec, 0.0, spec.cutoff + 1)


def test_centred():
    np.testing.assert_allclose(centred([0.75, 1.25, -0.6]), [-0.25, 0.25, 0.4])
