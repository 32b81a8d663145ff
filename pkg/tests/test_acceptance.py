"""Acceptance criteria 1-11.

Each criterion is computed by ``criterion_<n>(threads)``, which returns
(passed, message, payload).  The payload is written as JSON under
``acceptance_out/threads-<t>/`` and one PASS/FAIL line is printed per
criterion.  Criterion 11 re-runs 1-10 with four threads and compares the
output files byte for byte.

Run standalone with ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import cmath
import math
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

from twinphase import io
from twinphase.arith import ONE, FixedReal, expo, fixed_from_sqrt, frac_mul, scale_words
from twinphase.bump import build_bump, bump_eval_direct, bump_eval_fourier, bump_eval_words
from twinphase.cli import dispatch
from twinphase.expsum import lemma3_check, quadratic_words
from twinphase.experiment import (ExperimentConfig, ExperimentReport, build_sequence,
                                  count_good_primes, expected_count, lemma1_trend, r1_trend,
                                  trend_ok)
from twinphase.primes import sieve_primes, spf_array
from twinphase.sieve import (EULER_GAMMA, LOWER, UPPER, buchstab_multiplicities, rosser_weights,
                             sandwich_check, sandwich_violations, sieve_functions,
                             well_separable_split)
from twinphase.vaughan import vaughan_decompose

OUT = Path(__file__).resolve().parent.parent / "acceptance_out"
SQRT2 = fixed_from_sqrt(2)
LINES: list[str] = []


def emit(num, passed, message):
    line = f"{'PASS' if passed else 'FAIL'} criterion {num}: {message}"
    print(line, flush=True)
    LINES.append(line)


# --- criteria ------------------------------------------------------------------

def criterion_1(threads):
    """Vaughan decomposition reproduces sum Lambda(n) g(n) to 1e-6 relative."""
    t0 = time.perf_counter()
    rows, worst = [], 0.0
    a = SQRT2.frac_mantissa
    for x in (10**3, 10**4, 10**5):
        dec = vaughan_decompose(x)
        hi, lo = quadratic_words(SQRT2, None, range(x + 1))
        # independent direct side: prime powers from the sieve, exact integer phases
        ps = sieve_primes(x).primes().tolist()
        support = []
        for p in ps:
            q = p
            while q <= x:
                if q > dec.n_lo:
                    support.append((q, math.log(p)))
                q *= p
        for k in (0, 1, 3):
            g = np.ones(x + 1, dtype=np.complex128) if k == 0 else expo(scale_words(hi, lo, k))
            got = dec.evaluate(g)["total"]
            if k == 0:
                want = math.fsum(L for _, L in support)
            else:
                want = sum(L * cmath.exp(2j * math.pi * (((a * n * n * k) % ONE) / ONE))
                           for n, L in support)
            rel = abs(got - want) / abs(want)
            worst = max(worst, rel)
            rows.append({"x": x, "k": k, "decomposed": got, "direct": want, "rel_err": rel})
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed <= 60
    return ok, f"max relative error {worst:.2e} over 9 cases, {elapsed:.1f}s (limit 60s)", rows


def criterion_2(threads):
    """Rosser sandwich at every n <= 1e5."""
    t0 = time.perf_counter()
    out, total = [], 0
    for D, z in ((1e2, 10.0), (1e3, 31.0), (1e4, 99.0)):
        bad = sandwich_violations(10**5, D, z)
        up, lo = rosser_weights(D, z, UPPER), rosser_weights(D, z, LOWER)
        # spot check with the per-n subset enumeration
        spot = [n for n in range(1, 10**5 + 1, 97) if not sandwich_check(n, up, lo)[3]]
        total += bad.size + len(spot)
        out.append({"D": D, "z": z, "violations": bad.tolist(), "spot_failures": spot,
                    "support_upper": len(up), "support_lower": len(lo)})
    elapsed = time.perf_counter() - t0
    ok = total == 0 and elapsed <= 30
    return ok, f"{total} violations at 3 (D, z) pairs, {elapsed:.1f}s (limit 30s)", out


def criterion_3(threads):
    """Every Rosser-supported d at D = 1e4, z = 99 splits for every dyadic H."""
    D = 1e4
    failures, checked = [], 0
    ds = sorted(set(rosser_weights(D, 99.0, UPPER).support) | set(rosser_weights(D, 99.0, LOWER).support))
    for j in range(int(math.log2(D)) + 1):
        H = 2.0 ** j
        S = D / H
        for d in ds:
            checked += 1
            try:
                h, s = well_separable_split(d, D, H, S)
                if not (h * s == d and h <= H and s <= S):
                    failures.append([d, H])
            except ArithmeticError:
                failures.append([d, H])
    return not failures, f"{len(failures)} failures over {checked} (d, H) pairs", \
        {"supported": len(ds), "checked": checked, "failures": failures}


def criterion_4(threads):
    """Sieve functions: initial value, closed form at 4, convergence at 10, monotonicity."""
    t0 = time.perf_counter()
    tab = sieve_functions(10.0, 1e-3)
    eg = math.exp(EULER_GAMMA)
    F2, f4 = tab.F(2.0), tab.f(4.0)
    gap10 = abs(tab.F(10.0) - tab.f(10.0))
    dF, df = np.diff(tab.F_values), np.diff(tab.f_values)
    past2 = tab.s_grid[1:] > 2
    checks = {
        "F(2)": abs(F2 - eg) <= 1e-9,
        "f(4)": abs(f4 - 2 * eg * math.log(3) / 4) <= 1e-6,
        "gap10": gap10 < 1e-3,
        "F_decreasing": bool(np.all(dF < 0)),
        "f_nondecreasing": bool(np.all(df >= 0)),
        "f_increasing_past_2": bool(np.all(df[past2] > 0)),
    }
    elapsed = time.perf_counter() - t0
    ok = all(checks.values()) and elapsed <= 5
    payload = {"F2": F2, "f4": f4, "gap10": gap10, "checks": checks}
    return ok, (f"|F(2)-e^g|={abs(F2 - eg):.1e}, |f(4)-closed|={abs(f4 - 2 * eg * math.log(3) / 4):.1e}, "
                f"|F(10)-f(10)|={gap10:.1e}, monotone={checks['F_decreasing'] and checks['f_increasing_past_2']}, "
                f"{elapsed:.1f}s (limit 5s)"), payload


def criterion_5(threads):
    """Bump function properties at delta = 0.01, x = 1e6."""
    spec = build_bump(0.01, 1e6)
    d = spec.delta
    c0_ok = abs(spec.coefficients[0] - d) <= 1e-12
    tail = spec.tail_bound()
    tail_ok = tail <= 1e-6
    outside = np.linspace(d, 1 - d, 1000)
    zero_ok = bool(np.all(bump_eval_direct(spec, outside) == 0))
    inside = np.linspace(-d + 1e-6, d - 1e-6, 1000)
    chi = bump_eval_direct(spec, inside)
    positive = bool(np.all(chi > 0))
    at_peak = int(np.count_nonzero(chi >= spec.h_scale))
    strict_ok = positive and at_peak == 0 and spec.h_scale < 1
    rng = np.random.default_rng(20240501)
    t = rng.uniform(0, 1, 1000)
    diff = float(np.max(np.abs(bump_eval_fourier(spec, t, spec.cutoff) - bump_eval_direct(spec, t))))
    ks = np.arange(1, spec.cutoff + 1)
    # double rounding budget of the partial sum, on top of the analytic tail
    rounding = 2.0 ** -50 * (d + 2 * float(np.sum(np.abs(spec.coefficients[1:]) * (1 + math.pi * ks))))
    fourier_ok = diff <= tail + rounding
    checks = {"c0": c0_ok, "tail": tail_ok, "zero_outside": zero_ok, "positive_inside": positive,
              "strictly_below_h_scale": strict_ok, "fourier_vs_direct": fourier_ok}
    payload = {"c0": float(spec.coefficients[0]), "tail_bound": tail, "h_scale": spec.h_scale,
               "grid_points_at_h_scale": at_peak, "plateau_half_width": spec.plateau,
               "fourier_max_diff": diff, "rounding_budget": rounding, "checks": checks}
    msg = (f"c(0)=delta {c0_ok}, tail {tail:.1e}<=1e-6 {tail_ok}, zero outside {zero_ok}, "
           f"0<chi {positive}, chi<h_scale strictly {strict_ok} ({at_peak}/1000 grid points sit on "
           f"the plateau chi=h_scale), Fourier-direct {diff:.1e}<=tail+rounding {fourier_ok}")
    return all(checks.values()), msg, payload


def _random_alpha(rng, i):
    if i % 2 == 0:
        return FixedReal.from_scaled(int.from_bytes(rng.bytes(24), "little"))
    # near a rational with small denominator, to reach the 1/(2||alpha d||) branch
    q = int(rng.integers(1, 50))
    a = int(rng.integers(0, q))
    eps = int.from_bytes(rng.bytes(16), "little") >> int(rng.integers(0, 64))
    scaled = (a * ONE) // q + eps
    return FixedReal.from_scaled(scaled % ONE)


def criterion_6(threads):
    """|S| <= min(X/d + 1, 1/(2||alpha d||)) on 1e5 seeded instances."""
    rng = np.random.default_rng(6)
    bad, resonant_side = [], 0
    worst = 0.0
    for i in range(10**5):
        alpha = _random_alpha(rng, i)
        d = int(rng.integers(1, 1000))
        X = int(rng.integers(1, 10**6))
        a = int(rng.integers(0, d))
        r = lemma3_check(alpha, X, d, a)
        worst = max(worst, r.abs_sum / r.bound)
        resonant_side += r.bound < X / d + 1
        if not r.passed:
            bad.append([alpha.frac_mantissa, X, d, a])
    return not bad, (f"{len(bad)} violations in 1e5 instances (max |S|/bound {worst:.6f}, "
                     f"{resonant_side} used the 1/(2||alpha d||) branch)"), \
        {"violations": bad, "max_ratio": worst, "distance_branch": resonant_side}


def criterion_7(threads):
    """frac_mul(sqrt 2, m) against a 400-bit oracle on 1e4 random m <= 1e20."""
    mpmath.mp.prec = 400
    root = mpmath.sqrt(2)
    rng = np.random.default_rng(7)
    worst = mpmath.mpf(0)
    for _ in range(10**4):
        m = int(rng.integers(0, 10**10)) * 10**10 + int(rng.integers(0, 10**10))
        got = mpmath.mpf(frac_mul(SQRT2, m).value) / mpmath.mpf(ONE)
        v = root * m
        want = v - mpmath.floor(v)
        err = abs(got - want)
        worst = max(worst, min(err, 1 - err))
    tol = mpmath.mpf(2) ** -60
    return bool(worst <= tol), f"max error 2^{float(mpmath.log(worst, 2)) if worst else -math.inf:.1f} (limit 2^-60)", \
        {"max_error_log2": float(mpmath.log(worst, 2)) if worst else None}


def criterion_8(threads):
    """Equidistribution calibration at alpha = sqrt 2, beta = 0, x = 1e6."""
    t0 = time.perf_counter()
    x = 10**6
    spec = build_bump(0.01, x)
    ps = sieve_primes(x, threads=threads).primes()
    hi, _ = quadratic_words(SQRT2, None, ps.tolist())
    ratio_a = float(np.sum(bump_eval_words(spec, hi))) / (0.01 * ps.size)
    cfg = ExperimentConfig.sqrt(2, theta=0.3, x=x)
    count, _ = count_good_primes(cfg)
    expected = expected_count(cfg)
    ratio_b = count / expected
    elapsed = time.perf_counter() - t0
    ok = 0.5 <= ratio_a <= 2 and count > 0 and 0.5 <= ratio_b <= 2 and elapsed <= 120
    return ok, (f"(a) sum chi/(delta pi(x)) = {ratio_a:.4f}, (b) count {count} / expected "
                f"{expected:.1f} = {ratio_b:.4f}, {elapsed:.1f}s (limit 120s)"), \
        {"ratio_a": ratio_a, "count": count, "expected": expected, "ratio_b": ratio_b}


def criterion_9(threads):
    """Buchstab assembly at x = 1e6 and per-piece Rosser sandwiches; output through the CLI."""
    path = OUT / f"threads-{threads}" / "experiment-1e6.json"
    code = dispatch(["experiment", "--x", "1000000", "--theta", "0.3", "--delta", "0.05",
                     "--threads", str(threads), "--out", str(path)])
    rep = ExperimentReport.from_json(path.read_text())
    cfg = ExperimentConfig.sqrt(2, theta=0.3, x=10**6, delta=0.05)
    # independent direct scans with the smallest-prime-factor table
    A = build_sequence(cfg)
    spf = spf_array(10**6 + 2)[A.ns]
    s_exact = float(np.sum(A.weights[spf >= cfg.x ** (1 / 3)]))
    mult = buchstab_multiplicities(A.ns, cfg.x, cfg.z_exponent, cfg.p1_exponent, cfg.s4_exponent)
    rough = spf >= cfg.z
    scans = {f"S{i + 1}": float(np.sum(A.weights * c * rough)) for i, c in enumerate(mult)}
    bad = []
    for name, piece in rep.pieces.items():
        if not piece["lower"] <= scans[name] <= piece["upper"]:
            bad.append(name)
        if not math.isclose(piece["exact"], scans[name], rel_tol=1e-12, abs_tol=1e-9):
            bad.append(name + " exact")
    if not math.isclose(rep.S_exact, s_exact, rel_tol=1e-12):
        bad.append("S_exact")
    assembled = rep.lower_bound_estimate
    ok = code == 0 and not bad and assembled <= s_exact
    return ok, (f"S1_lo - S2_up/2 - S3_up/2 - S4_up = {assembled:.2f} <= S_exact = {s_exact:.2f}; "
                f"piece failures {bad or 'none'}"), \
        {"assembled": assembled, "S_exact_scan": s_exact, "piece_scans": scans, "failures": bad}


def criterion_10(threads):
    """Trend diagnostics; failures go to a diagnostic report rather than a hard failure."""
    w_rows = lemma1_trend(0.004, (169, 985, 5741, 33461), SQRT2, threads=threads)
    r_rows = r1_trend((10**5, 10**6, 10**7))
    w_ok, r_ok = trend_ok(w_rows), trend_ok(r_rows)
    diag = {
        "lemma1_W_over_q": {"rows": w_rows, "non_increasing_within_factor_2": w_ok,
                            "note": "weights {1: 1}, unit c(k), b = -2; the level D is below 1 "
                                    "for these q so only d = 1 carries weight"},
        "R1_sum_over_x_log3": {"rows": r_rows, "non_increasing_within_factor_2": r_ok,
                               "note": "D = x**0.5, odd squarefree d"},
    }
    path = OUT / f"threads-{threads}" / "criterion10_diagnostic.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    io.write_json(path, diag)
    w_ratios = ", ".join(f"{r['ratio']:.3f}" for r in w_rows)
    r_ratios = ", ".join(f"{r['ratio']:.3f}" for r in r_rows)
    return (w_ok and r_ok), (f"|W(q)|/q = [{w_ratios}] trend {'ok' if w_ok else 'FAILS'}; "
                             f"R1 ratio = [{r_ratios}] trend {'ok' if r_ok else 'FAILS'}; "
                             f"diagnostic written to {path.relative_to(OUT.parent)}"), diag


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}
_cache: dict = {}


def run_criterion(n, threads):
    key = (n, threads)
    if key not in _cache:
        out = OUT / f"threads-{threads}"
        out.mkdir(parents=True, exist_ok=True)
        passed, message, payload = CRITERIA[n](threads)
        io.write_json(out / f"criterion{n}.json", {"criterion": n, "passed": passed,
                                                   "payload": payload})
        _cache[key] = (passed, message)
    return _cache[key]


# --- pytest entry points --------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8, 9])
def test_criterion(n):
    passed, message = run_criterion(n, 1)
    emit(n, passed, message)
    assert passed, message


def test_criterion_10():
    passed, message = run_criterion(10, 1)
    emit(10, passed, message + ("" if passed else " (informational, diagnostic emitted)"))
    assert (OUT / "threads-1" / "criterion10_diagnostic.json").exists()


def test_criterion_11():
    for n in CRITERIA:
        run_criterion(n, 1)
        run_criterion(n, 4)
    one, four = OUT / "threads-1", OUT / "threads-4"
    names = sorted(p.name for p in one.iterdir())
    differing = [nm for nm in names if (one / nm).read_bytes() != (four / nm).read_bytes()]
    missing = sorted(set(names) ^ {p.name for p in four.iterdir()})
    passed = not differing and not missing
    emit(11, passed, f"{len(names)} output files compared for threads 1 vs 4; "
                     f"differing {differing or 'none'}, missing {missing or 'none'}")
    assert passed


if __name__ == "__main__":
    for n in CRITERIA:
        emit(n, *run_criterion(n, 1))
    test_criterion_11()
