"""Command-line front end.

    python -m twinphase <command> [options] [--out PATH] [--format json|csv]

Exit codes: 0 success, 1 usage, 2 validation, 3 budget guard.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .arith import FixedReal, fixed_from_sqrt
from .errors import BudgetError, DomainError, PrecisionError, SplitError, WindowEmptyError

log = logging.getLogger("twinphase")

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_BUDGET = 0, 1, 2, 3
THREADS_ENV = "TWINPHASE_THREADS"


class UsageError(Exception):
    pass


class ConfigError(ValueError):
    pass


def parse_alpha(text: str) -> FixedReal:
    """``sqrt:<d>`` or ``fixed:<hex mantissa>/<bits>``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "sqrt":
            return fixed_from_sqrt(int(rest))
        if kind == "fixed":
            mant, _, bits = rest.partition("/")
            return FixedReal.from_hex(mant, int(bits))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad real {text!r}: {exc}") from None
    raise argparse.ArgumentTypeError(f"bad real {text!r}; use sqrt:<d> or fixed:<hex>/<bits>")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        # allow 1e6 style input when it names an exact integer
        f = float(text)
        if not (math.isfinite(f) and f.is_integer() and f < 2**53):
            raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}") from None
        v = int(f)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _theta(text: str) -> float:
    v = float(text)
    if not 0 <= v < 1:
        raise argparse.ArgumentTypeError(f"theta must lie in [0, 1), got {text}")
    return v


def _num(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return v


# --- command implementations ---------------------------------------------------
# Each returns (rows or None, record or None); rows[0] is the CSV header.

def cmd_convergents(a):
    from .diophantine import convergents
    cs = convergents(a.alpha, a.count)
    rows = [("a", "q")] + [(c.a, c.q) for c in cs]
    return rows, {"alpha": a.alpha_text, "truncated": cs.truncated,
                  "convergents": [[c.a, c.q] for c in cs]}


def cmd_primes(a):
    from .primes import sieve_primes
    table = sieve_primes(a.limit, threads=a.threads)
    ps = table.primes(a.lo, a.limit)
    return [("p",)] + [(int(p),) for p in ps], {"limit": a.limit, "lo": a.lo, "count": int(ps.size)}


def cmd_classify(a):
    from .experiment import _p2_twins
    ps, om = _p2_twins(a.limit)
    rows = [("p", "omega_p_plus_2")] + [(int(p), int(o)) for p, o in zip(ps, om)]
    return rows, {"limit": a.limit, "count": int(ps.size)}


def cmd_bump(a):
    from .bump import build_bump
    spec = build_bump(a.delta, a.x)
    rec = {"delta": spec.delta, "r": spec.r, "h_scale": spec.h_scale, "delta2": spec.delta2,
           "w": spec.w, "K": spec.K, "cutoff": spec.cutoff, "tail_bound": spec.tail_bound()}
    return list(spec.csv_rows()), rec


def cmd_expsum(a):
    from . import expsum
    from .diophantine import select_denominator
    from .params import SieveParams
    op = a.op
    if op == "progression":
        res = expsum.lemma3_check(a.alpha, a.X, a.d, a.a)
        val = expsum.eval_progression_sum(a.alpha, a.X, a.d, a.a)
        return None, io.expsum_record("eval_progression_sum", _inputs(a, "X", "d", "a"), val,
                                      [res.bound], [res.abs_sum / res.bound])
    if op == "lemma3-scan":
        rng = np.random.default_rng(a.seed)
        bad = 0
        for _ in range(a.trials):
            d = int(rng.integers(1, 1000))
            X = int(rng.integers(1, 10**6))
            r = int(rng.integers(0, d))
            bad += not expsum.lemma3_check(a.alpha, X, d, r).passed
        return None, {"operation": "lemma3_scan", "trials": a.trials, "seed": a.seed,
                      "violations": bad, "schema": io.SCHEMA_VERSION}
    conv = select_denominator(a.alpha, 1, max(a.X, 2) + 1) if op in ("lemma4",) else None
    if op == "lemma4":
        val, ratio = expsum.eval_lemma4_sum(a.alpha, a.X, a.Y, conv)
        return None, io.expsum_record("eval_lemma4_sum", _inputs(a, "X", "Y") | {"q": conv.q},
                                      val, [expsum.lemma4_rhs(a.X, a.Y, conv.q)], [ratio])
    if op == "lemma5":
        val = expsum.eval_lemma5_sum(a.alpha, a.M, a.J, a.x, a.mu, a.zeta)
        q = a.q or select_denominator(a.alpha, 1, a.x).q
        rhs = expsum.lemma5_rhs(a.x, a.M, a.J, q)
        return None, io.expsum_record("eval_lemma5_sum", _inputs(a, "M", "J", "x", "mu", "zeta") | {"q": q},
                                      val, rhs, [val / math.fsum(rhs)])
    if op == "G":
        q = a.q or select_denominator(a.alpha, 1, a.x).q
        val, r9, r10 = expsum.eval_G(a.alpha, a.M, a.S, a.J, a.x, a.mu, a.sigma, a.zeta, q)
        t9, t10 = expsum.lemma7_rhs(a.x, a.M, a.S, a.J, q)
        return None, io.expsum_record("eval_G", _inputs(a, "M", "S", "J", "x") | {"q": q},
                                      val, t9 + t10, [r9, r10])
    if op == "W":
        params = SieveParams.from_exponents(a.x, a.theta, a.rho, strict=False)
        coeffs = expsum.CoefficientTable.unit(min(params.K, a.k_max))
        val = expsum.eval_W_direct(params, expsum.WeightTable.singleton(1), coeffs, a.b,
                                   a.alpha, a.beta, a.threads)
        trivial = expsum.trivial_W_bound(params, expsum.WeightTable.singleton(1), coeffs, a.b)
        return None, io.expsum_record("eval_W_direct", _inputs(a, "x", "theta", "rho", "b", "k_max"),
                                      val, [trivial], [abs(val) / trivial])
    raise UsageError(f"unknown expsum op {op!r}")


def _inputs(a, *names):
    out = {"alpha": a.alpha_text}
    for n in names:
        out[n] = getattr(a, n)
    return out


def cmd_vaughan_check(a):
    from .expsum import quadratic_words
    from .vaughan import vaughan_decompose
    from .arith import expo, scale_words
    dec = vaughan_decompose(a.x, a.U, a.V)
    if a.k == 0:
        g = np.ones(dec.x + 1)
    else:
        hi, lo = quadratic_words(a.alpha, None, range(dec.x + 1))
        g = expo(scale_words(hi, lo, a.k))
    parts = dec.evaluate(g)
    direct = dec.direct(g)
    rel = abs(parts["total"] - direct) / max(abs(direct), 1e-300)
    rec = io.expsum_record("vaughan_decompose", {"alpha": a.alpha_text, "x": dec.x, "U": dec.U,
                                                  "V": dec.V, "k": a.k}, parts["total"], [], [rel])
    rec["components"] = {k: v for k, v in parts.items() if k != "total"}
    rec["direct"] = direct
    return None, rec


def cmd_lemma_bounds(a):
    from .expsum import remark2_window, theorem1_bound
    from .params import SieveParams
    params = SieveParams.from_exponents(a.x, a.theta, a.rho, a.omega)
    win = remark2_window(params)
    q = a.q if a.q else (math.exp(win.log_geometric_mean) if not win.empty else 2.0)
    b = theorem1_bound(params, q)
    return None, {"schema": io.SCHEMA_VERSION, "params": params.to_dict(), "q": q,
                  "terms": list(b.terms), "total": b.total, "eps": b.eps, "x_eps": b.x_eps,
                  "trivial": params.x * params.K,
                  "window": {"log_lo": win.log_lo, "log_hi": win.log_hi, "empty": win.empty}}


def cmd_rosser(a):
    from .sieve import rosser_weights
    tab = rosser_weights(a.D, a.z, a.parity)
    return list(tab.csv_rows()), {"D": tab.D, "z": tab.z, "parity": tab.parity, "size": len(tab)}


def cmd_sieve_functions(a):
    from .sieve import sieve_functions
    tab = sieve_functions(a.s_max, a.step)
    return list(tab.csv_rows()), {"s_max": a.s_max, "step": tab.step, "F(2)": tab.F(2.0),
                                  "f(4)": tab.f(4.0) if a.s_max >= 4 else None}


def cmd_sieve_bounds(a):
    from .sieve import WeightedSequence, sieve_bounds, twin_density
    A = WeightedSequence.unweighted(np.arange(1, a.limit + 1), f"n <= {a.limit}")
    omega = twin_density if a.density == "twin" else (lambda p: 1.0)
    res = sieve_bounds(A, a.z, a.D, omega)
    return None, {"schema": io.SCHEMA_VERSION, "limit": a.limit, "z": a.z, "D": a.D} | asdict(res)


def cmd_experiment(a):
    from .experiment import ExperimentConfig, run_experiment, witness_rows, Witness
    cfg = ExperimentConfig(alpha=a.alpha, alpha_label=a.alpha_text, beta=a.beta, theta=a.theta,
                           x=a.x, delta=a.delta, level_exponent=a.level_exponent,
                           s4_exponent=a.s4_exponent, with_r2=not a.no_r2,
                           r2_cutoff=a.r2_cutoff, c0_cutoff=a.c0_cutoff)
    rep = run_experiment(cfg, threads=a.threads)
    if a.witnesses:
        io.write_csv(a.witnesses, witness_rows([Witness(**w) for w in rep.witnesses]))
    return None, rep.to_dict()


def cmd_lemma1_scan(a):
    from .experiment import lemma1_trend, trend_ok
    from .params import LEMMA1_EXPONENT, lemma1_level_threshold
    dens = [int(v) for v in a.denominators.split(",")]
    rows = lemma1_trend(a.theta, dens, a.alpha, threads=a.threads)
    thr = lemma1_level_threshold(a.theta, LEMMA1_EXPONENT)
    table = [("q", "K", "D", "W_abs", "ratio")] + [(r["q"], r["K"], r["D"], r["W_abs"], r["ratio"])
                                                   for r in rows]
    return table, {"theta": a.theta, "rows": rows, "trend_ok": trend_ok(rows),
                   "log_x_threshold_D_ge_1": thr}


COMMANDS = {
    "convergents": cmd_convergents, "primes": cmd_primes, "classify": cmd_classify,
    "bump": cmd_bump, "expsum": cmd_expsum, "vaughan-check": cmd_vaughan_check,
    "lemma-bounds": cmd_lemma_bounds, "rosser": cmd_rosser,
    "sieve-functions": cmd_sieve_functions, "sieve-bounds": cmd_sieve_bounds,
    "experiment": cmd_experiment, "lemma1-scan": cmd_lemma1_scan,
}
TABULAR = {"convergents", "primes", "classify", "bump", "rosser", "sieve-functions", "lemma1-scan"}


# --- parser ------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--threads", type=_positive_int,
                        default=int(os.environ.get(THREADS_ENV, "1") or 1))
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--config", help="flat key = value file of option defaults")
    alpha = _Parser(add_help=False)
    alpha.add_argument("--alpha", default="sqrt:2", dest="alpha_text")

    p = _Parser(prog="twinphase", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("convergents", parents=[common, alpha])
    s.add_argument("--count", type=_positive_int, default=10)

    s = sub.add_parser("primes", parents=[common])
    s.add_argument("--limit", type=_positive_int, required=True)
    s.add_argument("--lo", type=int, default=0)

    s = sub.add_parser("classify", parents=[common])
    s.add_argument("--limit", type=_positive_int, required=True)

    s = sub.add_parser("bump", parents=[common])
    s.add_argument("--delta", type=_num, default=0.01)
    s.add_argument("--x", type=_num, default=1e6)

    s = sub.add_parser("expsum", parents=[common, alpha])
    s.add_argument("--op", required=True,
                   choices=("progression", "lemma3-scan", "lemma4", "lemma5", "G", "W"))
    for name, typ, default in (("X", int, 10**4), ("Y", _num, 100.0), ("d", _positive_int, 1),
                               ("a", int, 0), ("M", _num, 64.0), ("S", _num, 8.0),
                               ("J", _num, 64.0), ("x", _num, 1e6), ("mu", int, 2),
                               ("sigma", int, 2), ("zeta", int, 2), ("q", int, 0),
                               ("theta", _theta, 0.004), ("rho", _num, 0.14),
                               ("b", int, -2), ("k_max", _num, 10.0),
                               ("trials", _positive_int, 1000)):
        s.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, default=default)
    s.add_argument("--beta", default="fixed:0/1", dest="beta_text")

    s = sub.add_parser("vaughan-check", parents=[common, alpha])
    s.add_argument("--x", type=_num, default=1e4)
    s.add_argument("--U", type=_num)
    s.add_argument("--V", type=_num)
    s.add_argument("--k", type=int, default=1)

    s = sub.add_parser("lemma-bounds", parents=[common])
    s.add_argument("--x", type=_num, default=1e6)
    s.add_argument("--theta", type=_theta, default=1e-3)
    s.add_argument("--rho", type=_num, default=0.04)
    s.add_argument("--omega", type=_num, default=0.01)
    s.add_argument("--q", type=_num, default=0.0)

    s = sub.add_parser("rosser", parents=[common])
    s.add_argument("--D", type=_num, required=True)
    s.add_argument("--z", type=_num, required=True)
    s.add_argument("--parity", choices=("upper", "lower"), default="upper")

    s = sub.add_parser("sieve-functions", parents=[common])
    s.add_argument("--s-max", dest="s_max", type=_num, default=10.0)
    s.add_argument("--step", type=_num, default=1e-3)

    s = sub.add_parser("sieve-bounds", parents=[common])
    s.add_argument("--limit", type=_positive_int, default=10**4)
    s.add_argument("--z", type=_num, default=10.0)
    s.add_argument("--D", type=_num, default=100.0)
    s.add_argument("--density", choices=("twin", "one"), default="one")

    s = sub.add_parser("experiment", parents=[common, alpha])
    s.add_argument("--x", type=_positive_int, default=10**6)
    s.add_argument("--theta", type=_theta, default=0.3)
    s.add_argument("--delta", type=_num, default=0.05)
    s.add_argument("--beta", default="fixed:0/1", dest="beta_text")
    s.add_argument("--level-exponent", dest="level_exponent", type=_num, default=0.5)
    s.add_argument("--s4-exponent", dest="s4_exponent", type=_num, default=1 / 12)
    s.add_argument("--r2-cutoff", dest="r2_cutoff", type=int)
    s.add_argument("--c0-cutoff", dest="c0_cutoff", type=_positive_int, default=10**8)
    s.add_argument("--no-r2", dest="no_r2", action="store_true")
    s.add_argument("--witnesses", help="CSV path for the witness list")

    s = sub.add_parser("lemma1-scan", parents=[common, alpha])
    s.add_argument("--theta", type=_theta, default=0.004)
    s.add_argument("--denominators", default="169,985,5741,33461")
    return p


# --- config files ----------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str | None
    params: dict = field(default_factory=dict)
    out: str | None = None
    format: str | None = None
    threads: int = 1
    seed: int = 0


_META = {"out", "format", "threads", "seed"}


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise ConfigError(f"unknown command {command!r}")


def load_config(path, command: str | None = None) -> RunConfig:
    """Read a flat ``key = value`` file; '#' starts a comment.

    Keys are option names of the command (dashes or underscores).  Values
    are converted and validated with the option's own type.
    """
    raw: dict[str, tuple[int, str]] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = (lineno, value.strip())
    if "command" in raw:
        cmd = raw.pop("command")[1]
        if command is not None and cmd != command:
            raise ConfigError(f"config is for {cmd!r}, not {command!r}")
        command = cmd
    parser = build_parser()
    if command is None:
        # no command yet: type each key by the first subcommand that owns it
        actions = {}
        for choice in parser._subparsers._group_actions[0].choices.values():
            for act in choice._actions:
                actions.setdefault(act.dest, act)
    else:
        actions = {act.dest: act for act in _subparser(parser, command)._actions}
    for skip in ("help", "config"):
        actions.pop(skip, None)
    cfg = RunConfig(command)
    for key, (lineno, value) in raw.items():
        action = actions.get(key)
        if action is None and key == "alpha":
            action = actions.get("alpha_text")
            key = "alpha_text"
        if action is None and key == "beta":
            action = actions.get("beta_text")
            key = "beta_text"
        if action is None:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} for {command}")
        try:
            if action.nargs == 0:
                typed = value.lower() in ("1", "true", "yes", "on")
            else:
                typed = action.type(value) if action.type else value
                if action.choices is not None and typed not in action.choices:
                    raise ValueError(f"must be one of {sorted(action.choices)}")
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
        if key in _META:
            setattr(cfg, key, typed)
        else:
            cfg.params[key] = typed
    return cfg


# --- dispatch ----------------------------------------------------------------------------

def _emit(a, rows, record) -> None:
    fmt = a.format or ("csv" if a.command in TABULAR and rows is not None else "json")
    if fmt == "csv":
        if rows is None:
            raise DomainError(f"{a.command} has no CSV form; use --format json")
        text = io.csv_text(rows)
    else:
        if rows is not None and a.command in TABULAR:
            payload = {"schema": io.SCHEMA_VERSION, "command": a.command,
                       "columns": list(rows[0]), "rows": [list(r) for r in rows[1:]],
                       "summary": record}
        else:
            payload = dict(record)
            payload.setdefault("schema", io.SCHEMA_VERSION)
        text = io.dumps(payload)
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)


def dispatch(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if a.command is None:
            raise UsageError(parser.format_help())
        if a.config:
            cfg = load_config(a.config, a.command)
            sub = _subparser(parser, a.command)
            defaults = dict(cfg.params)
            for key in _META:
                val = getattr(cfg, key)
                if key == "threads" and val == 1 or key == "seed" and val == 0 or val is None:
                    continue
                defaults[key] = val
            sub.set_defaults(**defaults)
            a = parser.parse_args(argv)
        if hasattr(a, "alpha_text"):
            a.alpha = parse_alpha(a.alpha_text)
        if hasattr(a, "beta_text"):
            a.beta = parse_alpha(a.beta_text)
        rows, record = COMMANDS[a.command](a)
        _emit(a, rows, record)
        return EXIT_OK
    except UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return EXIT_USAGE
    except BudgetError as exc:
        sys.stderr.write(f"budget guard: {exc}\n")
        return EXIT_BUDGET
    except (DomainError, ConfigError, PrecisionError, SplitError, WindowEmptyError,
            argparse.ArgumentTypeError, ValueError) as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(dispatch())
