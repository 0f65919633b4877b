"""Command-line front end: ``fbqueue <command> --model cfg.yaml [options]``.

Every command writes one table.  JSON output wraps it as
``{"command", "provenance", "table", ...extras}``; CSV output writes the
table alone with a header row.  Exit status is 0 on success, 2 for a bad
config or option, 3 for a numerical failure and 1 when ``verify`` finds a
failing check.
"""
from __future__ import annotations

import argparse
import csv
import functools
import hashlib
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .diffusion_limit import convergence_report, reference_model
from .exit import two_sided
from .inversion import InversionError, InversionRequest, invert
from .model import BatchLaw, Exponential, ModelError, QueueModel, cumulant, load_model
from .queueing import (SystemState, busy_period_lt, busy_period_mean, first_loss_count, first_loss_lt,
                       first_loss_mean, stationary_dist, transient_counts)
from .resolvent import q_contour, q_table
from .reflected import QuadratureError
from .root import RootStagnation, solve_c
from .simulator import ESTIMANDS, SimConfig, simulate, write_histogram_csv


class UsageError(Exception):
    pass


_NUMERICAL = (RootStagnation, QuadratureError, InversionError, OverflowError, FloatingPointError)


def _floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"option --{name}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise UsageError(f"option --{name} is empty")
    return vals


def _levels(text: str | None, top: int) -> list[int]:
    """``"0..B+1"``, ``"2..5"`` or ``"0,3,7"``."""
    if text is None:
        return list(range(top + 1))
    text = text.replace("B+1", str(top)).replace("B", str(top - 1))
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"option --levels: cannot parse {text!r}") from None
    bad = [u for u in out if not 0 <= u <= top]
    if bad:
        raise UsageError(f"option --levels: {bad} outside 0..{top}")
    return out


def _config_hash(model: QueueModel) -> str:
    blob = json.dumps(model.to_config(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _state(args, model) -> SystemState:
    try:
        return SystemState(args.r, args.x).check(model)
    except ModelError as exc:
        raise UsageError(f"options --r/--x: {exc}") from None


# ---------------------------------------------------------------------------
# commands; each returns (header, rows, extras)


def cmd_stationary(model, args):
    pi = stationary_dist(model).masses
    return ["level", "prob"], [[u, float(p)] for u, p in enumerate(pi)], {}


def cmd_busy_period(model, args):
    st = _state(args, model)
    rows = [[s, busy_period_lt(model, st, s)] for s in _floats(args.s_grid, "s-grid")]
    return ["s", "lt"], rows, {"mean": busy_period_mean(model, st)}


def cmd_first_loss(model, args):
    st = _state(args, model)
    rows = [[s, first_loss_lt(model, st, s)] for s in _floats(args.s_grid, "s-grid")]
    extras = {"mean": first_loss_mean(model, st)}
    if model.lam == 0:
        extras["loss_count_pmf"] = {n: first_loss_count(model, st, args.pmf_s, n)
                                    for n in range(1, args.max_count + 1)}
    return ["s", "lt"], rows, extras


def cmd_transient(model, args):
    st = _state(args, model)
    levels = _levels(args.levels, model.B + 1)
    rows = []
    worst = 0.0
    counts = functools.lru_cache(maxsize=None)(lambda s: transient_counts(model, st, s))
    for t in _floats(args.times, "times"):
        for u in levels:
            res = invert(InversionRequest(lambda s, u=u: counts(s).cdf(u) / s, t, order=args.order))
            worst = max(worst, res.error_estimate)
            rows.append([t, u, res.value, res.error_estimate])
    return ["t", "level", "cdf", "error_estimate"], rows, {"max_error_estimate": worst}


def cmd_exit(model, args):
    rows = []
    for s in _floats(args.s_grid, "s-grid"):
        law = two_sided(model, args.x, args.lower, args.upper, s)
        rows.append([s, law.lower_lt, law.upper_lt])
    p = two_sided(model, args.x, args.lower, args.upper, 0.0)
    return ["s", "lower_lt", "upper_lt"], rows, {"lower_prob": p.lower_prob, "upper_prob": p.upper_prob}


def cmd_simulate(model, args):
    est = tuple(e.strip() for e in args.estimands.split(","))
    bounds = (args.lower, args.upper) if "exit_side" in est else None
    cfg = SimConfig(model, _state(args, model), horizon=args.horizon, replications=args.replications,
                    seed=args.seed, estimands=est, exit_bounds=bounds, workers=args.workers)
    res = simulate(cfg)
    rows = [[k, e.mean, e.variance, e.half_width_99, e.n] for k, e in res.estimates.items()]
    if args.histogram:
        write_histogram_csv(res, args.histogram_of or est[0], args.histogram)
    return ["estimand", "mean", "variance", "half_width_99", "n"], rows, {"summary": res.summary()}


# ---------------------------------------------------------------------------
# verify


def _mm1n(mu=0.7, nu=1.0, B=8):
    return QueueModel(mu=mu, batch=BatchLaw.constant(1), service=Exponential(nu), lam=0.0, B=B)


def verification_checks(model: QueueModel | None, *, quick: bool = False):
    """Yield ``(name, measured, tolerance, passed)`` for each cross-check."""
    # analytic root: λ=0, κ≡1, μ=1, ν=2, s=1 gives 2 - √2
    m = QueueModel(mu=1.0, batch=BatchLaw.constant(1), service=Exponential(2.0), lam=0.0, B=5)
    err = abs(solve_c(m, 1.0).c - (2 - math.sqrt(2)))
    yield "root quadratic case", err, 1e-12, err < 1e-12

    mm = _mm1n()
    pi = stationary_dist(mm).masses
    w = (mm.mu * mm.service.mean) ** np.arange(mm.B + 2)
    err = float(np.max(np.abs(pi - w / w.sum())))
    yield "M/M/1/N stationary law", err, 1e-10, err < 1e-10

    targets = [model] if model is not None else [m, _mm1n(0.9), reference_model(20)]
    for i, tm in enumerate(targets):
        tag = f"model[{i}]"
        s_grid = np.logspace(-3, 1, 7)
        res = 0.0
        for s in s_grid:
            c = solve_c(tm, s).c
            k = float(np.real(cumulant(tm, c)))
            res = max(res, abs(c - (tm.lam + (1 - tm.lam) * float(np.real(tm.service.lt(s - k))))))
        yield f"{tag} root residual", res, 1e-12, res < 1e-12
        s = 0.7
        tab = q_table(tm, 0.0, s, 30)
        rel = max(abs(q_contour(tm, 0.0, s, k) - tab.Q(k)) / abs(tab.Q(k)) for k in range(0, 31, 5))
        yield f"{tag} recurrence vs contour", rel, 1e-9, rel < 1e-9
        pi = stationary_dist(tm).masses
        tot = abs(math.fsum(pi.tolist()) - 1)
        ok = tot < 1e-10 and bool(np.all(pi > -1e-12))
        yield f"{tag} stationary normalisation", tot, 1e-10, ok
        r, k = 2, 3
        law = two_sided(tm, 0.0, r, k, 0.0)
        tot = abs(law.lower_prob + law.upper_prob - 1)
        yield f"{tag} exit completeness", tot, 1e-12, tot < 1e-12
        st = SystemState(1)
        reps = 4000 if quick else 20000
        sim = simulate(SimConfig(tm, st, replications=reps, seed=12345, estimands=("busy_period",)))
        e = sim.estimates["busy_period"]
        exact = busy_period_mean(tm, st)
        yield f"{tag} simulated busy period in 99% CI", abs(e.mean - exact), e.half_width_99, e.covers(exact)

    ref = reference_model()
    for q in ("root", "resolvent", "partial_sum", "passage") + (() if quick else ("trivariate", "reflected_window")):
        rep = convergence_report(ref, q)
        yield f"diffusion {q} deviations nonincreasing", rep.deviations[-1], rep.deviations[0], rep.nonincreasing


def cmd_verify(model, args):
    rows = []
    for name, got, tol, ok in verification_checks(model, quick=args.quick):
        rows.append([name, float(got), float(tol), "pass" if ok else "FAIL"])
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {got:.3g} (tolerance {tol:.3g})", file=sys.stderr)
    return ["check", "measured", "tolerance", "status"], rows, {}


COMMANDS = {
    "stationary": cmd_stationary,
    "busy-period": cmd_busy_period,
    "first-loss": cmd_first_loss,
    "transient": cmd_transient,
    "exit": cmd_exit,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fbqueue", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model_required=True):
        sp.add_argument("--model", required=model_required, help="JSON or YAML model config")
        sp.add_argument("--output", help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    def state(sp):
        sp.add_argument("--r", type=int, default=1, help="customers present at time 0")
        sp.add_argument("--x", type=float, default=0.0, help="age of the service in progress")

    sp = sub.add_parser("stationary", help="long-run law of the number in system")
    common(sp)
    sp = sub.add_parser("busy-period", help="busy-period transform and mean")
    common(sp); state(sp)
    sp.add_argument("--s-grid", default="0.01,0.1,1")
    sp = sub.add_parser("first-loss", help="first-loss transform, mean and loss-count law")
    common(sp); state(sp)
    sp.add_argument("--s-grid", default="0.01,0.1,1")
    sp.add_argument("--pmf-s", type=float, default=1e-9, help="transform variable for the count law")
    sp.add_argument("--max-count", type=int, default=5)
    sp = sub.add_parser("transient", help="P[number in system <= u] at given times")
    common(sp); state(sp)
    sp.add_argument("--levels", help="e.g. 0..B+1 or 0,2,4 (default all)")
    sp.add_argument("--times", default="1")
    sp.add_argument("--order", type=int, default=14, help="Stehfest order")
    sp = sub.add_parser("exit", help="two-sided exit of the free process from [-lower, upper]")
    common(sp)
    sp.add_argument("--x", type=float, default=0.0)
    sp.add_argument("--lower", type=int, required=True)
    sp.add_argument("--upper", type=int, required=True)
    sp.add_argument("--s-grid", default="0.1,1")
    sp = sub.add_parser("simulate", help="Monte Carlo estimates")
    common(sp); state(sp)
    sp.add_argument("--estimands", default="busy_period", help=",".join(ESTIMANDS))
    sp.add_argument("--horizon", type=float, default=10.0)
    sp.add_argument("--replications", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--lower", type=int, default=2)
    sp.add_argument("--upper", type=int, default=2)
    sp.add_argument("--histogram", help="CSV path for a (level,count) histogram")
    sp.add_argument("--histogram-of", help="estimand for --histogram")
    sp = sub.add_parser("verify", help="cross-validation suite; exit 0 iff every check passes")
    common(sp, model_required=False)
    sp.add_argument("--quick", action="store_true", help="fewer replications, skip slow diffusion checks")
    return p


def _emit(args, model, header, rows, extras):
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        prov = {"library_version": __version__, "seed": getattr(args, "seed", None),
                "config_hash": _config_hash(model) if model is not None else None,
                "generated_unix": int(time.time())}
        doc = {"command": args.command, "provenance": prov,
               "table": {"columns": header, "rows": rows}, **extras}
        text = json.dumps(doc, indent=2, default=float) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        model = load_model(args.model) if args.model else None
    except FileNotFoundError:
        print(f"error: model config not found: {args.model}", file=sys.stderr)
        return 2
    except (ModelError, ValueError, TypeError) as exc:
        print(f"error: bad model config {args.model}: {exc}", file=sys.stderr)
        return 2
    try:
        header, rows, extras = COMMANDS[args.command](model, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL as exc:
        print(f"error: {args.command} numerical failure: {exc}", file=sys.stderr)
        return 3
    except ModelError as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 2
    _emit(args, model, header, rows, extras)
    if args.command == "verify":
        return 0 if all(r[3] == "pass" for r in rows) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
