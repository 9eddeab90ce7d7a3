"""Command-line front end.

Exit codes: 0 success (or an all-zero equilibrium), 2 input error,
3 no pure equilibrium, 4 a pair cannot be stabilized.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
import warnings

import numpy as np

from . import __version__
from ._numeric import sig12
from .config import ConfigError, load_config, read_trajectories
from .designer import (
    DEFAULT_HORIZON,
    climbing_cost_curve,
    optimal_tbt,
    rule_of_thumb_threshold,
    simplified_threshold,
    stabilizing_threshold,
)
from .equilibrium import (
    MOVER_RULES,
    CycleDetected,
    Exhausted,
    FixedPoint,
    RegularityError,
    Status,
    best_response_dynamics,
    default_grid_max,
    pne_verdict,
)
from .fitting import (
    DataError,
    FitError,
    estimate_upper_asymptote,
    fit_trajectory,
    pair_statistics,
    slope_ratio,
    validate_dataset,
)
from .game import EffortProfile
from .score import UNREACHABLE

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_PNE = 3
EXIT_NOT_STABILIZABLE = 4


def _plain(obj):
    """JSON-ready copy with floats at 12 significant digits."""
    if obj is UNREACHABLE:
        return "unreachable"
    if isinstance(obj, Status):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return sig12(x)
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _num(x):
    if x is None:
        return ""
    if x is UNREACHABLE:
        return "unreachable"
    return f"{float(x):.12g}"


def _emit(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".rankgame-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(payload, path):
    _emit(json.dumps(_plain(payload), indent=2, sort_keys=False) + "\n", path)


def _fail(msg, code=EXIT_INPUT):
    print(f"error: {msg}", file=sys.stderr)
    return code


# --- fit --------------------------------------------------------------------


def cmd_fit(args) -> int:
    try:
        samples = read_trajectories(args.input)
        validate_dataset(samples)
    except DataError as exc:
        return _fail(exc)
    except OSError as exc:
        return _fail(exc)

    lower = args.lower if args.lower is not None else (args.chance_level or 0.0)
    order = list(samples)
    if args.order:
        order = [s.strip() for s in args.order.split(",") if s.strip()]
        if sorted(order) != sorted(samples):
            return _fail("--order must list every model_id exactly once")

    models, fits = [], {}
    notes = []
    for mid in order:
        e, v = samples[mid]
        upper = args.upper
        search = None
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                if args.estimate_upper:
                    top = max(v)
                    if top >= 1.0:
                        raise DataError(f"model {mid!r}: cannot search an upper asymptote above 1")
                    grid = np.linspace(top, 1.0, args.upper_grid + 1)[1:]
                    search = estimate_upper_asymptote(e, v, lower, grid)
                    upper = search.upper
                fit = fit_trajectory(e, v, lower, upper)
            notes.extend(f"{mid}: {w.message}" for w in caught)
        except (DataError, FitError) as exc:
            return _fail(f"model {mid!r}: {exc}")
        fits[mid] = fit
        entry = {
            "model_id": mid,
            "alpha": fit.alpha,
            "beta": fit.beta,
            "lower": fit.lower,
            "upper": fit.upper,
            "r2": fit.r2,
            "n": len(e),
            "accepted": fit.accepted,
            "diagnostic": fit.diagnostic,
            "clamped_rows": fit.clamped_rows,
            "residuals": list(fit.residuals),
        }
        if search is not None:
            entry["upper_search"] = {
                "profile": [list(t) for t in search.profile],
                "low_confidence": search.low_confidence,
            }
        models.append(entry)

    pairs = []
    for rank, (hi_id, lo_id) in enumerate(zip(order, order[1:]), start=2):
        hi, lo = fits[hi_id], fits[lo_id]
        entry = {"rank": rank, "higher": hi_id, "lower": lo_id}
        if not (hi.accepted and lo.accepted):
            entry["error"] = "fit rejected for one of the models"
            pairs.append(entry)
            continue
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            stats = pair_statistics(hi, lo, args.rho)
        notes.extend(f"{hi_id}/{lo_id}: {w.message}" for w in caught)
        entry.update(
            e_req_zero=stats.e_req_zero,
            gamma=stats.gamma,
            lam=stats.lam,
            inverted=stats.inverted,
        )
        try:
            entry["slope_ratio_at_zero"] = slope_ratio(hi, lo, 0.0, 1.0)
        except FitError as exc:
            entry["slope_ratio_at_zero"] = None
            notes.append(f"{hi_id}/{lo_id}: {exc}")
        if args.rho is not None and stats.e_req_zero is not UNREACHABLE and 0 < stats.gamma <= 1:
            entry["rule_of_thumb"] = rule_of_thumb_threshold(stats.e_req_zero, stats.gamma, args.rho)
        pairs.append(entry)

    _dump_json({"models": models, "pairs": pairs, "warnings": notes}, args.output)
    return EXIT_OK


# --- analyze ----------------------------------------------------------------


def _load(args):
    return load_config(args.config, lenient=args.lenient)


def cmd_analyze(args) -> int:
    try:
        cfg = _load(args)
        verdict = pne_verdict(cfg.game, assume_regular=args.assume_regular)
    except (ConfigError, RegularityError, OSError) as exc:
        return _fail(exc)
    game = cfg.game
    records = []
    for rec in verdict.records:
        d = _plain(rec)
        d["mover"] = cfg.player_ids[rec.rank - 1]
        d["target"] = cfg.player_ids[rec.rank - 2]
        records.append(d)
    payload = {
        "status": verdict.status,
        "tbt": game.tbt,
        "players": list(cfg.player_ids),
        "baseline_scores": game.baseline_scores(),
        "records": records,
        "witness_ranks": [r.rank for r in verdict.witnesses],
        "marginal": verdict.marginal,
        "regularity_checked": not args.assume_regular,
    }
    _dump_json(payload, args.output)
    return EXIT_OK if verdict.status is Status.ALL_ZERO_PNE else EXIT_NO_PNE


# --- threshold --------------------------------------------------------------


def _parse_pair_stats(items):
    vals = {}
    for item in items:
        key, _, raw = item.partition("=")
        if not raw:
            raise ValueError(f"expected key=value, got {item!r}")
        vals[key.strip().lower()] = float(raw)
    aliases = {"e_req0": "e_req_zero", "e0": "e_req_zero", "e_req_zero": "e_req_zero"}
    out = {}
    for k, v in vals.items():
        k = aliases.get(k, k)
        if k not in ("e_req_zero", "gamma", "rho"):
            raise ValueError(f"unknown pair statistic {k!r}")
        out[k] = v
    missing = {"e_req_zero", "gamma", "rho"} - set(out)
    if missing:
        raise ValueError(f"missing pair statistics: {sorted(missing)}")
    return out


def cmd_threshold(args) -> int:
    if args.pair_stats:
        try:
            st = _parse_pair_stats(args.pair_stats)
            payload = {
                "e_req_zero": st["e_req_zero"],
                "gamma": st["gamma"],
                "rho": st["rho"],
                "lam": st["rho"] / st["e_req_zero"] if st["e_req_zero"] > 0 else math.inf,
                "rule_of_thumb": rule_of_thumb_threshold(st["e_req_zero"], st["gamma"], st["rho"]),
                "simplified": simplified_threshold(st["e_req_zero"], st["gamma"], st["rho"])
                if st["e_req_zero"] > 0
                else None,
            }
        except ValueError as exc:
            return _fail(exc)
        _dump_json(payload, args.output)
        return EXIT_OK
    if args.config is None:
        return _fail("give a config path or --pair-stats")
    try:
        cfg = _load(args)
    except (ConfigError, OSError) as exc:
        return _fail(exc)
    game = cfg.game
    report = stabilizing_threshold(game, tol=args.tol, horizon=args.horizon)
    pairs = []
    for p in report.pairs:
        d = _plain(p)
        if args.rule_of_thumb_only:
            d.pop("exact")
        d["rule_of_thumb_agrees"] = p.rule_of_thumb_agrees
        d["mover"] = cfg.player_ids[p.rank - 1]
        pairs.append(d)
    payload = {"pairs": pairs}
    if not args.rule_of_thumb_only:
        payload["global_threshold"] = report.global_threshold
        payload["hardest_rank"] = report.hardest_rank
        payload["not_stabilizable"] = report.unstabilizable
        if cfg.designer is not None and not report.unstabilizable:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                delta, utility = optimal_tbt(game, cfg.designer, tol=args.tol, horizon=args.horizon)
            payload["designer"] = {
                "optimal_tbt": delta,
                "utility": utility,
                "warnings": [str(w.message) for w in caught],
            }
    _dump_json(payload, args.output)
    if report.unstabilizable and not args.rule_of_thumb_only:
        return EXIT_NOT_STABILIZABLE
    return EXIT_OK


# --- simulate ---------------------------------------------------------------


def _start_profile(how, game, grid_step, seed):
    if how in (None, "zero"):
        return EffortProfile.zeros(game.n)
    if how == "random":
        rng = np.random.default_rng(seed)
        top = default_grid_max(game, grid_step)
        return EffortProfile(tuple(float(x) for x in rng.uniform(0.0, top, game.n)))
    values = [float(x) for x in how.split(",")]
    return EffortProfile(tuple(values))


def cmd_simulate(args) -> int:
    try:
        cfg = _load(args)
        start = _start_profile(args.start, cfg.game, args.grid_step, args.seed)
        if len(start) != cfg.game.n:
            raise ValueError(f"--start needs {cfg.game.n} efforts")
        if args.grid_step <= 0 or args.max_steps < 1:
            raise ValueError("--grid-step must be positive and --max-steps at least 1")
    except (ConfigError, OSError, ValueError) as exc:
        return _fail(exc)
    trace = best_response_dynamics(
        cfg.game, start, args.mover_rule, args.grid_step, args.max_steps
    )
    lines = ["step,mover,mover_id,old_effort,new_effort,gain"]
    for m in trace.moves:
        lines.append(
            f"{m.step},{m.mover},{cfg.player_ids[m.mover]},"
            f"{_num(m.old_effort)},{_num(m.new_effort)},{_num(m.gain)}"
        )
    t = trace.terminal
    if isinstance(t, FixedPoint):
        lines.append("# terminal=FixedPoint profile=" + ";".join(_num(e) for e in t.profile))
    elif isinstance(t, CycleDetected):
        lines.append(f"# terminal=CycleDetected period={t.period} first_return={t.first_return}")
    elif isinstance(t, Exhausted):
        lines.append(f"# terminal=Exhausted max_steps={t.max_steps}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# --- curve ------------------------------------------------------------------


def _parse_grid(text):
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError("grid range must be start:stop:step with step > 0")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(max(count, 0))]
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_curve(args) -> int:
    try:
        cfg = _load(args)
        grid = _parse_grid(args.tbt_grid)
        if not grid:
            raise ValueError("empty tbt grid")
        curve = climbing_cost_curve(cfg.game, grid)
    except (ConfigError, OSError, ValueError) as exc:
        return _fail(exc)
    lines = ["tbt,min_effort,argmin_rank,status"]
    for d, e, r in zip(curve.tbt_grid, curve.min_effort, curve.argmin_rank):
        status = "saturated" if e is None else "ok"
        lines.append(f"{_num(d)},{_num(e)},{'' if r is None else r},{status}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# --- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankgame",
        description="Equilibrium and tune-before-test analysis for benchmark leaderboards.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def config_cmd(name, help_, optional=False):
        p = sub.add_parser(name, help=help_)
        if optional:
            p.add_argument("config", nargs="?", default=None)
        else:
            p.add_argument("config")
        p.add_argument("--lenient", action="store_true", help="ignore unknown config fields")
        p.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
        return p

    p = sub.add_parser("fit", help="fit power-law curves to trajectory CSV data")
    p.add_argument("input")
    p.add_argument("--lower", type=float, default=None)
    p.add_argument("--upper", type=float, default=1.0)
    p.add_argument("--chance-level", type=float, default=None)
    p.add_argument("--estimate-upper", action="store_true")
    p.add_argument("--upper-grid", type=int, default=20, help="candidates for --estimate-upper")
    p.add_argument("--order", default=None, help="model ids, most capable first")
    p.add_argument("--rho", type=float, default=None, help="reward gap in effort units")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_fit)

    p = config_cmd("analyze", "equilibrium verdict for a game config")
    p.add_argument("--assume-regular", action="store_true", help="skip sampled regularity checks")
    p.set_defaults(func=cmd_analyze)

    p = config_cmd("threshold", "stabilizing tune-before-test threshold", optional=True)
    p.add_argument("--rule-of-thumb-only", action="store_true")
    p.add_argument("--pair-stats", nargs="+", metavar="KEY=VALUE", default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--horizon", type=float, default=DEFAULT_HORIZON)
    p.set_defaults(func=cmd_threshold)

    p = config_cmd("simulate", "best-response dynamics on an effort grid")
    p.add_argument("--start", default="zero", help="zero, random, or comma-separated efforts")
    p.add_argument("--mover-rule", choices=MOVER_RULES, default="round-robin")
    p.add_argument("--grid-step", type=float, default=0.01)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = config_cmd("curve", "minimal overtaking effort across tune-before-test levels")
    p.add_argument("--tbt-grid", required=True, help="start:stop:step or comma-separated values")
    p.set_defaults(func=cmd_curve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
