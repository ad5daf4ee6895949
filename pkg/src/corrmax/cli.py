"""Command-line interface.

Exit codes: 0 success, 1 data or domain error, 2 usage error.
"""

import argparse
import json
import sys
import warnings

from . import extreme_limit, io
from .corr_core import run_test
from .distributions import parse_dist
from .errors import CorrmaxError, InvalidConfig
from .mc_harness import MODES, McConfig, run_replications
from .moment_conditions import VerdictThresholds, condition_report, product_survival, tail_ratios

DEFAULT_SEED = 1


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="corrmax",
        description="Largest-entry correlation test, limit law, moment conditions and Monte Carlo checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the largest-entry test on a CSV matrix")
    p.add_argument("data", help="CSV file, rows are observations")
    p.add_argument("--block", type=int, default=64)
    p.add_argument("--skip-degenerate", action="store_true", help="drop zero-variance columns")
    p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("simulate", help="Monte Carlo replications")
    p.add_argument("--config", help="JSON run configuration; flags override it")
    p.add_argument("--save-config", help="write the effective configuration and continue")
    p.add_argument("--dist")
    p.add_argument("--standardized", action="store_true", default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--lemma")
    p.add_argument("--thresholds", type=_floats)
    p.add_argument("--block", type=int)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--csv", help="write per-replication statistics here")
    p.add_argument("--timing", action="store_true", help="include wall time and throughput")

    p = sub.add_parser("condition", help="evaluate the moment conditions for a law")
    p.add_argument("--config")
    p.add_argument("--dist")
    p.add_argument("--standardized", action="store_true", default=None)
    p.add_argument("--n-grid", type=_ints)
    p.add_argument("--x-grid", type=_floats)
    p.add_argument("--series-max", type=int, help="last n of the series (0 disables it)")
    p.add_argument("--decay", type=float, help="decay factor for holds-likely")
    p.add_argument("--floor", type=float, help="final-value floor for holds-likely")
    p.add_argument("--out")

    p = sub.add_parser("dist", help="moment and tail table for a law")
    p.add_argument("--dist", required=True)
    p.add_argument("--standardized", action="store_true")
    p.add_argument("--orders", type=_floats, default=[1.0, 2.0, 8 / 3, 3.0, 4.0, 6.0])
    p.add_argument("--x-grid", type=_floats, default=[3.0, 10.0, 30.0, 100.0])
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("pvalue", help="upper-tail probability of the limit law")
    p.add_argument("t", type=float)

    p = sub.add_parser("quantile", help="quantile of the limit law")
    p.add_argument("q", type=float)
    return parser


def _merge(args, names):
    cfg = io.load_config(args.config) if getattr(args, "config", None) else io.RunConfig()
    for name in names:
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    return cfg


def _emit(doc, out):
    text = io.dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)


def cmd_test(args):
    m = io.load_csv(args.data)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = run_test(m, block=args.block, skip_degenerate=args.skip_degenerate)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit(io.report_document(report, "test"), args.out)
    return 0


def cmd_simulate(args):
    seed_given = args.seed is not None
    cfg = _merge(args, ["dist", "standardized", "n", "p", "reps", "seed", "threads", "mode", "lemma", "thresholds", "block"])
    cfg.command = "simulate"
    if not seed_given and not args.config:
        print(f"seed: {cfg.seed}", file=sys.stderr)
    if args.save_config:
        io.save_config(cfg, args.save_config)
    mc = McConfig(
        dist=parse_dist(cfg.dist, cfg.standardized),
        n=cfg.n,
        p=cfg.p,
        reps=cfg.reps,
        seed=cfg.seed,
        mode=cfg.mode,
        lemma=cfg.lemma,
        thresholds=tuple(cfg.thresholds or ()),
        threads=cfg.threads,
        block=cfg.block,
    )
    if mc.ratio_warning and mc.mode != "lemma":
        print(f"warning: n/p = {mc.n / mc.p:.3g} is outside [0.1, 10]", file=sys.stderr)
    report = run_replications(mc)
    doc = io.report_document(report, "simulate", include_runtime=args.timing)
    if args.csv:
        io.write_values_csv(report.values, args.csv)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.dumps(doc))
        brief = {k: doc[k] for k in ("config", "ks_to_limit", "primary")}
        brief["summary"] = doc["summary"][doc["primary"]]
        sys.stdout.write(io.dumps(brief))
    else:
        sys.stdout.write(io.dumps(doc))
    return 0


def cmd_condition(args):
    cfg = _merge(args, ["dist", "standardized", "n_grid", "x_grid"])
    if args.series_max is not None:
        cfg.series_n_max = args.series_max
    if args.decay is not None:
        cfg.decay_factor = args.decay
    if args.floor is not None:
        cfg.floor = args.floor
    d = parse_dist(cfg.dist, cfg.standardized)
    th = VerdictThresholds(decay_factor=cfg.decay_factor, floor=cfg.floor)
    report = condition_report(d, cfg.n_grid, cfg.x_grid, cfg.series_n_max, th)
    _emit(io.report_document(report, "condition"), args.out)
    return 0


def cmd_dist(args):
    d = parse_dist(args.dist, args.standardized)
    moments = {f"{r:g}": d.moment_abs(r) for r in args.orders}
    rows = []
    for x in args.x_grid:
        row = {"x": x, "survival": d.survival_ge(x), "product_survival": product_survival(d, x)}
        if x > 2.718281828459045:
            row.update(zip(("r14", "r15", "r_marginal"), tail_ratios(d, x)))
        rows.append(row)
    if args.json:
        sys.stdout.write(io.dumps(io.jsonable({"dist": d.describe(), "moments": moments, "tails": rows})))
        return 0
    print(f"# {d.spec_string()}{' (standardized)' if d.standardized else ''}")
    print("order      E|X|^r")
    for r, v in moments.items():
        print(f"{r:<10} {v:.10g}")
    print()
    print(f"{'x':>10} {'P(|X|>=x)':>14} {'P(|X1X2|>=x)':>14} {'r14':>12} {'r15':>12} {'r_marg':>12}")
    for row in rows:
        cells = [f"{row['x']:>10g}", f"{row['survival']:>14.6e}", f"{row['product_survival']:>14.6e}"]
        cells += [f"{row[k]:>12.5g}" if k in row else f"{'-':>12}" for k in ("r14", "r15", "r_marginal")]
        print(" ".join(cells))
    return 0


def cmd_pvalue(args):
    print(repr(extreme_limit.pvalue(args.t)))
    return 0


def cmd_quantile(args):
    print(repr(extreme_limit.quantile(args.q)))
    return 0


COMMANDS = {
    "test": cmd_test,
    "simulate": cmd_simulate,
    "condition": cmd_condition,
    "dist": cmd_dist,
    "pvalue": cmd_pvalue,
    "quantile": cmd_quantile,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except CorrmaxError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
