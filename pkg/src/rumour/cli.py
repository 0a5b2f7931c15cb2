"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analytics, experiment, oracle, selftest
from .distributions import HomogeneousSchedule
from .experiment import ConfigError, ExperimentConfig
from .processes import simulate_firework, simulate_reverse, write_trace
from .rng import MASK64, TrialStream

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2
TRACE_TRIALS = 10


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("arguments", message)


def _bounded_int(lo: int, hi: int | None = None):
    def parse(text: str) -> int:
        try:
            value = int(text, 0)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < lo or (hi is not None and value > hi):
            raise argparse.ArgumentTypeError(f"{value} out of range [{lo}, {hi if hi is not None else 'inf'}]")
        return value
    return parse


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--trials", type=_bounded_int(0))
    common.add_argument("--horizon", type=_bounded_int(0))
    common.add_argument("--seed", type=_bounded_int(0, MASK64))
    common.add_argument("--workers", type=_bounded_int(1), help="threads (env RUMOUR_SIM_WORKERS)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field, dotted keys allowed (schedule.alpha=2)")

    parser = _Parser(prog="rumour", description="Firework and reverse firework process toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo survival estimate")
    sim.add_argument("--trace", metavar="PATH", help=f"write generation traces of the first {TRACE_TRIALS} trials")
    sim.add_argument("--timing", action="store_true", help="fill the duration_ms column")
    sub.add_parser("criteria", parents=[common], help="analytic survival verdicts")
    sub.add_parser("bounds", parents=[common], help="survival probability bounds")
    sw = sub.add_parser("sweep", parents=[common], help="parameter sweep with verdicts and bounds")
    sw.add_argument("--param", choices=experiment.SWEEP_PARAMS)
    sw.add_argument("--from", dest="start", type=_finite_float)
    sw.add_argument("--to", dest="stop", type=_finite_float)
    sw.add_argument("--step", type=_finite_float)
    sw.add_argument("--timing", action="store_true", help="fill the duration_ms column")
    orc = sub.add_parser("oracle", help="write the golden brute-force table")
    orc.add_argument("--out", metavar="PATH")
    sub.add_parser("selftest", help="run invariant checks on the catalog laws")
    return parser


def _read_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config", f"{path}: top level must be a JSON object")
    return doc


def _apply_override(doc: dict, item: str) -> None:
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    *parents, leaf = key.split(".")
    node = doc
    for p in parents:
        child = node.setdefault(p, {})
        if not isinstance(child, dict):
            raise ConfigError(key, f"{p!r} is not an object")
        node = child
    node[leaf] = value


def load_config(args) -> ExperimentConfig:
    """File values, then ``--set`` overrides, then dedicated flags."""
    doc = _read_config(args.config)
    for item in args.set:
        _apply_override(doc, item)
    for name in ("trials", "horizon", "seed", "format", "out"):
        value = getattr(args, name, None)
        if value is not None:
            doc[name] = value
    if getattr(args, "param", None) is not None:
        doc["sweep"] = {"param": args.param, "from": args.start, "to": args.stop, "step": args.step}
    return ExperimentConfig.from_dict(doc)


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get("RUMOUR_SIM_WORKERS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError("RUMOUR_SIM_WORKERS", f"expected an integer, got {env!r}") from None
        if value < 1:
            raise ConfigError("RUMOUR_SIM_WORKERS", f"must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_out(rows, config: ExperimentConfig) -> None:
    text = experiment.rows_to_json(rows, config) if config.format == "json" else experiment.rows_to_csv(rows)
    _emit(text, config.out)


def _write_traces(config: ExperimentConfig, path: str) -> None:
    schedule, layout = config.build_schedule(), config.build_layout()
    with open(path, "w") as fh:
        for t in range(min(TRACE_TRIALS, config.trials)):
            stream = TrialStream(config.seed, t)
            if config.process == "firework":
                out = simulate_firework(layout, schedule, config.horizon, stream, trace=True)
            else:
                out = simulate_reverse(schedule, config.horizon, config.generation_cap, stream, trace=True)
            write_trace(fh, out.trace, t)


def cmd_simulate(args) -> int:
    config = load_config(args)
    est = experiment.run_trials(config, _workers(args))
    row = experiment.estimate_row(config, est, timing=args.timing)
    _rows_out([row], config)
    if args.trace:
        _write_traces(config, args.trace)
    return EXIT_OK


def _criteria_report(config: ExperimentConfig) -> dict:
    schedule = config.build_schedule()
    m = config.build_layout().gap_bound or 1
    report = {}
    if isinstance(schedule, HomogeneousSchedule):
        report["firework_homogeneous"] = analytics.classify_firework_homogeneous(schedule.dist)
        report["reverse_homogeneous"] = analytics.classify_reverse_homogeneous(schedule.dist)
    report["firework_heterogeneous"] = analytics.classify_firework_heterogeneous(schedule, m)
    report["reverse_heterogeneous"] = analytics.classify_reverse_heterogeneous(schedule)
    return report


def cmd_criteria(args) -> int:
    config = load_config(args)
    report = _criteria_report(config)
    if config.format == "json":
        doc = {"schedule": config.schedule, "verdicts": {k: v.to_dict() for k, v in report.items()}}
        _emit(json.dumps(analytics._jsonable(doc), indent=2) + "\n", config.out)
        return EXIT_OK
    lines = [f"schedule: {config.build_schedule().label}"]
    for name, verdict in report.items():
        rule = f" (rule: {verdict.rule}; tier: {verdict.tier})" if verdict.rule else ""
        lines.append(f"{name}: {verdict.classification}{rule}")
    _emit("\n".join(lines) + "\n", config.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    config = load_config(args)
    schedule = config.build_schedule()
    m = config.build_layout().gap_bound or 1
    doc = {
        "schedule": config.schedule,
        "firework": analytics.firework_bounds(schedule, m, config.bound_depth).to_dict(),
        "reverse": analytics.reverse_bounds(schedule, config.bound_depth).to_dict(),
    }
    _emit(json.dumps(analytics._jsonable(doc), indent=2) + "\n", config.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args)
    if config.sweep is None:
        raise ConfigError("sweep", "give --param/--from/--to/--step or a sweep object in the config")
    rows = experiment.run_sweep(config, _workers(args), timing=args.timing)
    _rows_out(rows, config)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.out:
        oracle.write_golden(args.out)
    else:
        import csv

        rows = oracle.golden_rows()
        writer = csv.DictWriter(sys.stdout, fieldnames=oracle.GOLDEN_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK


def cmd_selftest(args) -> int:
    failures = selftest.run()
    for f in failures:
        print(f"FAIL {f}", file=sys.stderr)
    if failures:
        return EXIT_INVARIANT
    print("selftest: all checks passed")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate, "criteria": cmd_criteria, "bounds": cmd_bounds,
    "sweep": cmd_sweep, "oracle": cmd_oracle, "selftest": cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # an engine invariant broke
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
