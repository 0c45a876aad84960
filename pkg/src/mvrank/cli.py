"""Command-line interface: point sets, single tests, calibration and simulation studies."""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from mvrank import datagen, harness, lds
from mvrank.core import parse_dataset, write_dataset
from mvrank.energytest import (
    DEFAULT_CACHE_PATH,
    DEFAULT_RUNS,
    METHOD_NAME,
    CalibrationCache,
    calibrate_threshold,
)
from mvrank.errors import MvrankError, ParameterError, error_report
from mvrank.globaltest import GlobalTest

logger = logging.getLogger(__name__)


def _print_json(payload: Any) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _parse_calibrate(text: str) -> dict[str, int]:
    """Parses ``runs=N,seed=S``."""
    values: dict[str, int] = {"runs": DEFAULT_RUNS, "seed": 0}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = part.partition("=")
        if not sep or key.strip() not in values:
            raise ParameterError(f"--calibrate expects runs=N,seed=S, got '{text}'")
        try:
            values[key.strip()] = int(value)
        except ValueError:
            raise ParameterError(f"--calibrate {key.strip()} must be an integer, got '{value}'") from None
    return values


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_lds(args: argparse.Namespace) -> int:
    ps = lds.generate(args.kind, args.n, args.d, seed=args.seed, skip=args.skip)
    logger.info("Point set %s", json.dumps(ps.provenance()))
    frame = pd.DataFrame(ps.points, columns=[f"u{k + 1}" for k in range(ps.d)])
    frame.to_csv(sys.stdout, index=False, lineterminator="\n")
    return 0


def _cmd_test(args: argparse.Namespace) -> int:
    data = parse_dataset(args.data, args.schema)
    options: dict[str, Any] = {}
    if args.method.lower() == METHOD_NAME:
        options = {"kind": args.sequence, "standardize": args.standardize, "calibration": "table"}
        if args.calibrate is not None:
            calib = _parse_calibrate(args.calibrate)
            options["calibration"] = calibrate_threshold(
                data.m,
                data.n,
                data.d,
                args.alpha,
                calib["runs"],
                args.sequence,
                calib["seed"],
                workers=args.workers,
                cache=CalibrationCache(args.cache),
            )
    else:
        options = {"permutations": args.permutations}
    outcome = GlobalTest(args.method, args.alpha, **options).run(data, seed=args.seed)
    _print_json({**outcome.to_dict(), "m": data.m, "n": data.n, "d": data.d, "endpoints": list(data.names)})
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    entry = calibrate_threshold(
        args.m,
        args.n,
        args.d,
        args.alpha,
        args.runs,
        args.sequence,
        args.seed,
        workers=args.workers,
        cache=CalibrationCache(args.cache),
    )
    _print_json(entry.to_dict())
    return 0


def _cmd_simulate_gen(args: argparse.Namespace) -> int:
    cfg = datagen.ScenarioConfig(args.scenario, m=args.m, n=args.n, r=args.r, rho=args.rho, seed=args.seed)
    data = datagen.generate(cfg)
    out = write_dataset(data, args.out)
    _print_json({"path": str(out), "schema": data.schema_spec(), "m": data.m, "n": data.n, **data.meta})
    return 0


def _load_spec(args: argparse.Namespace) -> tuple[harness.ExperimentSpec, Path]:
    spec = harness.ExperimentSpec.from_json(args.spec)
    out = args.out or spec.output
    if out is None:
        raise ParameterError("No output path: pass --out or set 'output' in the spec")
    return spec, Path(out)


def _cmd_simulate_run(args: argparse.Namespace) -> int:
    spec, out = _load_spec(args)
    records = harness.run_experiment(spec, workers=args.workers, cache=CalibrationCache(args.cache))
    harness.emit_results(records, out, spec)
    _print_json({"path": str(out), "records": len(records)})
    return 0


def _cmd_simulate_sensitivity(args: argparse.Namespace) -> int:
    spec, out = _load_spec(args)
    records = harness.sensitivity_experiment(spec, workers=args.workers, cache=CalibrationCache(args.cache))
    harness.emit_results(records, out, spec)
    _print_json({"path": str(out), "records": len(records)})
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvrank", description="Multivariate rank energy two-sample tests.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging")
    parser.add_argument(
        "--plugin", action="append", default=[], metavar="PATH", help="register the test methods defined in a Python file"
    )
    commands = parser.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in lds.SequenceKind]

    p = commands.add_parser("lds", help="print a point set as CSV")
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip", type=int, default=1, help="Sobol points skipped from the start")
    p.set_defaults(handler=_cmd_lds)

    p = commands.add_parser("test", help="run a global test on a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", default=None, help="name:kind,... (kinds: continuous, discrete, time-to-event)")
    p.add_argument("--method", default=METHOD_NAME, help=f"one of {GlobalTest.get_methods()}")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--sequence", choices=kinds, default=lds.SequenceKind.SOBOL.value)
    p.add_argument("--calibrate", default=None, metavar="runs=N,seed=S", help="calibrate instead of using the built-in table")
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--permutations", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache", default=str(DEFAULT_CACHE_PATH))
    p.set_defaults(handler=_cmd_test)

    p = commands.add_parser("calibrate", help="estimate a rank energy threshold under H0")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sequence", choices=kinds, default=lds.SequenceKind.SOBOL.value)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache", default=str(DEFAULT_CACHE_PATH))
    p.set_defaults(handler=_cmd_calibrate)

    simulate = commands.add_parser("simulate", help="simulation scenarios and studies").add_subparsers(
        dest="simulate_command", required=True
    )
    p = simulate.add_parser("gen", help="write one simulated dataset as CSV")
    p.add_argument("--scenario", type=int, choices=datagen.SCENARIOS, required=True)
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--rho", type=float, default=0.3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_simulate_gen)

    for name, handler, help_text in (
        ("run", _cmd_simulate_run, "run an experiment spec and write rejection rates"),
        ("sensitivity", _cmd_simulate_sensitivity, "compare point-set kinds in scenario 1"),
    ):
        p = simulate.add_parser(name, help=help_text)
        p.add_argument("--spec", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--cache", default=str(DEFAULT_CACHE_PATH))
        p.set_defaults(handler=handler)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        for path in args.plugin:
            logger.info("Registered %s from %s", GlobalTest.add_method(path), path)
        return args.handler(args)
    except (MvrankError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(json.dumps(error_report(e)) + "\n")
        return 2
