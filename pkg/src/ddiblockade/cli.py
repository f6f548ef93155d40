"""Command-line entry point: ``ddiblockade {sweep,point,check-conditions}``.

Exit status is 0 on success, 2 when some sweep points failed and 1 on
configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from typing import Dict, List, Optional

from .exceptions import BlockadeError, ConfigError, NoSolutionError
from .model import (
    PARAM_NAMES,
    SystemParams,
    ela_detuning,
    ela_residual,
    hybrid_detunings,
    hybrid_j,
    hybrid_residual,
    hybrid_threshold_met,
    qdi_condition,
    qdi_residual,
)
from .sweep import emit, evaluate_point, format_value, load_config, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _parse_sets(items: Optional[List[str]]) -> Dict[str, str]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _params_from_sets(sets: Dict[str, str]) -> SystemParams:
    kwargs = {}
    for key, value in sets.items():
        if key == "sign_convention":
            kwargs[key] = value
        elif key in PARAM_NAMES:
            try:
                kwargs[key] = float(value)
            except ValueError:
                raise ConfigError(f"{key}: expected a number, got {value!r}") from None
        else:
            raise ConfigError(f"unknown parameter {key!r}")
    try:
        return SystemParams(**kwargs)
    except BlockadeError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_sweep(args) -> int:
    overrides = _parse_sets(args.set)
    if args.nmax is not None:
        overrides["n_max"] = args.nmax
    if args.workers is not None:
        overrides["workers"] = str(args.workers)
    config = load_config(args.config, overrides)
    result = run_sweep(config)
    text = emit(result, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    if result.failures:
        print(f"{result.failures} of {len(result.points)} points failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_point(args) -> int:
    sets = _parse_sets(args.set)
    params = _params_from_sets(sets)
    n_max = args.nmax if args.nmax is not None else "auto"
    if n_max != "auto":
        try:
            n_max = int(n_max)
        except ValueError:
            raise ConfigError(f"--nmax must be an integer or 'auto', got {n_max!r}") from None
    try:
        res, stats, n = evaluate_point(params, n_max)
    except BlockadeError as exc:
        print(f"error: {exc.tag}: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    print(f"g2_zero = {format_value(stats.g2_zero)}")
    print(f"mean_n = {format_value(stats.mean_n)}")
    print(f"residual = {format_value(res.residual)}")
    print(f"n_max = {n}")
    for k, p in enumerate(stats.p_n):
        dev = stats.deviation(k)
        print(f"P({k}) = {format_value(float(p))}  poisson_deviation = {format_value(dev)}")
    return EXIT_OK if stats.g2_zero is not None else EXIT_PARTIAL


def cmd_check(args) -> int:
    p = _params_from_sets(_parse_sets(args.set))
    print(f"ela_residual = {format_value(ela_residual(p.g, p.delta_a, p.delta_c, p.j_ddi))}")
    print(f"qdi_residual = {format_value(qdi_residual(p.delta_a, p.delta_c))}")
    print(f"hybrid_residual = {format_value(hybrid_residual(p.g, p.delta_a, p.j_ddi))}")
    try:
        print(f"ela_delta_a = {format_value(ela_detuning(p.g, p.delta_c, p.j_ddi))}")
    except NoSolutionError:
        print("ela_delta_a = ")
    print(f"qdi_delta_c = {format_value(qdi_condition(p.delta_a))}")
    try:
        print(f"hybrid_j = {format_value(hybrid_j(p.g, p.delta_a))}")
    except NoSolutionError:
        print("hybrid_j = ")
    print(f"hybrid_threshold_met = {str(hybrid_threshold_met(p.g, p.j_ddi)).lower()}")
    roots = hybrid_detunings(p.g, p.j_ddi)
    print("hybrid_delta_a = " + ", ".join(format_value(r) for r in roots))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddiblockade", description="Steady-state photon statistics of a driven two-qubit cavity.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a parameter sweep from a config file")
    sw.add_argument("config", help="sweep configuration file")
    sw.add_argument("--out", default=None, help="output file (default: stdout)")
    sw.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    sw.add_argument("--workers", type=int, default=None, help="worker processes (default: from config)")
    sw.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config entry (repeatable)")
    sw.add_argument("--nmax", default=None, help="photon cutoff or 'auto'")
    sw.set_defaults(func=cmd_sweep)

    pt = sub.add_parser("point", help="evaluate observables at one parameter set")
    pt.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter value (repeatable)")
    pt.add_argument("--nmax", default=None, help="photon cutoff or 'auto'")
    pt.set_defaults(func=cmd_point)

    ck = sub.add_parser("check-conditions", help="print blockade-condition residuals")
    ck.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter value (repeatable)")
    ck.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
