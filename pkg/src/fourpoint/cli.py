"""Command-line front end: ``fourpoint validate|solve|example``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from typing import Optional, Sequence

from . import __version__
from .certify import certify
from .geometry import InvalidConfigurationError, validate
from .io import ConfigError, dumps, parse_config, report_to_dict, solutions_csv, tolerances_from
from .reference import (
    EXAMPLES,
    collinear_curve_samples,
    match_expected,
    square_expected,
)
from .solver import Classification, Tolerances, residual, solve

EXIT_OK = 0
EXIT_POSITIVE_DIMENSIONAL = 2
EXIT_INVALID = 3
EXIT_USAGE = 4

EXIT_CODES = {
    Classification.FINITE: EXIT_OK,
    Classification.POSITIVE_DIMENSIONAL: EXIT_POSITIVE_DIMENSIONAL,
    Classification.INVALID_INPUT: EXIT_INVALID,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol-accept", type=float, default=None)
    common.add_argument("--tol-real", type=float, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--verbose", action="store_true")

    p = _Parser(prog="fourpoint", description="Solve the four-anchor inverse-square system.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("validate", "check the finiteness hypotheses"), ("solve", "enumerate all solutions")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--input", required=True, metavar="PATH")
    s = sub.add_parser("example", parents=[common], help="run a built-in reference configuration")
    s.add_argument("name", choices=sorted(EXAMPLES))
    return p


def _read_input(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    return parse_config(text)


def _tolerances(args, file_tols: dict) -> Tolerances:
    tol = tolerances_from(file_tols)
    if args.tol_accept is not None:
        tol = replace(tol, accept=args.tol_accept)
    if args.tol_real is not None:
        tol = replace(tol, real=args.tol_real)
    return tol


def _emit(doc: dict, report, args, out) -> None:
    if args.format == "csv" and report is not None:
        out.write(solutions_csv(report))
    else:
        out.write(dumps(doc) + "\n")


def cmd_validate(args, out) -> int:
    cf = _read_input(args.input)
    problems = cf.config.problems()
    if problems:
        doc = {"valid_input": False, "problems": problems}
        out.write(dumps(doc) + "\n")
        return EXIT_INVALID
    rep = validate(cf.config)
    if args.format == "csv":
        out.write("check,ok,triples\n")
        out.write(f"condition_i,{str(rep.condition_i_ok).lower()},{' '.join(''.join(t) for t in rep.collinear_triples)}\n")
        out.write(f"condition_ii,{str(rep.condition_ii_ok).lower()},{' '.join(''.join(t) for t in rep.concurrent_triples)}\n")
    else:
        out.write(dumps(rep.to_dict()) + "\n")
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_solve(args, out) -> int:
    cf = _read_input(args.input)
    tol = _tolerances(args, cf.tolerances)
    seed = args.seed if args.seed is not None else (cf.seed or 0)
    t0 = time.perf_counter()
    report = solve(cf.config, tol, seed)
    elapsed = time.perf_counter() - t0
    doc = report_to_dict(report, cf.config, version=__version__, timing={"solve_seconds": elapsed})
    _emit(doc, report, args, out)
    return EXIT_CODES[report.classification]


def cmd_example(args, out) -> int:
    config = EXAMPLES[args.name]()
    tol = _tolerances(args, {})
    seed = args.seed or 0
    t0 = time.perf_counter()
    report = solve(config, tol, seed)
    elapsed = time.perf_counter() - t0
    comparison: dict = {}
    if args.name == "square":
        found = [s.coords() for s in report.solutions]
        matches = match_expected(found, square_expected())
        devs = [d for _, _, d in matches]
        comparison = {
            "expected_count": 24,
            "found_count": len(found),
            "real_count": len(report.real_solutions),
            "max_deviation": max(devs) if devs else None,
            "per_solution_deviation": devs,
            "certificate": certify(report, config, tol).to_dict(),
        }
    else:
        res = []
        for x, y in collinear_curve_samples(100, seed):
            res.append(residual(config, (0j, x), (0j, y)))
        comparison = {
            "curve": "2x^2y^2 + 5(x^2 + y^2) + 8 = 0, X = (0, x), Y = (0, y)",
            "samples": len(res),
            "max_sample_residual": max(res),
        }
    doc = report_to_dict(report, config, version=__version__, timing={"solve_seconds": elapsed}, comparison=comparison)
    _emit(doc, report, args, out)
    return EXIT_CODES[report.classification]


COMMANDS = {"validate": cmd_validate, "solve": cmd_solve, "example": cmd_example}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        err.write(f"{e}\n")
        return EXIT_USAGE
    pkg_log = logging.getLogger("fourpoint")
    handler = logging.StreamHandler(err)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    if args.verbose:
        pkg_log.addHandler(handler)
        pkg_log.setLevel(logging.DEBUG)
    try:
        return COMMANDS[args.command](args, out)
    except ConfigError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    except InvalidConfigurationError as e:
        err.write(f"error: {e}\n")
        return EXIT_INVALID
    finally:
        if args.verbose:
            pkg_log.removeHandler(handler)
            pkg_log.setLevel(logging.NOTSET)


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
