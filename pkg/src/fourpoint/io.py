"""Configuration files in, reports out.

Input is JSON.  Coordinates and constants may be integers, decimal literals
or strings such as "1.1" and "-2/3"; decimals are read as text so that
"1.1" becomes exactly 11/10.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .geometry import LABELS, Configuration, ValidationReport, as_fraction
from .polycore import ComplexPoint2, RatMPoly
from .solver import Classification, SolutionPair, SolveReport, Tolerances

TOLERANCE_KEYS = ("accept", "real", "dedupe", "pole")


class ConfigError(ValueError):
    """Malformed configuration file; the message names the line or field."""


@dataclass
class ConfigFile:
    config: Configuration
    tolerances: dict = field(default_factory=dict)
    seed: Optional[int] = None


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool) or value is None or isinstance(value, (list, dict)):
        raise ConfigError(f"{where}: expected a number, got {json.dumps(value)}")
    try:
        return as_fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ConfigError(f"{where}: cannot read {value!r} as an exact rational") from None


def parse_config(text: str) -> ConfigFile:
    try:
        data = json.loads(text, parse_float=str)
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("top level: expected an object with 'points' and 'k'")
    for key in ("points", "k"):
        if not isinstance(data.get(key), dict):
            raise ConfigError(f"{key}: missing or not an object")
    points, ks = data["points"], data["k"]
    for key, block in (("points", points), ("k", ks)):
        missing = [t for t in LABELS if t not in block]
        extra = sorted(set(block) - set(LABELS))
        if missing:
            raise ConfigError(f"{key}: missing label(s) {', '.join(missing)}")
        if extra:
            raise ConfigError(f"{key}: unknown label(s) {', '.join(extra)}")
    anchors = {}
    for t in LABELS:
        p = points[t]
        if not isinstance(p, list) or len(p) != 2:
            raise ConfigError(f"points.{t}: expected [x, y]")
        anchors[t] = (_rational(p[0], f"points.{t}[0]"), _rational(p[1], f"points.{t}[1]"))
    consts = {t: _rational(ks[t], f"k.{t}") for t in LABELS}
    tols = {}
    for key, value in (data.get("tolerances") or {}).items():
        if key not in TOLERANCE_KEYS:
            raise ConfigError(f"tolerances.{key}: unknown tolerance")
        tols[key] = float(_rational(value, f"tolerances.{key}"))
    seed = data.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigError("seed: expected an integer")
    return ConfigFile(Configuration.from_values(anchors, consts), tols, seed)


def config_to_dict(config: Configuration) -> dict:
    return {
        "points": {t: [str(p.x), str(p.y)] for t, p in config.anchors.items()},
        "k": {t: str(k) for t, k in config.constants.items()},
    }


# ---------------------------------------------------------------------------
# reports


def _complex_pair(z: complex) -> list:
    return [z.real, z.imag]


def solution_to_dict(s: SolutionPair) -> dict:
    return {
        "X": [_complex_pair(s.X.x), _complex_pair(s.X.y)],
        "Y": [_complex_pair(s.Y.x), _complex_pair(s.Y.y)],
        "residual": s.residual,
        "is_real": s.is_real,
        "multiplicity": s.multiplicity,
    }


def solution_from_dict(d: dict) -> SolutionPair:
    X = ComplexPoint2(*(complex(*c) for c in d["X"]))
    Y = ComplexPoint2(*(complex(*c) for c in d["Y"]))
    return SolutionPair(X, Y, float(d["residual"]), bool(d["is_real"]), int(d["multiplicity"]))


def report_to_dict(report: SolveReport, config: Optional[Configuration] = None, **extra) -> dict:
    out = {
        "classification": report.classification.value,
        "validation": report.validation.to_dict() if report.validation else None,
        "bezout_ceiling": report.bezout_ceiling,
        "solution_count": len(report.solutions),
        "solutions": [solution_to_dict(s) for s in report.solutions],
        "witness_curve": report.witness_curve.to_json() if report.witness_curve is not None else None,
        "diagnostics": report.diagnostics,
    }
    if config is not None:
        out["input"] = config_to_dict(config)
    out.update(extra)
    return out


def report_from_dict(d: dict) -> SolveReport:
    return SolveReport(
        classification=Classification(d["classification"]),
        solutions=[solution_from_dict(s) for s in d.get("solutions", [])],
        witness_curve=RatMPoly.from_json(d["witness_curve"]) if d.get("witness_curve") else None,
        validation=ValidationReport.from_dict(d["validation"]) if d.get("validation") else None,
        bezout_ceiling=int(d.get("bezout_ceiling", 48)),
        diagnostics=d.get("diagnostics", {}),
    )


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    return json.dumps(obj)


def loads(text: str):
    return json.loads(text)


def solutions_csv(report: SolveReport) -> str:
    """Real solutions only, one row each."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "y1", "y2", "residual", "multiplicity"])
    for s in report.real_solutions:
        w.writerow([format_float(v) for v in (s.X.x.real, s.X.y.real, s.Y.x.real, s.Y.y.real, s.residual)] + [s.multiplicity])
    return buf.getvalue()


def tolerances_from(overrides: dict) -> Tolerances:
    return Tolerances(**{k: v for k, v in overrides.items() if k in TOLERANCE_KEYS})
