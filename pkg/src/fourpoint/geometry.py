"""Anchor configurations, exact predicates for the finiteness hypotheses, and
the rational similarity used to normalize a configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

LABELS = ("A", "B", "C", "D")

# absolute tolerance on squared-distance residuals of concurrency witnesses
TAU_GEO = 1e-10


class InvalidConfigurationError(ValueError):
    """Raised when anchors coincide, a constant is zero, or labels are wrong."""


def as_fraction(value) -> Fraction:
    """Exact rational from int, Fraction, decimal/rational string or mpq."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # floats are taken at face value; the CLI rationalizes text instead
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot interpret {value!r} as a rational number")


@dataclass(frozen=True, order=True)
class Point2:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", as_fraction(self.x))
        object.__setattr__(self, "y", as_fraction(self.y))

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def norm2(self) -> Fraction:
        return self.x * self.x + self.y * self.y

    def __iter__(self):
        yield self.x
        yield self.y


def cross(p: Point2, q: Point2) -> Fraction:
    return p.x * q.y - p.y * q.x


@dataclass(frozen=True)
class Configuration:
    """Four labeled anchors with their inverse-square constants k_T.

    Construction only checks structure (the four labels, rational values).
    The geometric invariants are reported by :meth:`problems` so that
    callers can turn them into diagnostics instead of exceptions.
    """

    anchors: Mapping[str, Point2]
    constants: Mapping[str, Fraction]

    def __post_init__(self):
        if set(self.anchors) != set(LABELS) or set(self.constants) != set(LABELS):
            raise InvalidConfigurationError(
                f"configuration needs exactly the labels {', '.join(LABELS)}"
            )
        anchors = {t: p if isinstance(p, Point2) else Point2(*p) for t, p in self.anchors.items()}
        consts = {t: as_fraction(k) for t, k in self.constants.items()}
        object.__setattr__(self, "anchors", {t: anchors[t] for t in LABELS})
        object.__setattr__(self, "constants", {t: consts[t] for t in LABELS})

    @classmethod
    def from_values(cls, points: Mapping[str, Sequence], k: Mapping[str, object]) -> "Configuration":
        return cls({t: Point2(*points[t]) for t in points}, {t: as_fraction(v) for t, v in k.items()})

    def problems(self) -> list[str]:
        out = []
        for s, t in combinations(LABELS, 2):
            if self.anchors[s] == self.anchors[t]:
                out.append(f"anchors {s} and {t} coincide")
        for t in LABELS:
            if self.constants[t] == 0:
                out.append(f"k_{t} is zero")
        return out

    def check(self) -> None:
        problems = self.problems()
        if problems:
            raise InvalidConfigurationError("; ".join(problems))

    def __hash__(self):
        return hash((tuple(self.anchors.items()), tuple(self.constants.items())))

    def as_floats(self):
        pts = {t: (float(p.x), float(p.y)) for t, p in self.anchors.items()}
        ks = {t: float(k) for t, k in self.constants.items()}
        return pts, ks


def collinear(p: Point2, q: Point2, r: Point2) -> bool:
    """True iff the doubled signed area of pqr vanishes exactly."""
    return cross(q - p, r - p) == 0


def _radical_line(p: Point2, rp2: Fraction, q: Point2, rq2: Fraction):
    # points Z with |Z-p|^2 - rp2 = |Z-q|^2 - rq2:  2(q-p).Z = |q|^2-|p|^2 + rp2 - rq2
    a = 2 * (q.x - p.x)
    b = 2 * (q.y - p.y)
    c = q.norm2() - p.norm2() + rp2 - rq2
    return a, b, c


def triple_circles_concurrent(config: Configuration, triple: Sequence[str]) -> Optional[Point2]:
    """Common real point of the three circles |P - T|^2 = 1/k_T, if any.

    The decision is exact on rational data.  For non-collinear centers the
    only candidate is the radical center, which is rational; for collinear
    centers the radical lines are parallel and the candidates are the
    intersections of the shared radical line with the first circle.  In that
    case an irrational witness is returned as a rational approximation.
    """
    if len(set(triple)) != 3:
        raise ValueError("triple labels must be distinct")
    ks = [config.constants[t] for t in triple]
    if any(k <= 0 for k in ks):
        return None
    centers = [config.anchors[t] for t in triple]
    r2 = [1 / k for k in ks]
    p, q, s = centers
    a1, b1, c1 = _radical_line(p, r2[0], q, r2[1])
    a2, b2, c2 = _radical_line(p, r2[0], s, r2[2])
    det = a1 * b2 - a2 * b1
    if det != 0:
        z = Point2((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)
        return z if (z - p).norm2() == r2[0] else None
    # collinear centers: radical lines are parallel; they must coincide
    if a1 * c2 - a2 * c1 != 0 or b1 * c2 - b2 * c1 != 0:
        return None
    a, b, c = (a1, b1, c1) if (a1, b1) != (0, 0) else (a2, b2, c2)
    if (a, b) == (0, 0):
        return None
    # foot of the perpendicular from p to the line, then offset along it
    n2 = a * a + b * b
    t = (c - a * p.x - b * p.y) / n2
    foot = Point2(p.x + a * t, p.y + b * t)
    h2 = r2[0] - (foot - p).norm2()
    if h2 < 0:
        return None
    if h2 == 0:
        return foot
    scale = math.sqrt(h2 / n2)
    return Point2(Fraction(float(foot.x) - float(b) * scale), Fraction(float(foot.y) + float(a) * scale))


@dataclass(frozen=True)
class ValidationReport:
    condition_i_ok: bool
    condition_ii_ok: bool
    violating_triples: list = field(default_factory=list)
    collinear_triples: list = field(default_factory=list)
    concurrent_triples: list = field(default_factory=list)
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.condition_i_ok and self.condition_ii_ok

    def to_dict(self) -> dict:
        return {
            "condition_i_ok": self.condition_i_ok,
            "condition_ii_ok": self.condition_ii_ok,
            "violating_triples": ["".join(t) for t in self.violating_triples],
            "collinear_triples": ["".join(t) for t in self.collinear_triples],
            "concurrent_triples": ["".join(t) for t in self.concurrent_triples],
            "details": list(self.details),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ValidationReport":
        return cls(
            condition_i_ok=bool(d["condition_i_ok"]),
            condition_ii_ok=bool(d["condition_ii_ok"]),
            violating_triples=[tuple(s) for s in d.get("violating_triples", [])],
            collinear_triples=[tuple(s) for s in d.get("collinear_triples", [])],
            concurrent_triples=[tuple(s) for s in d.get("concurrent_triples", [])],
            details=list(d.get("details", [])),
        )


def validate(config: Configuration) -> ValidationReport:
    """Check both finiteness hypotheses on every anchor triple.

    Raises InvalidConfigurationError for coinciding anchors or zero constants.
    """
    config.check()
    col, conc, details = [], [], []
    for triple in combinations(LABELS, 3):
        if collinear(*(config.anchors[t] for t in triple)):
            col.append(triple)
            details.append(f"anchors {''.join(triple)} are collinear")
        w = triple_circles_concurrent(config, triple)
        if w is not None:
            conc.append(triple)
            details.append(
                f"circles {''.join(triple)} meet at ({float(w.x):.12g}, {float(w.y):.12g})"
            )
    violating = sorted(set(col) | set(conc))
    return ValidationReport(
        condition_i_ok=not col,
        condition_ii_ok=not conc,
        violating_triples=violating,
        collinear_triples=col,
        concurrent_triples=conc,
        details=details,
    )


@dataclass(frozen=True)
class PlaneTransform:
    """Similarity Z -> M (Z - origin) with M = (p, q; -q, p), rational.

    M is a rotation scaled by ``sqrt(p**2 + q**2)``; only the squared scale is
    guaranteed rational, which is all the constants k_T ever need.
    """

    origin: tuple
    p: Fraction = Fraction(1)
    q: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "origin", (as_fraction(self.origin[0]), as_fraction(self.origin[1])))
        object.__setattr__(self, "p", as_fraction(self.p))
        object.__setattr__(self, "q", as_fraction(self.q))
        if self.p == 0 and self.q == 0:
            raise ValueError("degenerate similarity")

    @property
    def translation(self) -> tuple:
        """Translation part t of Z -> M Z + t."""
        ox, oy = self.origin
        return (-(self.p * ox + self.q * oy), -(-self.q * ox + self.p * oy))

    @property
    def scale_sq(self) -> Fraction:
        return self.p * self.p + self.q * self.q

    @property
    def dilation(self) -> float:
        return math.sqrt(self.scale_sq)

    @property
    def matrix(self) -> tuple:
        return ((self.p, self.q), (-self.q, self.p))

    @property
    def rotation(self) -> tuple:
        s = self.dilation
        return ((float(self.p) / s, float(self.q) / s), (-float(self.q) / s, float(self.p) / s))

    def apply(self, z: Point2) -> Point2:
        dx, dy = z.x - self.origin[0], z.y - self.origin[1]
        return Point2(self.p * dx + self.q * dy, -self.q * dx + self.p * dy)

    def apply_complex(self, z: Sequence[complex]) -> tuple:
        dx, dy = z[0] - float(self.origin[0]), z[1] - float(self.origin[1])
        p, q = float(self.p), float(self.q)
        return (p * dx + q * dy, -q * dx + p * dy)

    def inverse(self) -> "PlaneTransform":
        # M^{-1} = M^T / |M|;  Z = M^{-1} W + origin = M^{-1} (W - W0), W0 = -M origin
        s2 = self.scale_sq
        ip, iq = self.p / s2, -self.q / s2
        w0 = Point2(*self.translation)
        return PlaneTransform(origin=(w0.x, w0.y), p=ip, q=iq)

    def compose(self, other: "PlaneTransform") -> "PlaneTransform":
        """self after other."""
        # M1 (M2 (Z - o2) - o1) = M1 M2 (Z - o2 - M2^{-1} o1)
        o = other.inverse().apply(Point2(*self.origin))
        p = self.p * other.p - self.q * other.q
        q = self.p * other.q + self.q * other.p
        return PlaneTransform(origin=(o.x, o.y), p=p, q=q)

    def apply_config(self, config: Configuration) -> Configuration:
        """Image configuration; constants rescale so solutions map by the same similarity."""
        s2 = self.scale_sq
        return Configuration(
            {t: self.apply(a) for t, a in config.anchors.items()},
            {t: k / s2 for t, k in config.constants.items()},
        )

    @classmethod
    def identity(cls) -> "PlaneTransform":
        return cls(origin=(0, 0))

    @classmethod
    def translate(cls, v: Sequence) -> "PlaneTransform":
        return cls(origin=(-as_fraction(v[0]), -as_fraction(v[1])))

    @classmethod
    def scaling(cls, s) -> "PlaneTransform":
        return cls(origin=(0, 0), p=as_fraction(s))


def normalize(config: Configuration) -> tuple[Configuration, PlaneTransform]:
    """Send A to the origin and B to (1, 0) by a rational similarity.

    Returns the image configuration and the transform that maps solutions of
    the original system onto solutions of the normalized one.
    """
    a, b = config.anchors["A"], config.anchors["B"]
    d = b - a
    n2 = d.norm2()
    if n2 == 0:
        raise InvalidConfigurationError("anchors A and B coincide")
    tr = PlaneTransform(origin=(a.x, a.y), p=d.x / n2, q=d.y / n2)
    return tr.apply_config(config), tr


def transform_points(tr: PlaneTransform, pts: Iterable[Point2]) -> list[Point2]:
    return [tr.apply(z) for z in pts]
