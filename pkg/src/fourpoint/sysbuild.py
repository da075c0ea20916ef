"""Symbolic objects derived from a configuration.

Conventions: ``N_T(Y) = |Y - T|^2`` and ``D_T(Y) = k_T N_T(Y) - 1``, so that

    Gamma_T(Y) = N_T / D_T - |T|^2        and        |X - T|^2 = Gamma_T(Y) + |T|^2

on every solution.  Differences of the last identity are linear in X, which
gives X from Y by Cramer's rule whenever three anchors are not collinear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .geometry import LABELS, Configuration, InvalidConfigurationError, Point2, collinear
from .polycore import ComplexPoint2, RatMPoly

X_VARS = ("x1", "x2")
Y_VARS = ("y1", "y2")
XY_VARS = X_VARS + Y_VARS
GAMMA_VARS = ("gA", "gB", "gC", "gD")


class PoleError(ArithmeticError):
    """Y sits on a circle k_T |Y - T|^2 = 1 where Gamma_T is undefined."""


class DegenerateTriangleError(ValueError):
    """The anchors chosen for Cramer's rule are collinear (zero determinant)."""


class NotNormalizedError(ValueError):
    pass


def sqdist(variables: Sequence[str], t: Point2) -> RatMPoly:
    v1 = RatMPoly.var(variables[0], variables)
    v2 = RatMPoly.var(variables[1], variables)
    return (v1 - t.x) ** 2 + (v2 - t.y) ** 2


def build_quartic_system(config: Configuration) -> dict:
    """The cleared equations k_T |X-T|^2 |Y-T|^2 - |X-T|^2 - |Y-T|^2, one per label."""
    out = {}
    for t in LABELS:
        a, k = config.anchors[t], config.constants[t]
        p = sqdist(X_VARS, a).with_variables(XY_VARS)
        q = sqdist(Y_VARS, a).with_variables(XY_VARS)
        out[t] = p * q * k - p - q
    return out


def quartic_residuals(config: Configuration, X: Sequence[complex], Y: Sequence[complex]) -> list:
    """Numeric values of the four cleared equations (symmetric in X and Y)."""
    out = []
    for t in LABELS:
        a, k = config.anchors[t], float(config.constants[t])
        ax, ay = float(a.x), float(a.y)
        p = (X[0] - ax) ** 2 + (X[1] - ay) ** 2
        q = (Y[0] - ax) ** 2 + (Y[1] - ay) ** 2
        out.append(k * (p * q) - (p + q))
    return out


def system_residuals(config: Configuration, X: Sequence[complex], Y: Sequence[complex]) -> list:
    """Values of 1/|X-T|^2 + 1/|Y-T|^2 - k_T (the uncleared equations)."""
    out = []
    for t in LABELS:
        a, k = config.anchors[t], float(config.constants[t])
        ax, ay = float(a.x), float(a.y)
        p = (X[0] - ax) ** 2 + (X[1] - ay) ** 2
        q = (Y[0] - ax) ** 2 + (Y[1] - ay) ** 2
        out.append(1 / p + 1 / q - k)
    return out


@dataclass(frozen=True)
class GammaFn:
    label: str
    numerator: RatMPoly
    denominator: RatMPoly
    anchor: Point2
    k: Fraction

    def __call__(self, Y: Sequence[complex], pole_tol: float = 1e-13) -> complex:
        den = self.denominator.evaluate(Y)
        if abs(den) <= pole_tol * (1 + abs(float(self.k)) * abs(self.denominator.evaluate_abs(Y))):
            raise PoleError(f"Y is on the pole circle of Gamma_{self.label}")
        return self.numerator.evaluate(Y) / den

    def bar(self, Y: Sequence[complex]) -> complex:
        """Gamma_T(Y) + |T|^2, i.e. the squared distance |X - T|^2 it encodes."""
        return self(Y) + float(self.anchor.norm2())


@lru_cache(maxsize=512)
def gamma(config: Configuration, label: str) -> GammaFn:
    t, k = config.anchors[label], config.constants[label]
    n = sqdist(Y_VARS, t)
    d = n * k - 1
    return GammaFn(label, n - d * t.norm2(), d, t, k)


def triangle_det(p: Point2, q: Point2, r: Point2) -> Fraction:
    return (p.x - q.x) * (p.y - r.y) - (p.y - q.y) * (p.x - r.x)


def cramer_roles(config: Configuration) -> Optional[tuple]:
    """Labels playing A, B, C in Cramer's rule: the label order when possible,
    else the first non-collinear triple.  None if all anchors are collinear."""
    for triple in combinations(LABELS, 3):
        if not collinear(*(config.anchors[t] for t in triple)):
            return triple
    return None


def recover_X(config: Configuration, Y: Sequence[complex], roles: Optional[Sequence[str]] = None) -> ComplexPoint2:
    """The unique X paired with Y, by Cramer's rule on the Gamma differences."""
    roles = tuple(roles) if roles is not None else ("A", "B", "C")
    p, q, r = (config.anchors[t] for t in roles)
    delta = triangle_det(p, q, r)
    if delta == 0:
        raise DegenerateTriangleError(f"anchors {''.join(roles)} are collinear")
    g = {t: gamma(config, t)(Y) for t in roles}
    gq = g[roles[1]] - g[roles[0]]
    gr = g[roles[2]] - g[roles[0]]
    d = 2 * float(delta)
    x1 = (gq * float(p.y - r.y) - float(p.y - q.y) * gr) / d
    x2 = (float(p.x - q.x) * gr - gq * float(p.x - r.x)) / d
    return ComplexPoint2(complex(x1), complex(x2))


def cofactors(config: Configuration) -> dict:
    """First-row cofactors of the 4x4 determinant with rows (Gamma, t1, t2, 1)."""
    cols = [config.anchors[t] for t in LABELS]
    out = {}
    for j, t in enumerate(LABELS):
        rest = [c for i, c in enumerate(cols) if i != j]
        m = [[c.x for c in rest], [c.y for c in rest], [1, 1, 1]]
        det3 = (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
        out[t] = (-1) ** j * det3
    return out


def det_identity(config: Configuration, Y: Sequence[complex]) -> tuple:
    """Value of the Gamma/anchor determinant at Y and the sum of its term magnitudes."""
    c = cofactors(config)
    terms = [float(c[t]) * gamma(config, t)(Y) for t in LABELS]
    return sum(terms), sum(abs(x) for x in terms)


@dataclass(frozen=True)
class ReducedSystem:
    det_constraint: RatMPoly
    circle_constraint: RatMPoly
    cleared_factors: list
    delta: Fraction
    roles: tuple = ("A", "B", "C")
    det_clearing: dict = field(default_factory=dict)
    circle_clearing: dict = field(default_factory=dict)

    def clearing_value(self, which: str, Y: Sequence[complex]) -> complex:
        """Product of cleared denominators at Y for 'det' or 'circle'."""
        powers = self.det_clearing if which == "det" else self.circle_clearing
        out = 1 + 0j
        for t, e in powers.items():
            out *= self.factor(t).evaluate(Y) ** e
        return out

    def factor(self, label: str) -> RatMPoly:
        return self.cleared_factors[LABELS.index(label)]


def build_reduced_system(config: Configuration, roles: Optional[Sequence[str]] = None) -> ReducedSystem:
    """Clear denominators in the determinant and circle identities.

    The determinant identity is multiplied by the product of all four D_T,
    the circle identity by (D_P D_Q D_R)^2 for the Cramer roles P, Q, R.
    """
    roles = tuple(roles) if roles is not None else ("A", "B", "C")
    pa, pb, pc = (config.anchors[t] for t in roles)
    delta = triangle_det(pa, pb, pc)
    if delta == 0:
        raise DegenerateTriangleError(f"anchors {''.join(roles)} are collinear")
    gam = {t: gamma(config, t) for t in LABELS}
    D = {t: gam[t].denominator for t in LABELS}

    cof = cofactors(config)
    det_c = RatMPoly(Y_VARS)
    for t in LABELS:
        others = RatMPoly.const(1, Y_VARS)
        for s in LABELS:
            if s != t:
                others = others * D[s]
        det_c = det_c + gam[t].numerator * others * cof[t]

    p, q, r = roles
    ddd = D[p] * D[q] * D[r]
    g = {
        p: gam[p].numerator * D[q] * D[r],
        q: gam[q].numerator * D[p] * D[r],
        r: gam[r].numerator * D[p] * D[q],
    }
    gq, gr = g[q] - g[p], g[r] - g[p]
    det1 = gq * (pa.y - pc.y) - gr * (pa.y - pb.y)
    det2 = gr * (pa.x - pb.x) - gq * (pa.x - pc.x)
    circle = (
        (det1 - ddd * (2 * delta * pa.x)) ** 2
        + (det2 - ddd * (2 * delta * pa.y)) ** 2
        - (g[p] + ddd * pa.norm2()) * ddd * (4 * delta * delta)
    )
    return ReducedSystem(
        det_constraint=det_c,
        circle_constraint=circle,
        cleared_factors=[D[t] for t in LABELS],
        delta=delta,
        roles=roles,
        det_clearing={t: 1 for t in LABELS},
        circle_clearing={t: 2 for t in roles},
    )


@dataclass(frozen=True)
class GammaSystem:
    """Relations among the shifted values gT = Gamma_T + |T|^2 of a normalized configuration."""

    H: RatMPoly
    F: RatMPoly
    linear_relation: RatMPoly
    quadric_relation: RatMPoly

    def degrees(self) -> tuple:
        return (
            self.H.degree(),
            self.F.degree(),
            self.linear_relation.degree(),
            self.quadric_relation.degree(),
        )

    def bezout_number(self) -> int:
        out = 1
        for d in self.degrees():
            out *= d
        return out


def build_gamma_system(config: Configuration) -> GammaSystem:
    """Eliminate Y from the four relations gT (k_T N_T(Y) - 1) = N_T(Y).

    Requires A = (0, 0), B = (b1, 0) with b1 != 0 and C, D off the first
    axis.  Differences N_A - N_B and N_A - N_C are linear in Y, which yields
    Y as a rational function of (gA, gB, gC); substituting back into the A
    relation gives H, and comparing the two expressions for y2 obtained from
    C and from D gives F.
    """
    A, B, C, Dp = (config.anchors[t] for t in LABELS)
    if A != Point2(0, 0) or B.y != 0 or B.x == 0:
        raise NotNormalizedError("need A at the origin and B on the first axis")
    if C.y == 0 or Dp.y == 0:
        raise NotNormalizedError("C and D must lie off the first axis")
    k = config.constants
    gv = {t: RatMPoly.var(f"g{t}", GAMMA_VARS) for t in LABELS}
    e = {t: gv[t] * k[t] - 1 for t in LABELS}
    b1 = B.x

    # 2 b1 eA eB y1
    y1n = gv["A"] * e["B"] - gv["B"] * e["A"] + e["A"] * e["B"] * (b1 * b1)

    def y2n(t: str) -> RatMPoly:
        # 2 b1 t2 eA eB eT y2, from N_A - N_T = 2 T.Y - |T|^2
        P = config.anchors[t]
        return (gv["A"] * e[t] - gv[t] * e["A"] + e["A"] * e[t] * P.norm2()) * e["B"] * b1 - e[t] * y1n * P.x

    c2, d2 = C.y, Dp.y
    H = (e["C"] * y1n * c2) ** 2 + y2n("C") ** 2 - gv["A"] * e["A"] * e["B"] ** 2 * e["C"] ** 2 * (4 * b1 * b1 * c2 * c2)
    F = e["D"] * y2n("C") * d2 - e["C"] * y2n("D") * c2

    gamma_shift = {t: gv[t] - config.anchors[t].norm2() for t in LABELS}
    cof = cofactors(config)
    linear = RatMPoly(GAMMA_VARS)
    for t in LABELS:
        linear = linear + gamma_shift[t] * cof[t]

    delta = triangle_det(A, B, C)
    gq = gamma_shift["B"] - gamma_shift["A"]
    gr = gamma_shift["C"] - gamma_shift["A"]
    det1 = gq * (A.y - C.y) - gr * (A.y - B.y)
    det2 = gr * (A.x - B.x) - gq * (A.x - C.x)
    quadric = (
        (det1 - 2 * delta * A.x) ** 2
        + (det2 - 2 * delta * A.y) ** 2
        - (gamma_shift["A"] + A.norm2()) * (4 * delta * delta)
    )
    return GammaSystem(H=H, F=F, linear_relation=linear, quadric_relation=quadric)


def require_valid(config: Configuration) -> None:
    if config.problems():
        raise InvalidConfigurationError("; ".join(config.problems()))
