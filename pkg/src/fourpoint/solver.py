"""End-to-end solution of the four-anchor system.

The production path eliminates X through Cramer's rule, leaving two
polynomials E, G in Y = (y1, y2).  Their resultant in y2 (after an optional
shear y1 = u + lam v, y2 = v) is rooted exactly-then-numerically, y2 is
recovered from the specialized pair, X from Y, and every candidate is
polished by Newton's method on the full quartic system.
"""

from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    LABELS,
    Configuration,
    PlaneTransform,
    ValidationReport,
    normalize,
    validate,
)
from .polycore import (
    ComplexPoint2,
    CPoly,
    IllConditionedError,
    NotDivisibleError,
    RatMPoly,
    divides,
    exact_divide,
    mp_gcd,
    mp_squarefree,
    rational_roots,
    resultant,
    univariate_roots,
)
from .sysbuild import (
    Y_VARS,
    DegenerateTriangleError,
    PoleError,
    ReducedSystem,
    build_reduced_system,
    cramer_roles,
    quartic_residuals,
    recover_X,
)

log = logging.getLogger(__name__)

BEZOUT_CEILING = 48
MAX_SHEAR_ATTEMPTS = 3


@dataclass(frozen=True)
class Tolerances:
    accept: float = 1e-8
    real: float = 1e-8
    dedupe: float = 1e-6
    pole: float = 1e-10


class Classification(str, enum.Enum):
    FINITE = "Finite"
    POSITIVE_DIMENSIONAL = "PositiveDimensional"
    INVALID_INPUT = "InvalidInput"


@dataclass(frozen=True)
class SolutionPair:
    X: ComplexPoint2
    Y: ComplexPoint2
    residual: float
    is_real: bool
    multiplicity: int = 1

    def coords(self) -> tuple:
        return (self.X.x, self.X.y, self.Y.x, self.Y.y)

    def swapped(self) -> "SolutionPair":
        return SolutionPair(self.Y, self.X, self.residual, self.is_real, self.multiplicity)

    def conjugate(self) -> "SolutionPair":
        c = [z.conjugate() for z in self.coords()]
        return SolutionPair(ComplexPoint2(c[0], c[1]), ComplexPoint2(c[2], c[3]), self.residual, self.is_real, self.multiplicity)


@dataclass
class SolveReport:
    classification: Classification
    solutions: list = field(default_factory=list)
    witness_curve: Optional[RatMPoly] = None
    validation: Optional[ValidationReport] = None
    bezout_ceiling: int = BEZOUT_CEILING
    diagnostics: dict = field(default_factory=dict)

    @property
    def real_solutions(self) -> list:
        return [s for s in self.solutions if s.is_real]

    def count(self, with_multiplicity: bool = True) -> int:
        if with_multiplicity:
            return sum(s.multiplicity for s in self.solutions)
        return len(self.solutions)


# ---------------------------------------------------------------------------
# Newton polishing on the quartic system


def _anchor_arrays(config: Configuration):
    fl = config.as_floats()
    T = np.array([fl[0][t] for t in LABELS], dtype=float)
    k = np.array([fl[1][t] for t in LABELS], dtype=float)
    return T, k


def _system_and_jacobian(T, k, z):
    dx = z[0:2][None, :] - T
    dy = z[2:4][None, :] - T
    P = (dx * dx).sum(axis=1)
    Q = (dy * dy).sum(axis=1)
    f = k * (P * Q) - (P + Q)
    J = np.empty((4, 4), dtype=complex)
    J[:, 0:2] = 2 * (k * Q - 1)[:, None] * dx
    J[:, 2:4] = 2 * (k * P - 1)[:, None] * dy
    return f, J, P, Q


def residual(config: Configuration, X: Sequence[complex], Y: Sequence[complex]) -> float:
    """Largest absolute value of the four cleared equations; symmetric in X, Y."""
    return max(abs(v) for v in quartic_residuals(config, X, Y))


def newton_polish(
    config: Configuration,
    guess: tuple,
    tol: Optional[Tolerances] = None,
    max_iter: int = 50,
) -> Optional[SolutionPair]:
    """Damped Newton from ``guess = (X, Y)``; None unless the residual drops below tol.accept.

    Points with some |X-T|^2 or |Y-T|^2 near zero satisfy the cleared
    equations without solving the original system and are rejected.
    """
    tol = tol or Tolerances()
    T, k = _anchor_arrays(config)
    z = np.array([complex(c) for c in (*guess[0], *guess[1])], dtype=complex)
    if not np.all(np.isfinite(z)):
        return None
    f, J, P, Q = _system_and_jacobian(T, k, z)
    norm = np.max(np.abs(f))
    for _ in range(max_iter):
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -f, rcond=None)[0]
        t = 1.0
        while True:
            zn = z + t * step
            fn, Jn, Pn, Qn = _system_and_jacobian(T, k, zn)
            nn = np.max(np.abs(fn))
            if nn < norm or t < 1e-4:
                break
            t *= 0.5
        if not np.isfinite(nn):
            return None
        small = np.max(np.abs(step)) * t <= 1e-15 * (1 + np.max(np.abs(z)))
        z, f, J, P, Q, norm = zn, fn, Jn, Pn, Qn, nn
        if small or norm == 0:
            break
    f, J, P, Q = _system_and_jacobian(T, k, z)
    norm = float(np.max(np.abs(f)))
    if norm > tol.accept:
        return None
    scale = 1 + float(np.max(np.abs(z))) ** 2
    if np.min(np.abs(P)) <= tol.pole * scale or np.min(np.abs(Q)) <= tol.pole * scale:
        return None
    return _make_pair(config, z, tol, multiplicity=1)


def jacobian_singular(config: Configuration, pair: SolutionPair, rel: float = 1e-6) -> bool:
    T, k = _anchor_arrays(config)
    z = np.array(pair.coords(), dtype=complex)
    _, J, _, _ = _system_and_jacobian(T, k, z)
    s = np.linalg.svd(J, compute_uv=False)
    return s[-1] < rel * s[0]


def _make_pair(config, z, tol: Tolerances, multiplicity: int) -> SolutionPair:
    z = [complex(c) for c in z]
    big = max(abs(c) for c in z)
    is_real = max(abs(c.imag) for c in z) <= tol.real * (1 + big)
    if is_real:
        z = [complex(c.real, 0.0) for c in z]
    X, Y = ComplexPoint2(z[0], z[1]), ComplexPoint2(z[2], z[3])
    return SolutionPair(X, Y, residual(config, X, Y), is_real, multiplicity)


# ---------------------------------------------------------------------------
# positive-dimensional detection


def _strip_cleared(g: RatMPoly, factors: Sequence[RatMPoly]) -> RatMPoly:
    for d in factors:
        d = d.with_variables(g.variables) if set(d.used_variables()) <= set(g.variables) else d
        while g.degree() > 0 and divides(d, g):
            g = exact_divide(g, d)
    return g


def detect_positive_dimensional(rs: ReducedSystem) -> Optional[RatMPoly]:
    """Common factor of the two cleared constraints, cleared denominators removed."""
    g = mp_gcd(rs.det_constraint, rs.circle_constraint)
    if g.degree() <= 0:
        return None
    g = _strip_cleared(g, rs.cleared_factors)
    if g.degree() <= 0:
        return None
    return mp_squarefree(g)


def _curve_points(curve: RatMPoly, count: int, rng: random.Random) -> list:
    """Points (y1, y2) on a plane curve, found by fixing one coordinate at random."""
    v1, v2 = curve.variables
    pts = []
    solve_in, fix = (v2, v1) if curve.degree(v2) > 0 else (v1, v2)
    attempts = 0
    while len(pts) < count and attempts < 20 * count:
        attempts += 1
        c = Fraction(rng.randint(-300, 300), 100)
        uni = curve.subs({fix: c}).with_variables((solve_in,))
        coeffs = uni.as_univariate(solve_in)
        if len(coeffs) < 2:
            continue
        try:
            roots = univariate_roots(CPoly(tuple(complex(x) for x in coeffs)))
        except IllConditionedError:
            continue
        for r, _ in roots:
            pt = {fix: complex(c), solve_in: complex(r)}
            pts.append((pt[v1], pt[v2]))
            if len(pts) >= count:
                break
    return pts


def verify_witness(config: Configuration, curve: RatMPoly, roles, tol: Tolerances, samples: int = 50, seed: int = 0) -> bool:
    """True when sampled curve points extend to solutions of the full system."""
    rng = random.Random(seed)
    pts = _curve_points(curve, samples, rng)
    if len(pts) < samples:
        return False
    good = 0
    for Y in pts:
        try:
            X = recover_X(config, Y, roles)
        except PoleError:
            continue
        pair = newton_polish(config, (X, ComplexPoint2(*Y)), tol, max_iter=3)
        if pair is not None and residual(config, X, Y) <= tol.accept * 10:
            good += 1
    return good >= samples * 0.9


# ---------------------------------------------------------------------------
# finite solving


def _sheared(p: RatMPoly, lam: Fraction) -> RatMPoly:
    u = RatMPoly.var("u", ("u", "v"))
    v = RatMPoly.var("v", ("u", "v"))
    return p.subs({"y1": u + v * lam, "y2": v}).with_variables(("u", "v"))


def _remove_spurious(R: RatMPoly, rs: ReducedSystem, lam: Fraction, diag: dict) -> RatMPoly:
    """Divide out resultants of pairs of pole circles, which vanish on E and G by construction."""
    D = {t: _sheared(rs.factor(t), lam) for t in LABELS}
    removed = 0
    for a, b in combinations(rs.roles, 2):
        try:
            S = resultant(D[a], D[b], "v")
        except Exception:
            continue
        if S.degree() <= 0:
            continue
        for _ in range(2):
            try:
                R = exact_divide(R, S)
                removed += S.degree()
            except NotDivisibleError:
                break
    diag["spurious_degree_removed"] = removed
    return R


def _candidates_from_u(E: RatMPoly, G: RatMPoly, u0: complex, keep: float = 1e-4) -> list:
    """v values with E(u0, v) = 0 and G(u0, v) approximately zero."""
    e_coeffs = {d: c.evaluate((u0, 0)) for d, c in E.coefficients_in("v").items()}
    g_coeffs = {d: c.evaluate((u0, 0)) for d, c in G.coefficients_in("v").items()}

    def dense(cs):
        n = max(cs) if cs else 0
        return [cs.get(i, 0j) for i in range(n + 1)]

    candidates = []
    for main, other in ((E, G), (G, E)):
        cs = dense(e_coeffs if main is E else g_coeffs)
        mx = max((abs(c) for c in cs), default=0)
        while len(cs) > 1 and abs(cs[-1]) <= 1e-12 * mx:
            cs.pop()
        if len(cs) < 2:
            continue
        try:
            roots = univariate_roots(CPoly(tuple(cs)))
        except IllConditionedError:
            continue
        scored = []
        for v0, m in roots:
            val = other.evaluate((u0, v0))
            scale = other.evaluate_abs((u0, v0)) or 1.0
            scored.append((abs(val) / scale, complex(v0), m))
        good = [s for s in scored if s[0] <= keep]
        if not good and scored:
            good = [min(scored)]
        candidates = [(v0, m) for _, v0, m in good]
        break
    return candidates


def _finite_candidates(config, rs: ReducedSystem, lam: Fraction, tol: Tolerances, diag: dict) -> Optional[list]:
    """Y candidates from one elimination attempt, or None when it degenerates."""
    E = _sheared(rs.det_constraint, lam)
    G = _sheared(rs.circle_constraint, lam)
    if E.degree("v") <= 0 or G.degree("v") <= 0:
        return None
    R = resultant(E, G, "v")
    if R.is_zero():
        return None
    diag["resultant_degree"] = R.degree()
    R = _remove_spurious(R, rs, lam, diag)
    diag["eliminant_degree"] = R.degree()
    log.debug("shear %s: resultant degree %d, eliminant degree %d", lam, diag["resultant_degree"], R.degree())
    coeffs = R.with_variables(("u",)).as_univariate("u") if R.used_variables() else []
    if len(coeffs) < 2:
        return []
    uroots = rational_roots(coeffs)
    diag["distinct_u_roots"] = len(uroots)
    log.debug("%d distinct eliminant roots", len(uroots))
    out = []
    for u0, mu in uroots:
        u0 = complex(u0)
        for v0, mv in _candidates_from_u(E, G, u0):
            y1 = u0 + float(lam) * v0
            out.append(((y1, v0), max(mu, mv)))
    return out


def _dedupe(pairs: list, tol: Tolerances) -> list:
    out: list = []
    for p in pairs:
        z = np.array(p.coords())
        dup = False
        for i, q in enumerate(out):
            w = np.array(q.coords())
            if np.max(np.abs(z - w)) <= tol.dedupe * (1 + np.max(np.abs(w))):
                dup = True
                if p.residual < q.residual:
                    out[i] = SolutionPair(p.X, p.Y, p.residual, p.is_real, max(p.multiplicity, q.multiplicity))
                break
        if not dup:
            out.append(p)
    return out


def _complete_orbits(config, pairs: list, tol: Tolerances) -> list:
    """Close the set under X<->Y exchange and complex conjugation."""
    pool = list(pairs)
    for p in pairs:
        for img in (p.swapped(), p.conjugate(), p.swapped().conjugate()):
            z = np.array(img.coords())
            pool.append(_make_pair(config, z, tol, img.multiplicity))
    pool = [p for p in pool if p.residual <= tol.accept]
    return _dedupe(sorted(pool, key=lambda s: s.residual), tol)


def _sort_key(p: SolutionPair):
    return tuple(v for z in p.coords() for v in (round(z.real, 8) + 0.0, round(z.imag, 8) + 0.0))


def _polish_candidates(config, roles, cands, tol: Tolerances) -> list:
    pairs = []
    for Y, mult in cands:
        try:
            X = recover_X(config, Y, roles)
        except PoleError:
            continue
        pair = newton_polish(config, (X, ComplexPoint2(*Y)), tol)
        if pair is None:
            continue
        if mult > 1 and jacobian_singular(config, pair):
            pair = SolutionPair(pair.X, pair.Y, pair.residual, pair.is_real, mult)
        pairs.append(pair)
    return pairs


def _solve_finite(config, roles, rs: ReducedSystem, tol: Tolerances, seed: int, diag: dict) -> list:
    rng = random.Random(seed)
    shears = [Fraction(0)] + [Fraction(rng.randint(1, 97), rng.randint(98, 199)) for _ in range(MAX_SHEAR_ATTEMPTS)]
    attempts = []
    best: list = []
    for lam in shears:
        adiag: dict = {"shear": str(lam)}
        cands = _finite_candidates(config, rs, lam, tol, adiag)
        attempts.append(adiag)
        if cands is None:
            adiag["status"] = "degenerate"
            continue
        pairs = _polish_candidates(config, roles, cands, tol)
        log.debug("%d candidates, %d survive polishing", len(cands), len(pairs))
        pairs = _complete_orbits(config, _dedupe(pairs, tol), tol)
        adiag["solutions"] = len(pairs)
        if len(pairs) > len(best):
            best = pairs
        # every Y should appear as an X as well; otherwise try another shear
        if _swap_closed(best, tol) and len(best) >= adiag.get("eliminant_degree", 0):
            break
        adiag["status"] = "incomplete"
    diag["attempts"] = attempts
    return best


def _swap_closed(pairs: list, tol: Tolerances) -> bool:
    coords = [np.array(p.coords()) for p in pairs]
    for p in pairs:
        s = np.array(p.swapped().coords())
        if not any(np.max(np.abs(s - c)) <= tol.dedupe * (1 + np.max(np.abs(c))) for c in coords):
            return False
    return True


def solve(config: Configuration, tol: Optional[Tolerances] = None, seed: int = 0) -> SolveReport:
    """Classify the configuration and enumerate its solutions when finite."""
    tol = tol or Tolerances()
    problems = config.problems()
    if problems:
        return SolveReport(Classification.INVALID_INPUT, diagnostics={"problems": problems})
    report = validate(config)
    diag: dict = {"seed": seed}
    roles = cramer_roles(config)
    if roles is None:
        from .collinear import solve_collinear

        out = solve_collinear(config, tol, seed, diag)
        out.validation = report
        return out
    diag["roles"] = "".join(roles)
    rs = build_reduced_system(config, roles)
    diag["det_degree"] = rs.det_constraint.degree()
    diag["circle_degree"] = rs.circle_constraint.degree()
    log.debug("constraint degrees %d and %d", diag["det_degree"], diag["circle_degree"])
    witness = detect_positive_dimensional(rs)
    if witness is not None:
        diag["witness_degree"] = witness.degree()
        if verify_witness(config, witness, roles, tol, seed=seed):
            return SolveReport(Classification.POSITIVE_DIMENSIONAL, witness_curve=witness, validation=report, diagnostics=diag)
        diag["spurious_witness"] = repr(witness)
        rs = ReducedSystem(
            exact_divide(rs.det_constraint, witness),
            exact_divide(rs.circle_constraint, witness),
            rs.cleared_factors,
            rs.delta,
            rs.roles,
            rs.det_clearing,
            rs.circle_clearing,
        )
    pairs = _solve_finite(config, roles, rs, tol, seed, diag)
    pairs.sort(key=_sort_key)
    diag["solution_count"] = len(pairs)
    log.debug("solve diagnostics: %s", diag)
    return SolveReport(Classification.FINITE, solutions=pairs, validation=report, diagnostics=diag)


def map_solutions(report: SolveReport, transform: PlaneTransform) -> list:
    """Solutions pushed through a similarity, e.g. to compare normalized and original solves."""
    out = []
    for s in report.solutions:
        X = ComplexPoint2(*transform.apply_complex(s.X))
        Y = ComplexPoint2(*transform.apply_complex(s.Y))
        out.append(SolutionPair(X, Y, s.residual, s.is_real, s.multiplicity))
    return out


__all__ = [
    "BEZOUT_CEILING",
    "Classification",
    "SolutionPair",
    "SolveReport",
    "Tolerances",
    "detect_positive_dimensional",
    "jacobian_singular",
    "map_solutions",
    "newton_polish",
    "normalize",
    "residual",
    "solve",
    "verify_witness",
]
