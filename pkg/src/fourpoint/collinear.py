"""Fallback when all four anchors are collinear.

After normalization the anchors are (t_T, 0).  With s = |X|^2, r = |Y|^2 and
w = y1, each cleared equation reads

    (kQ - 1) s - 2 t (kQ - 1) x1 + t^2 (kQ - 1) - Q = 0,   Q = r - 2 t w + t^2,

which is linear in (s, x1, 1).  Solutions need the 4x3 coefficient matrix to
have rank at most two, so every 3x3 minor, a polynomial in (r, w), vanishes.
A common factor of the minors is a curve of Y values, each extending to X.
"""

from __future__ import annotations

import cmath
import random
from itertools import combinations
from typing import Optional

import numpy as np

from .geometry import LABELS, Configuration, PlaneTransform, normalize
from .polycore import (
    ComplexPoint2,
    CPoly,
    IllConditionedError,
    RatMPoly,
    divides,
    exact_divide,
    mp_gcd,
    mp_squarefree,
    rational_roots,
    resultant,
    univariate_roots,
)

RW = ("r", "w")


def _rows(nc: Configuration) -> dict:
    r = RatMPoly.var("r", RW)
    w = RatMPoly.var("w", RW)
    out = {}
    for t in LABELS:
        a, k = nc.anchors[t].x, nc.constants[t]
        Q = r - w * (2 * a) + a * a
        e = Q * k - 1
        out[t] = (e, e * (-2 * a), e * (a * a) - Q, Q)
    return out


def _det3(m) -> RatMPoly:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def minors(nc: Configuration) -> list:
    rows = _rows(nc)
    return [_det3([rows[t][:3] for t in triple]) for triple in combinations(LABELS, 3)]


def _strip(g: RatMPoly, rows: dict) -> RatMPoly:
    for t in LABELS:
        for d in (rows[t][0], rows[t][3]):
            while g.degree() > 0 and divides(d, g):
                g = exact_divide(g, d)
    return g


def _lift(nc: Configuration, rw: tuple) -> list:
    """All normalized (X, Y) over a point (r, w); the two square roots give four lifts."""
    r, w = rw
    A = np.empty((4, 2), dtype=complex)
    b = np.empty(4, dtype=complex)
    for i, t in enumerate(LABELS):
        a, k = float(nc.anchors[t].x), float(nc.constants[t])
        Q = r - 2 * a * w + a * a
        e = k * Q - 1
        A[i] = (e, -2 * a * e)
        b[i] = -(a * a * e - Q)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    s, x1 = complex(sol[0]), complex(sol[1])
    x2 = cmath.sqrt(s - x1 * x1)
    y2 = cmath.sqrt(r - w * w)
    out = []
    for sx in (1, -1):
        for sy in (1, -1):
            out.append(((x1, sx * x2), (complex(w), sy * y2)))
    return out


def _to_original(tr: PlaneTransform, X, Y):
    inv = tr.inverse()
    return ComplexPoint2(*inv.apply_complex(X)), ComplexPoint2(*inv.apply_complex(Y))


def witness_in_y(g: RatMPoly, tr: PlaneTransform) -> RatMPoly:
    """Pull a curve g(r, w) in normalized coordinates back to the original (y1, y2)."""
    y1 = RatMPoly.var("y1", ("y1", "y2"))
    y2 = RatMPoly.var("y2", ("y1", "y2"))
    p, q = tr.p, tr.q
    ox, oy = tr.origin
    w = (y1 - ox) * p + (y2 - oy) * q
    r = ((y1 - ox) ** 2 + (y2 - oy) ** 2) * tr.scale_sq
    return g.subs({"r": r, "w": w}).with_variables(("y1", "y2")).primitive()


def solve_collinear(config: Configuration, tol, seed: int, diag: dict):
    from .solver import (
        Classification,
        SolveReport,
        _complete_orbits,
        _curve_points,
        _dedupe,
        _sort_key,
        newton_polish,
        residual,
    )

    nc, tr = normalize(config)
    diag["fallback"] = "collinear"
    rows = _rows(nc)
    ms = [m for m in minors(nc) if not m.is_zero()]
    g: Optional[RatMPoly] = None
    for m in ms:
        g = m if g is None else mp_gcd(g, m)
    if g is None:
        diag["note"] = "all minors vanish identically"
        return SolveReport(Classification.POSITIVE_DIMENSIONAL, diagnostics=diag)
    g = _strip(g, rows)
    if g.degree() > 0:
        g = mp_squarefree(g)
        diag["witness_rw"] = repr(g)
        rng = random.Random(seed)
        pts = _curve_points(g, 50, rng)
        good = 0
        for rw in pts:
            X, Y = _lift(nc, rw)[0]
            X, Y = _to_original(tr, X, Y)
            if residual(config, X, Y) <= tol.accept:
                good += 1
        diag["witness_samples_ok"] = good
        if good >= 45:
            return SolveReport(Classification.POSITIVE_DIMENSIONAL, witness_curve=witness_in_y(g, tr), diagnostics=diag)

    # finitely many (r, w): eliminate r between pairs of minors
    cands = []
    for m1, m2 in combinations(ms, 2):
        if m1.degree("r") <= 0 or m2.degree("r") <= 0:
            continue
        R = resultant(m1, m2, "r")
        if R.is_zero() or not R.used_variables():
            continue
        for w0, _ in rational_roots(R.with_variables(("w",)).as_univariate("w")):
            w0 = complex(w0)
            dense = [0j] * (m1.degree("r") + 1)
            for d, c in m1.coefficients_in("r").items():
                dense[d] = c.evaluate((0, w0))
            try:
                roots = univariate_roots(CPoly(tuple(dense)))
            except (IllConditionedError, ValueError):
                continue
            for r0, _ in roots:
                for X, Y in _lift(nc, (complex(r0), w0)):
                    cands.append(_to_original(tr, X, Y))
        break
    pairs = []
    for X, Y in cands:
        p = newton_polish(config, (X, Y), tol)
        if p is not None:
            pairs.append(p)
    pairs = _complete_orbits(config, _dedupe(pairs, tol), tol)
    pairs.sort(key=_sort_key)
    diag["solution_count"] = len(pairs)
    return SolveReport(Classification.FINITE, solutions=pairs, diagnostics=diag)
