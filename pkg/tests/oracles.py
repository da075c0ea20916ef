"""Independent multistart Newton oracle for the real solutions.

Starts real Newton iterations from a coarse grid over (x1, x2, y1, y2).
The system is symmetric in X and Y, so only grid points with X <= Y in
lexicographic cell order are used; the swapped images are added afterwards.
"""

from fractions import Fraction
import random

import numpy as np

from fourpoint.geometry import Configuration, validate


def _f_and_j(T, k, Z):
    # Z has shape (4, n); everything is kept as rows of length n
    dx = [Z[0][None] - T[:, 0:1], Z[1][None] - T[:, 1:2]]
    dy = [Z[2][None] - T[:, 0:1], Z[3][None] - T[:, 1:2]]
    P = dx[0] ** 2 + dx[1] ** 2
    Q = dy[0] ** 2 + dy[1] ** 2
    kk = k[:, None]
    F = kk * P * Q - P - Q
    a = 2 * (kk * Q - 1)
    b = 2 * (kk * P - 1)
    J = [[a[r] * dx[0][r], a[r] * dx[1][r], b[r] * dy[0][r], b[r] * dy[1][r]] for r in range(4)]
    return F, J, P, Q


def _batched_solve(J, rhs):
    """Gaussian elimination with partial pivoting, vectorized over many 4x4 systems."""
    A = [row[:] + [rhs[r].copy()] for r, row in enumerate(J)]
    for c in range(4):
        for r in range(c + 1, 4):
            swap = np.abs(A[r][c]) > np.abs(A[c][c])
            if swap.any():
                for j in range(c, 5):
                    hi, lo = A[c][j], A[r][j]
                    A[c][j], A[r][j] = np.where(swap, lo, hi), np.where(swap, hi, lo)
        for r in range(c + 1, 4):
            m = A[r][c] / A[c][c]
            for j in range(c + 1, 5):
                A[r][j] = A[r][j] - m * A[c][j]
    x = [None] * 4
    for c in range(3, -1, -1):
        acc = A[c][4]
        for j in range(c + 1, 4):
            acc = acc - A[c][j] * x[j]
        x[c] = acc / A[c][c]
    return np.array(x)


def grid_oracle(config: Configuration, n: int = 25, margin: float = 2.0, iters: int = 60) -> list:
    """Real solutions reached by Newton from a 25^4 grid (halved by symmetry)."""
    (pts, ks) = config.as_floats()
    T = np.array([pts[t] for t in "ABCD"], dtype=float)
    k = np.array([ks[t] for t in "ABCD"], dtype=float)
    lo = T.min(axis=0) - margin
    hi = T.max(axis=0) + margin
    gx = np.linspace(lo[0], hi[0], n)
    gy = np.linspace(lo[1], hi[1], n)
    cells = np.array([(a, b) for a in gx for b in gy])
    ii, jj = np.triu_indices(len(cells))
    Z = np.concatenate([cells[ii], cells[jj]], axis=1).T
    # nudge off the exact grid so no start sits on an anchor
    Z = Z + 1e-3 * np.array([0.37, -0.21, 0.13, 0.29])[:, None]
    done = []
    with np.errstate(all="ignore"):
        for it in range(iters):
            F, J, _, _ = _f_and_j(T, k, Z)
            if it in (20, 35):
                # starts still far from any zero after many steps are wandering;
                # every basin of a real solution holds plenty of other starts
                res = np.max(np.abs(F), axis=0) / (1 + np.max(np.abs(Z), axis=0) ** 4)
                live = res < (1e-2 if it == 20 else 1e-6)
                Z, F = Z[:, live], F[:, live]
                J = [[e[live] for e in row] for row in J]
            step = _batched_solve(J, -F)
            ok = np.isfinite(step).all(0)
            Z, step = Z[:, ok], np.clip(step[:, ok], -1.0, 1.0)
            Z = Z + step
            size = np.max(np.abs(step), axis=0)
            conv = size <= 1e-13 * (1 + np.max(np.abs(Z), axis=0))
            done.append(Z[:, conv])
            # starts that wander far away are heading to infinity
            Z = Z[:, ~conv & (np.max(np.abs(Z), axis=0) < 1e4)]
            if not Z.shape[1]:
                break
        done.append(Z)
        Z = np.concatenate(done, axis=1)
        F, _, P, Q = _f_and_j(T, k, Z)
    res = np.max(np.abs(F), axis=0)
    keep = (res < 1e-9) & (np.min(P, axis=0) > 1e-8) & (np.min(Q, axis=0) > 1e-8)
    good = Z[:, keep].T
    # collapse the many identical convergents before the pairwise dedupe
    _, first = np.unique(np.round(good, 7), axis=0, return_index=True)
    sols = []
    for z in good[np.sort(first)]:
        for w in (z, np.concatenate([z[2:], z[:2]])):
            if not any(np.max(np.abs(w - s)) <= 1e-6 * (1 + np.max(np.abs(s))) for s in sols):
                sols.append(w)
    return sols


def random_configuration(rng: random.Random) -> Configuration:
    """Random rational configuration satisfying both conditions."""
    while True:
        pts = {t: (Fraction(rng.randint(-30, 30), 10), Fraction(rng.randint(-30, 30), 10)) for t in "ABCD"}
        ks = {t: Fraction(rng.randint(25, 400), 100) for t in "ABCD"}
        cfg = Configuration.from_values(pts, ks)
        if cfg.problems():
            continue
        if validate(cfg).ok:
            return cfg
