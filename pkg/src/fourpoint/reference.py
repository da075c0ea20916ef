"""Built-in reference configurations and their closed-form solutions."""

from __future__ import annotations

import random
from fractions import Fraction

import mpmath

from .geometry import Configuration


def square_configuration() -> Configuration:
    k = Fraction(11, 10)
    return Configuration.from_values(
        {"A": (-1, -1), "B": (-1, 1), "C": (1, -1), "D": (1, 1)},
        {t: k for t in "ABCD"},
    )


def collinear_configuration() -> Configuration:
    return Configuration.from_values(
        {"A": (-1, 0), "B": (1, 0), "C": (-2, 0), "D": (2, 0)},
        {"A": Fraction(-2, 3), "B": Fraction(-2, 3), "C": Fraction(2, 3), "D": Fraction(2, 3)},
    )


def square_expected(dps: int = 40) -> list:
    """The 24 solutions (x1, x2, y1, y2) of the square example as mpmath numbers."""
    with mpmath.workdps(dps):
        s14, s2041 = mpmath.sqrt(14), mpmath.sqrt(2041)
        a = mpmath.sqrt(mpmath.mpf(2) / 11 * (5 - s14))
        b = mpmath.sqrt(mpmath.mpf(2) / 11 * (5 + s14))
        c = mpmath.sqrt((85 - s2041) / 66)
        d = mpmath.sqrt((85 + s2041) / 66)
        axis = [(-a, a), (a, -a), (-b, b), (b, -b), (c, -d), (-c, d), (-d, c), (d, -c)]
        zero = mpmath.mpf(0)
        out = [(x, zero, y, zero) for x, y in axis]
        out += [(zero, x, zero, y) for x, y in axis]
        p = mpmath.sqrt(mpmath.mpf(157) / 2) / 11 * 1j
        q = mpmath.sqrt(mpmath.mpf(107) / 2) / 11 * 1j
        out += [
            (p, -q, -p, -q),
            (-p, -q, p, -q),
            (p, q, -p, q),
            (-p, q, p, q),
            (-q, p, -q, -p),
            (q, p, q, -p),
            (-q, -p, -q, p),
            (q, -p, q, p),
        ]
        return [tuple(mpmath.mpc(z) for z in s) for s in out]


def collinear_curve_samples(count: int = 100, seed: int = 0) -> list:
    """Points (x, y) on 2x^2y^2 + 5(x^2 + y^2) + 8 = 0 with real x.

    The curve has no real points: y = +-i sqrt((5x^2 + 8) / (2x^2 + 5)).
    """
    rng = random.Random(seed)
    out = []
    for i in range(count):
        x = rng.uniform(-3.0, 3.0)
        y = 1j * ((5 * x * x + 8) / (2 * x * x + 5)) ** 0.5
        out.append((complex(x), y if i % 2 == 0 else -y))
    return out


def match_expected(found: list, expected: list) -> list:
    """Greedy nearest matching; returns (expected index, found index, deviation) triples."""
    free = set(range(len(found)))
    out = []
    for i, e in enumerate(expected):
        e = [complex(z) for z in e]
        best, bj = float("inf"), None
        for j in free:
            dev = max(abs(a - b) for a, b in zip(found[j], e))
            if dev < best:
                best, bj = dev, j
        if bj is not None:
            free.discard(bj)
        out.append((i, bj, best))
    return out


EXAMPLES = {
    "square": square_configuration,
    "collinear": collinear_configuration,
}
