"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
"""

import io
import json
import random
import subprocess
import sys
import time
from fractions import Fraction as Fr
from functools import lru_cache
from math import sqrt
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fourpoint.cli import main  # noqa: E402
from fourpoint.geometry import Configuration, normalize  # noqa: E402
from fourpoint.reference import square_configuration  # noqa: E402
from fourpoint.solver import BEZOUT_CEILING, Classification, solve  # noqa: E402
from fourpoint.sysbuild import NotNormalizedError, build_gamma_system, det_identity, recover_X  # noqa: E402
from oracles import grid_oracle, random_configuration  # noqa: E402

HERE = Path(__file__).parent


def announce(capsys, n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    t0 = time.perf_counter()
    code = main(argv, out, err)
    return code, out.getvalue(), time.perf_counter() - t0


def _parse_solutions(doc):
    return [np.array([complex(*c) for c in s["X"] + s["Y"]]) for s in doc["solutions"]]


def _one_to_one(found, expected, tol):
    """Each expected point has exactly one found point within tol, and vice versa."""
    if len(found) != len(expected):
        return False, float("inf")
    worst = 0.0
    used = set()
    for e in expected:
        d = [float(np.max(np.abs(f - e))) for f in found]
        hits = [i for i, v in enumerate(d) if v <= tol]
        if len(hits) != 1 or hits[0] in used:
            return False, min(d)
        used.add(hits[0])
        worst = max(worst, d[hits[0]])
    return True, worst


# -- criterion 1 --------------------------------------------------------------


def square_closed_forms():
    a, b = sqrt(2 / 11 * (5 - sqrt(14))), sqrt(2 / 11 * (5 + sqrt(14)))
    c, d = sqrt((85 - sqrt(2041)) / 66), sqrt((85 + sqrt(2041)) / 66)
    axis = [(-a, a), (a, -a), (-b, b), (b, -b), (c, -d), (-c, d), (-d, c), (d, -c)]
    out = [np.array([x, 0, y, 0], dtype=complex) for x, y in axis]
    out += [np.array([0, x, 0, y], dtype=complex) for x, y in axis]
    p, q = sqrt(157 / 2) / 11 * 1j, sqrt(107 / 2) / 11 * 1j
    for s1, s2, s3, s4 in [
        (p, -q, -p, -q), (-p, -q, p, -q), (p, q, -p, q), (-p, q, p, q),
        (-q, p, -q, -p), (q, p, q, -p), (-q, -p, -q, p), (q, -p, q, p),
    ]:
        out.append(np.array([s1, s2, s3, s4]))
    return out


@lru_cache(maxsize=None)
def criterion1_run():
    code, out, elapsed = run_cli(["example", "square"])
    return code, json.loads(out), elapsed


def test_criterion_1_square_example(capsys):
    code, doc, elapsed = criterion1_run()
    found = _parse_solutions(doc)
    expected = square_closed_forms()
    ok_match, worst = _one_to_one(found, expected, 1e-9)
    n_real = sum(1 for s in doc["solutions"] if s["is_real"])
    ok = code == 0 and ok_match and len(found) == 24 and n_real == 16 and elapsed < 5.0
    announce(capsys, 1, ok, f"solutions={len(found)} real={n_real} max_dev={worst:.2e} time={elapsed:.2f}s")
    assert ok


# -- criterion 2 --------------------------------------------------------------


def curve_points(count, seed=7):
    """Points on 2x^2y^2 + 5(x^2 + y^2) + 8 = 0, partly with real y, partly with real x."""
    rng = np.random.default_rng(seed)
    pts = []
    for i in range(count):
        if i % 5 == 4:
            # x imaginary, x^2 in (-5/2, -8/5): then y is real
            x2 = -rng.uniform(1.61, 2.49)
            x = 1j * sqrt(-x2)
        else:
            x = complex(rng.uniform(-3, 3))
            x2 = x.real**2
        y2 = -(5 * x2 + 8) / (2 * x2 + 5)
        y = sqrt(y2) if y2 > 0 else 1j * sqrt(-y2)
        pts.append((x, complex(y) * (1 if rng.random() < 0.5 else -1)))
    return pts


def system_residual(anchors, ks, X, Y):
    worst = 0.0
    for (t1, t2), k in zip(anchors, ks):
        P = (X[0] - t1) ** 2 + (X[1] - t2) ** 2
        Q = (Y[0] - t1) ** 2 + (Y[1] - t2) ** 2
        worst = max(worst, abs(1 / P + 1 / Q - k))
    return worst


def test_criterion_2_collinear_example(capsys):
    code, out, _ = run_cli(["example", "collinear"])
    doc = json.loads(out)
    anchors = [(-1, 0), (1, 0), (-2, 0), (2, 0)]
    ks = [-2 / 3, -2 / 3, 2 / 3, 2 / 3]
    res = [system_residual(anchors, ks, (0, x), (0, y)) for x, y in curve_points(100)]
    ok = code == 2 and doc["classification"] == "PositiveDimensional" and max(res) <= 1e-10
    ok = ok and doc["witness_curve"] is not None
    announce(capsys, 2, ok, f"classification={doc['classification']} samples={len(res)} max_residual={max(res):.2e}")
    assert ok


# -- criterion 3 --------------------------------------------------------------

ORACLE_SEEDS = range(1000, 1020)


@lru_cache(maxsize=None)
def random_case(seed):
    cfg = random_configuration(random.Random(seed))
    return cfg, solve(cfg)


def _match_real(report, oracle, tol=1e-6):
    real = [np.array([z.real for z in s.coords()]) for s in report.real_solutions]

    def near(a, b):
        return np.max(np.abs(a - b)) <= tol * (1 + np.max(np.abs(b)))

    missed = sum(1 for w in oracle if not any(near(w, r) for r in real))
    extra = sum(1 for r in real if not any(near(r, w) for w in oracle))
    return missed, extra, len(real)


def test_criterion_3_oracle_equivalence(capsys):
    bad = []
    total = 0
    for seed in ORACLE_SEEDS:
        cfg, rep = random_case(seed)
        oracle = grid_oracle(cfg)
        missed, extra, n = _match_real(rep, oracle)
        total += n
        if rep.classification is not Classification.FINITE or missed or extra:
            bad.append((seed, missed, extra))
    ok = not bad
    announce(capsys, 3, ok, f"configs={len(ORACLE_SEEDS)} real_solutions={total} mismatches={bad}")
    assert ok


# -- criterion 4 --------------------------------------------------------------

INVARIANT_SEEDS = range(2000, 2040)


def _shift(cfg, v):
    return Configuration.from_values(
        {t: (p.x + v[0], p.y + v[1]) for t, p in cfg.anchors.items()}, dict(cfg.constants)
    )


def _dilate(cfg, s):
    return Configuration.from_values(
        {t: (p.x * s, p.y * s) for t, p in cfg.anchors.items()}, {t: k / (s * s) for t, k in cfg.constants.items()}
    )


def _set_maps(src, dst, f, tol):
    a = [f(np.array(s.coords())) for s in src]
    b = [np.array(s.coords()) for s in dst]
    if len(a) != len(b):
        return False
    return all(any(np.max(np.abs(x - y)) <= tol * (1 + np.max(np.abs(y))) for y in b) for x in a)


def invariant_checks(cfg, rep, rng):
    sols = [np.array(s.coords()) for s in rep.solutions]

    def present(z):
        return any(np.max(np.abs(z - c)) <= 1e-9 * (1 + np.max(np.abs(c))) for c in sols)

    swap = all(present(np.concatenate([z[2:], z[:2]])) for z in sols)
    conj = all(present(np.conj(z)) for z in sols)
    cramer = True
    det = True
    for z in sols:
        X = recover_X(cfg, (z[2], z[3]))
        if max(abs(X[0] - z[0]), abs(X[1] - z[1])) > 1e-6 * (1 + np.max(np.abs(z[:2]))):
            cramer = False
        value, scale = det_identity(cfg, (z[2], z[3]))
        if abs(value) > 1e-6 * scale:
            det = False
    v = (Fr(rng.randint(-30, 30), 10), Fr(rng.randint(-30, 30), 10))
    shifted = solve(_shift(cfg, v))
    vv = np.array([float(v[0]), float(v[1])] * 2)
    translation = _set_maps(rep.solutions, shifted.solutions, lambda z: z + vv, 1e-8)
    s = Fr(rng.randint(2, 9), rng.randint(2, 9))
    if s == 1:
        s = Fr(3, 2)
    dilated = solve(_dilate(cfg, s))
    dilation = _set_maps(rep.solutions, dilated.solutions, lambda z: z * float(s), 1e-8)
    return {"swap": swap, "conjugate": conj, "cramer": cramer, "determinant": det,
            "translation": translation, "dilation": dilation}


def test_criterion_4_invariants(capsys):
    cases = 0
    failures = []
    for seed in INVARIANT_SEEDS:
        cfg, rep = random_case(seed)
        for name, ok in invariant_checks(cfg, rep, random.Random(seed)).items():
            cases += 1
            if not ok:
                failures.append((seed, name))
    ok = cases >= 200 and not failures
    announce(capsys, 4, ok, f"cases={cases} failures={failures}")
    assert ok


# -- criterion 5 --------------------------------------------------------------


def expected_H_top(c, kA):
    c1, c2 = c
    return (c1 * c1 + c2 * c2 - 2 * c1 + 1) * ((c1 * c1 + c2 * c2) * kA - 2 * c1 * kA + 1)


def expected_F_top(c, d, k):
    c1, c2 = c
    d1, d2 = d
    kA, kB, kC, kD = k
    return kA * kB * kC * kD * ((c1 * c1 + c2 * c2) * d2 - (d1 * d1 + d2 * d2) * c2 - c1 * d2 + c2 * d1) + kB * kC * kD * (
        c2 * d1 - c1 * d2 + d2 - c2
    )


def symbolic_checks(cfg):
    gs = build_gamma_system(cfg)
    a = cfg.anchors
    k = [cfg.constants[t] for t in "ABCD"]
    c, d = (a["C"].x, a["C"].y), (a["D"].x, a["D"].y)
    top6 = gs.H.homogeneous_part(6)
    top4 = gs.F.homogeneous_part(4)
    h_coef = gs.H.coefficient((2, 2, 2, 0))
    f_coef = gs.F.coefficient((1, 1, 1, 1))
    return {
        "H_degree_6": gs.H.degree() == 6,
        "H_unique_top_term": list(top6.terms) == [(2, 2, 2, 0)],
        "H_top_equals_expected": h_coef == expected_H_top(c, k[0]),
        "F_degree_4": gs.F.degree() == 4,
        "F_multilinear": gs.F.max_multilinear_degree() == 1,
        "F_unique_top_term": list(top4.terms) == [(1, 1, 1, 1)],
        "F_top_equals_expected": f_coef == expected_F_top(c, d, k),
        "bezout_48": gs.bezout_number() == 48,
    }, {"H_top": h_coef, "H_expected": expected_H_top(c, k[0]), "F_top": f_coef, "F_expected": expected_F_top(c, d, k),
        "degrees": gs.degrees()}


def _generic_normalized(count):
    out = []
    seed = 3000
    while len(out) < count:
        n, _ = normalize(random_configuration(random.Random(seed)))
        seed += 1
        try:
            build_gamma_system(n)
        except NotNormalizedError:
            continue
        out.append(n)
    return out


def test_criterion_5_symbolic(capsys):
    ex1, _ = normalize(square_configuration())
    checks, values = symbolic_checks(ex1)
    lines = [f"example1 {name}={'ok' if v else 'FAILED'}" for name, v in checks.items()]
    lines.append(
        f"example1 values: H_top={values['H_top']} expected={values['H_expected']}; "
        f"F_top={values['F_top']} expected={values['F_expected']}; degrees={values['degrees']}"
    )
    all_ok = all(checks.values())
    generic_fail = {}
    for cfg in _generic_normalized(5):
        gchecks, _ = symbolic_checks(cfg)
        for name, v in gchecks.items():
            if not v:
                generic_fail[name] = generic_fail.get(name, 0) + 1
        all_ok = all_ok and all(gchecks.values())
    lines.append(f"generic (5 configs) failed checks: {generic_fail or 'none'}")
    announce(capsys, 5, all_ok, "\n    " + "\n    ".join(lines))
    assert all_ok


# -- criterion 6 --------------------------------------------------------------


def test_criterion_6_ceiling(capsys):
    counts = []
    code, doc, _ = criterion1_run()
    ex1 = sum(s["multiplicity"] for s in doc["solutions"])
    counts.append(ex1)
    for seed in ORACLE_SEEDS:
        _, rep = random_case(seed)
        counts.append(rep.count())
    ok = max(counts) <= BEZOUT_CEILING and ex1 == 24
    announce(capsys, 6, ok, f"reports={len(counts)} max_count={max(counts)} example1={ex1} ceiling={BEZOUT_CEILING}")
    assert ok


# -- criterion 7 --------------------------------------------------------------


def test_criterion_7_polycore_suite(capsys):
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(HERE / "test_polycore.py")],
        capture_output=True,
        text=True,
        cwd=HERE.parent,
    )
    elapsed = time.perf_counter() - t0
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()[-200:]
    ok = proc.returncode == 0 and elapsed < 60
    announce(capsys, 7, ok, f"{summary} wall={elapsed:.1f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
