import itertools
import math
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourpoint.geometry import (
    TAU_GEO,
    Configuration,
    InvalidConfigurationError,
    PlaneTransform,
    Point2,
    collinear,
    normalize,
    triple_circles_concurrent,
    validate,
)
from fourpoint.reference import collinear_configuration, square_configuration

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
points = st.builds(Point2, rationals, rationals)


def test_collinear_examples():
    assert collinear(Point2(0, 0), Point2(1, 0), Point2(2, 0))
    assert collinear(Point2(-1, 0), Point2(1, 0), Point2(2, 0))
    assert not collinear(Point2(-1, -1), Point2(-1, 1), Point2(1, -1))


def test_collinear_exact_on_near_degenerate_input():
    eps = Fr(1, 10**30)
    assert not collinear(Point2(0, 0), Point2(1, 0), Point2(2, eps))


@given(points, points, points)
def test_collinear_permutation_invariant(p, q, r):
    vals = {collinear(*perm) for perm in itertools.permutations((p, q, r))}
    assert len(vals) == 1


def _cfg(pts, ks):
    return Configuration.from_values(dict(zip("ABCD", pts)), dict(zip("ABCD", ks)))


def test_concurrent_circles_planted_point():
    cfg = _cfg([(0, 0), (2, 0), (0, 2), (5, 7)], [Fr(1, 2)] * 3 + [1])
    assert triple_circles_concurrent(cfg, ("A", "B", "C")) == Point2(1, 1)


def test_negative_constant_means_no_real_circle():
    cfg = collinear_configuration()
    for triple in itertools.combinations("ABCD", 3):
        if "A" in triple or "B" in triple:
            assert triple_circles_concurrent(cfg, triple) is None


def _brute_force_concurrent(cfg, triple, tol=1e-9):
    """Float oracle: intersect each pair of circles, test the third."""
    pts, ks = cfg.as_floats()
    if any(ks[t] <= 0 for t in triple):
        return False
    for a, b in itertools.permutations(triple, 2):
        c = next(t for t in triple if t not in (a, b))
        (x0, y0), (x1, y1) = pts[a], pts[b]
        r0, r1 = 1 / math.sqrt(ks[a]), 1 / math.sqrt(ks[b])
        d = math.hypot(x1 - x0, y1 - y0)
        if d > r0 + r1 or d < abs(r0 - r1):
            continue
        l = (r0**2 - r1**2 + d**2) / (2 * d)
        h = math.sqrt(max(r0**2 - l**2, 0.0))
        mx, my = x0 + l * (x1 - x0) / d, y0 + l * (y1 - y0) / d
        for s in (1, -1):
            px, py = mx + s * h * (y1 - y0) / d, my - s * h * (x1 - x0) / d
            cx, cy = pts[c]
            if abs((px - cx) ** 2 + (py - cy) ** 2 - 1 / ks[c]) <= tol:
                return True
    return False


def test_square_has_no_concurrent_triple():
    cfg = square_configuration()
    for triple in itertools.combinations("ABCD", 3):
        assert triple_circles_concurrent(cfg, triple) is None
        assert not _brute_force_concurrent(cfg, triple)


def test_concurrency_permutation_invariant_and_witness_accurate():
    cfg = _cfg([(0, 0), (2, 0), (0, 2), (1, 5)], [Fr(1, 2)] * 3 + [Fr(1, 3)])
    for perm in itertools.permutations("ABC"):
        w = triple_circles_concurrent(cfg, perm)
        assert w == Point2(1, 1)
        for t in perm:
            assert abs(float((w - cfg.anchors[t]).norm2() - 1 / cfg.constants[t])) <= TAU_GEO


def test_collinear_centers_concurrent():
    # three centers on a line; circles through (0, 1) and (0, -1)
    cfg = _cfg([(-1, 0), (0, 0), (1, 0), (0, 5)], [Fr(1, 2), Fr(1), Fr(1, 2), Fr(1)])
    w = triple_circles_concurrent(cfg, ("A", "B", "C"))
    assert w is not None and abs(w.x) == 0 and abs(w.y) == 1


def test_validate_examples():
    rep = validate(square_configuration())
    assert rep.condition_i_ok and rep.condition_ii_ok and rep.violating_triples == []
    rep = validate(collinear_configuration())
    assert not rep.condition_i_ok and rep.condition_ii_ok
    assert len(rep.collinear_triples) == 4
    assert rep.violating_triples


def test_validate_rejects_duplicate_anchor():
    cfg = _cfg([(0, 0), (0, 0), (1, 2), (3, 1)], [1, 1, 1, 1])
    assert cfg.problems()
    with pytest.raises(InvalidConfigurationError):
        validate(cfg)


def test_validate_rejects_zero_constant():
    cfg = _cfg([(0, 0), (1, 0), (1, 2), (3, 1)], [0, 1, 1, 1])
    with pytest.raises(InvalidConfigurationError):
        validate(cfg)


def test_missing_label_is_structural_error():
    with pytest.raises(InvalidConfigurationError):
        Configuration.from_values({"A": (0, 0), "B": (1, 0), "C": (0, 1)}, {t: 1 for t in "ABC"})


def test_normalize_identity_when_already_normal():
    cfg = _cfg([(0, 0), (1, 0), (Fr(1, 3), 2), (5, -1)], [1, 2, 3, 4])
    n, tr = normalize(cfg)
    assert n == cfg
    assert tr.p == 1 and tr.q == 0 and tr.origin == (0, 0)


def test_normalize_dilation_rescales_constants():
    cfg = _cfg([(0, 0), (2, 0), (1, 3), (5, -1)], [1, 1, 1, 1])
    n, _ = normalize(cfg)
    assert n.anchors["B"] == Point2(1, 0)
    assert all(k == 4 for k in n.constants.values())


def test_normalize_square():
    n, tr = normalize(square_configuration())
    assert n.anchors["A"] == Point2(0, 0) and n.anchors["B"] == Point2(1, 0)
    assert n.anchors["C"] == Point2(0, -1) and n.anchors["D"] == Point2(1, -1)
    assert n.constants["A"] == Fr(22, 5)


configs = st.builds(
    lambda pts, ks: (pts, ks),
    st.lists(st.tuples(rationals, rationals), min_size=4, max_size=4, unique=True),
    st.lists(st.fractions(min_value=Fr(1, 4), max_value=4, max_denominator=20), min_size=4, max_size=4),
)


@settings(max_examples=60, deadline=None)
@given(configs)
def test_validate_invariant_under_normalization(data):
    cfg = _cfg(*data)
    n, tr = normalize(cfg)
    a, b = validate(cfg), validate(n)
    assert (a.condition_i_ok, a.condition_ii_ok) == (b.condition_i_ok, b.condition_ii_ok)
    assert a.violating_triples == b.violating_triples


@settings(max_examples=60, deadline=None)
@given(configs)
def test_denormalize_roundtrip(data):
    cfg = _cfg(*data)
    n, tr = normalize(cfg)
    assert tr.inverse().apply_config(n) == cfg
    for p in cfg.anchors.values():
        assert tr.inverse().apply(tr.apply(p)) == p


@given(points, rationals, rationals, rationals)
def test_transform_compose_and_inverse(z, p, q, o):
    if p == 0 and q == 0:
        p = Fr(1)
    a = PlaneTransform(origin=(o, -o), p=p, q=q)
    b = PlaneTransform(origin=(1, o), p=q + 1, q=p)
    assert a.compose(b).apply(z) == a.apply(b.apply(z))
    assert a.compose(a.inverse()).apply(z) == z
    m = a.matrix
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    assert det == a.scale_sq > 0


def test_rotation_part_is_orthogonal():
    tr = PlaneTransform(origin=(0, 0), p=Fr(3, 7), q=Fr(-2, 5))
    (a, b), (c, d) = tr.rotation
    assert abs(a * d - b * c - 1) < 1e-12
    assert abs(a * a + b * b - 1) < 1e-12 and abs(a * c + b * d) < 1e-12
