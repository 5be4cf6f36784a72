"""Sphere covers, cone membership, and dyadic shell selection."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathcert.errors import InputError
from pathcert.geometry import (
    CONE_HALF_ANGLE,
    DEFAULT_COVER_HALF_ANGLE,
    ConeSpec,
    UnitDirection,
    build_sphere_cover,
    cone_contains,
    select_dominant_cone,
    select_parity,
    shell_index,
)
from pathcert.skeleton import shell_bounds


def _cone(axis) -> ConeSpec:
    arr = np.asarray(axis, dtype=float)
    return ConeSpec(UnitDirection(arr / np.linalg.norm(arr)))


# ---- unit directions and cones ------------------------------------------


def test_unit_direction_rejects_non_unit():
    with pytest.raises(InputError):
        UnitDirection(np.array([0.0, 0.0]))
    with pytest.raises(InputError):
        UnitDirection(np.array([1.0, 1.0]))
    with pytest.raises(InputError):
        UnitDirection(np.array([[1.0], [0.0]]))


def test_unit_direction_is_frozen():
    d = UnitDirection(np.array([0.6, 0.8]))
    assert d.dimension == 2
    with pytest.raises(ValueError):
        d.coords[0] = 0.0


def test_cone_contains_origin_and_axis():
    cone = _cone([1.0, 0.0])
    assert cone_contains(cone, [0.0, 0.0])
    assert cone_contains(cone, [0.5, 0.0])
    assert not cone_contains(cone, [-0.5, 0.0])
    assert not cone_contains(cone, [0.0, 0.3])


def test_cone_boundary_angle():
    """Membership flips exactly at the angular radius arccos(sqrt(2/3))."""
    cone = _cone([1.0, 0.0])
    inside = CONE_HALF_ANGLE - 1e-9
    outside = CONE_HALF_ANGLE + 1e-9
    assert cone_contains(cone, [math.cos(inside), math.sin(inside)])
    assert not cone_contains(cone, [math.cos(outside), math.sin(outside)])


def test_cone_contains_matches_distance_definition():
    """Compare the closed form against the set definition.

    x belongs to the cone iff some r >= 0 gives ||x - r z|| <= r/sqrt(3);
    a dense r grid decides that within a small resolution margin, so only
    points comfortably away from the boundary are classified.
    """
    rng = np.random.default_rng(7)
    cone = _cone([2.0, -1.0, 0.5])
    z = cone.axis.coords
    checked = 0
    for _ in range(400):
        x = rng.uniform(-1.0, 1.0, size=3)
        nsq = float(x @ x)
        if nsq < 1e-4:
            continue
        dot = float(x @ z)
        # skip points too close to the boundary for the grid to resolve
        if abs(dot * dot - (2.0 / 3.0) * nsq) < 1e-3 * nsq:
            continue
        r = np.linspace(0.0, 4.0 * math.sqrt(nsq), 2001)
        dist = np.linalg.norm(x[None, :] - r[:, None] * z[None, :], axis=1)
        oracle = bool(np.any(dist <= r / math.sqrt(3.0) + 1e-9))
        assert cone_contains(cone, x) == oracle
        checked += 1
    assert checked > 300


@settings(max_examples=60, deadline=None)
@given(
    coords=st.lists(
        st.floats(-8.0, 8.0, allow_nan=False), min_size=3, max_size=3
    ),
    factor=st.floats(1e-3, 1e3, allow_nan=False),
)
def test_cone_contains_scale_invariant(coords, factor):
    """Positive scaling never changes membership away from the boundary."""
    x = np.asarray(coords, dtype=float)
    nsq = float(x @ x)
    if nsq < 1e-6:
        return
    cone = _cone([1.0, 1.0, 1.0])
    dot = float(x @ cone.axis.coords)
    if abs(dot * dot - (2.0 / 3.0) * nsq) < 1e-6 * nsq:
        return
    assert cone_contains(cone, x) == cone_contains(cone, factor * x)


def test_cone_dimension_mismatch():
    cone = _cone([1.0, 0.0])
    with pytest.raises(InputError):
        cone_contains(cone, [1.0, 0.0, 0.0])


# ---- sphere covers ------------------------------------------------------


def test_cover_dimension_one():
    cover = build_sphere_cover(1)
    assert cover.size == 2
    assert sorted(float(d[0]) for d in cover.directions) == [-1.0, 1.0]


def test_cover_dimension_two_count():
    """The circle needs ceil(2 pi / half_angle) equally spaced directions."""
    cover = build_sphere_cover(2)
    expected = int(math.ceil(2.0 * math.pi / DEFAULT_COVER_HALF_ANGLE))
    assert cover.size == expected
    norms = np.linalg.norm(cover.directions, axis=1)
    assert float(np.max(np.abs(norms - 1.0))) <= 1e-12


@pytest.mark.parametrize("dimension", [2, 3, 4])
def test_cover_property_against_grid_oracle(dimension):
    """Every unit vector is within half_angle of some cover direction.

    Checked against sample sets generated independently of the cover's
    own randomized verification.
    """
    cover = build_sphere_cover(dimension)
    if dimension == 2:
        angles = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        samples = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    else:
        rng = np.random.default_rng(1234)
        g = rng.standard_normal((20000, dimension))
        samples = g / np.linalg.norm(g, axis=1)[:, None]
    best = (samples @ cover.directions.T).max(axis=1)
    worst_angle = float(np.max(np.arccos(np.clip(best, -1.0, 1.0))))
    assert worst_angle <= cover.half_angle + 1e-9


def test_cover_deterministic():
    a = build_sphere_cover(3)
    b = build_sphere_cover(3)
    assert np.array_equal(a.directions, b.directions)


def test_cover_validation():
    with pytest.raises(InputError):
        build_sphere_cover(0)
    with pytest.raises(InputError):
        build_sphere_cover(2, half_angle=0.0)
    with pytest.raises(InputError):
        build_sphere_cover(2, half_angle=math.pi)


# ---- dominant cone ------------------------------------------------------


def test_select_dominant_cone_recount():
    """The winner maximizes the capture count with lowest-index ties.

    Counts are recomputed here through the public membership predicate,
    so selection and membership cannot drift apart.
    """
    rng = np.random.default_rng(99)
    g = rng.standard_normal((150, 2))
    points = [0.5 * p / np.linalg.norm(p) for p in g]
    cover = build_sphere_cover(2)
    cone, captured = select_dominant_cone(points, cover)
    counts = []
    for d in cover.directions:
        c = ConeSpec(UnitDirection(d))
        counts.append(sum(1 for p in points if cone_contains(c, p)))
    winner = int(np.argmax(counts))
    assert np.array_equal(cone.axis.coords, cover.directions[winner])
    assert captured == [i for i, p in enumerate(points) if cone_contains(cone, p)]
    assert len(captured) == counts[winner]


def test_select_dominant_cone_tie_breaks_low():
    """All points on one ray are captured by several nearby directions;
    the lowest direction index must win."""
    cover = build_sphere_cover(2)
    axis = cover.directions[5]
    points = [0.3 * axis, 0.2 * axis, 0.1 * axis]
    cone, captured = select_dominant_cone(points, cover)
    counts = []
    for d in cover.directions:
        c = ConeSpec(UnitDirection(d))
        counts.append(sum(1 for p in points if cone_contains(c, p)))
    top = max(counts)
    lowest = min(i for i, c in enumerate(counts) if c == top)
    assert np.array_equal(cone.axis.coords, cover.directions[lowest])
    assert captured == [0, 1, 2]


def test_select_dominant_cone_rejects_origin():
    cover = build_sphere_cover(2)
    with pytest.raises(InputError):
        select_dominant_cone([np.zeros(2)], cover)


# ---- shells and parity --------------------------------------------------


def test_shell_index_boundaries():
    """Norm 1/k lands in shell k; the shell is open below, closed above."""
    for k in range(1, 60):
        assert shell_index(np.array([1.0 / k, 0.0])) == k
        lo, hi = shell_bounds(k)
        mid = 0.5 * (lo + hi)
        assert shell_index(np.array([0.0, mid])) == k


def test_shell_index_brackets_norm():
    rng = np.random.default_rng(3)
    for _ in range(300):
        r = float(rng.uniform(0.01, 1.0))
        x = np.array([r, 0.0])
        k = shell_index(x)
        lo, hi = shell_bounds(k)
        assert lo < r <= hi


def test_shell_index_range_errors():
    with pytest.raises(InputError):
        shell_index(np.array([0.0, 0.0]))
    with pytest.raises(InputError):
        shell_index(np.array([1.5, 0.0]))


def _point_in_shell(s: int) -> np.ndarray:
    lo, hi = shell_bounds(s)
    return np.array([0.5 * (lo + hi), 0.0])


def test_select_parity_counts_distinct_shells():
    even_heavy = [_point_in_shell(s) for s in (2, 4, 6)] + [_point_in_shell(3)]
    parity, shells = select_parity(even_heavy)
    assert parity == "even"
    assert set(shells) == {2, 3, 4, 6}
    odd_heavy = [_point_in_shell(s) for s in (3, 5, 7)] + [_point_in_shell(2)]
    parity, _ = select_parity(odd_heavy)
    assert parity == "odd"


def test_select_parity_duplicates_do_not_count():
    """Three points in one odd shell still lose to two distinct even shells."""
    points = [
        _point_in_shell(3),
        _point_in_shell(3),
        _point_in_shell(3),
        _point_in_shell(2),
        _point_in_shell(4),
    ]
    parity, shells = select_parity(points)
    assert parity == "even"
    assert shells[3] == [0, 1, 2]


def test_select_parity_tie_is_even():
    parity, _ = select_parity([_point_in_shell(2), _point_in_shell(3)])
    assert parity == "even"
