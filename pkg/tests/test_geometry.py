import numpy as np
import pytest

from bnbcert.geometry import (
    FEAS_TOL,
    GeometryError,
    Polyhedron,
    QuadCut,
    RegionSet,
    bounding_box,
    chebyshev_center,
    find_point,
    intersect_halfspace,
    is_empty,
)

UNIT_BOX = Polyhedron.box([-0.5, -0.5], [0.5, 0.5])
TRIANGLE = Polyhedron(np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]]),
                      np.array([0.0, 0.0, 1.0]))


def test_halfspace_keeps_left_half_of_box():
    half = intersect_halfspace(UNIT_BOX, np.array([1.0, 0.0]), 0.0)
    assert not is_empty(half)
    c, r = chebyshev_center(half)
    assert c[0] <= 0.0 + FEAS_TOL


def test_halfspace_outside_box_is_empty():
    cut = intersect_halfspace(UNIT_BOX, np.array([1.0, 0.0]), -1.0)
    assert is_empty(cut)


def test_vacuous_halfspace_retains_row():
    cut = intersect_halfspace(UNIT_BOX, np.array([0.0, 0.0]), 0.0)
    assert cut.n_rows == UNIT_BOX.n_rows + 1
    assert not is_empty(cut)
    c, r = chebyshev_center(cut)
    assert r == pytest.approx(0.5, abs=1e-7)


def test_halfspace_dimension_mismatch():
    with pytest.raises(GeometryError):
        intersect_halfspace(UNIT_BOX, np.array([1.0, 0.0, 0.0]), 0.0)


def test_empty_contradictory_bounds_1d():
    P = Polyhedron(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]))
    assert is_empty(P)


def test_unit_box_nonempty():
    assert not is_empty(UNIT_BOX)


def test_disk_cut_box_nonempty():
    # derived oracle: dense grid search finds a feasible point of the disk
    box = Polyhedron.box([-1.0, -1.0], [1.0, 1.0])
    disk = QuadCut(np.eye(2), np.zeros(2), -0.5)
    grid = np.linspace(-1, 1, 81)
    pts = np.stack(np.meshgrid(grid, grid), axis=-1).reshape(-1, 2)
    assert np.any(np.einsum("ij,ij->i", pts, pts) - 0.5 <= 0)
    rs = RegionSet(box, (disk,))
    assert not is_empty(rs)
    p = find_point(rs)
    assert disk.value(p) <= 1e-6


def test_quad_cut_infeasible_detected():
    box = Polyhedron.box([-1.0, -1.0], [1.0, 1.0])
    off_disk = QuadCut(np.eye(2), np.zeros(2), 3.0)  # theta'theta <= -3
    assert is_empty(RegionSet(box, (off_disk,)))


def test_chebyshev_center_of_box():
    c, r = chebyshev_center(UNIT_BOX)
    assert np.allclose(c, [0.0, 0.0], atol=1e-8)
    assert r == pytest.approx(0.5, abs=1e-8)


def test_chebyshev_center_1d_segment():
    seg = Polyhedron(np.array([[1.0], [-1.0]]), np.array([1.0, 0.0]))
    c, r = chebyshev_center(seg)
    assert c[0] == pytest.approx(0.5, abs=1e-8)
    assert r == pytest.approx(0.5, abs=1e-8)


def test_chebyshev_center_triangle():
    # independent derivation: the inscribed-circle radius of the right
    # triangle with legs 1 is r = 1 / (2 + sqrt(2))
    r_expected = 1.0 / (2.0 + np.sqrt(2.0))
    c, r = chebyshev_center(TRIANGLE)
    assert r == pytest.approx(r_expected, abs=1e-8)
    assert np.allclose(c, [r_expected, r_expected], atol=1e-7)


def test_chebyshev_center_empty_raises():
    P = Polyhedron(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]))
    with pytest.raises(GeometryError, match="empty region"):
        chebyshev_center(P)


def test_bounding_box_of_box():
    bb = bounding_box(UNIT_BOX)
    assert np.allclose(bb, [(-0.5, 0.5), (-0.5, 0.5)], atol=1e-8)


def test_bounding_box_triangle():
    bb = bounding_box(TRIANGLE)
    assert np.allclose(bb, [(0.0, 1.0), (0.0, 1.0)], atol=1e-8)


def test_bounding_box_unbounded_raises():
    P = Polyhedron(np.array([[-1.0]]), np.array([0.0]))
    with pytest.raises(GeometryError, match="unbounded region"):
        bounding_box(P)


def test_intersect_monotone_by_sampling():
    rng = np.random.default_rng(0)
    P = UNIT_BOX
    a = np.array([0.3, -0.7])
    child = intersect_halfspace(P, a, 0.1)
    pts = rng.uniform(-0.5, 0.5, size=(500, 2))
    inside_child = [p for p in pts if child.contains(p)]
    assert inside_child, "sampling should hit the child"
    for p in inside_child:
        assert P.contains(p)


def test_split_covers_parent_exactly_once():
    rng = np.random.default_rng(1)
    a = np.array([0.9, 0.2])
    b = 0.05
    left = intersect_halfspace(UNIT_BOX, a, b)
    right = intersect_halfspace(UNIT_BOX, -a, -b)
    pts = rng.uniform(-0.5, 0.5, size=(500, 2))
    for p in pts:
        strict = abs(a @ p - b) > 1e-7
        if strict:
            assert left.contains(p) != right.contains(p)
        else:
            assert left.contains(p) or right.contains(p)


def test_chebyshev_residuals_cover_radius():
    for P in (UNIT_BOX, TRIANGLE):
        c, r = chebyshev_center(P)
        norms = np.linalg.norm(P.At, axis=1)
        residuals = P.bt - P.At @ c
        assert np.all(residuals >= r * norms - 1e-8)


def test_json_round_trip():
    rs = RegionSet(TRIANGLE, (QuadCut(np.eye(2), np.array([0.1, 0.0]), -0.3),))
    back = RegionSet.from_json(rs.to_json())
    assert np.array_equal(back.poly.At, rs.poly.At)
    assert np.array_equal(back.poly.bt, rs.poly.bt)
    assert back.quads[0].S == rs.quads[0].S
