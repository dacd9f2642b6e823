import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chebsurf.hilbert import (
    MAX_ORDER,
    CurveCapacityError,
    curve_for_image,
    curve_order_for,
    generate_curve,
    index_to_rowcol,
    rowcol_to_index,
)


def test_order_one_golden():
    assert generate_curve(1).tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]


@pytest.mark.parametrize("order", range(1, 7))
def test_bijection_and_unit_steps(order):
    pts = generate_curve(order)
    side = 2 ** order
    assert pts.shape == (4 ** order, 2)
    assert pts.min() == 0 and pts.max() == side - 1
    cells = {tuple(p) for p in pts.tolist()}
    assert len(cells) == side * side
    steps = np.abs(np.diff(pts, axis=0)).sum(axis=1)
    assert np.all(steps == 1)


@pytest.mark.parametrize("order", range(2, 7))
def test_quadrant_locality(order):
    pts = generate_curve(order)
    half = 2 ** (order - 1)
    for q in range(4):
        block = pts[q * half * half:(q + 1) * half * half]
        quadrants = {(r // half, c // half) for r, c in block.tolist()}
        assert len(quadrants) == 1


def test_first_half_is_left_half():
    # The decomposition examples depend on this orientation.
    for order in range(1, 7):
        pts = generate_curve(order)
        side = 2 ** order
        assert pts[: len(pts) // 2, 1].max() < side // 2


@pytest.mark.parametrize("order", [1, 3, 8])
def test_index_roundtrip(order):
    d = np.arange(4 ** order)
    r, c = index_to_rowcol(order, d)
    np.testing.assert_array_equal(rowcol_to_index(order, r, c), d)


def test_high_order_spot_values():
    order = 15
    d = np.array([0, 1, 4 ** order - 1])
    r, c = index_to_rowcol(order, d)
    np.testing.assert_array_equal(rowcol_to_index(order, r, c), d)
    assert (int(r[0]), int(c[0])) == (0, 0)


def test_capacity_error():
    with pytest.raises(CurveCapacityError):
        generate_curve(MAX_ORDER + 1)
    with pytest.raises(ValueError):
        generate_curve(0)


def test_square_image_matches_curve():
    np.testing.assert_array_equal(curve_for_image(4, 4), generate_curve(2))


def test_single_pixel():
    assert curve_for_image(1, 1).tolist() == [[0, 0]]


def test_three_by_five_is_filtered_parent():
    pts = curve_for_image(3, 5)
    parent = generate_curve(3)
    expected = [p for p in parent.tolist() if p[0] < 3 and p[1] < 5]
    assert pts.tolist() == expected
    assert len(pts) == 15


def test_zero_dimension_rejected():
    with pytest.raises(ValueError):
        curve_for_image(0, 4)
    with pytest.raises(ValueError):
        curve_for_image(3, 0)


def test_all_small_rectangles():
    for h in range(1, 33):
        for w in range(1, 33):
            pts = curve_for_image(h, w)
            assert len(pts) == h * w
            flat = pts[:, 0] * w + pts[:, 1]
            assert len(np.unique(flat)) == h * w
            assert pts[:, 0].max() < h and pts[:, 1].max() < w


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40))
def test_rectangle_is_subsequence_of_parent(h, w):
    order = curve_order_for(h, w)
    assert 2 ** order >= max(h, w)
    assert order == 1 or 2 ** (order - 1) < max(h, w)
    parent = generate_curve(order)
    keep = (parent[:, 0] < h) & (parent[:, 1] < w)
    np.testing.assert_array_equal(curve_for_image(h, w), parent[keep])
