"""2D Hilbert curve traversal of pixel grids.

The canonical variant starts at (row 0, col 0), takes its first step down
the rows to (1, 0) and finishes at (0, 2**order - 1). Consequently the
first half of every curve covers the left half of the grid.

Coordinates are computed per cell with the classic bit-twiddling mapping
between curve index and grid position, so no recursion is involved.
"""

import numpy as np

__all__ = [
    "MAX_ORDER",
    "CurveCapacityError",
    "index_to_rowcol",
    "rowcol_to_index",
    "generate_curve",
    "curve_order_for",
    "curve_for_image",
]

#: Largest supported recursion depth (grid side 2**16 = 65536).
MAX_ORDER = 16


class CurveCapacityError(ValueError):
    """Requested curve does not fit the supported index range."""


def _check_order(order):
    if int(order) != order or order < 1:
        raise ValueError(f"curve order must be an integer >= 1, got {order!r}")
    if order > MAX_ORDER:
        raise CurveCapacityError(
            f"curve order {order} exceeds the supported maximum {MAX_ORDER}")
    return int(order)


def index_to_rowcol(order, d):
    """Map curve indices to grid positions.

    Parameters
    ----------
    order : int
        Curve order; the grid side is ``2**order``.
    d : array_like of int
        Curve indices in ``[0, 4**order)``.

    Returns
    -------
    rows, cols : ndarray of int64
    """
    order = _check_order(order)
    t = np.array(d, dtype=np.int64, copy=True)
    x = np.zeros_like(t)
    y = np.zeros_like(t)
    s = 1
    n = 1 << order
    while s < n:
        rx = 1 & (t >> 1)
        ry = 1 & (t ^ rx)
        # rotate the sub-square
        flip = (ry == 0) & (rx == 1)
        x = np.where(flip, s - 1 - x, x)
        y = np.where(flip, s - 1 - y, y)
        swap = ry == 0
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        x += s * rx
        y += s * ry
        t >>= 2
        s <<= 1
    # the classic mapping walks x first; rows follow y so the first step is downward
    return y, x


def rowcol_to_index(order, rows, cols):
    """Inverse of :func:`index_to_rowcol`."""
    order = _check_order(order)
    n = 1 << order
    x = np.array(cols, dtype=np.int64, copy=True)
    y = np.array(rows, dtype=np.int64, copy=True)
    if x.size and (x.min() < 0 or y.min() < 0 or x.max() >= n or y.max() >= n):
        raise ValueError("coordinates outside the curve grid")
    d = np.zeros_like(x)
    s = n >> 1
    while s > 0:
        rx = ((x & s) > 0).astype(np.int64)
        ry = ((y & s) > 0).astype(np.int64)
        d += s * s * ((3 * rx) ^ ry)
        flip = (ry == 0) & (rx == 1)
        x = np.where(flip, n - 1 - x, x)
        y = np.where(flip, n - 1 - y, y)
        swap = ry == 0
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        s >>= 1
    return d


def generate_curve(order):
    """Full Hilbert traversal of the ``2**order`` square grid.

    Returns an ``(4**order, 2)`` int64 array of ``(row, col)`` pairs.

    >>> generate_curve(1).tolist()
    [[0, 0], [1, 0], [1, 1], [0, 1]]
    """
    order = _check_order(order)
    rows, cols = index_to_rowcol(order, np.arange(4 ** order, dtype=np.int64))
    return np.stack([rows, cols], axis=1)


def curve_order_for(height, width):
    """Smallest order (at least 1) whose grid covers ``height x width``."""
    side = max(int(height), int(width))
    order = max(1, (side - 1).bit_length())
    return _check_order(order)


def curve_for_image(height, width):
    """Hilbert traversal restricted to an arbitrary ``height x width`` grid.

    Equivalent to generating the parent curve of order
    ``ceil(log2(max(height, width)))`` and dropping out-of-bounds points,
    but only the in-bounds cells are ever materialised.
    """
    if int(height) != height or int(width) != width or height < 1 or width < 1:
        raise ValueError(f"image dimensions must be positive integers, got {height}x{width}")
    order = curve_order_for(height, width)
    rows, cols = np.divmod(np.arange(int(height) * int(width), dtype=np.int64), int(width))
    d = rowcol_to_index(order, rows, cols)
    perm = np.argsort(d, kind="stable")
    return np.stack([rows[perm], cols[perm]], axis=1)
