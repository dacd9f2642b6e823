"""Deterministic synthetic test images with ground-truth region labels.

All images are RGB with integer-valued intensities in [0, 255], so they
survive a PNG round trip unchanged.
"""

import numpy as np

__all__ = ["KINDS", "make_synthetic"]

KINDS = ("constant", "half_split", "quad", "noisy_gradient", "two_region_curve")

_DARK = (50.0, 50.0, 50.0)
_RED = (200.0, 50.0, 50.0)
_GREEN = (50.0, 200.0, 50.0)
_BLUE = (50.0, 50.0, 200.0)


def _constant(size, rng):
    img = np.full((size, size, 3), 100.0)
    return img, np.zeros((size, size), dtype=np.int64)


def _half_split(size, rng):
    truth = np.zeros((size, size), dtype=np.int64)
    truth[:, size // 2:] = 1
    img = np.array([_DARK, _RED])[truth]
    return img, truth


def _quad(size, rng):
    h = size // 2
    truth = np.zeros((size, size), dtype=np.int64)
    truth[:h, h:] = 1
    truth[h:, :h] = 2
    truth[h:, h:] = 3
    img = np.array([_DARK, _RED, _GREEN, _BLUE])[truth]
    return img, truth


def _noisy_gradient(size, rng):
    rows, cols = np.mgrid[0:size, 0:size] / max(size - 1, 1)
    img = np.empty((size, size, 3))
    for ch in range(3):
        a, b = rng.uniform(-1.0, 1.0, size=2)
        ramp = a * rows + b * cols
        span = np.ptp(ramp) or 1.0
        img[:, :, ch] = 60.0 + 120.0 * (ramp - ramp.min()) / span
    img += rng.normal(0.0, 6.0, size=img.shape)
    img = np.clip(np.rint(img), 1.0, 255.0)
    return img, np.zeros((size, size), dtype=np.int64)


def _two_region_curve(size, rng):
    rows, cols = np.mgrid[0:size, 0:size].astype(float)
    c = (size - 1) / 2.0
    dy, dx = rows - c, cols - c
    theta = np.arctan2(dy, dx)
    phase, amp = rng.uniform(0, 2 * np.pi), rng.uniform(0.08, 0.18)
    radius = size * 0.3 * (1.0 + amp * np.sin(3 * theta + phase))
    truth = (np.hypot(dy, dx) <= radius).astype(np.int64)
    img = np.array([(60.0, 90.0, 160.0), (180.0, 80.0, 60.0)])[truth]
    img = img + rng.normal(0.0, 4.0, size=img.shape)
    img = np.clip(np.rint(img), 0.0, 255.0)
    return img, truth


_MAKERS = {
    "constant": _constant,
    "half_split": _half_split,
    "quad": _quad,
    "noisy_gradient": _noisy_gradient,
    "two_region_curve": _two_region_curve,
}


def make_synthetic(kind, size, seed=0):
    """Build a ``size x size`` RGB test image and its truth label map.

    Parameters
    ----------
    kind : str
        One of :data:`KINDS`.
    size : int
        Side length, at least 2.
    seed : int
        Seed for the noisy kinds; ignored by the noise-free ones.

    Returns
    -------
    image : (size, size, 3) float ndarray
    truth : (size, size) int64 ndarray
    """
    if kind not in _MAKERS:
        raise ValueError(f"unknown synthetic kind {kind!r}; choose from {KINDS}")
    if int(size) != size or size < 2:
        raise ValueError(f"size must be an integer >= 2, got {size!r}")
    rng = np.random.default_rng(seed)
    return _MAKERS[kind](int(size), rng)
