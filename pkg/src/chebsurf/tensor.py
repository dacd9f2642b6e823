"""The ``(H, W, N)`` float image representation shared by all stages."""

import numpy as np

__all__ = ["as_image_tensor"]


def as_image_tensor(image):
    """Return ``image`` as a finite ``(H, W, N)`` float64 array.

    A 2-D input is treated as a single-feature image.
    """
    a = np.asarray(image, dtype=float)
    if a.ndim == 2:
        a = a[:, :, None]
    if a.ndim != 3:
        raise ValueError(f"image must have shape (H, W) or (H, W, N), got {a.shape}")
    if min(a.shape) < 1:
        raise ValueError(f"image must be non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("image contains non-finite values")
    return a
