"""Small dense kernels used by the surface growth criterion.

Feature matrices follow the convention rows = feature dimensions,
columns = pixels, so an ``(N, n)`` array holds ``n`` pixels with ``N``
features each.
"""

import numpy as np

__all__ = [
    "PINV_RELATIVE_CUTOFF",
    "cosine_similarity",
    "column_mean",
    "sample_covariance",
    "svd_pseudoinverse",
    "mahalanobis_sq",
]

#: Singular values below ``N * sigma_max * PINV_RELATIVE_CUTOFF`` are dropped.
PINV_RELATIVE_CUTOFF = 2.0 ** -40

_CLAMP = 1e-9


def cosine_similarity(a, b):
    """Cosine of the angle between two feature vectors.

    Two all-zero vectors are treated as identical (1.0); a single zero
    vector gives 0.0.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 and nb == 0.0:
        return 1.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    c = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, c))


def _as_matrix(m):
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty (N, n) feature matrix, got shape {m.shape}")
    return m


def column_mean(m):
    """Component-wise mean over the columns of an ``(N, n)`` matrix."""
    return _as_matrix(m).mean(axis=1)


def sample_covariance(m):
    """Unbiased (``n - 1``) covariance across columns; zeros when ``n == 1``."""
    m = _as_matrix(m)
    n_dim, n = m.shape
    if n == 1:
        return np.zeros((n_dim, n_dim))
    centered = m - m.mean(axis=1, keepdims=True)
    cov = centered @ centered.T / (n - 1)
    # exact symmetry regardless of BLAS summation order
    return 0.5 * (cov + cov.T)


def svd_pseudoinverse(m):
    """Moore-Penrose pseudoinverse through the SVD.

    Parameters
    ----------
    m : (N, N) array_like

    Returns
    -------
    (N, N) ndarray
        Singular values at or below ``N * sigma_max * 2**-40`` are treated
        as zero; the zero matrix maps to itself.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if a.size == 0:
        return a.T.copy()
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.zeros(a.T.shape)
    tol = max(a.shape) * smax * PINV_RELATIVE_CUTOFF
    keep = s > tol
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vt.T * inv_s) @ u.T


def mahalanobis_sq(dev, pinv_cov):
    """Quadratic form ``dev^T P dev``; tiny negative round-off is clamped to 0."""
    dev = np.asarray(dev, dtype=float).ravel()
    p = np.asarray(pinv_cov, dtype=float)
    if p.shape != (dev.size, dev.size):
        raise ValueError(f"dimension mismatch: vector of {dev.size} vs matrix {p.shape}")
    q = float(dev @ p @ dev)
    if -_CLAMP <= q < 0.0:
        q = 0.0
    return q
