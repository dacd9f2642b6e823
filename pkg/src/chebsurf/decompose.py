"""Decomposition of an image into Chebyshev-bounded surfaces.

Pixels are visited in Hilbert-curve order. Two consecutive pixels whose
cosine similarity reaches ``npar`` open a surface; the surface then absorbs
the following curve pixels for as long as each one lies within the
Chebyshev bound of the surface built so far. A rejected pixel starts the
next attempt.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .hilbert import curve_for_image
from .tensor import as_image_tensor
from .numerics import (
    column_mean,
    cosine_similarity,
    mahalanobis_sq,
    svd_pseudoinverse,
)

__all__ = [
    "MULTIVARIATE",
    "UNIVARIATE",
    "FORMULATIONS",
    "DecompositionError",
    "DecomposeParams",
    "Surface",
    "Decomposition",
    "initialize_pair",
    "accept_multivariate",
    "accept_univariate",
    "decompose",
    "surface_features",
    "validate_decomposition",
    "check_replay",
]

log = logging.getLogger(__name__)

MULTIVARIATE = "multivariate"
UNIVARIATE = "univariate"
FORMULATIONS = (MULTIVARIATE, UNIVARIATE)


class DecompositionError(Exception):
    """A decomposition violates its partition or replay invariants."""


@dataclass(frozen=True)
class DecomposeParams:
    """Parameters of the surface decomposition.

    ``strict_paper`` disables the degenerate-variance fallbacks, so a
    zero-variance surface accepts every candidate (multivariate) or rejects
    every dimension (univariate), exactly as the bare formulas evaluate.
    """

    epsilon: float
    npar: float
    formulation: str = MULTIVARIATE
    zero_variance_tol: float = 1e-9
    zero_variance_abs_tol: float = 1e-6
    strict_paper: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be a finite positive number, got {self.epsilon!r}")
        if not 0.0 <= self.npar <= 1.0:
            raise ValueError(f"npar must lie in [0, 1], got {self.npar!r}")
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"formulation must be one of {FORMULATIONS}, got {self.formulation!r}")
        if self.zero_variance_tol < 0 or self.zero_variance_abs_tol < 0:
            raise ValueError("zero-variance tolerances must be non-negative")


@dataclass(frozen=True)
class Surface:
    """A contiguous run of curve pixels.

    ``features`` is ``(N, n)`` with one column per pixel in curve order. It
    is not part of equality and is ``None`` for surfaces re-imported from
    JSON without the source image.
    """

    id: int
    pixel_locs: Tuple[Tuple[int, int], ...]
    mean_feature: Tuple[float, ...]
    features: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def size(self):
        return len(self.pixel_locs)


@dataclass(frozen=True)
class Decomposition:
    surfaces: Tuple[Surface, ...]
    params: DecomposeParams
    height: int
    width: int
    n_features: int

    @property
    def n_pixels(self):
        return self.height * self.width

    @property
    def reduction_factor(self):
        """Pixels per surface, ``M / l``."""
        return self.n_pixels / len(self.surfaces)

    def surface_index_map(self):
        """``(H, W)`` array holding the surface index of every pixel."""
        out = np.full((self.height, self.width), -1, dtype=np.int64)
        for i, s in enumerate(self.surfaces):
            locs = np.asarray(s.pixel_locs, dtype=np.int64).reshape(-1, 2)
            out[locs[:, 0], locs[:, 1]] = i
        return out


def _features_of(surface):
    f = surface.features if isinstance(surface, Surface) else surface
    if f is None:
        raise ValueError("surface carries no feature matrix")
    f = np.asarray(f, dtype=float)
    if f.ndim == 1:
        f = f[:, None]
    return f


def initialize_pair(u, v, npar):
    """True when two consecutive pixels are close enough to open a surface."""
    return abs(cosine_similarity(u, v)) >= npar


def accept_multivariate(surface, candidate, epsilon, params=None):
    """Chebyshev growth test on the full covariance structure.

    Accepts ``candidate`` when ``dev^T pinv(C) dev < epsilon`` with ``dev``
    the deviation from the surface mean and ``C`` the sample covariance of
    the surface pixels. When ``trace(C) <= zero_variance_tol`` the surface is
    flat and only candidates within ``zero_variance_abs_tol`` (max-norm) of
    its mean are accepted, unless ``params.strict_paper`` is set.
    """
    params = params or DecomposeParams(epsilon=epsilon, npar=0.0)
    f = _features_of(surface)
    x = np.asarray(candidate, dtype=float).ravel()
    if x.size != f.shape[0]:
        raise ValueError(f"candidate has {x.size} features, surface has {f.shape[0]}")
    n = f.shape[1]
    if n < 2:
        raise ValueError("growth test needs a surface of at least 2 pixels")
    mean = f.mean(axis=1)
    centered = f - mean[:, None]
    cov = centered @ centered.T / (n - 1)
    cov = 0.5 * (cov + cov.T)
    dev = x - mean
    if not params.strict_paper and np.trace(cov) <= params.zero_variance_tol:
        return bool(np.max(np.abs(dev)) <= params.zero_variance_abs_tol)
    return mahalanobis_sq(dev, svd_pseudoinverse(cov)) < epsilon


def accept_univariate(surface, candidate, epsilon, params=None):
    """Per-dimension Chebyshev test decided by strict majority vote.

    Dimension ``j`` votes yes when ``|x_j - mu_j| < epsilon * sigma_j``
    (sample standard deviation). A dimension with variance at or below
    ``zero_variance_tol`` votes yes only for an exact match within
    ``zero_variance_abs_tol``. Ties reject.
    """
    params = params or DecomposeParams(epsilon=epsilon, npar=0.0)
    f = _features_of(surface)
    x = np.asarray(candidate, dtype=float).ravel()
    if x.size != f.shape[0]:
        raise ValueError(f"candidate has {x.size} features, surface has {f.shape[0]}")
    if f.shape[1] < 2:
        raise ValueError("growth test needs a surface of at least 2 pixels")
    mean = f.mean(axis=1)
    var = f.var(axis=1, ddof=1)
    dev = np.abs(x - mean)
    votes = dev < epsilon * np.sqrt(var)
    if not params.strict_paper:
        flat = var <= params.zero_variance_tol
        votes = np.where(flat, dev <= params.zero_variance_abs_tol, votes)
    return int(np.count_nonzero(votes)) * 2 > x.size


def _acceptor(params):
    if params.formulation == MULTIVARIATE:
        return accept_multivariate
    return accept_univariate


def _curve_features(image, curve):
    feats = np.ascontiguousarray(image[curve[:, 0], curve[:, 1], :].T)
    feats.setflags(write=False)
    return feats


def _runs(feats, params):
    accept = _acceptor(params)
    length = feats.shape[1]
    runs = []
    s = 0
    while s < length - 1:
        if initialize_pair(feats[:, s], feats[:, s + 1], params.npar):
            e = s + 2
            while e < length and accept(feats[:, s:e], feats[:, e], params.epsilon, params):
                e += 1
            runs.append((s, e))
            s = e
        else:
            runs.append((s, s + 1))
            s += 1
    if s == length - 1:
        runs.append((s, length))
    return runs


def decompose(image, params):
    """Split ``image`` into bounded surfaces along the Hilbert curve.

    Parameters
    ----------
    image : array_like, shape (H, W) or (H, W, N)
        Raw feature intensities.
    params : DecomposeParams

    Returns
    -------
    Decomposition
        Surfaces in curve order; their pixel lists concatenate to the
        traversal of ``curve_for_image(H, W)``.
    """
    img = as_image_tensor(image)
    h, w, n_feat = img.shape
    if params.epsilon <= n_feat:
        log.warning("epsilon=%g <= N=%d: the Chebyshev lower bound 1 - N/eps is vacuous",
                    params.epsilon, n_feat)
    if h * w > n_feat and params.epsilon >= h * w:
        log.warning("epsilon=%g lies outside the open interval (N, M) = (%d, %d)",
                    params.epsilon, n_feat, h * w)
    curve = curve_for_image(h, w)
    feats = _curve_features(img, curve)
    surfaces = []
    for sid, (a, b) in enumerate(_runs(feats, params)):
        block = feats[:, a:b]
        locs = tuple((int(r), int(c)) for r, c in curve[a:b])
        mean = tuple(float(v) for v in column_mean(block))
        surfaces.append(Surface(id=sid, pixel_locs=locs, mean_feature=mean, features=block))
    return Decomposition(surfaces=tuple(surfaces), params=params,
                         height=h, width=w, n_features=n_feat)


def surface_features(d):
    """``(N, l)`` matrix of surface mean features, in surface order."""
    if not d.surfaces:
        return np.zeros((d.n_features, 0))
    return np.array([s.mean_feature for s in d.surfaces], dtype=float).T


def validate_decomposition(d):
    """Raise :class:`DecompositionError` unless ``d`` is an ordered partition
    of the image pixels along the Hilbert curve."""
    if d.height < 1 or d.width < 1 or d.n_features < 1:
        raise DecompositionError("decomposition has empty dimensions")
    curve = curve_for_image(d.height, d.width)
    pos = 0
    for i, s in enumerate(d.surfaces):
        if s.id != i:
            raise DecompositionError(f"surface at position {i} has id {s.id}")
        if not s.pixel_locs:
            raise DecompositionError(f"surface {i} is empty")
        if len(s.mean_feature) != d.n_features:
            raise DecompositionError(f"surface {i} mean has {len(s.mean_feature)} features")
        locs = np.asarray(s.pixel_locs, dtype=np.int64).reshape(-1, 2)
        inb = ((locs[:, 0] >= 0) & (locs[:, 0] < d.height)
               & (locs[:, 1] >= 0) & (locs[:, 1] < d.width))
        if not inb.all():
            raise DecompositionError(f"surface {i} has out-of-bounds pixels")
        end = pos + len(locs)
        if end > len(curve) or not np.array_equal(locs, curve[pos:end]):
            raise DecompositionError(
                f"surface {i} does not continue the curve traversal at index {pos} "
                "(overlapping, missing or out-of-order pixels)")
        if s.features is not None:
            f = np.asarray(s.features)
            if f.shape != (d.n_features, len(locs)):
                raise DecompositionError(f"surface {i} feature matrix has shape {f.shape}")
            if not np.allclose(f.mean(axis=1), s.mean_feature, rtol=1e-12, atol=1e-12):
                raise DecompositionError(f"surface {i} mean does not match its features")
        pos = end
    if pos != len(curve):
        raise DecompositionError(f"decomposition covers {pos} of {len(curve)} pixels")


def check_replay(image, d):
    """Re-run every initialization and growth decision recorded in ``d``.

    Raises :class:`DecompositionError` at the first decision that the
    parameters of ``d`` would not reproduce on ``image``.
    """
    validate_decomposition(d)
    img = as_image_tensor(image)
    if img.shape != (d.height, d.width, d.n_features):
        raise DecompositionError(f"image shape {img.shape} does not match decomposition")
    params = d.params
    accept = _acceptor(params)
    feats = _curve_features(img, curve_for_image(d.height, d.width))
    length = feats.shape[1]
    pos = 0
    for s in d.surfaces:
        end = pos + s.size
        if s.size == 1:
            if end < length and initialize_pair(feats[:, pos], feats[:, end], params.npar):
                raise DecompositionError(f"singleton surface {s.id} should have opened a pair")
        else:
            if not initialize_pair(feats[:, pos], feats[:, pos + 1], params.npar):
                raise DecompositionError(f"surface {s.id} opens on a pair below npar")
            for j in range(pos + 2, end):
                if not accept(feats[:, pos:j], feats[:, j], params.epsilon, params):
                    raise DecompositionError(f"surface {s.id} holds a rejected pixel at curve index {j}")
            if end < length and accept(feats[:, pos:end], feats[:, end], params.epsilon, params):
                raise DecompositionError(f"surface {s.id} stopped before an accepted pixel")
        pos = end
