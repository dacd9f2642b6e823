"""Probabilistic bounds relating the Chebyshev parameter, the feature
dimensionality N and the pixel count M.

All functions are plain calculators; the decomposition pipeline only uses
them for reporting and warnings.
"""

import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

__all__ = [
    "BoundsDomainError",
    "BoundReport",
    "tail_bound",
    "univariate_tail_bound",
    "surface_lower_bound",
    "equal_likelihood_sample_size",
    "epsilon_interval",
    "max_parameter_order",
    "expected_surface_count",
    "k_bracket",
    "bound_report",
]


class BoundsDomainError(ValueError):
    """Parameters fall outside the range where a relation is defined."""


def _check_eps(epsilon):
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")


def tail_bound(n_features, epsilon):
    """Upper bound ``min(1, N / eps)`` on P[(X - mu)^T S^-1 (X - mu) >= eps]."""
    _check_eps(epsilon)
    return min(1.0, n_features / epsilon)


def univariate_tail_bound(epsilon):
    """Upper bound ``min(1, 1 / eps**2)`` on P[|x - mu| >= eps * sigma]."""
    _check_eps(epsilon)
    return min(1.0, 1.0 / epsilon ** 2)


def surface_lower_bound(n_features, epsilon):
    """Lower probability bound ``max(0, 1 - N / eps)`` carried by a surface."""
    _check_eps(epsilon)
    return max(0.0, 1.0 - n_features / epsilon)


def equal_likelihood_sample_size(epsilon, n_features):
    """Pixel count ``eps**2 / (eps - N)`` at which ``M / eps`` equally likely
    surfaces exactly exhaust the unit probability mass.

    Only defined for ``eps > N``.
    """
    if not epsilon > n_features:
        raise BoundsDomainError(
            f"equal-likelihood relation needs epsilon > N (got epsilon={epsilon}, N={n_features}); "
            "it is undefined at epsilon == N and negative below")
    return epsilon * epsilon / (epsilon - n_features)


def epsilon_interval(n_features, m_pixels):
    """Open interval ``(N, M)`` of admissible Chebyshev parameters."""
    if not m_pixels > n_features:
        raise BoundsDomainError(
            f"empty epsilon interval: need M > N (got M={m_pixels}, N={n_features})")
    return (float(n_features), float(m_pixels))


def max_parameter_order(m_pixels):
    """Order of magnitude ``sqrt(M)`` of the largest usable eps and N."""
    if m_pixels < 1:
        raise ValueError(f"pixel count must be >= 1, got {m_pixels}")
    return math.sqrt(m_pixels)


def expected_surface_count(m_pixels, epsilon):
    """Number of surfaces ``M / eps`` an ideal decomposition produces."""
    _check_eps(epsilon)
    return m_pixels / epsilon


def k_bracket(m_pixels):
    """Real interval of ``k`` satisfying ``k + 1 < M / k < k + 2``.

    Solving both quadratics gives ``sqrt(1 + M) - 1 < k < (sqrt(1 + 4M) - 1) / 2``.
    """
    lo = math.sqrt(1.0 + m_pixels) - 1.0
    hi = (math.sqrt(1.0 + 4.0 * m_pixels) - 1.0) / 2.0
    return lo, hi


@dataclass(frozen=True)
class BoundReport:
    n_features: int
    epsilon: Optional[float]
    m_pixels: int
    tail_bound: Optional[float]
    lower_bound: Optional[float]
    expected_surfaces: Optional[float]
    epsilon_interval: Optional[Tuple[float, float]]
    max_order: float

    def to_dict(self):
        d = asdict(self)
        if self.epsilon_interval is not None:
            d["epsilon_interval"] = list(self.epsilon_interval)
        return d


def bound_report(n_features, m_pixels, epsilon=None):
    """Collect every bound for one ``(N, M, eps)`` setting.

    ``epsilon`` may be omitted, in which case the eps-dependent fields are
    ``None``. An empty ``(N, M)`` interval is reported as ``None`` as well.
    """
    try:
        interval = epsilon_interval(n_features, m_pixels)
    except BoundsDomainError:
        interval = None
    if epsilon is None:
        tb = lb = es = None
    else:
        tb = tail_bound(n_features, epsilon)
        lb = surface_lower_bound(n_features, epsilon)
        es = expected_surface_count(m_pixels, epsilon)
    return BoundReport(
        n_features=int(n_features),
        epsilon=None if epsilon is None else float(epsilon),
        m_pixels=int(m_pixels),
        tail_bound=tb,
        lower_bound=lb,
        expected_surfaces=es,
        epsilon_interval=interval,
        max_order=max_parameter_order(m_pixels),
    )
