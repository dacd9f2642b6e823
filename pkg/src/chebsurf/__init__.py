"""Chebyshev-bounded surface decomposition of images along a Hilbert curve."""

from .bounds import (
    BoundReport,
    bound_report,
    epsilon_interval,
    equal_likelihood_sample_size,
    expected_surface_count,
    max_parameter_order,
    surface_lower_bound,
    tail_bound,
)
from .clustering import ClusterParams, ClusterResult, kmeans_l1, paint_labels
from .decompose import (
    Decomposition,
    DecompositionError,
    DecomposeParams,
    Surface,
    accept_multivariate,
    accept_univariate,
    decompose,
    initialize_pair,
    surface_features,
    validate_decomposition,
)
from .evaluation import PRFScore, boundary_fscore, boundary_map
from .hilbert import curve_for_image, generate_curve
from .imageio import (
    export_decomposition,
    import_decomposition,
    load_image,
    read_label_map,
    write_label_map,
    write_surface_overlay,
)
from .synth import make_synthetic

__version__ = "0.1.0"
