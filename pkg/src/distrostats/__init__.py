"""Statistics for distribution-valued data.

Observations that are points, intervals, histograms, discrete weighted
multi-sets or parametric densities all lower to piecewise-linear quantile
functions. On that common representation the package computes the L2
distance between distributions with its exact location/size/shape
decomposition, barycenters, variability and association statistics, a
Mahalanobis-weighted distance between multi-variable individuals, and a
k-means style dynamic clustering of whole tables.

Quick start::

    from distrostats import Histogram, Interval, lower, decompose

    a = lower(Interval(0, 1))
    b = lower(Histogram(bins=[(0, 1, 0.5), (1, 3, 0.5)]))
    parts = decompose(a, b)   # location, size, shape; sums to the squared distance
"""

from ._version import __version__
from .association import (
    AssociationMatrix,
    association_matrix,
    codeviance,
    codeviance_expanded,
    correlation,
    covariance,
)
from .clustering import (
    ClusteringResult,
    Partition,
    Prototype,
    assign,
    cluster,
    cross_tabulate,
    quality,
    update_prototypes,
)
from .errors import (
    DegenerateVariableError,
    DistroStatsError,
    DomainError,
    EmptyInputError,
    InvalidKError,
    InvalidMetricError,
    ParseError,
    ShapeMismatchError,
    SingularMatrixError,
    UnsupportedFamilyError,
    ValidationError,
)
from .io import (
    Individual,
    ReportDocument,
    TableDocument,
    VariableDecl,
    emit_report,
    emit_table,
    parse_table,
)
from .mahalanobis import (
    SpdMatrix,
    invert_spd,
    mahalanobis_same_shape,
    mahalanobis_wasserstein,
)
from .metric import (
    WassersteinDecomposition,
    cross_integral,
    decompose,
    distance,
    distance_squared,
    inner_product,
    rho_qq,
)
from .modal import (
    Discrete,
    Histogram,
    Interval,
    ModalValue,
    Parametric,
    Point,
    lower,
    parametric_families,
)
from .quantile import QuantileFunction, align, align_many
from .stats import (
    VariableSummary,
    barycenter,
    inertia_to,
    pairwise_inertia,
    standardize,
    summarize,
)
from .table import DistributionalTable

__all__ = [
    "__version__",
    # representation
    "QuantileFunction",
    "align",
    "align_many",
    "ModalValue",
    "Point",
    "Interval",
    "Histogram",
    "Discrete",
    "Parametric",
    "lower",
    "parametric_families",
    "DistributionalTable",
    # metric
    "WassersteinDecomposition",
    "inner_product",
    "rho_qq",
    "distance_squared",
    "distance",
    "cross_integral",
    "decompose",
    # univariate statistics
    "VariableSummary",
    "barycenter",
    "inertia_to",
    "pairwise_inertia",
    "summarize",
    "standardize",
    # association
    "AssociationMatrix",
    "codeviance",
    "codeviance_expanded",
    "covariance",
    "correlation",
    "association_matrix",
    # Mahalanobis
    "SpdMatrix",
    "invert_spd",
    "mahalanobis_wasserstein",
    "mahalanobis_same_shape",
    # clustering
    "Partition",
    "Prototype",
    "ClusteringResult",
    "assign",
    "update_prototypes",
    "cluster",
    "quality",
    "cross_tabulate",
    # input/output
    "VariableDecl",
    "Individual",
    "TableDocument",
    "ReportDocument",
    "parse_table",
    "emit_table",
    "emit_report",
    # errors
    "DistroStatsError",
    "ValidationError",
    "UnsupportedFamilyError",
    "DomainError",
    "EmptyInputError",
    "DegenerateVariableError",
    "ShapeMismatchError",
    "SingularMatrixError",
    "InvalidMetricError",
    "InvalidKError",
    "ParseError",
]
