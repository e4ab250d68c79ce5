"""Fenchel conjugation, biconjugation and separation on Hadamard manifolds."""

__version__ = "0.1.0"

from .errors import (BaseMismatchError, ChartError, ConfigError, DomainError,  # noqa: E402
                     HadamardError, HypothesisError, ManifoldMismatchError,
                     PreconditionError, SeparationImpossibleError)
from .extreal import INF, UndefinedSumError, ext_add, ext_neg, ext_sub  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .manifolds import (SPD, BundleElement, CotangentVector, Euclidean,  # noqa: E402
                        Hyperboloid, Manifold, Point, ProductWithLine,
                        TangentVector, distance, exp, flat, geodesic_point, log,
                        metric, norm, pairing, sharp)
from .config import SolverConfig  # noqa: E402
from .functions import (AddConstant, ConvexFunction, Distance, EpigraphPoint,  # noqa: E402
                        IndicatorBall, IndicatorPoint, LinearPullback, Max,
                        Opaque, Scale, SquaredDistance, Sum, convexity_probe,
                        evaluate, subgradient)
from .geometry import (Ball, GeodesicTriangle, Hypersurface, Intersection,  # noqa: E402
                       PointSet, SeparationResult, Sublevel, closest_pair,
                       cosine_law_residuals, project, project_epigraph,
                       separating_hypersurface, separation_margin,
                       set_distance_function)
from .conjugation import (ConjugateEstimate, MinorantCertificate,  # noqa: E402
                          base_shift_inequality, biconjugate, conjugate,
                          equivalent, fenchel_young_gap, minorant,
                          partial_convexity_probe, properness_audit,
                          subdiff_check)

__all__ = [
    "__version__", "BaseMismatchError", "ChartError", "ConfigError", "DomainError",
    "HadamardError", "HypothesisError", "ManifoldMismatchError", "PreconditionError",
    "SeparationImpossibleError", "INF", "UndefinedSumError", "ext_add", "ext_neg", "ext_sub",
    "BACKEND", "SPD", "BundleElement", "CotangentVector", "Euclidean", "Hyperboloid",
    "Manifold", "Point", "ProductWithLine", "TangentVector", "distance", "exp", "flat",
    "geodesic_point", "log", "metric", "norm", "pairing", "sharp", "SolverConfig",
    "AddConstant", "ConvexFunction", "Distance", "EpigraphPoint", "IndicatorBall",
    "IndicatorPoint", "LinearPullback", "Max", "Opaque", "Scale", "SquaredDistance", "Sum",
    "convexity_probe", "evaluate", "subgradient", "Ball", "GeodesicTriangle", "Hypersurface",
    "Intersection", "PointSet", "SeparationResult", "Sublevel", "closest_pair",
    "cosine_law_residuals", "project", "project_epigraph", "separating_hypersurface",
    "separation_margin", "set_distance_function", "ConjugateEstimate", "MinorantCertificate",
    "base_shift_inequality", "biconjugate", "conjugate", "equivalent", "fenchel_young_gap",
    "minorant", "partial_convexity_probe", "properness_audit", "subdiff_check",
]
