"""Categorical Gini correlation between a numeric sample and a categorical
label: point estimation, jackknife confidence intervals, permutation
independence tests and feature screening."""

from .exceptions import (
    DegenerateSample,
    EmptyAfterFiltering,
    GiniCorrError,
    InsufficientClassSize,
    InsufficientData,
    InvalidInput,
    ParseError,
    ResourceLimit,
)
from .inference import (
    FeatureScore,
    IntervalResult,
    ScreeningResult,
    TestResult,
    confidence_interval,
    independence_test,
    jackknife_variance,
    normal_quantile,
    screen_features,
)
from .metric import (
    DEFAULT_CACHE_CAP,
    CgcEstimate,
    ClassPartition,
    DistanceCache,
    LabeledSample,
    build_cache,
    cgc,
    gini_mean_difference,
    gini_mean_difference_sorted,
    pairwise_distance,
    partition,
)

__version__ = "0.1.0"


def __getattr__(name):
    # sklearn is heavy; pull the selector in only when it is asked for so
    # CLI start-up stays fast.
    if name == "GiniCorrelationSelector":
        from .selection import GiniCorrelationSelector

        return GiniCorrelationSelector
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "DEFAULT_CACHE_CAP",
    "CgcEstimate",
    "ClassPartition",
    "DegenerateSample",
    "DistanceCache",
    "EmptyAfterFiltering",
    "FeatureScore",
    "GiniCorrError",
    "GiniCorrelationSelector",
    "InsufficientClassSize",
    "InsufficientData",
    "IntervalResult",
    "InvalidInput",
    "LabeledSample",
    "ParseError",
    "ResourceLimit",
    "ScreeningResult",
    "TestResult",
    "build_cache",
    "cgc",
    "confidence_interval",
    "gini_mean_difference",
    "gini_mean_difference_sorted",
    "independence_test",
    "jackknife_variance",
    "normal_quantile",
    "pairwise_distance",
    "partition",
    "screen_features",
    "__version__",
]
