"""Reachable-distance nearest-neighbor classification.

Class-center aware distances (``z0_distance``, ``z_distance``), the KNN,
nearest-center, Z0-KNN and Z-KNN classifiers, a classical distance
catalogue, and a stratified cross-validation harness.
"""

__version__ = "0.1.0"

from .core import ClassCenters, DataError, Dataset, compute_class_centers, partition_by_class
from .metrics import (
    DistanceSpec,
    NumericError,
    bhattacharyya,
    cosine_distance,
    covariance_inverse,
    hamming,
    kl_divergence,
    mahalanobis,
    minkowski,
    standardize,
    standardized_euclidean,
)
from .zdistance import (
    ZContext,
    mu_separation_threshold,
    nearest_center_distance,
    z0_distance,
    z_distance,
)
from .classifiers import (
    ClassifierConfig,
    FittedClassifier,
    NeighborSet,
    fit,
    knn_predict,
    majority_vote,
    ncp_predict,
    predict,
    select_neighbors,
    zknn_predict,
)
from .evaluation import (
    AlgorithmReport,
    FoldPlan,
    accuracy,
    cross_validate,
    make_folds,
    sensitivity_specificity,
    std_dev,
    sweep,
)

__all__ = [
    "AlgorithmReport",
    "ClassCenters",
    "ClassifierConfig",
    "DataError",
    "Dataset",
    "DistanceSpec",
    "FittedClassifier",
    "FoldPlan",
    "NeighborSet",
    "NumericError",
    "ZContext",
    "accuracy",
    "bhattacharyya",
    "compute_class_centers",
    "cosine_distance",
    "covariance_inverse",
    "cross_validate",
    "fit",
    "hamming",
    "kl_divergence",
    "knn_predict",
    "mahalanobis",
    "majority_vote",
    "make_folds",
    "minkowski",
    "mu_separation_threshold",
    "ncp_predict",
    "nearest_center_distance",
    "partition_by_class",
    "predict",
    "select_neighbors",
    "sensitivity_specificity",
    "standardize",
    "standardized_euclidean",
    "std_dev",
    "sweep",
    "z0_distance",
    "z_distance",
    "zknn_predict",
]
