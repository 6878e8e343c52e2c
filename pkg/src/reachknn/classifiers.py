"""KNN, nearest-class-center and reachable-distance KNN classifiers.

Every classifier is an exhaustive scan over the training rows. Predictions
are canonical class codes (see :class:`~reachknn.core.Dataset`).

Neighbor selection is exact and deterministic: rows are ranked by
``(distance, row index)``, so rows tied at the k-th distance are admitted
lowest index first and the neighbor set always has exactly ``k`` entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .core import ClassCenters, Dataset, compute_class_centers

ALGORITHMS = ("knn", "ncp", "z0_knn", "z_knn")
TIE_RULES = ("nearest_neighbor_class", "lowest_class_index")
# distance entries held at once during batch prediction (8 MiB of float64)
BLOCK_ELEMENTS = 1 << 20

_ALIASES = {
    "knn": "knn",
    "ncp": "ncp",
    "ncp-knn": "ncp",
    "ncp_knn": "ncp",
    "z0-knn": "z0_knn",
    "z0_knn": "z0_knn",
    "z0": "z0_knn",
    "z-knn": "z_knn",
    "z_knn": "z_knn",
    "z": "z_knn",
}


def canonical_algorithm(name: str) -> str:
    try:
        return _ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from knn, ncp, z0-knn, z-knn") from None


@dataclass(frozen=True)
class ClassifierConfig:
    """Algorithm selector with its parameters.

    ``mu`` is ignored by ``knn`` and ``ncp``; ``k`` is ignored by ``ncp``.
    """

    algorithm: str = "z_knn"
    k: int = 5
    mu: float = 1.0
    tie_rule: str = "nearest_neighbor_class"

    def __post_init__(self) -> None:
        object.__setattr__(self, "algorithm", canonical_algorithm(self.algorithm))
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        if not (self.mu >= 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be finite and >= 0, got {self.mu!r}")
        object.__setattr__(self, "mu", float(self.mu))
        if self.tie_rule not in TIE_RULES:
            raise ValueError(f"tie_rule must be one of {TIE_RULES}, got {self.tie_rule!r}")

    @property
    def uses_k(self) -> bool:
        return self.algorithm != "ncp"

    @property
    def uses_mu(self) -> bool:
        return self.algorithm in ("z0_knn", "z_knn")


@dataclass(frozen=True)
class NeighborSet:
    """The k selected training rows, ascending by distance."""

    indices: np.ndarray
    distances: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


def select_neighbors(distances: Any, k: int) -> NeighborSet:
    """The `k` smallest entries of a distance vector, ties by lowest index."""
    dist = np.asarray(distances, dtype=np.float64)
    n = dist.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds the number of training rows ({n})")
    if k < n:
        kth = np.partition(dist, k - 1)[k - 1]
        below = np.flatnonzero(dist < kth)
        at = np.flatnonzero(dist == kth)[: k - below.size]
        idx = np.concatenate([below, at])
    else:
        idx = np.arange(n)
    order = np.lexsort((idx, dist[idx]))
    idx = idx[order]
    return NeighborSet(idx, dist[idx])


def majority_vote(
    neighbors: NeighborSet,
    labels: Any,
    tie_rule: str = "nearest_neighbor_class",
    n_classes: Optional[int] = None,
) -> int:
    """Most frequent class code among the neighbors.

    A tie is resolved by the class of the nearest neighbor among the tied
    classes (``nearest_neighbor_class``) or by the lowest class code.
    """
    if len(neighbors) == 0:
        raise ValueError("empty neighbor set")
    votes = np.asarray(labels)[neighbors.indices]
    counts = np.bincount(votes, minlength=n_classes or 0)
    tied = np.flatnonzero(counts == counts.max())
    if tied.size == 1 or tie_rule == "lowest_class_index":
        return int(tied[0])
    if tie_rule != "nearest_neighbor_class":
        raise ValueError(f"tie_rule must be one of {TIE_RULES}, got {tie_rule!r}")
    for v in votes:
        if v in tied:
            return int(v)
    raise AssertionError("unreachable")


def _row_terms(train: Dataset, centers: ClassCenters, config: ClassifierConfig):
    """Per-training-row terms of the reachable distance.

    The test point's center is the global mean ``g``, so the center term is
    ``mu * d(g, c_l)``; Z0 also needs the row's radius ``d(x_l, c_l)``.
    """
    if not config.uses_mu:
        return None, None
    g = centers.global_center[None, :]
    center_term = config.mu * cdist(g, centers.per_class)[0][train.labels]
    if config.algorithm == "z_knn":
        return None, center_term
    diff = train.features - centers.per_class[train.labels]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff)), center_term


class FittedClassifier:
    """A classifier bound to its training set; see :func:`fit`."""

    def __init__(self, train: Dataset, config: ClassifierConfig, centers: Optional[ClassCenters] = None):
        self.train = train
        self.config = config
        self.centers = centers if centers is not None else compute_class_centers(train)
        if config.uses_k and config.k > train.n:
            raise ValueError(f"k={config.k} exceeds the number of training rows ({train.n})")
        self._radii, self._center_term = _row_terms(train, self.centers, config)

    def distances(self, X: Any) -> np.ndarray:
        """Distance from each query row to each training row, shape ``(m, n)``.

        Not defined for ``ncp``, which compares against centers only.
        """
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        algo = self.config.algorithm
        if algo == "ncp":
            raise ValueError("ncp has no per-row distances")
        if algo == "z0_knn":
            # d(t, g) is the same for every training row
            t_to_g = cdist(X, self.centers.global_center[None, :])
            return (t_to_g + self._radii[None, :]) + self._center_term[None, :]
        D = cdist(X, self.train.features)
        if algo == "z_knn":
            D += self._center_term[None, :]
        return D

    def neighbors(self, x: Any) -> NeighborSet:
        return select_neighbors(self.distances(x)[0], self.config.k)

    def predict(self, X: Any, chunk: Optional[int] = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.train.d:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {self.train.d}")
        if self.config.algorithm == "ncp":
            return np.argmin(cdist(X, self.centers.per_class), axis=1)
        out = np.empty(X.shape[0], dtype=np.intp)
        labels, c, k, rule = self.train.labels, self.train.c, self.config.k, self.config.tie_rule
        if chunk is None:
            chunk = max(1, BLOCK_ELEMENTS // self.train.n)
        for start in range(0, X.shape[0], chunk):
            D = self.distances(X[start:start + chunk])
            for i, row in enumerate(D):
                out[start + i] = majority_vote(select_neighbors(row, k), labels, rule, c)
        return out


def fit(train: Dataset, config: ClassifierConfig, centers: Optional[ClassCenters] = None) -> FittedClassifier:
    return FittedClassifier(train, config, centers)


def knn_predict(train: Dataset, test_point: Any, config: ClassifierConfig) -> int:
    """Majority class among the `k` Euclidean-nearest training rows."""
    if config.algorithm != "knn":
        raise ValueError(f"knn_predict needs algorithm 'knn', got {config.algorithm!r}")
    return int(FittedClassifier(train, config).predict(test_point)[0])


def ncp_predict(centers: ClassCenters, test_point: Any) -> int:
    """Code of the class whose center is nearest the test point."""
    t = np.asarray(test_point, dtype=np.float64).reshape(1, -1)
    return int(np.argmin(cdist(t, centers.per_class)[0]))


def zknn_predict(train: Dataset, centers: ClassCenters, test_point: Any, config: ClassifierConfig) -> int:
    """Majority class among the `k` nearest rows under the Z0 or Z distance.

    The test point is assigned the global mean as its class center; each
    training row uses its own class center.
    """
    if config.algorithm not in ("z0_knn", "z_knn"):
        raise ValueError(f"zknn_predict needs z0_knn or z_knn, got {config.algorithm!r}")
    return int(FittedClassifier(train, config, centers).predict(test_point)[0])


def predict(train: Dataset, X: Any, config: ClassifierConfig, centers: Optional[ClassCenters] = None) -> np.ndarray:
    """Batch prediction for any algorithm; returns class codes."""
    return FittedClassifier(train, config, centers).predict(X)
