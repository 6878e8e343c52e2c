"""Reachable (class-center aware) distances.

``z0_distance`` routes each point through its own class center and then
crosses between centers; ``z_distance`` keeps the direct Euclidean gap and
adds the weighted center-to-center gap. Both reduce the affinity between
points of different classes by ``mu * d(c_a, c_b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Hashable

import numpy as np
from scipy.spatial.distance import cdist

from .core import ClassCenters, Dataset
from .metrics import _pair

VARIANTS = ("z0", "z")


def _euclid(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    return math.sqrt(float(np.dot(diff, diff)))


def _check_mu(mu: float) -> None:
    if not (mu >= 0 and math.isfinite(mu)):
        raise ValueError(f"mu must be finite and >= 0, got {mu}")


def z0_distance(a: Any, c_a: Any, b: Any, c_b: Any, mu: float) -> float:
    """``d(a, c_a) + d(b, c_b) + mu * d(c_a, c_b)`` with Euclidean ``d``."""
    a, c_a = _pair(a, c_a)
    b, c_b = _pair(b, c_b)
    _pair(a, b)
    _check_mu(mu)
    return _euclid(a, c_a) + _euclid(b, c_b) + mu * _euclid(c_a, c_b)


def z_distance(a: Any, c_a: Any, b: Any, c_b: Any, mu: float) -> float:
    """``d(a, b) + mu * d(c_a, c_b)`` with Euclidean ``d``."""
    a, c_a = _pair(a, c_a)
    b, c_b = _pair(b, c_b)
    _pair(a, b)
    _check_mu(mu)
    return _euclid(a, b) + mu * _euclid(c_a, c_b)


@dataclass(frozen=True)
class ZContext:
    """Class centers plus the weight ``mu``; evaluates either variant by class id."""

    centers: ClassCenters
    mu: float

    def __post_init__(self) -> None:
        _check_mu(self.mu)

    def distance(self, variant: str, a: Any, class_a: Hashable, b: Any, class_b: Hashable) -> float:
        fn = {"z0": z0_distance, "z": z_distance}[variant]
        return fn(a, self.centers[class_a], b, self.centers[class_b], self.mu)


def nearest_center_distance(t: Any, centers: ClassCenters) -> tuple[Hashable, float]:
    """Class whose center is Euclidean-closest to `t`, and that distance.

    Ties go to the lowest class code.
    """
    t = np.asarray(t, dtype=np.float64).reshape(1, -1)
    if t.shape[1] != centers.per_class.shape[1]:
        raise ValueError(f"dimension mismatch: {t.shape[1]} vs {centers.per_class.shape[1]}")
    dist = cdist(t, centers.per_class)[0]
    j = int(np.argmin(dist))  # argmin returns the first minimum
    return centers.class_ids[j], float(dist[j])


def _center_radii(data: Dataset, centers: ClassCenters) -> np.ndarray:
    diff = data.features - centers.per_class[data.labels]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def mu_separation_threshold(data: Dataset, centers: ClassCenters, variant: str = "z") -> float:
    """
    Smallest ``mu* >= 0`` such that every ``mu > mu*`` makes all intraclass
    distances strictly smaller than all interclass distances on `data`.

    For a class pair ``(j, l)`` with center gap ``C_jl`` the interclass
    distances are ``base + mu * C_jl`` where ``base`` is ``d(a, e)`` (``z``) or
    ``d(a, c_j) + d(e, c_l)`` (``z0``). Separation holds exactly when
    ``mu * C_jl > intra_max - min(base)`` for every pair, so

        mu* = max(0, max_{j<l} (intra_max - min base_jl) / C_jl)

    A pair with ``C_jl == 0`` whose bases do not already exceed ``intra_max``
    makes separation unattainable and the result is ``inf``. With two
    classes this equals ``(intra_max - inter_min) / C_min``.

    Exhaustive over all row pairs: ``O(n^2 d)`` time, memory bounded by the
    largest class-pair block.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    c = data.c
    if c == 1:
        return 0.0
    X = data.features
    groups = [np.flatnonzero(data.labels == j) for j in range(c)]
    radii = _center_radii(data, centers) if variant == "z0" else None

    intra_max = -math.inf
    for rows in groups:
        if rows.size < 2:
            continue
        if variant == "z":
            D = cdist(X[rows], X[rows])
            intra_max = max(intra_max, float(D.max()))
        else:
            # largest pair sum over distinct rows = top two radii
            top = np.sort(radii[rows])[-2:]
            intra_max = max(intra_max, float(top.sum()))

    C = cdist(centers.per_class, centers.per_class)
    threshold = 0.0
    for j in range(c):
        for l in range(j + 1, c):
            if variant == "z":
                base = float(cdist(X[groups[j]], X[groups[l]]).min())
            else:
                base = float(radii[groups[j]].min() + radii[groups[l]].min())
            gap = intra_max - base
            if gap < 0:
                continue
            if C[j, l] == 0:
                return math.inf
            threshold = max(threshold, gap / C[j, l])
    return threshold


def separation_margin(data: Dataset, centers: ClassCenters, variant: str, mu: float) -> float:
    """``min interclass - max intraclass`` distance over all distinct row pairs.

    Positive exactly when the classes are separated at this ``mu``. Built
    from the full ``n x n`` matrix, so keep ``n`` modest.
    """
    D = pairwise_variant_matrix(data, centers, variant, mu)
    same = data.labels[:, None] == data.labels[None, :]
    off_diag = ~np.eye(data.n, dtype=bool)
    intra = D[same & off_diag]
    inter = D[~same]
    if inter.size == 0:
        return math.inf
    intra_max = intra.max() if intra.size else -math.inf
    return float(inter.min() - intra_max)


def pairwise_variant_matrix(data: Dataset, centers: ClassCenters, variant: str, mu: float) -> np.ndarray:
    """All-pairs ``z0`` or ``z`` distances between training rows under their own centers."""
    _check_mu(mu)
    X = data.features
    cen = centers.per_class[data.labels]
    C = cdist(cen, cen)
    if variant == "z":
        return cdist(X, X) + mu * C
    if variant == "z0":
        r = _center_radii(data, centers)
        return (r[:, None] + r[None, :]) + mu * C
    raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
