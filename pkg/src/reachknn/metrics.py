"""Classical distance functions.

All vector arguments are array-likes of equal length. Functions are pure and
return Python floats (``hamming`` returns an int).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .core import Dataset


class NumericError(ArithmeticError):
    """Raised when a computation is numerically ill-posed."""


PROB_TOL = 1e-9
COND_LIMIT = 1e12


def _pair(a: Any, b: Any) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a, b


def minkowski(a: Any, b: Any, p: float = 2.0) -> float:
    """
    Minkowski distance of order `p` between two real vectors.

    Parameters
    ----------
    a, b : array_like of shape `(d,)`
    p : float
        Order, ``p >= 1``. ``math.inf`` gives the Chebyshev distance; 1 and 2
        give the Manhattan and Euclidean distances.

    Returns
    -------
    float
        ``(sum |a_j - b_j|^p)^(1/p)``.
    """
    a, b = _pair(a, b)
    if not p >= 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    diff = np.abs(a - b)
    if math.isinf(p):
        return float(diff.max(initial=0.0))
    if p == 1:
        return float(diff.sum())
    if p == 2:
        return float(np.sqrt(np.dot(diff, diff)))
    return float(np.sum(diff**p) ** (1.0 / p))


def euclidean(a: Any, b: Any) -> float:
    return minkowski(a, b, 2.0)


def standardize(data: Dataset) -> tuple[Dataset, np.ndarray, np.ndarray]:
    """
    Z-score every feature column.

    Returns the transformed dataset, the per-column population standard
    deviation ``sigma`` and the column means ``mu`` of the input. Columns with
    ``sigma == 0`` become all zeros.
    """
    X = data.features
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    return data.with_features(apply_standardization(X, mu, sigma)), sigma, mu


def apply_standardization(X: Any, mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Transform `X` with statistics computed elsewhere (e.g. a training fold)."""
    X = np.asarray(X, dtype=np.float64)
    safe = np.where(sigma > 0, sigma, 1.0)
    return np.where(sigma > 0, (X - mu) / safe, 0.0)


def standardized_euclidean(a: Any, b: Any, sigma: Any) -> float:
    """
    Euclidean distance with each coordinate gap divided by ``sigma_j``.

    A zero ``sigma_j`` is accepted only where the coordinates agree; that term
    then contributes nothing.
    """
    a, b = _pair(a, b)
    sigma = np.asarray(sigma, dtype=np.float64).ravel()
    if sigma.shape != a.shape:
        raise ValueError(f"sigma has length {sigma.shape[0]}, expected {a.shape[0]}")
    if (sigma < 0).any():
        raise ValueError("sigma entries must be >= 0")
    diff = a - b
    zero = sigma == 0
    if (diff[zero] != 0).any():
        j = int(np.flatnonzero(zero & (diff != 0))[0])
        raise ValueError(f"sigma[{j}] is 0 but coordinates differ")
    scaled = np.where(zero, 0.0, diff / np.where(zero, 1.0, sigma))
    return float(np.sqrt(np.dot(scaled, scaled)))


def covariance_inverse(data: Dataset, ridge: Optional[float] = None) -> np.ndarray:
    """
    Inverse of the sample covariance (divisor ``n - 1``) plus ``ridge * I``.

    ``ridge=None`` uses ``1e-8 * trace(S) / d``. Raises NumericError when the
    regularized matrix has condition number above 1e12.
    """
    if data.n < 2:
        raise ValueError("covariance needs at least 2 rows")
    S = np.atleast_2d(np.cov(data.features, rowvar=False, ddof=1))
    d = S.shape[0]
    if ridge is None:
        ridge = 1e-8 * float(np.trace(S)) / d
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    M = S + ridge * np.eye(d)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericError(
            f"covariance matrix is numerically singular (condition {cond:.3g}); "
            "use a larger ridge"
        )
    inv = np.linalg.solve(M, np.eye(d))
    return 0.5 * (inv + inv.T)


def mahalanobis(a: Any, b: Any, s_inverse: Any) -> float:
    """``sqrt((a-b) S^-1 (a-b)^T)``; tiny negative quadratic forms are clamped to 0."""
    a, b = _pair(a, b)
    S_inv = np.atleast_2d(np.asarray(s_inverse, dtype=np.float64))
    if S_inv.shape != (a.shape[0], a.shape[0]):
        raise ValueError(f"s_inverse has shape {S_inv.shape}, expected {(a.shape[0],) * 2}")
    diff = a - b
    q = float(diff @ S_inv @ diff)
    if q < -1e-12:
        raise NumericError(f"quadratic form is {q:.3g}; s_inverse is not positive semidefinite")
    return math.sqrt(max(q, 0.0))


def _check_prob(p: Any, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64).ravel()
    if (p < 0).any() or not np.isfinite(p).all():
        raise ValueError(f"{name} has negative or non-finite entries")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"{name} sums to {p.sum()!r}, not 1")
    return p


def bhattacharyya(p: Any, q: Any) -> float:
    """``-ln(sum sqrt(p_x q_x))`` for discrete distributions; ``inf`` on disjoint support."""
    p = _check_prob(p, "p")
    q = _check_prob(q, "q")
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    bc = float(np.sum(np.sqrt(p * q)))
    if bc <= 0.0:
        return math.inf
    # BC can exceed 1 by rounding when p == q
    return max(0.0, -math.log(bc))


def kl_divergence(p: Any, q: Any) -> float:
    """Discrete KL divergence ``sum p_x ln(p_x / q_x)`` in nats.

    Terms with ``p_x == 0`` vanish; ``p_x > 0`` with ``q_x == 0`` gives ``inf``.
    """
    p = _check_prob(p, "p")
    q = _check_prob(q, "q")
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    support = p > 0
    if (q[support] == 0).any():
        return math.inf
    ps, qs = p[support], q[support]
    return max(0.0, float(np.sum(ps * np.log(ps / qs))))


def hamming(a: Any, b: Any) -> int:
    """Number of positions where the two sequences differ.

    Strings are compared character by character, so ``"11100111"`` works.
    """
    a = np.asarray(list(a) if isinstance(a, str) else a).ravel()
    b = np.asarray(list(b) if isinstance(b, str) else b).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return int(np.count_nonzero(a != b))


def cosine_distance(a: Any, b: Any) -> float:
    """``1 - a.b / (|a||b|)``, clamped to ``[0, 2]``."""
    a, b = _pair(a, b)
    aa, bb = float(np.dot(a, a)), float(np.dot(b, b))
    if aa == 0 or bb == 0:
        raise ValueError("cosine distance is undefined for a zero vector")
    # sqrt(aa * bb) rather than |a||b|: exact for parallel and antiparallel pairs
    cos = float(np.dot(a, b)) / math.sqrt(aa * bb)
    return min(2.0, max(0.0, 1.0 - cos))


KINDS = (
    "minkowski",
    "standardized_euclidean",
    "mahalanobis",
    "bhattacharyya",
    "kl_divergence",
    "hamming",
    "cosine",
    "z0",
    "z",
)


@dataclass(frozen=True, eq=False)
class DistanceSpec:
    """A distance function together with its parameters.

    ``z0`` and ``z`` need the class centers of both points, passed to
    :meth:`__call__` as ``c_a`` and ``c_b``.
    """

    kind: str
    p: float = 2.0
    mu: float = 1.0
    sigma: Optional[np.ndarray] = None
    s_inverse: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown distance kind {self.kind!r}")
        if self.kind == "minkowski" and not self.p >= 1:
            raise ValueError(f"p must be >= 1 or inf, got {self.p}")
        if self.kind in ("z0", "z") and not (self.mu >= 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be finite and >= 0, got {self.mu}")
        if self.kind == "standardized_euclidean":
            if self.sigma is None or (np.asarray(self.sigma) < 0).any():
                raise ValueError("standardized_euclidean needs a nonnegative sigma vector")
        if self.kind == "mahalanobis":
            if self.s_inverse is None:
                raise ValueError("mahalanobis needs s_inverse")
            S = np.asarray(self.s_inverse, dtype=np.float64)
            scale = max(float(np.abs(S).max(initial=0.0)), 1.0)
            if S.ndim != 2 or S.shape[0] != S.shape[1] or np.abs(S - S.T).max() > 1e-9 * scale:
                raise ValueError("s_inverse must be a symmetric square matrix")

    def __call__(self, a: Any, b: Any, c_a: Any = None, c_b: Any = None) -> float:
        k = self.kind
        if k == "minkowski":
            return minkowski(a, b, self.p)
        if k == "standardized_euclidean":
            return standardized_euclidean(a, b, self.sigma)
        if k == "mahalanobis":
            return mahalanobis(a, b, self.s_inverse)
        if k == "bhattacharyya":
            return bhattacharyya(a, b)
        if k == "kl_divergence":
            return kl_divergence(a, b)
        if k == "hamming":
            return hamming(a, b)
        if k == "cosine":
            return cosine_distance(a, b)
        if c_a is None or c_b is None:
            raise ValueError(f"{k} distance needs class centers c_a and c_b")
        from .zdistance import z0_distance, z_distance

        fn = z0_distance if k == "z0" else z_distance
        return fn(a, c_a, b, c_b, self.mu)
