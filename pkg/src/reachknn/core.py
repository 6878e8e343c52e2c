"""Dataset representation, class partition and class-center computation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Any, Hashable, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when input data violates the dataset contract."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable labelled feature matrix.

    Labels are stored as dense integer codes ``0..c-1``; ``class_ids[code]``
    recovers the original identifier. Codes follow the sorted order of the
    original identifiers, so iteration over classes is deterministic.

    Use :meth:`from_arrays` to build one from raw labels.
    """

    features: np.ndarray
    labels: np.ndarray
    class_ids: tuple

    def __post_init__(self) -> None:
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        n, d = X.shape
        if n < 1 or d < 1:
            raise DataError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
        if not np.isfinite(X).all():
            row, col = np.argwhere(~np.isfinite(X))[0]
            raise DataError(f"non-finite feature value at row {row}, column {col}")
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.shape[0] != n:
            raise DataError(f"labels must have length {n}, got shape {y.shape}")
        if not np.issubdtype(y.dtype, np.integer):
            raise DataError("labels must be integer class codes; use Dataset.from_arrays")
        c = len(self.class_ids)
        if c < 1:
            raise DataError("at least one class is required")
        if y.min() < 0 or y.max() >= c:
            raise DataError("label code outside 0..c-1")
        counts = np.bincount(y, minlength=c)
        if (counts == 0).any():
            missing = self.class_ids[int(np.flatnonzero(counts == 0)[0])]
            raise DataError(f"class {missing!r} has no rows")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y.astype(np.intp)))
        object.__setattr__(self, "class_ids", tuple(self.class_ids))

    @classmethod
    def from_arrays(cls, features: Any, labels: Sequence[Hashable]) -> Dataset:
        """Build a dataset from a feature matrix and raw class identifiers."""
        raw = list(labels)
        try:
            class_ids = tuple(sorted(set(raw)))
        except TypeError:
            class_ids = tuple(sorted(set(raw), key=str))
        index = {cid: code for code, cid in enumerate(class_ids)}
        codes = np.fromiter((index[v] for v in raw), dtype=np.intp, count=len(raw))
        return cls(np.asarray(features, dtype=np.float64), codes, class_ids)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def c(self) -> int:
        return len(self.class_ids)

    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.c)

    def decode(self, codes: Any) -> list:
        """Map integer class codes back to the original identifiers."""
        return [self.class_ids[int(k)] for k in np.atleast_1d(codes)]

    def subset(self, rows: Any) -> Dataset:
        """Rows ``rows`` as a new dataset sharing this one's class encoding.

        Raises DataError naming the class if a class ends up with no rows.
        """
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.features[rows], self.labels[rows], self.class_ids)

    def with_features(self, features: Any) -> Dataset:
        return Dataset(features, self.labels, self.class_ids)

    def fingerprint(self) -> str:
        """SHA-256 over feature bytes, label codes and class identifiers."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.labels, dtype="<i8").tobytes())
        h.update(repr(self.class_ids).encode("utf-8"))
        return h.hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.class_ids == other.class_ids
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class ClassCenters:
    """Per-class mean vectors (row ``j`` is class code ``j``) and the global mean."""

    per_class: np.ndarray
    global_center: np.ndarray
    class_ids: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_class", _frozen(np.asarray(self.per_class, dtype=np.float64)))
        object.__setattr__(self, "global_center", _frozen(np.asarray(self.global_center, dtype=np.float64)))

    @property
    def c(self) -> int:
        return self.per_class.shape[0]

    def __getitem__(self, class_id: Hashable) -> np.ndarray:
        return self.per_class[self.class_ids.index(class_id)]

    def as_dict(self) -> dict:
        return {cid: self.per_class[j] for j, cid in enumerate(self.class_ids)}


def partition_by_class(data: Dataset) -> dict[Hashable, list[int]]:
    """Row indices of each class, in class order; each list is ascending."""
    return {
        cid: np.flatnonzero(data.labels == code).tolist()
        for code, cid in enumerate(data.class_ids)
    }


def compute_class_centers(data: Dataset) -> ClassCenters:
    """Arithmetic mean of each class and of the whole feature matrix."""
    X = data.features
    centers = np.empty((data.c, data.d), dtype=np.float64)
    for code in range(data.c):
        centers[code] = X[data.labels == code].mean(axis=0)
    return ClassCenters(centers, X.mean(axis=0), data.class_ids)
