"""Ten-fold cross-validation, accuracy statistics and K x mu sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Hashable, Optional, Sequence

import numpy as np

from .classifiers import ClassifierConfig, FittedClassifier
from .core import DataError, Dataset, compute_class_centers
from .metrics import apply_standardization

N_FOLDS = 10
DEFAULT_MU_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0)
NORMALIZATIONS = ("none", "standardize")

FoldHook = Callable[[int, np.ndarray, np.ndarray, FittedClassifier], None]


@dataclass(frozen=True, eq=False)
class FoldPlan:
    seed: int
    assignments: np.ndarray
    n_folds: int = N_FOLDS

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.n_folds)


def make_folds(data: Dataset, seed: int, n_folds: int = N_FOLDS) -> FoldPlan:
    """Stratified fold assignment.

    Rows of each class are shuffled with a generator seeded by `seed`, the
    shuffled classes are concatenated in class order, and the sequence is
    dealt round-robin to the folds. Fold sizes therefore differ by at most
    one, globally and within every class.
    """
    if n_folds < 2:
        raise ValueError(f"n_folds must be >= 2, got {n_folds}")
    if data.n < n_folds:
        raise DataError(f"{n_folds}-fold cross-validation needs at least {n_folds} rows, got {data.n}")
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(data.labels == j)) for j in range(data.c)])
    assignments = np.empty(data.n, dtype=np.intp)
    assignments[order] = np.arange(data.n) % n_folds
    return FoldPlan(int(seed), assignments, n_folds)


def accuracy(predictions: Sequence, truths: Sequence) -> float:
    """Fraction of positions where prediction equals truth."""
    p, t = np.asarray(predictions), np.asarray(truths)
    if p.shape != t.shape or p.ndim != 1:
        raise ValueError(f"length mismatch: {p.shape} vs {t.shape}")
    if p.size == 0:
        raise ValueError("accuracy of an empty set is undefined")
    return int(np.count_nonzero(p == t)) / p.size


def std_dev(per_run_accuracies: Sequence[float]) -> float:
    """Population standard deviation (divisor ``n``) of run accuracies."""
    acc = [float(a) for a in per_run_accuracies]
    if not acc:
        raise ValueError("std_dev of an empty list is undefined")
    mean = math.fsum(acc) / len(acc)
    mean += math.fsum(a - mean for a in acc) / len(acc)
    return math.sqrt(math.fsum((a - mean) ** 2 for a in acc) / len(acc))


def sensitivity_specificity(
    predictions: Sequence, truths: Sequence, positive_class: Hashable
) -> tuple[Optional[float], Optional[float]]:
    """``TP / (TP + FN)`` and ``TN / (TN + FP)``; ``None`` where the denominator is 0."""
    p, t = np.asarray(predictions), np.asarray(truths)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {t.shape}")
    if len(np.unique(t)) > 2:
        raise ValueError("sensitivity/specificity need at most two classes in truths")
    pos_t, pos_p = t == positive_class, p == positive_class
    tp = int(np.count_nonzero(pos_t & pos_p))
    fn = int(np.count_nonzero(pos_t & ~pos_p))
    tn = int(np.count_nonzero(~pos_t & ~pos_p))
    fp = int(np.count_nonzero(~pos_t & pos_p))
    sen = tp / (tp + fn) if tp + fn else None
    spe = tn / (tn + fp) if tn + fp else None
    return sen, spe


@dataclass
class AlgorithmReport:
    """Cross-validation result for one classifier configuration.

    ``k`` and ``mu`` are ``None`` where the algorithm ignores them.
    ``fold_acc`` holds every fold of every repeat, in order.
    """

    name: str
    k: Optional[int]
    mu: Optional[float]
    mean_acc: float
    std: float
    fold_acc: list[float]
    sen: Optional[float] = None
    spe: Optional[float] = None
    positive_class: Optional[str] = None
    repeat_acc: list[float] = field(default_factory=list)
    seed: int = 0
    dataset: str = ""

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("sen", "spe", "positive_class"):
            if out[key] is None:
                del out[key]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> AlgorithmReport:
        return cls(**d)


def _public_name(config: ClassifierConfig) -> str:
    return {"knn": "knn", "ncp": "ncp", "z0_knn": "z0-knn", "z_knn": "z-knn"}[config.algorithm]


def _derived_seed(seed: int, repeat: int) -> int:
    if repeat == 0:
        return int(seed)
    return int(np.random.SeedSequence([int(seed) & (2**64 - 1), repeat]).generate_state(1, np.uint64)[0])


def _run_fold(data, plan, fold, config, normalize, on_fold):
    train_rows, test_rows = plan.train_rows(fold), plan.test_rows(fold)
    try:
        train = data.subset(train_rows)
    except DataError as exc:
        raise DataError(f"fold {fold}: training portion is missing a class ({exc})") from None
    X_test = data.features[test_rows]
    if normalize == "standardize":
        mu, sigma = train.features.mean(axis=0), train.features.std(axis=0)
        train = train.with_features(apply_standardization(train.features, mu, sigma))
        X_test = apply_standardization(X_test, mu, sigma)
    model = FittedClassifier(train, config, compute_class_centers(train))
    if on_fold is not None:
        on_fold(fold, train_rows, test_rows, model)
    return test_rows, model.predict(X_test)


def _cv_predictions(data, plan, config, normalize, on_fold, n_jobs):
    """Out-of-fold predictions for every row, plus per-fold accuracies."""
    folds = range(plan.n_folds)
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(lambda f: _run_fold(data, plan, f, config, normalize, on_fold), folds))
    else:
        results = [_run_fold(data, plan, f, config, normalize, on_fold) for f in folds]
    pred = np.empty(data.n, dtype=np.intp)
    fold_acc = []
    for test_rows, fold_pred in results:
        pred[test_rows] = fold_pred
        fold_acc.append(accuracy(fold_pred, data.labels[test_rows]))
    return pred, fold_acc


def default_positive_class(data: Dataset) -> int:
    """Code of the smaller class (lowest code on a tie)."""
    return int(np.argmin(data.class_sizes()))


def cross_validate(
    data: Dataset,
    config: ClassifierConfig,
    seed: int = 42,
    *,
    normalize: str = "none",
    positive_class: Optional[Hashable] = None,
    repeats: int = 1,
    n_folds: int = N_FOLDS,
    n_jobs: int = 1,
    on_fold: Optional[FoldHook] = None,
    plan: Optional[FoldPlan] = None,
) -> AlgorithmReport:
    """
    Stratified k-fold cross-validation of one classifier configuration.

    Each fold is predicted by a model whose class centers (and, with
    ``normalize="standardize"``, scaling statistics) come from the other
    folds only. ``mean_acc`` and ``std`` are taken over the per-fold
    accuracies.

    For two-class data, sensitivity and specificity are computed on the
    pooled out-of-fold predictions; ``positive_class`` is an original class
    identifier and defaults to the smaller class.

    ``repeats > 1`` reruns the whole protocol with fresh fold shuffles; repeat
    0 always uses `seed` itself. ``on_fold`` receives
    ``(fold, train_rows, test_rows, model)`` for every fold and exists for
    instrumentation.
    """
    if normalize not in NORMALIZATIONS:
        raise ValueError(f"normalize must be one of {NORMALIZATIONS}, got {normalize!r}")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    binary = data.c == 2
    if positive_class is not None:
        if positive_class not in data.class_ids:
            raise ValueError(f"positive class {positive_class!r} not among {data.class_ids}")
        pos = data.class_ids.index(positive_class)
    else:
        pos = default_positive_class(data)

    fold_acc: list[float] = []
    repeat_acc: list[float] = []
    pooled: list[np.ndarray] = []
    for r in range(repeats):
        if plan is None or r > 0:
            run_plan = make_folds(data, _derived_seed(seed, r), n_folds)
        else:
            run_plan = plan
        pred, accs = _cv_predictions(data, run_plan, config, normalize, on_fold, n_jobs)
        fold_acc.extend(accs)
        repeat_acc.append(accuracy(pred, data.labels))
        pooled.append(pred)

    sen = spe = None
    if binary:
        truths = np.tile(data.labels, repeats)
        sen, spe = sensitivity_specificity(np.concatenate(pooled), truths, pos)
    return AlgorithmReport(
        name=_public_name(config),
        k=config.k if config.uses_k else None,
        mu=config.mu if config.uses_mu else None,
        mean_acc=math.fsum(fold_acc) / len(fold_acc),
        std=std_dev(fold_acc),
        fold_acc=fold_acc,
        sen=sen,
        spe=spe,
        positive_class=str(data.class_ids[pos]) if binary else None,
        repeat_acc=repeat_acc,
        seed=int(seed),
        dataset=data.fingerprint(),
    )


@dataclass
class SweepCell:
    algorithm: str
    k: Optional[int]
    mu: Optional[float]
    report: AlgorithmReport


def sweep(
    data: Dataset,
    algorithm: str,
    k_values: Sequence[int],
    mu_values: Sequence[float] = DEFAULT_MU_GRID,
    seed: int = 42,
    **cv_kwargs: Any,
) -> list[SweepCell]:
    """Cross-validate every ``(k, mu)`` pair on one shared fold plan.

    Parameters the algorithm ignores collapse: ``knn`` yields one cell per
    ``k`` and ``ncp`` a single cell. Cells are ordered by ``k`` then ``mu``.
    """
    if not k_values or not mu_values:
        raise ValueError("k_values and mu_values must be nonempty")
    probe = ClassifierConfig(algorithm)
    ks = list(dict.fromkeys(int(k) for k in k_values)) if probe.uses_k else [1]
    mus = list(dict.fromkeys(float(m) for m in mu_values)) if probe.uses_mu else [0.0]
    plan = make_folds(data, seed, cv_kwargs.get("n_folds", N_FOLDS))
    cells = []
    for k in ks:
        for mu in mus:
            config = ClassifierConfig(algorithm, k=k, mu=mu)
            report = cross_validate(data, config, seed, plan=plan, **cv_kwargs)
            cells.append(SweepCell(report.name, report.k, report.mu, report))
    return cells
