import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reachknn import Dataset  # noqa: E402

DATA_DIR = Path(__file__).parent / "data"
IONOSPHERE = DATA_DIR / "ionosphere.csv"

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}" + (f"  ({detail})" if detail else ""))


def random_instance(rng, n_max=60, d_max=8, c_max=4, m=10, min_per_class=1):
    """Random labelled training set plus unlabelled query rows."""
    c = int(rng.integers(1, c_max + 1))
    d = int(rng.integers(1, d_max + 1))
    n = int(rng.integers(max(c * min_per_class, 2), n_max + 1))
    labels = np.concatenate([np.repeat(np.arange(c), min_per_class), rng.integers(0, c, n - c * min_per_class)])
    rng.shuffle(labels)
    offsets = rng.normal(0, 2.0, size=(c, d))
    X = offsets[labels] + rng.normal(size=(n, d))
    X_test = rng.normal(0, 2.5, size=(m, d))
    return Dataset.from_arrays(X, labels), X_test


def gaussian_blobs(rng, sizes, d=2, spread=1.0, scale=6.0):
    centers = rng.normal(0, scale, size=(len(sizes), d))
    X = np.vstack([centers[j] + spread * rng.normal(size=(s, d)) for j, s in enumerate(sizes)])
    y = np.repeat(np.arange(len(sizes)), sizes)
    return Dataset.from_arrays(X, y)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
