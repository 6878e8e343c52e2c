"""CSV ingestion, report and manifest serialization."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from . import __version__
from .core import DataError, Dataset
from .evaluation import AlgorithmReport
from .metrics import standardize

INDICATIVE_NOTE = (
    "Accuracies are indicative only: fold assignment, seeds and preprocessing "
    "differ from any published benchmark, so values are not directly comparable."
)


@dataclass(frozen=True)
class IngestSpec:
    """How to read a delimited text file.

    ``label_column`` is a 0-based index, ``"last"`` or ``"first"``.
    """

    path: str
    has_header: bool = False
    label_column: Union[int, str] = "last"
    delimiter: str = ","
    normalize: str = "none"

    def __post_init__(self) -> None:
        if len(self.delimiter) != 1:
            raise ValueError(f"delimiter must be a single character, got {self.delimiter!r}")
        if self.normalize not in ("none", "standardize"):
            raise ValueError(f"normalize must be 'none' or 'standardize', got {self.normalize!r}")
        if isinstance(self.label_column, str) and self.label_column not in ("last", "first"):
            try:
                object.__setattr__(self, "label_column", int(self.label_column))
            except ValueError:
                raise ValueError(f"label_column must be an index, 'first' or 'last', got {self.label_column!r}") from None

    def to_dict(self) -> dict:
        return asdict(self)


def _label_index(spec: IngestSpec, width: int) -> int:
    if spec.label_column == "last":
        return width - 1
    if spec.label_column == "first":
        return 0
    j = int(spec.label_column)
    if j < 0:
        j += width
    if not 0 <= j < width:
        raise DataError(f"label column {spec.label_column} out of range for {width} columns")
    return j


def load_csv(spec: IngestSpec) -> Dataset:
    """Read a labelled feature table.

    Row order is preserved. Error messages cite 1-based file line and column
    numbers. With ``normalize="standardize"`` every column is z-scored over
    the whole file.
    """
    path = Path(spec.path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None

    rows: list[tuple[int, list[str]]] = []
    for lineno, cells in enumerate(csv.reader(text.splitlines(), delimiter=spec.delimiter), start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        rows.append((lineno, cells))
    if spec.has_header and rows:
        rows = rows[1:]
    if len(rows) < 2:
        raise DataError(f"{path}: need at least 2 data rows, found {len(rows)}")

    width = len(rows[0][1])
    if width < 2:
        raise DataError(f"{path}: need a label column and at least one feature column")
    label_at = _label_index(spec, width)
    features = np.empty((len(rows), width - 1), dtype=np.float64)
    labels = []
    for i, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise DataError(f"{path}: row {lineno} has {len(cells)} columns, expected {width}")
        j_out = 0
        for j, cell in enumerate(cells):
            if j == label_at:
                labels.append(cell.strip())
                continue
            try:
                value = float(cell)
            except ValueError:
                raise DataError(f"{path}: row {lineno}, column {j + 1}: cannot parse {cell!r} as a number") from None
            if not math.isfinite(value):
                raise DataError(f"{path}: row {lineno}, column {j + 1}: non-finite value {cell!r}")
            features[i, j_out] = value
            j_out += 1

    data = Dataset.from_arrays(features, labels)
    if spec.normalize == "standardize":
        data = standardize(data)[0]
    return data


def dump_csv(data: Dataset, path: Union[str, Path], delimiter: str = ",") -> None:
    """Write the canonical dump: shortest round-trip floats, label last, no header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        for x, code in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in x] + [str(data.class_ids[code])])


@dataclass
class RunManifest:
    """Everything needed to regenerate a report.

    ``timings`` is wall-clock seconds per phase and is only filled on request,
    since it is the one field that differs between otherwise identical runs.
    """

    command: str
    dataset_fingerprint: str
    ingest: dict
    config: dict
    seed: int
    version: str = __version__
    timings: Optional[dict] = None

    def to_dict(self) -> dict:
        out = asdict(self)
        if out["timings"] is None:
            del out["timings"]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> RunManifest:
        return cls(**d)


@dataclass
class BenchReport:
    dataset: dict
    manifest: RunManifest
    algorithms: list[AlgorithmReport]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "manifest": self.manifest.to_dict(),
            "algorithms": [a.to_dict() for a in self.algorithms],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> BenchReport:
        return cls(
            dataset=d["dataset"],
            manifest=RunManifest.from_dict(d["manifest"]),
            algorithms=[AlgorithmReport.from_dict(a) for a in d["algorithms"]],
            notes=list(d.get("notes", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def dataset_summary(data: Dataset, path: str) -> dict:
    return {
        "path": path,
        "fingerprint": data.fingerprint(),
        "n": data.n,
        "d": data.d,
        "c": data.c,
        "class_ids": [str(c) for c in data.class_ids],
        "class_sizes": data.class_sizes().tolist(),
    }


def _fmt(value: Optional[float], digits: int = 4) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def format_table(reports: list[AlgorithmReport]) -> str:
    """Aligned plain-text summary, one line per algorithm."""
    header = ("algorithm", "k", "mu", "acc", "std", "sen", "spe")
    lines = [header]
    for r in reports:
        lines.append((
            r.name,
            "-" if r.k is None else str(r.k),
            "-" if r.mu is None else f"{r.mu:g}",
            _fmt(r.mean_acc),
            _fmt(r.std),
            _fmt(r.sen),
            _fmt(r.spe),
        ))
    widths = [max(len(row[i]) for row in lines) for i in range(len(header))]
    out = []
    for row in lines:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        out.append("  ".join(cells).rstrip())
    return "\n".join(out) + "\n"


SWEEP_COLUMNS = ("algorithm", "k", "mu", "mean_acc", "std", "seed")


def sweep_rows(cells: list, seed: int) -> list[list[str]]:
    rows = []
    for cell in cells:
        rows.append([
            cell.algorithm,
            "" if cell.k is None else str(cell.k),
            "" if cell.mu is None else repr(float(cell.mu)),
            repr(float(cell.report.mean_acc)),
            repr(float(cell.report.std)),
            str(seed),
        ])
    return rows


def write_sweep_csv(rows: list[list[str]], fh: Any) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    writer.writerows(rows)
