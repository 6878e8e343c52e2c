"""Command-line interface: ``bench``, ``sweep``, ``check`` and ``replay``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from . import __version__
from .classifiers import TIE_RULES, ClassifierConfig, canonical_algorithm
from .core import DataError, Dataset, compute_class_centers
from .evaluation import DEFAULT_MU_GRID, cross_validate, sweep
from .io import (
    INDICATIVE_NOTE,
    BenchReport,
    IngestSpec,
    RunManifest,
    dataset_summary,
    format_table,
    load_csv,
    sweep_rows,
    write_sweep_csv,
)
from .metrics import NumericError
from .zdistance import mu_separation_threshold

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
ALL_ALGOS = "knn,ncp,z0-knn,z-knn"


class UsageError(ValueError):
    pass


def parse_int_list(text: str) -> list[int]:
    """``"5"``, ``"1..10"`` or ``"1,3,5"`` (ranges inclusive)."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as an integer list or range") from None
    if not out:
        raise UsageError(f"empty integer list {text!r}")
    return out


def parse_float_list(text: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"cannot parse {text!r} as a list of numbers") from None
    if not values:
        raise UsageError(f"empty number list {text!r}")
    return values


def parse_algos(text: str) -> list[str]:
    try:
        algos = [canonical_algorithm(a) for a in text.split(",") if a.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not algos:
        raise UsageError("no algorithm given")
    return list(dict.fromkeys(algos))


def _ingest_from_args(args: argparse.Namespace) -> IngestSpec:
    try:
        return IngestSpec(
            path=args.data,
            has_header=args.header,
            label_column=args.label_column,
            delimiter=args.delimiter,
            normalize=args.normalize,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_raw(ingest: IngestSpec) -> Dataset:
    # normalization is applied per training fold, never to the whole file
    return load_csv(replace(ingest, normalize="none"))


def run_bench_config(ingest: IngestSpec, config: dict, seed: int, timings: bool = False) -> tuple[BenchReport, str]:
    """Run the benchmark described by a manifest; returns (report, text table)."""
    phases: dict[str, float] = {}
    t0 = time.perf_counter()
    data = _load_raw(ingest)
    phases["ingest"] = time.perf_counter() - t0

    positive = config.get("positive_class")
    if positive is not None and data.c != 2:
        raise UsageError("--positive-class needs a two-class dataset")
    reports = []
    for algo in config["algorithms"]:
        cfg = ClassifierConfig(algo, k=config["k"], mu=config["mu"], tie_rule=config["tie_rule"])
        t0 = time.perf_counter()
        reports.append(cross_validate(
            data, cfg, seed,
            normalize=ingest.normalize,
            positive_class=positive,
            repeats=config["repeats"],
            n_folds=config["folds"],
            n_jobs=config.get("jobs", 1),
        ))
        phases[f"cv:{reports[-1].name}"] = time.perf_counter() - t0

    notes = [INDICATIVE_NOTE]
    if data.c == 2:
        notes.append(f"Sensitivity/specificity use positive class {reports[0].positive_class!r}.")
    else:
        notes.append(f"Sensitivity/specificity omitted: dataset has {data.c} classes, not 2.")
    manifest = RunManifest(
        command="bench",
        dataset_fingerprint=data.fingerprint(),
        ingest=ingest.to_dict(),
        config={k: v for k, v in config.items() if k != "jobs"},
        seed=seed,
        timings={k: round(v, 6) for k, v in phases.items()} if timings else None,
    )
    report = BenchReport(dataset_summary(data, ingest.path), manifest, reports, notes)
    return report, format_table(reports)


def run_sweep_config(ingest: IngestSpec, config: dict, seed: int) -> tuple[str, RunManifest]:
    """Run the sweep described by a manifest; returns (CSV text, manifest)."""
    data = _load_raw(ingest)
    rows = []
    for algo in config["algorithms"]:
        cells = sweep(
            data, algo, config["k"], config["mu"], seed,
            normalize=ingest.normalize,
            repeats=config["repeats"],
            n_folds=config["folds"],
            n_jobs=config.get("jobs", 1),
        )
        rows.extend(sweep_rows(cells, seed))
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    manifest = RunManifest(
        command="sweep",
        dataset_fingerprint=data.fingerprint(),
        ingest=ingest.to_dict(),
        config={k: v for k, v in config.items() if k != "jobs"},
        seed=seed,
    )
    return buf.getvalue(), manifest


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_bench(args: argparse.Namespace) -> int:
    ks = parse_int_list(args.k)
    mus = parse_float_list(args.mu)
    if len(ks) != 1 or len(mus) != 1:
        raise UsageError("bench takes a single --k and --mu; use sweep for grids")
    config = {
        "algorithms": parse_algos(args.algo),
        "k": ks[0],
        "mu": mus[0],
        "folds": args.folds,
        "repeats": args.repeats,
        "positive_class": args.positive_class,
        "tie_rule": args.tie_rule,
        "jobs": args.jobs,
    }
    report, table = run_bench_config(_ingest_from_args(args), config, args.seed, args.timings)
    to_stdout = args.out is None or args.out == "-"
    table_stream = sys.stderr if to_stdout else sys.stdout
    table_stream.write(table)
    table_stream.write(f"seed={args.seed}\n")
    for note in report.notes:
        table_stream.write(f"note: {note}\n")
    _write(args.out, report.to_json())
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = {
        "algorithms": parse_algos(args.algo),
        "k": parse_int_list(args.k),
        "mu": parse_float_list(args.mu),
        "folds": args.folds,
        "repeats": args.repeats,
        "jobs": args.jobs,
    }
    text, manifest = run_sweep_config(_ingest_from_args(args), config, args.seed)
    _write(args.out, text)
    if args.out not in (None, "-"):
        Path(args.out + ".manifest.json").write_text(
            json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    print(f"seed={args.seed}", file=sys.stderr)
    return EXIT_OK


def _threshold_text(value: float, c: int) -> str:
    if c == 1:
        return "0 (vacuous: single class, no interclass pairs)"
    if math.isinf(value):
        return "unattainable"
    return f"{value:.6g}"


def check_report(data: Dataset) -> dict:
    """Separability diagnostics for a dataset, as a JSON-ready dict."""
    centers = compute_class_centers(data)
    ids = [str(c) for c in data.class_ids]
    thresholds = {}
    for variant in ("z0", "z"):
        value = mu_separation_threshold(data, centers, variant)
        thresholds[variant] = {
            "value": None if math.isinf(value) else value,
            "status": "vacuous" if data.c == 1 else ("unattainable" if math.isinf(value) else "finite"),
            "text": _threshold_text(value, data.c),
        }
    return {
        "n": data.n,
        "d": data.d,
        "c": data.c,
        "class_ids": ids,
        "class_sizes": data.class_sizes().tolist(),
        "center_distances": cdist(centers.per_class, centers.per_class).tolist(),
        "global_to_center": cdist(centers.global_center[None, :], centers.per_class)[0].tolist(),
        "mu_threshold": thresholds,
    }


def format_check(rep: dict) -> str:
    ids = rep["class_ids"]
    w = max(max(len(i) for i in ids), 10)
    lines = [f"n={rep['n']}  d={rep['d']}  c={rep['c']}", "", "class sizes:"]
    for cid, size in zip(ids, rep["class_sizes"]):
        lines.append(f"  {cid.ljust(w)}  {size}")
    lines += ["", "center-to-center distances:", "  " + " " * w + "".join(i.rjust(w + 2) for i in ids)]
    for cid, row in zip(ids, rep["center_distances"]):
        lines.append("  " + cid.ljust(w) + "".join(f"{v:.4f}".rjust(w + 2) for v in row))
    lines += ["", "global center to class center (smallest attracts reachable-KNN votes):"]
    for cid, v in zip(ids, rep["global_to_center"]):
        lines.append(f"  {cid.ljust(w)}  {v:.6f}")
    lines += ["", "mu separation threshold:"]
    for variant, info in rep["mu_threshold"].items():
        lines.append(f"  {variant.ljust(3)} {info['text']}")
    return "\n".join(lines) + "\n"


def cmd_check(args: argparse.Namespace) -> int:
    data = load_csv(_ingest_from_args(args))
    rep = check_report(data)
    sys.stdout.write(format_check(rep))
    if args.out is not None:
        Path(args.out).write_text(json.dumps(rep, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    manifest = RunManifest.from_dict(doc.get("manifest", doc))
    ingest = IngestSpec(**manifest.ingest)
    config = dict(manifest.config, jobs=args.jobs)
    if manifest.command == "bench":
        report, table = run_bench_config(ingest, config, manifest.seed, manifest.timings is not None)
        if report.manifest.dataset_fingerprint != manifest.dataset_fingerprint:
            raise DataError("dataset content differs from the manifest fingerprint")
        _write(args.out, report.to_json())
    elif manifest.command == "sweep":
        text, new = run_sweep_config(ingest, config, manifest.seed)
        if new.dataset_fingerprint != manifest.dataset_fingerprint:
            raise DataError("dataset content differs from the manifest fingerprint")
        _write(args.out, text)
    else:
        raise UsageError(f"unknown manifest command {manifest.command!r}")
    return EXIT_OK


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="delimited text file, one row per sample")
    p.add_argument("--header", action="store_true", help="first row is a header")
    p.add_argument("--label-column", default="last", help="0-based index, 'first' or 'last' (default)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--normalize", choices=("none", "standardize"), default="none")


def _add_cv_args(p: argparse.ArgumentParser, algo_default: str, k_default: str, mu_default: str) -> None:
    p.add_argument("--algo", default=algo_default, help="comma list of knn, ncp, z0-knn, z-knn")
    p.add_argument("--k", default=k_default)
    p.add_argument("--mu", default=mu_default)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=1, help="CV repeats with derived seeds")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1, help="threads for fold evaluation")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reachknn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="cross-validate classifiers and write a JSON report")
    _add_data_args(p)
    _add_cv_args(p, ALL_ALGOS, "5", "1")
    p.add_argument("--positive-class", default=None, help="positive label for sensitivity")
    p.add_argument("--tie-rule", choices=TIE_RULES, default=TIE_RULES[0])
    p.add_argument("--timings", action="store_true", help="embed wall-clock timings in the manifest")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="K x mu grid, one CSV row per cell")
    _add_data_args(p)
    _add_cv_args(p, "z-knn", "1..10", ",".join(f"{m:g}" for m in DEFAULT_MU_GRID))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="class-separability diagnostics")
    _add_data_args(p)
    p.add_argument("--out", default=None, help="also write the diagnostics as JSON")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("replay", help="re-run a bench report or sweep manifest")
    p.add_argument("manifest", help="bench report JSON or sweep .manifest.json")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"reachknn: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"reachknn: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"reachknn: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"reachknn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
