"""Plot-ready report bundle: CSV/JSON emission for every analysis product.

Everything written here is a deterministic function of the analysis inputs;
wall-clock information is confined to the manifest so that repeated runs
with the same seed produce byte-identical data files.
"""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from .advmap import AdversarialMap
from .dataset import FLOAT_FMT
from .distances import DistanceMatrix
from .susceptible import AccuracyReport, SusceptibilityRanking
from .transition import EntropyReport


def _fmt(v: float) -> str:
    if np.isinf(v):
        return "inf"
    return FLOAT_FMT.format(v)


def write_matrix_csv(matrix: DistanceMatrix, path) -> None:
    """n x n CSV with a leading header row/column of class indices."""
    n = matrix.n_classes
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class"] + [str(j) for j in range(n)])
        for i in range(n):
            writer.writerow([str(i)] + [_fmt(v) for v in matrix.values[i]])


def write_affinity_csv(affinity: np.ndarray, path) -> None:
    n = affinity.shape[0]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class"] + [str(j) for j in range(n)])
        for i in range(n):
            writer.writerow([str(i)] + [_fmt(v) for v in affinity[i]])


def write_map_csv(amap: AdversarialMap, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "weight"])
        for s, t, w in sorted(amap.edges):
            writer.writerow([s, t, _fmt(w)])


def write_map_json(amap: AdversarialMap, path) -> None:
    Path(path).write_text(amap.to_json() + "\n", encoding="utf-8")


def write_entropy_csv(report: EntropyReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["measure", "epsilon", "records", "misclassified", "e_m", "mean_nll", "surprise_events"]
        )
        for e in report.entries:
            writer.writerow(
                [
                    e.measure,
                    "" if e.epsilon is None else _fmt(e.epsilon),
                    e.records,
                    e.misclassified,
                    _fmt(e.e_m),
                    _fmt(e.mean_nll),
                    e.surprise_events,
                ]
            )


def write_displacement_csv(rows, path) -> None:
    """rows: iterable of (epsilon, misclassified, displacement, f_d)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epsilon", "misclassified", "displacement", "forbidden_distance"])
        for eps, flips, disp, f_d in rows:
            writer.writerow([_fmt(eps), flips, _fmt(disp), _fmt(f_d)])


def write_accuracy_csv(report: AccuracyReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epsilon", "k", "hits", "misclassified", "accuracy", "baseline"])
        for c in report.cells:
            writer.writerow(
                [
                    "" if c.epsilon is None else _fmt(c.epsilon),
                    c.k,
                    c.hits,
                    c.misclassified,
                    _fmt(c.accuracy),
                    _fmt(report.baseline(c.k)),
                ]
            )


def write_ranking_json(ranking: SusceptibilityRanking, path) -> None:
    doc = {
        "n_classes": ranking.n_classes,
        "global": [{"class": c, "probability": p} for c, p in ranking.global_rank],
        "per_class": {
            str(i): [{"class": c, "probability": p} for c, p in row]
            for i, row in enumerate(ranking.per_class)
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_kl_trace_csv(kl_trace: np.ndarray, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "kl"])
        for i, v in enumerate(kl_trace):
            writer.writerow([i, _fmt(v)])


def write_manifest(path, config_echo: dict, timings: dict, extra: dict | None = None) -> None:
    """Provenance record; the only file allowed to carry wall-clock values."""
    doc = {
        "tool": "advgeo",
        "version": __import__("advgeo").__version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": config_echo,
        "timings_seconds": timings,
    }
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
