"""Domain types, file ingestion, synthetic blob generation and attack simulation.

Datasets are immutable collections of labeled N-dimensional feature vectors.
Two serializations are supported: a CSV with header ``id,label,f0,...,f{N-1}``
and a compact binary format (magic ``ADVG``, version 0x01).  Attack logs are
CSVs with header ``id,epsilon,actual,adversarial``.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"ADVG"
BINARY_VERSION = 1

# Shortest-exact is not portable across writers; 17 significant digits is.
FLOAT_FMT = "{:.17g}"


class ValidationError(ValueError):
    """A file or in-memory structure violates a documented invariant."""


@dataclass(frozen=True)
class DataPoint:
    """One labeled feature vector."""

    id: int
    label: int
    features: np.ndarray

    def __post_init__(self):
        if self.id < 0:
            raise ValidationError(f"point id must be non-negative, got {self.id}")
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim != 1:
            raise ValidationError(f"point {self.id}: features must be a vector")
        if not np.all(np.isfinite(feats)):
            raise ValidationError(f"point {self.id}: non-finite feature component")
        feats.flags.writeable = False
        object.__setattr__(self, "features", feats)


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable labeled dataset: ids, labels and an (m, N) feature matrix."""

    ids: np.ndarray
    labels: np.ndarray
    features: np.ndarray
    n_classes: int
    class_index: dict[int, np.ndarray] = field(repr=False)

    @staticmethod
    def from_arrays(ids, labels, features, n_classes=None) -> "LabeledDataset":
        ids = np.asarray(ids, dtype=np.uint64)
        labels = np.asarray(labels, dtype=np.int64)
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise ValidationError("features must be a 2-D (points x dims) array")
        m, n_dims = features.shape
        if n_dims < 1:
            raise ValidationError("dimensionality must be positive")
        if ids.shape != (m,) or labels.shape != (m,):
            raise ValidationError("ids, labels and features disagree on point count")
        if m == 0:
            raise ValidationError("dataset has no points")
        if len(np.unique(ids)) != m:
            raise ValidationError("point ids are not unique")
        if not np.all(np.isfinite(features)):
            bad = int(np.where(~np.all(np.isfinite(features), axis=1))[0][0])
            raise ValidationError(f"non-finite feature in point at index {bad}")
        if labels.min() < 0:
            raise ValidationError("negative class label")
        if n_classes is None:
            n_classes = int(labels.max()) + 1
        if labels.max() >= n_classes:
            raise ValidationError(
                f"label {int(labels.max())} out of range for n_classes={n_classes}"
            )
        class_index = {}
        for c in range(n_classes):
            members = ids[labels == c]
            if members.size == 0:
                raise ValidationError(f"class {c} is empty")
            members.flags.writeable = False
            class_index[c] = members
        for a in (ids, labels, features):
            a.flags.writeable = False
        return LabeledDataset(ids, labels, features, int(n_classes), class_index)

    @property
    def n_points(self) -> int:
        return self.features.shape[0]

    @property
    def n_dims(self) -> int:
        return self.features.shape[1]

    @property
    def points(self) -> list[DataPoint]:
        return [
            DataPoint(int(i), int(l), f)
            for i, l, f in zip(self.ids, self.labels, self.features)
        ]


@dataclass(frozen=True)
class AttackRecord:
    """Outcome of attacking one point at one perturbation magnitude."""

    id: int
    epsilon: float
    actual: int
    adversarial: int

    @property
    def misclassified(self) -> bool:
        return self.actual != self.adversarial


@dataclass(frozen=True)
class AttackLog:
    """Per-sample attack outcomes over one or more epsilon values."""

    records: tuple[AttackRecord, ...]
    n_classes: int
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for r in self.records:
            if not np.isfinite(r.epsilon) or r.epsilon < 0:
                raise ValidationError(f"record {r.id}: epsilon must be finite and >= 0")
            if not (0 <= r.actual < self.n_classes and 0 <= r.adversarial < self.n_classes):
                raise ValidationError(
                    f"record {r.id}: class index out of range for n_classes={self.n_classes}"
                )
            key = (r.id, r.epsilon)
            if key in seen:
                raise ValidationError(f"duplicate (id, epsilon) pair {key}")
            seen.add(key)

    @property
    def misclassified(self) -> tuple[AttackRecord, ...]:
        return tuple(r for r in self.records if r.misclassified)

    @property
    def epsilon_values(self) -> list[float]:
        return sorted({r.epsilon for r in self.records})


# ---------------------------------------------------------------------------
# CSV / binary ingestion


def _read_comments(path: Path) -> tuple[dict[str, str], int]:
    """Leading '# key=value' lines; returns (metadata, lines to skip)."""
    meta, skip = {}, 0
    with open(path, newline="", encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            skip += 1
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
    return meta, skip


def load_dataset(path, format: str | None = None, n_classes: int | None = None) -> LabeledDataset:
    """Load a dataset from CSV or binary; format inferred from extension if omitted."""
    path = Path(path)
    if format is None:
        format = "binary" if path.suffix in {".bin", ".advg"} else "csv"
    if format == "binary":
        return _load_dataset_binary(path)
    if format != "csv":
        raise ValidationError(f"unknown dataset format {format!r}")

    meta, skip = _read_comments(path)
    if n_classes is None and "n_classes" in meta:
        n_classes = int(meta["n_classes"])
    ids, labels, rows = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for _ in range(skip):
            fh.readline()
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file")
        if len(header) < 3 or header[:2] != ["id", "label"]:
            raise ValidationError(f"{path}: bad header {header!r}")
        n_dims = len(header) - 2
        expected = ["f%d" % i for i in range(n_dims)]
        if header[2:] != expected:
            raise ValidationError(f"{path}: feature columns must be f0..f{n_dims - 1}")
        for lineno, row in enumerate(reader, start=skip + 2):
            if not row:
                continue
            if len(row) != n_dims + 2:
                raise ValidationError(
                    f"{path}:{lineno}: expected {n_dims + 2} fields, got {len(row)}"
                )
            try:
                ids.append(int(row[0]))
                labels.append(int(row[1]))
                rows.append([float(v) for v in row[2:]])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    try:
        return LabeledDataset.from_arrays(ids, labels, np.array(rows), n_classes)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def save_dataset(dataset: LabeledDataset, path, format: str | None = None) -> None:
    path = Path(path)
    if format is None:
        format = "binary" if path.suffix in {".bin", ".advg"} else "csv"
    if format == "binary":
        _save_dataset_binary(dataset, path)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# n_classes={dataset.n_classes}\n")
        writer = csv.writer(fh)
        writer.writerow(["id", "label"] + ["f%d" % i for i in range(dataset.n_dims)])
        for i, l, feats in zip(dataset.ids, dataset.labels, dataset.features):
            writer.writerow([int(i), int(l)] + [FLOAT_FMT.format(v) for v in feats])


_BIN_HEADER = struct.Struct("<4sBIII")


def _save_dataset_binary(dataset: LabeledDataset, path: Path) -> None:
    rec = np.dtype(
        [("id", "<u8"), ("label", "<u4"), ("features", "<f8", (dataset.n_dims,))]
    )
    body = np.empty(dataset.n_points, dtype=rec)
    body["id"] = dataset.ids
    body["label"] = dataset.labels
    body["features"] = dataset.features
    with open(path, "wb") as fh:
        fh.write(
            _BIN_HEADER.pack(
                MAGIC, BINARY_VERSION, dataset.n_points, dataset.n_dims, dataset.n_classes
            )
        )
        fh.write(body.tobytes())


def _load_dataset_binary(path: Path) -> LabeledDataset:
    raw = Path(path).read_bytes()
    if len(raw) < _BIN_HEADER.size:
        raise ValidationError(f"{path}: truncated header")
    magic, version, m, n_dims, n_classes = _BIN_HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValidationError(f"{path}: bad magic {magic!r}")
    if version != BINARY_VERSION:
        raise ValidationError(f"{path}: unsupported version {version}")
    rec = np.dtype([("id", "<u8"), ("label", "<u4"), ("features", "<f8", (n_dims,))])
    expected = _BIN_HEADER.size + m * rec.itemsize
    if len(raw) != expected:
        raise ValidationError(f"{path}: expected {expected} bytes, got {len(raw)}")
    body = np.frombuffer(raw, dtype=rec, offset=_BIN_HEADER.size)
    try:
        return LabeledDataset.from_arrays(
            body["id"], body["label"].astype(np.int64), body["features"], n_classes
        )
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def load_attack_log(path, n_classes: int | None = None) -> AttackLog:
    """Load an attack log CSV; clean records (actual == adversarial) are kept."""
    path = Path(path)
    meta, skip = _read_comments(path)
    if n_classes is None and "n_classes" in meta:
        n_classes = int(meta["n_classes"])
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        for _ in range(skip):
            fh.readline()
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file")
        if header != ["id", "epsilon", "actual", "adversarial"]:
            raise ValidationError(f"{path}: bad header {header!r}")
        for lineno, row in enumerate(reader, start=skip + 2):
            if not row:
                continue
            if len(row) != 4:
                raise ValidationError(f"{path}:{lineno}: expected 4 fields")
            try:
                rec = AttackRecord(int(row[0]), float(row[1]), int(row[2]), int(row[3]))
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
            if rec.epsilon < 0:
                raise ValidationError(f"{path}:{lineno}: negative epsilon")
            records.append(rec)
    if n_classes is None:
        n_classes = 1 + max(
            (max(r.actual, r.adversarial) for r in records), default=0
        )
    try:
        return AttackLog(tuple(records), n_classes, meta)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def save_attack_log(log: AttackLog, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# n_classes={log.n_classes}\n")
        for k, v in log.metadata.items():
            if k != "n_classes":
                fh.write(f"# {k}={v}\n")
        writer = csv.writer(fh)
        writer.writerow(["id", "epsilon", "actual", "adversarial"])
        for r in log.records:
            writer.writerow([r.id, FLOAT_FMT.format(r.epsilon), r.actual, r.adversarial])


# ---------------------------------------------------------------------------
# Synthetic data


def line_centers(n_classes: int, gaps, n_dims: int) -> np.ndarray:
    """Centers on the first axis with the given consecutive gaps."""
    gaps = np.asarray(gaps, dtype=np.float64)
    if gaps.shape != (n_classes - 1,):
        raise ValidationError("need n_classes - 1 gaps")
    centers = np.zeros((n_classes, n_dims))
    centers[1:, 0] = np.cumsum(gaps)
    return centers


def generate_blobs(
    n_classes: int,
    per_class: int,
    n_dims: int,
    centers,
    spread: float,
    seed: int,
) -> LabeledDataset:
    """Isotropic Gaussian clusters, deterministic for a fixed seed.

    ``centers`` is an (n_classes, n_dims) array, or a scalar spacing placing
    centers on the first axis at multiples of that spacing.  Each point's
    noise is drawn from an RNG keyed by (seed, point id), so the result does
    not depend on evaluation order.
    """
    if spread < 0:
        raise ValidationError(f"spread must be >= 0, got {spread}")
    if np.isscalar(centers):
        centers = line_centers(n_classes, [float(centers)] * (n_classes - 1), n_dims)
    centers = np.asarray(centers, dtype=np.float64)
    if centers.shape != (n_classes, n_dims):
        raise ValidationError(
            f"centers shape {centers.shape} != ({n_classes}, {n_dims})"
        )
    m = n_classes * per_class
    ids = np.arange(m)
    labels = ids // per_class
    features = centers[labels].copy()
    if spread > 0:
        for pid in ids:
            rng = np.random.default_rng([seed, int(pid)])
            features[pid] += spread * rng.standard_normal(n_dims)
    return LabeledDataset.from_arrays(ids, labels, features, n_classes)


def simulate_attack(
    dataset: LabeledDataset,
    transition,
    epsilon_values,
    seed: int,
    success_prob=1.0,
) -> AttackLog:
    """Sample an attack log: each point flips to a class drawn from the
    transition row of its label, with a per-epsilon success probability.

    ``success_prob`` may be a scalar, a sequence aligned with
    ``epsilon_values``, or a callable epsilon -> probability.  Unsuccessful
    attacks keep actual == adversarial.  Deterministic: each (point, epsilon)
    draws from an RNG keyed by (seed, point id, epsilon index).
    """
    epsilon_values = [float(e) for e in epsilon_values]
    probs = np.asarray(transition.p, dtype=np.float64)
    if probs.shape != (dataset.n_classes, dataset.n_classes):
        raise ValidationError("transition shape does not match dataset classes")
    rowsum = probs.sum(axis=1)
    if not np.allclose(rowsum, 1.0, atol=1e-9):
        raise ValidationError("transition rows must sum to 1")
    cdf = np.cumsum(probs, axis=1)

    def prob_for(eidx: int, eps: float) -> float:
        if callable(success_prob):
            p = success_prob(eps)
        elif np.isscalar(success_prob):
            p = success_prob
        else:
            p = success_prob[eidx]
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"success probability {p} outside [0, 1]")
        return float(p)

    records = []
    for eidx, eps in enumerate(epsilon_values):
        p_flip = prob_for(eidx, eps)
        for pid, label in zip(dataset.ids, dataset.labels):
            pid, label = int(pid), int(label)
            rng = np.random.default_rng([seed, pid, eidx])
            if rng.random() < p_flip:
                adv = int(np.searchsorted(cdf[label], rng.random(), side="right"))
                adv = min(adv, dataset.n_classes - 1)
            else:
                adv = label
            records.append(AttackRecord(pid, eps, label, adv))
    return AttackLog(tuple(records), dataset.n_classes, {"attack": "simulated"})


def subsample(dataset: LabeledDataset, cap_per_class: int, seed: int) -> LabeledDataset:
    """Seeded stratified subsample keeping at most cap_per_class points per class."""
    if cap_per_class < 1:
        raise ValidationError("cap_per_class must be >= 1")
    keep = []
    for c in range(dataset.n_classes):
        idx = np.flatnonzero(dataset.labels == c)
        if idx.size > cap_per_class:
            rng = np.random.default_rng([seed, c])
            idx = np.sort(rng.choice(idx, size=cap_per_class, replace=False))
        keep.append(idx)
    keep = np.concatenate(keep)
    keep.sort()
    return LabeledDataset.from_arrays(
        dataset.ids[keep], dataset.labels[keep], dataset.features[keep], dataset.n_classes
    )
