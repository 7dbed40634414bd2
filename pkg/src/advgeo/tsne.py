"""From-scratch t-SNE to 2-D, exact O(m^2) gradients.

Gaussian conditional affinities with per-point bandwidths found by binary
search on the row entropy, symmetrized to joint probabilities, then gradient
descent on KL(P||Q) with the Student-t low-dimensional kernel.  After the
early-exaggeration phase a backtracking safeguard keeps the KL trace
non-increasing, which the embedding contract requires.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import FLOAT_FMT, LabeledDataset, ValidationError
from .distances import DistanceMatrix, centroids_of_coords, euclidean_distance_matrix

_EPS = 1e-12


@dataclass(frozen=True)
class TsneParams:
    perplexity: float = 30.0
    max_iters: int = 1000
    learning_rate: float = 200.0
    momentum_initial: float = 0.5
    momentum_final: float = 0.8
    momentum_switch_iter: int = 250
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    seed: int = 0

    def __post_init__(self):
        for name in (
            "perplexity",
            "max_iters",
            "learning_rate",
            "momentum_initial",
            "momentum_final",
            "early_exaggeration",
        ):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric joint probabilities with the bandwidths that produced them."""

    p: np.ndarray
    sigmas: np.ndarray
    perplexity: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValidationError("joint affinities must be >= 0 and sum to 1")
        if np.any(np.diag(p) != 0):
            raise ValidationError("affinity diagonal must be 0")
        if not np.allclose(p, p.T, atol=1e-12):
            raise ValidationError("joint affinities must be symmetric")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class Embedding2D:
    coords: np.ndarray
    labels: np.ndarray
    ids: np.ndarray
    kl_trace: np.ndarray
    params: TsneParams | None = None

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValidationError("embedding coordinates must be (m, 2)")
        if not np.all(np.isfinite(coords)):
            raise ValidationError("non-finite embedding coordinate")
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

    @property
    def n_points(self) -> int:
        return self.coords.shape[0]


def _squared_distances(x: np.ndarray) -> np.ndarray:
    sq = (x**2).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _row_affinities(d2_row: np.ndarray, beta: float, self_idx: int):
    """Conditional p_{.|i} at precision beta = 1/(2 sigma^2); returns (p, 2^H)."""
    logits = -beta * d2_row
    logits[self_idx] = -np.inf
    logits -= logits.max()
    w = np.exp(logits)
    w[self_idx] = 0.0
    total = w.sum()
    p = w / total
    nz = p > 0
    entropy = -(p[nz] * np.log2(p[nz])).sum()
    return p, 2.0**entropy


def conditional_affinities(
    dataset: LabeledDataset | np.ndarray, perplexity: float, max_search_iters: int = 200
) -> AffinityMatrix:
    """Bandwidth search per point, then symmetrize to joints p_ij = (p_j|i + p_i|j)/2m."""
    x = dataset.features if isinstance(dataset, LabeledDataset) else np.asarray(dataset)
    m = x.shape[0]
    if m < 3:
        raise ValidationError("need at least 3 points")
    if not 0 < perplexity < m:
        raise ValidationError(f"perplexity must be in (0, {m}), got {perplexity}")
    d2 = _squared_distances(x)
    cond = np.zeros((m, m))
    sigmas = np.zeros(m)
    for i in range(m):
        beta, lo, hi = 1.0, 0.0, np.inf
        p = None
        for _ in range(max_search_iters):
            p, realized = _row_affinities(d2[i].copy(), beta, i)
            if abs(realized - perplexity) <= 1e-6:
                break
            if realized > perplexity:  # too flat: raise precision
                lo = beta
                beta = beta * 2.0 if np.isinf(hi) else (lo + hi) / 2.0
            else:
                hi = beta
                beta = (lo + hi) / 2.0
        else:
            raise ValidationError(
                f"bandwidth search did not converge for point index {i}"
            )
        cond[i] = p
        sigmas[i] = np.sqrt(1.0 / (2.0 * beta))
    joint = (cond + cond.T) / (2.0 * m)
    return AffinityMatrix(joint, sigmas, float(perplexity))


def _q_weights(y: np.ndarray):
    w = 1.0 / (1.0 + _squared_distances(y))
    np.fill_diagonal(w, 0.0)
    z = w.sum()
    return w, w / max(z, _EPS)


def kl_divergence(p: np.ndarray, y: np.ndarray) -> float:
    _, q = _q_weights(y)
    mask = p > 0
    return float((p[mask] * np.log(p[mask] / np.maximum(q[mask], _EPS))).sum())


def kl_gradient(p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Analytic gradient of KL(P||Q) w.r.t. the 2-D coordinates."""
    w, q = _q_weights(y)
    pq = (p - q) * w
    return 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)


def tsne_embed(dataset: LabeledDataset, params: TsneParams | None = None) -> Embedding2D:
    """Embed the dataset in 2-D; deterministic for a fixed params.seed."""
    params = params or TsneParams()
    m = dataset.n_points
    affinity = conditional_affinities(dataset, params.perplexity)
    p = affinity.p

    rng = np.random.default_rng(params.seed)
    y = 1e-4 * rng.standard_normal((m, 2))
    velocity = np.zeros_like(y)
    kl_trace = np.empty(params.max_iters)
    kl_prev = kl_divergence(p, y)

    for t in range(params.max_iters):
        exaggerating = t < params.exaggeration_iters
        p_eff = p * params.early_exaggeration if exaggerating else p
        momentum = (
            params.momentum_initial
            if t < params.momentum_switch_iter
            else params.momentum_final
        )
        grad = kl_gradient(p_eff, y)
        velocity = momentum * velocity - params.learning_rate * grad
        y_new = y + velocity
        kl_new = kl_divergence(p, y_new)

        if not exaggerating and kl_new > kl_prev:
            # Momentum overshot: fall back to a plain backtracked gradient step.
            step = params.learning_rate
            velocity = np.zeros_like(y)
            grad = kl_gradient(p, y)
            accepted = False
            for _ in range(60):
                y_try = y - step * grad
                kl_try = kl_divergence(p, y_try)
                if kl_try <= kl_prev:
                    y_new, kl_new, accepted = y_try, kl_try, True
                    break
                step /= 2.0
            if not accepted:
                y_new, kl_new = y, kl_prev
        if not np.all(np.isfinite(y_new)):
            raise ValidationError(f"numerical overflow at iteration {t}")
        y, kl_prev = y_new, kl_new
        kl_trace[t] = kl_new

    return Embedding2D(y, dataset.labels, dataset.ids, kl_trace, params)


def tsne_distance_matrix(embedding: Embedding2D, n_classes: int | None = None) -> DistanceMatrix:
    """Euclidean distances between per-class centers of mass of the 2-D coords."""
    if n_classes is None:
        n_classes = int(np.max(embedding.labels)) + 1
    cents = centroids_of_coords(embedding.coords, embedding.labels, n_classes)
    base = euclidean_distance_matrix(cents, measure="tsne")
    return base


def save_embedding(embedding: Embedding2D, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label", "y0", "y1"])
        for i, l, (y0, y1) in zip(embedding.ids, embedding.labels, embedding.coords):
            writer.writerow([int(i), int(l), FLOAT_FMT.format(y0), FLOAT_FMT.format(y1)])


def load_embedding(path, dataset: LabeledDataset | None = None) -> Embedding2D:
    """Load an externally computed 2-D embedding; optionally cross-check ids."""
    path = Path(path)
    ids, labels, coords = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["id", "label", "y0", "y1"]:
            raise ValidationError(f"{path}: bad header {header!r} (need id,label,y0,y1)")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValidationError(f"{path}:{lineno}: expected 4 fields (2-D only)")
            try:
                ids.append(int(row[0]))
                labels.append(int(row[1]))
                coords.append((float(row[2]), float(row[3])))
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    if not ids:
        raise ValidationError(f"{path}: no data rows")
    ids = np.asarray(ids, dtype=np.uint64)
    labels = np.asarray(labels, dtype=np.int64)
    if dataset is not None and (
        ids.shape != dataset.ids.shape or set(ids.tolist()) != set(dataset.ids.tolist())
    ):
        raise ValidationError(f"{path}: embedding ids do not match the dataset")
    return Embedding2D(np.asarray(coords), labels, ids, np.empty(0), None)
