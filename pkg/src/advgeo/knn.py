"""k-NN graph, hopping distance, forbidden distance, displacement, affinity.

The graph keeps k-1 directed edges per point (a point is trivially its own
nearest neighbor, so self is excluded).  Hopping distance is BFS depth on
that graph; the class-to-class matrix S averages, over source points of one
class, the depth at which the other class first enters the BFS frontier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import AttackLog, LabeledDataset, ValidationError
from .distances import DistanceMatrix


@dataclass(frozen=True)
class KnnGraph:
    """Directed exact k-NN graph; adjacency[i] lists k-1 neighbor indices,
    nearest first, ties broken by smaller point id."""

    k: int
    adjacency: np.ndarray
    labels: np.ndarray
    ids: np.ndarray
    features: np.ndarray = field(repr=False)

    @property
    def n_points(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1

    def index_of(self, point_id: int) -> int:
        hits = np.flatnonzero(self.ids == point_id)
        if hits.size == 0:
            raise ValidationError(f"unknown point id {point_id}")
        return int(hits[0])


@dataclass(frozen=True)
class HopResult:
    """BFS outcome: hops is None when the frontier exhausts before the target."""

    hops: int | None
    visited_count: int

    @property
    def reachable(self) -> bool:
        return self.hops is not None


@dataclass(frozen=True)
class ForbiddenDistance:
    """Threshold beyond which an attack is assumed unable to move a sample."""

    value: float
    measure: str
    derivation: str = "clean-data average"

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0:
            raise ValidationError("forbidden distance must be finite and >= 0")


def build_knn_graph(dataset: LabeledDataset, k: int) -> KnnGraph:
    """Exact brute-force Euclidean k-NN; k counts the point itself."""
    m = dataset.n_points
    if not 2 <= k <= m:
        raise ValidationError(f"k must be in [2, {m}], got {k}")
    x = dataset.features
    sq = (x**2).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    adjacency = np.empty((m, k - 1), dtype=np.int64)
    ids = dataset.ids.astype(np.int64)
    for i in range(m):
        row = d2[i].copy()
        row[i] = np.inf
        order = np.lexsort((ids, row))  # distance first, then smaller id
        adjacency[i] = order[: k - 1]
    adjacency.flags.writeable = False
    return KnnGraph(k, adjacency, dataset.labels, dataset.ids, dataset.features)


def _bfs_class_depths(graph: KnnGraph, source: int, n_classes: int) -> np.ndarray:
    """Depth at which each class first enters the frontier; inf if never."""
    depths = np.full(n_classes, np.inf)
    depths[graph.labels[source]] = 0
    visited = np.zeros(graph.n_points, dtype=bool)
    visited[source] = True
    frontier = [source]
    depth = 0
    remaining = n_classes - 1
    while frontier and remaining > 0:
        depth += 1
        nxt = []
        for u in frontier:
            for v in graph.adjacency[u]:
                if not visited[v]:
                    visited[v] = True
                    nxt.append(v)
                    c = graph.labels[v]
                    if np.isinf(depths[c]):
                        depths[c] = depth
                        remaining -= 1
        frontier = nxt
    return depths


def hop_distance_point(
    graph: KnnGraph,
    source: int,
    target_point: int | None = None,
    target_class: int | None = None,
) -> HopResult:
    """BFS hop count from a source point id to a target point id or to the
    first point of a target class; 0 when the source already satisfies it."""
    if (target_point is None) == (target_class is None):
        raise ValidationError("give exactly one of target_point / target_class")
    src = graph.index_of(source)
    if target_point is not None:
        tgt = graph.index_of(target_point)
        satisfied = lambda v: v == tgt
    else:
        if not 0 <= target_class < graph.n_classes:
            raise ValidationError(f"unknown class {target_class}")
        satisfied = lambda v: graph.labels[v] == target_class
    if satisfied(src):
        return HopResult(0, 1)
    visited = np.zeros(graph.n_points, dtype=bool)
    visited[src] = True
    frontier = [src]
    depth = 0
    count = 1
    while frontier:
        depth += 1
        nxt = []
        for u in frontier:
            for v in graph.adjacency[u]:
                if not visited[v]:
                    visited[v] = True
                    count += 1
                    if satisfied(v):
                        return HopResult(depth, count)
                    nxt.append(v)
        frontier = nxt
    return HopResult(None, count)


def hopping_distance_matrix(graph: KnnGraph) -> DistanceMatrix:
    """Mean class-form hopping distance from each class to every other.

    Entry (k, l) averages, over source points labeled k, the BFS depth at
    which class l first appears.  Sources that never reach class l are left
    out of the mean and tallied in metadata["unreachable"]; a fully
    unreachable pair becomes +inf.
    """
    n = graph.n_classes
    sums = np.zeros((n, n))
    counts = np.zeros((n, n), dtype=np.int64)
    unreachable = np.zeros((n, n), dtype=np.int64)
    for src in range(graph.n_points):
        ck = graph.labels[src]
        depths = _bfs_class_depths(graph, src, n)
        for cl in range(n):
            if cl == ck:
                continue
            if np.isinf(depths[cl]):
                unreachable[ck, cl] += 1
            else:
                sums[ck, cl] += depths[cl]
                counts[ck, cl] += 1
    values = np.full((n, n), np.inf)
    np.fill_diagonal(values, 0.0)
    ok = counts > 0
    values[ok] = sums[ok] / counts[ok]
    unreachable.flags.writeable = False
    return DistanceMatrix(
        "hopping", values, directed=True, metadata={"unreachable": unreachable, "k": graph.k}
    )


def forbidden_distance(s_d: DistanceMatrix) -> ForbiddenDistance:
    """Mean of the finite off-diagonal hopping distances."""
    if s_d.measure != "hopping":
        raise ValidationError("forbidden distance is defined on the hopping matrix")
    off = s_d.off_diagonal()
    finite = off[np.isfinite(off)]
    if finite.size == 0:
        raise ValidationError("all class pairs unreachable; forbidden distance undefined")
    return ForbiddenDistance(float(finite.mean()), "hopping")


def mean_off_diagonal(distances: DistanceMatrix) -> ForbiddenDistance:
    """Clean-data average threshold for an arbitrary measure (map building)."""
    off = distances.off_diagonal()
    finite = off[np.isfinite(off)]
    if finite.size == 0:
        raise ValidationError("no finite off-diagonal distances")
    return ForbiddenDistance(float(finite.mean()), distances.measure)


def average_displacement(log: AttackLog, s_d: DistanceMatrix) -> float:
    """Average hopping distance traveled per record under the attack.

    Misclassified records contribute the hopping distance between their
    actual and adversarial class; clean records contribute 0, so the
    denominator is the full record count.  Flips across an unreachable
    (infinite) pair are excluded from the sum, matching the matrix
    convention for means."""
    if s_d.measure != "hopping":
        raise ValidationError("displacement is defined on the hopping matrix")
    if not log.records:
        raise ValidationError("empty attack log")
    total = 0.0
    for r in log.records:
        if not r.misclassified:
            continue
        d = s_d.values[r.actual, r.adversarial]
        if np.isfinite(d):
            total += d
    return total / len(log.records)


def nearest_class_affinity(graph: KnnGraph) -> np.ndarray:
    """Fraction of class-i points whose nearest out-of-class point is in class j.

    The nearest out-of-class point is read off the (distance-ordered) k list;
    when the whole list is in-class the scan falls back to all points.
    Rows sum to 1, diagonal 0.
    """
    n = graph.n_classes
    if n < 2:
        raise ValidationError("affinity needs at least two classes")
    counts = np.zeros((n, n))
    x = graph.features
    ids = graph.ids.astype(np.int64)
    for i in range(graph.n_points):
        ci = graph.labels[i]
        hit = None
        for v in graph.adjacency[i]:
            if graph.labels[v] != ci:
                hit = graph.labels[v]
                break
        if hit is None:
            d2 = ((x - x[i]) ** 2).sum(axis=1)
            d2[graph.labels == ci] = np.inf
            order = np.lexsort((ids, d2))
            hit = graph.labels[order[0]]
        counts[ci, hit] += 1
    rows = counts.sum(axis=1, keepdims=True)
    if np.any(rows == 0):
        raise ValidationError("class with no points")
    return counts / rows
