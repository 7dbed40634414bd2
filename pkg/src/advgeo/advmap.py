"""Adversarial map: the class graph gated by the forbidden distance.

An edge (i -> j) exists exactly when the inter-class distance is finite and
at most the forbidden distance.  The map is directed when the input matrix
is (hopping) and undirected otherwise.  Whether real attacks stay on the map
is a measured statistic, not an assumption: see ``neighbor_consistency``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import AttackLog, ValidationError
from .distances import DistanceMatrix
from .knn import ForbiddenDistance


@dataclass(frozen=True)
class AdversarialMap:
    n_classes: int
    edges: frozenset[tuple[int, int, float]]
    f_d: ForbiddenDistance
    measure: str
    directed: bool

    def has_edge(self, source: int, target: int) -> bool:
        return (source, target) in {(s, t) for s, t, _ in self.edges}

    def edge_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((s, t) for s, t, _ in self.edges)

    def targets_of(self, source: int) -> list[int]:
        return sorted(t for s, t, _ in self.edges if s == source)

    def to_adjacency_dict(self) -> dict:
        adj = {
            str(i): {str(t): w for s, t, w in sorted(self.edges) if s == i}
            for i in range(self.n_classes)
        }
        return {
            "n_classes": self.n_classes,
            "measure": self.measure,
            "directed": self.directed,
            "forbidden_distance": self.f_d.value,
            "adjacency": adj,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_adjacency_dict(), indent=2, sort_keys=True)


def create_map(distances: DistanceMatrix, f_d: ForbiddenDistance) -> AdversarialMap:
    """Single pass over matrix entries adding edge (i, j) when d(i, j) <= f_d."""
    if not np.isfinite(f_d.value):
        raise ValidationError("forbidden distance must be finite")
    n = distances.n_classes
    edges = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = distances.values[i, j]
            if np.isfinite(d) and d <= f_d.value:
                edges.add((i, j, float(d)))
    return AdversarialMap(
        n, frozenset(edges), f_d, distances.measure, distances.directed
    )


def neighbor_consistency(amap: AdversarialMap, log: AttackLog):
    """Fraction of misclassified records whose (actual -> adversarial) pair is
    a map edge, plus a per-actual-class breakdown.

    Returns (overall, per_class) where per_class[i] is (on_map, flips) for
    actual class i; overall is None when the log has no misclassifications.
    """
    if amap.n_classes != log.n_classes:
        raise ValidationError("map and log disagree on the number of classes")
    pairs = amap.edge_pairs()
    per_class = {i: [0, 0] for i in range(amap.n_classes)}
    on_map = flips = 0
    for r in log.records:
        if not r.misclassified:
            continue
        flips += 1
        per_class[r.actual][1] += 1
        if (r.actual, r.adversarial) in pairs:
            on_map += 1
            per_class[r.actual][0] += 1
    overall = on_map / flips if flips else None
    return overall, {i: tuple(v) for i, v in per_class.items()}
