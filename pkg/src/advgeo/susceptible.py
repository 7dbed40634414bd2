"""Susceptible-class ranking and top-k prediction accuracy.

The global ranking accumulates each target class's conditional probability
over all actual classes (column sums of the transition matrix); the
per-class ranking orders targets for one actual class.  Accuracy counts an
attack record as a hit when its adversarial class falls inside the top-k
prediction set for its actual class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import AttackLog, ValidationError
from .transition import TransitionModel


@dataclass(frozen=True)
class SusceptibilityRanking:
    """global_rank: (class, cumulative probability) descending;
    per_class[i]: (target, P(target | i)) descending.  Ties break by index."""

    n_classes: int
    global_rank: tuple[tuple[int, float], ...]
    per_class: tuple[tuple[tuple[int, float], ...], ...]

    def top_global(self, k: int) -> list[int]:
        return [c for c, _ in self.global_rank[:k]]


@dataclass(frozen=True)
class AccuracyCell:
    epsilon: float | None  # None = pooled over all epsilons
    k: int
    hits: int
    misclassified: int

    @property
    def accuracy(self) -> float:
        return self.hits / self.misclassified


@dataclass(frozen=True)
class AccuracyReport:
    cells: tuple[AccuracyCell, ...]
    n_classes: int

    def baseline(self, k: int) -> float:
        return k / (self.n_classes - 1)


def _sorted_desc(values: np.ndarray, exclude: int | None = None):
    order = np.lexsort((np.arange(values.size), -values))
    return tuple(
        (int(j), float(values[j])) for j in order if j != exclude
    )


def rank_global(transition: TransitionModel) -> SusceptibilityRanking:
    """Column sums of the transition matrix, plus per-class target orderings."""
    col = transition.p.sum(axis=0)
    per_class = tuple(
        _sorted_desc(transition.p[i], exclude=i) for i in range(transition.n_classes)
    )
    return SusceptibilityRanking(transition.n_classes, _sorted_desc(col), per_class)


def predict_targets(ranking: SusceptibilityRanking, actual: int, k: int) -> list[int]:
    """The k most probable adversarial targets for the given actual class."""
    n = ranking.n_classes
    if not 0 <= actual < n:
        raise ValidationError(f"unknown class {actual}")
    if not 1 <= k <= n - 1:
        raise ValidationError(f"k must be in [1, {n - 1}], got {k}")
    return [c for c, _ in ranking.per_class[actual][:k]]


def evaluate_accuracy(
    log: AttackLog,
    ranking: SusceptibilityRanking,
    k_values,
    group_by_epsilon: bool = True,
) -> AccuracyReport:
    """Hit rate of the top-k prediction sets over the misclassified records,
    per epsilon and pooled."""
    if ranking.n_classes != log.n_classes:
        raise ValidationError("ranking and log disagree on classes")
    flips = log.misclassified
    if not flips:
        raise ValidationError("no misclassified records to evaluate")
    cells = []
    groups: list[tuple[float | None, list]] = [(None, list(flips))]
    if group_by_epsilon:
        for eps in log.epsilon_values:
            groups.append((eps, [r for r in flips if r.epsilon == eps]))
    for k in k_values:
        sets = [set(predict_targets(ranking, i, k)) for i in range(ranking.n_classes)]
        for eps, recs in groups:
            if not recs:
                continue
            hits = sum(1 for r in recs if r.adversarial in sets[r.actual])
            cells.append(AccuracyCell(eps, int(k), hits, len(recs)))
    return AccuracyReport(tuple(cells), ranking.n_classes)
