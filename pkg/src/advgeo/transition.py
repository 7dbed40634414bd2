"""Misclassification transition models and the entropy of a model under attack.

A transition model assigns P(adversarial class | actual class): either the
uninformed uniform 1/(n-1), or inverse-distance weights (optionally gated by
an adversarial map).  The model entropy is the per-record mean of -p log p
over the misclassified records of an attack log; the strictly monotone mean
negative log-likelihood is reported alongside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .advmap import AdversarialMap
from .dataset import AttackLog, ValidationError
from .distances import DistanceMatrix


@dataclass(frozen=True)
class TransitionModel:
    """Row-stochastic conditional misclassification probabilities, zero diagonal."""

    n_classes: int
    p: np.ndarray
    provenance: str = "uniform"
    fallback_rows: tuple[int, ...] = ()

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.shape != (self.n_classes, self.n_classes):
            raise ValidationError("transition matrix shape mismatch")
        if np.any(p < 0):
            raise ValidationError("transition probabilities must be >= 0")
        if np.any(np.diag(p) != 0):
            raise ValidationError("transition diagonal must be 0")
        if not np.allclose(p.sum(axis=1), 1.0, atol=1e-9):
            raise ValidationError("transition rows must sum to 1")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class EntropyEntry:
    """One (transition, epsilon slice) entropy measurement."""

    measure: str
    epsilon: float | None
    records: int
    misclassified: int
    e_m: float
    mean_nll: float
    surprise_events: int


@dataclass(frozen=True)
class EntropyReport:
    entries: tuple[EntropyEntry, ...]


def uniform_transition(n: int) -> TransitionModel:
    """Every other class equally likely: off-diagonals 1/(n-1)."""
    if n < 2:
        raise ValidationError(f"need at least 2 classes, got {n}")
    p = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(p, 0.0)
    return TransitionModel(n, p, "uniform")


def weighted_transition(
    distances: DistanceMatrix,
    amap: AdversarialMap | None = None,
    zero_floor: float | None = None,
) -> TransitionModel:
    """Inverse-distance weights: p[i][j] proportional to 1/d(i, j).

    Admissible targets are the finite off-diagonal pairs, restricted to map
    edges when a map is given.  A zero distance between distinct classes is
    rejected unless ``zero_floor`` raises it to that floor.  Rows with no
    admissible target fall back to uniform and are flagged in
    ``fallback_rows``.
    """
    n = distances.n_classes
    d = distances.values.copy()
    admissible = np.isfinite(d) & ~np.eye(n, dtype=bool)
    if amap is not None:
        if amap.n_classes != n:
            raise ValidationError("map and distance matrix disagree on classes")
        on_map = np.zeros((n, n), dtype=bool)
        for s, t in amap.edge_pairs():
            on_map[s, t] = True
        admissible &= on_map
    zero_pairs = np.argwhere(admissible & (d == 0.0))
    if zero_pairs.size:
        i, j = zero_pairs[0]
        if zero_floor is None:
            raise ValidationError(
                f"classes {i} and {j} are at distance 0; 1/d undefined "
                "(pass a zero_floor to override)"
            )
        d[admissible & (d == 0.0)] = zero_floor
    p = np.zeros((n, n))
    fallback = []
    for i in range(n):
        cols = np.flatnonzero(admissible[i])
        if cols.size == 0:
            p[i] = 1.0 / (n - 1)
            p[i, i] = 0.0
            fallback.append(i)
            continue
        w = 1.0 / d[i, cols]
        p[i, cols] = w / w.sum()
    prov = f"weighted({distances.measure}"
    prov += ", map)" if amap is not None else ")"
    return TransitionModel(n, p, prov, tuple(fallback))


def model_entropy(
    log: AttackLog,
    transition: TransitionModel,
    epsilon_filter: float | None = None,
    measure: str | None = None,
) -> EntropyEntry:
    """Per-record mean of -p ln p over the misclassified records.

    p is the transition probability of the observed (actual -> adversarial)
    pair.  Records with p == 0 contribute 0 (the x log x limit) and are
    tallied as surprise events; they are also left out of the mean NLL,
    which would otherwise be infinite.
    """
    if transition.n_classes != log.n_classes:
        raise ValidationError("transition and log disagree on classes")
    records = [
        r
        for r in log.records
        if epsilon_filter is None or r.epsilon == epsilon_filter
    ]
    flips = [r for r in records if r.misclassified]
    if not flips:
        raise ValidationError("no misclassified records in scope")
    ent_sum = nll_sum = 0.0
    surprises = 0
    for r in flips:
        p = transition.p[r.actual, r.adversarial]
        if p == 0.0:
            surprises += 1
            continue
        ent_sum += -p * np.log(p)
        nll_sum += -np.log(p)
    n_flips = len(flips)
    return EntropyEntry(
        measure=measure or transition.provenance,
        epsilon=epsilon_filter,
        records=len(records),
        misclassified=n_flips,
        e_m=ent_sum / n_flips,
        mean_nll=nll_sum / max(n_flips - surprises, 1),
        surprise_events=surprises,
    )


def entropy_sweep(log: AttackLog, transitions) -> EntropyReport:
    """Entropy per (transition, epsilon) pair, plot-ready.

    ``transitions`` is a list of TransitionModel or (name, TransitionModel)
    pairs.  Epsilon slices with no misclassifications are skipped.
    """
    entries = []
    for item in transitions:
        name, model = item if isinstance(item, tuple) else (item.provenance, item)
        for eps in log.epsilon_values:
            try:
                entries.append(model_entropy(log, model, eps, measure=name))
            except ValidationError:
                continue
    return EntropyReport(tuple(entries))
