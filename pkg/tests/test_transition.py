import numpy as np
import pytest

import advgeo
from advgeo import ValidationError
from advgeo.knn import ForbiddenDistance


def euclid(values):
    v = np.asarray(values, dtype=float)
    return advgeo.DistanceMatrix("euclidean", v, directed=False)


def log_of(pairs, n, eps=0.1):
    recs = tuple(advgeo.AttackRecord(i, eps, a, b) for i, (a, b) in enumerate(pairs))
    return advgeo.AttackLog(recs, n)


class TestUniformTransition:
    def test_ten_classes(self):
        t = advgeo.uniform_transition(10)
        off = t.p[~np.eye(10, dtype=bool)]
        assert np.all(off == 1.0 / 9.0)

    def test_two_classes_forced(self):
        t = advgeo.uniform_transition(2)
        assert t.p[0, 1] == 1.0 and t.p[1, 0] == 1.0

    def test_rows_sum_to_one(self):
        t = advgeo.uniform_transition(7)
        assert np.allclose(t.p.sum(axis=1), 1.0, atol=1e-12)

    def test_fewer_than_two_rejected(self):
        with pytest.raises(ValidationError):
            advgeo.uniform_transition(1)


class TestWeightedTransition:
    def test_inverse_distance_normalization(self):
        d = euclid([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
        t = advgeo.weighted_transition(d)
        assert abs(t.p[0, 1] - 0.75) < 1e-12
        assert abs(t.p[0, 2] - 0.25) < 1e-12

    def test_equal_distances_reduce_to_uniform(self):
        vals = np.full((4, 4), 2.5)
        np.fill_diagonal(vals, 0.0)
        t = advgeo.weighted_transition(euclid(vals))
        assert np.all(np.abs(t.p - advgeo.uniform_transition(4).p) < 1e-12)

    def test_map_gating_excludes_targets(self):
        d = euclid([[0, 1, 3], [1, 0, 2], [3, 2, 0]])
        amap = advgeo.create_map(d, ForbiddenDistance(2.0, "euclidean"))
        t = advgeo.weighted_transition(d, amap)
        assert t.p[0, 1] == 1.0 and t.p[0, 2] == 0.0

    def test_zero_distance_rejected_with_pair(self):
        d = euclid([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
        with pytest.raises(ValidationError, match="0 and 1"):
            advgeo.weighted_transition(d)

    def test_zero_floor_override(self):
        d = euclid([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
        t = advgeo.weighted_transition(d, zero_floor=1e-9)
        assert t.p[0, 1] > 0.999999

    def test_row_without_targets_falls_back_to_uniform(self):
        vals = np.array([[0, 5, 5], [5, 0, 1], [5, 1, 0]], dtype=float)
        m = advgeo.DistanceMatrix("hopping", vals, directed=True)
        amap = advgeo.create_map(m, ForbiddenDistance(1.0, "hopping"))
        t = advgeo.weighted_transition(m, amap)
        assert 0 in t.fallback_rows
        assert t.p[0, 1] == t.p[0, 2] == 0.5

    def test_infinite_distances_inadmissible(self):
        vals = np.array([[0, 1, np.inf], [1, 0, 1], [np.inf, 1, 0]])
        m = advgeo.DistanceMatrix("hopping", vals, directed=True)
        t = advgeo.weighted_transition(m)
        assert t.p[0, 2] == 0.0 and t.p[0, 1] == 1.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(5)
        vals = rng.uniform(0.5, 4.0, size=(5, 5))
        vals = (vals + vals.T) / 2
        np.fill_diagonal(vals, 0.0)
        t1 = advgeo.weighted_transition(euclid(vals))
        t2 = advgeo.weighted_transition(euclid(vals * 37.5))
        assert np.all(np.abs(t1.p - t2.p) < 1e-9)


class TestModelEntropy:
    def test_uniform_closed_form_n10(self):
        t = advgeo.uniform_transition(10)
        log = log_of([(0, 1), (3, 7), (9, 2), (5, 5)], 10)
        entry = advgeo.model_entropy(log, t)
        assert abs(entry.e_m - np.log(9) / 9) < 1e-12
        assert entry.misclassified == 3

    def test_certain_transition_zero_entropy(self):
        p = np.array([[0, 1.0], [1.0, 0]])
        t = advgeo.TransitionModel(2, p, "test")
        entry = advgeo.model_entropy(log_of([(0, 1), (1, 0)], 2), t)
        assert entry.e_m == 0.0

    def test_surprise_events_counted(self):
        p = np.array([[0, 1.0, 0.0], [1.0, 0, 0.0], [0.5, 0.5, 0]])
        t = advgeo.TransitionModel(3, p, "test")
        entry = advgeo.model_entropy(log_of([(0, 1), (0, 2)], 3), t)
        assert entry.surprise_events == 1
        assert entry.e_m == 0.0  # -1 ln 1 plus the zero-probability limit term

    def test_no_flips_rejected(self):
        t = advgeo.uniform_transition(3)
        with pytest.raises(ValidationError):
            advgeo.model_entropy(log_of([(0, 0)], 3), t)

    def test_epsilon_filter(self):
        t = advgeo.uniform_transition(3)
        recs = (
            advgeo.AttackRecord(0, 0.1, 0, 1),
            advgeo.AttackRecord(0, 0.2, 0, 2),
            advgeo.AttackRecord(1, 0.2, 1, 0),
        )
        entry = advgeo.model_entropy(advgeo.AttackLog(recs, 3), t, epsilon_filter=0.2)
        assert entry.records == 2 and entry.misclassified == 2

    def test_weighted_below_uniform_when_sampled_from_weighted(self, blobs5, blobs5_sd):
        weighted = advgeo.weighted_transition(blobs5_sd)
        uniform = advgeo.uniform_transition(5)
        log = advgeo.simulate_attack(blobs5, weighted, [1.0], seed=9, success_prob=1.0)
        ew = advgeo.model_entropy(log, weighted).e_m
        eu = advgeo.model_entropy(log, uniform).e_m
        assert ew < eu


class TestEntropySweep:
    def test_single_epsilon_one_row_per_transition(self):
        t = advgeo.uniform_transition(3)
        log = log_of([(0, 1), (1, 2)], 3)
        report = advgeo.entropy_sweep(log, [("uniform", t), ("other", t)])
        assert len(report.entries) == 2

    def test_uniform_constant_across_epsilon(self, blobs5):
        t = advgeo.uniform_transition(5)
        eps = [0.25, 0.5, 0.75, 1.0]
        log = advgeo.simulate_attack(
            blobs5, t, eps, seed=1, success_prob=[e for e in eps]
        )
        report = advgeo.entropy_sweep(log, [t])
        values = np.array([e.e_m for e in report.entries])
        assert np.all(np.abs(values - np.log(4) / 4) < 1e-12)

    def test_weighted_rows_vary_while_uniform_constant(self, blobs5, blobs5_sd):
        weighted = advgeo.weighted_transition(blobs5_sd)
        eps = [0.2, 0.6, 1.0]
        log = advgeo.simulate_attack(blobs5, weighted, eps, seed=2, success_prob=eps)
        report = advgeo.entropy_sweep(
            log, [("uniform", advgeo.uniform_transition(5)), ("hopping", weighted)]
        )
        uni = [e.e_m for e in report.entries if e.measure == "uniform"]
        wei = [e.e_m for e in report.entries if e.measure == "hopping"]
        assert np.ptp(uni) < 1e-12 and np.ptp(wei) > 1e-9


class TestTransitionInvariants:
    def test_row_stochastic_and_zero_diagonal(self, blobs5_sd):
        for t in (
            advgeo.uniform_transition(5),
            advgeo.weighted_transition(blobs5_sd),
        ):
            assert np.all(np.abs(t.p.sum(axis=1) - 1.0) < 1e-9)
            assert np.all(np.diag(t.p) == 0)

    def test_bad_rows_rejected(self):
        with pytest.raises(ValidationError):
            advgeo.TransitionModel(2, np.array([[0.0, 0.5], [1.0, 0.0]]))
        with pytest.raises(ValidationError):
            advgeo.TransitionModel(2, np.array([[0.5, 0.5], [1.0, 0.0]]))
