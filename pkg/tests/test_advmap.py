import numpy as np
import pytest

import advgeo
from advgeo import ValidationError
from advgeo.knn import ForbiddenDistance


def sd(values):
    return advgeo.DistanceMatrix("hopping", np.asarray(values, dtype=float), directed=True)


FIXTURE = sd([[0, 1, 5], [1, 0, 2], [5, 2, 0]])


class TestCreateMap:
    def test_hand_applied_threshold(self):
        amap = advgeo.create_map(FIXTURE, ForbiddenDistance(2.0, "hopping"))
        assert amap.edge_pairs() == frozenset({(0, 1), (1, 0), (1, 2), (2, 1)})

    def test_zero_threshold_empty(self):
        amap = advgeo.create_map(FIXTURE, ForbiddenDistance(0.0, "hopping"))
        assert amap.edges == frozenset()

    def test_saturation_gives_complete_map(self):
        amap = advgeo.create_map(FIXTURE, ForbiddenDistance(5.0, "hopping"))
        assert len(amap.edge_pairs()) == 6

    def test_infinite_threshold_rejected(self):
        with pytest.raises(ValidationError):
            ForbiddenDistance(np.inf, "hopping")

    def test_weights_come_from_matrix(self):
        amap = advgeo.create_map(FIXTURE, ForbiddenDistance(2.0, "hopping"))
        weights = {(s, t): w for s, t, w in amap.edges}
        assert weights[(1, 2)] == 2.0 and weights[(0, 1)] == 1.0

    def test_unreachable_pairs_never_edges(self):
        m = sd([[0, np.inf], [1, 0]])
        amap = advgeo.create_map(m, ForbiddenDistance(10.0, "hopping"))
        assert amap.edge_pairs() == frozenset({(1, 0)})

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            vals = rng.uniform(0.1, 5.0, size=(n, n))
            np.fill_diagonal(vals, 0.0)
            m = sd(vals)
            lo, hi = sorted(rng.uniform(0.0, 5.0, size=2))
            small = advgeo.create_map(m, ForbiddenDistance(lo, "hopping"))
            large = advgeo.create_map(m, ForbiddenDistance(hi, "hopping"))
            assert small.edge_pairs() <= large.edge_pairs()

    def test_directedness_follows_matrix(self):
        undirected = advgeo.DistanceMatrix(
            "euclidean", [[0.0, 1.0], [1.0, 0.0]], directed=False
        )
        assert advgeo.create_map(undirected, ForbiddenDistance(2.0, "euclidean")).directed is False
        assert advgeo.create_map(FIXTURE, ForbiddenDistance(2.0, "hopping")).directed is True


class TestNeighborConsistency:
    def amap(self):
        return advgeo.create_map(FIXTURE, ForbiddenDistance(2.0, "hopping"))

    def log(self, pairs):
        recs = tuple(
            advgeo.AttackRecord(i, 0.1, a, b) for i, (a, b) in enumerate(pairs)
        )
        return advgeo.AttackLog(recs, 3)

    def test_on_map_log_scores_one(self):
        overall, _ = neighbor = advgeo.neighbor_consistency(
            self.amap(), self.log([(0, 1), (1, 2), (2, 1)])
        )
        assert overall == 1.0

    def test_single_off_map_flip(self):
        overall, per_class = advgeo.neighbor_consistency(
            self.amap(), self.log([(0, 1), (1, 0), (1, 2), (0, 2)])
        )
        assert overall == 0.75
        assert per_class[0] == (1, 2)  # one of class 0's two flips on map

    def test_no_flips_undefined(self):
        overall, _ = advgeo.neighbor_consistency(self.amap(), self.log([(0, 0), (1, 1)]))
        assert overall is None

    def test_class_count_mismatch(self):
        log = advgeo.AttackLog((advgeo.AttackRecord(0, 0.1, 0, 1),), 4)
        with pytest.raises(ValidationError):
            advgeo.neighbor_consistency(self.amap(), log)

    def test_simulator_restricted_to_map_is_consistent(self, blobs5, blobs5_sd):
        f_d = advgeo.forbidden_distance(blobs5_sd)
        amap = advgeo.create_map(blobs5_sd, f_d)
        t = advgeo.weighted_transition(blobs5_sd, amap)
        assert t.fallback_rows == ()
        log = advgeo.simulate_attack(blobs5, t, [0.5], seed=3, success_prob=1.0)
        overall, _ = advgeo.neighbor_consistency(amap, log)
        assert overall == 1.0


def test_map_json_roundtrip():
    amap = advgeo.create_map(FIXTURE, ForbiddenDistance(2.0, "hopping"))
    doc = amap.to_adjacency_dict()
    assert doc["adjacency"]["1"] == {"0": 1.0, "2": 2.0}
    assert doc["forbidden_distance"] == 2.0
