import numpy as np
import pytest

import advgeo
from advgeo import ValidationError
from conftest import make_dataset


def centroids_of(vectors):
    v = np.asarray(vectors, dtype=float)
    return advgeo.ClassCentroids(v, np.ones(len(v), dtype=int))


class TestClassCentroids:
    def test_mean_of_two_points(self):
        ds = make_dataset([[0, 0], [2, 0], [5, 5]], [0, 0, 1])
        cents = advgeo.class_centroids(ds)
        assert np.array_equal(cents.centroids[0], [1, 0])

    def test_single_point_class(self):
        ds = make_dataset([[3, 4], [0, 0]], [0, 1])
        assert np.array_equal(advgeo.class_centroids(ds).centroids[0], [3, 4])

    def test_matches_naive_summation_oracle(self):
        rng = np.random.default_rng(0)
        feats = rng.normal(size=(60, 7))
        labels = rng.integers(0, 4, size=60)
        labels[:4] = [0, 1, 2, 3]
        ds = make_dataset(feats, labels)
        cents = advgeo.class_centroids(ds)
        for c in range(4):
            acc = np.zeros(7)
            n = 0
            for f, l in zip(feats, labels):
                if l == c:
                    acc = acc + f
                    n += 1
            assert np.all(np.abs(cents.centroids[c] - acc / n) < 1e-12)


class TestEuclideanMatrix:
    def test_collinear(self):
        m = advgeo.euclidean_distance_matrix(centroids_of([[1, 0], [5, 0]]))
        assert m.values[0, 1] == 4.0

    def test_zero_diagonal(self):
        m = advgeo.euclidean_distance_matrix(centroids_of([[1, 2], [3, 4], [5, 6]]))
        assert np.all(np.diag(m.values) == 0)

    def test_matches_per_coordinate_oracle(self):
        rng = np.random.default_rng(1)
        c = rng.normal(size=(3, 5))
        m = advgeo.euclidean_distance_matrix(centroids_of(c))
        for i in range(3):
            for j in range(3):
                acc = 0.0
                for k in range(5):
                    acc += (c[j, k] - c[i, k]) ** 2
                assert abs(m.values[i, j] - np.sqrt(acc)) < 1e-12


class TestCosineScaledMatrix:
    def test_orthogonal_centroids_distance_zero(self):
        m = advgeo.cosine_scaled_distance_matrix(centroids_of([[1, 0], [0, 1]]))
        assert abs(m.values[0, 1]) < 1e-12

    def test_collinear_same_direction_equals_euclidean(self):
        m = advgeo.cosine_scaled_distance_matrix(centroids_of([[1, 0], [3, 0]]))
        assert abs(m.values[0, 1] - 2.0) < 1e-12

    def test_opposite_direction_abs_and_signed(self):
        m = advgeo.cosine_scaled_distance_matrix(centroids_of([[1, 0], [-2, 0]]))
        assert abs(m.values[0, 1] - 3.0) < 1e-12
        assert abs(m.metadata["signed_values"][0, 1] - (-3.0)) < 1e-12

    def test_zero_centroid_rejected(self):
        with pytest.raises(ValidationError, match="zero vector"):
            advgeo.cosine_scaled_distance_matrix(centroids_of([[0, 0], [1, 0]]))

    def test_never_exceeds_euclidean(self):
        rng = np.random.default_rng(2)
        c = rng.normal(size=(6, 4))
        cents = centroids_of(c)
        e = advgeo.euclidean_distance_matrix(cents).values
        a = advgeo.cosine_scaled_distance_matrix(cents).values
        assert np.all(a <= e + 1e-12)


class TestGeometryProperties:
    def test_translation_invariance(self):
        rng = np.random.default_rng(3)
        feats = rng.normal(size=(40, 4))
        labels = np.arange(40) % 4
        shift = rng.normal(size=4) * 10
        m1 = advgeo.euclidean_distance_matrix(advgeo.class_centroids(make_dataset(feats, labels)))
        m2 = advgeo.euclidean_distance_matrix(
            advgeo.class_centroids(make_dataset(feats + shift, labels))
        )
        assert np.all(np.abs(m1.values - m2.values) < 1e-9)

    @pytest.mark.parametrize("scale", [0.01, 3.0, 1e4])
    def test_scale_equivariance(self, scale):
        rng = np.random.default_rng(4)
        feats = rng.normal(size=(40, 4)) + 1.0
        labels = np.arange(40) % 4
        c1 = advgeo.class_centroids(make_dataset(feats, labels))
        c2 = advgeo.class_centroids(make_dataset(feats * scale, labels))
        for fn in (advgeo.euclidean_distance_matrix, advgeo.cosine_scaled_distance_matrix):
            base, scaled = fn(c1).values, fn(c2).values
            nz = base > 0
            assert np.all(np.abs(scaled[nz] / base[nz] - scale) / scale < 1e-9)


class TestDistanceMatrixInvariants:
    def test_nonzero_diagonal_rejected(self):
        with pytest.raises(ValidationError, match="diagonal"):
            advgeo.DistanceMatrix("euclidean", [[1.0, 2.0], [2.0, 0.0]], directed=False)

    def test_asymmetric_undirected_rejected(self):
        with pytest.raises(ValidationError, match="symmetric"):
            advgeo.DistanceMatrix("euclidean", [[0.0, 2.0], [1.0, 0.0]], directed=False)

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            advgeo.DistanceMatrix("euclidean", [[0.0, -1.0], [-1.0, 0.0]], directed=False)

    def test_inf_only_for_hopping(self):
        vals = [[0.0, np.inf], [1.0, 0.0]]
        advgeo.DistanceMatrix("hopping", vals, directed=True)
        with pytest.raises(ValidationError, match="hopping"):
            advgeo.DistanceMatrix("euclidean", vals, directed=True)
