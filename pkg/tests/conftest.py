import numpy as np
import pytest

import advgeo


@pytest.fixture(scope="session")
def blobs5():
    """Five overlapping blobs on a line; the k-NN graph is fully connected."""
    return advgeo.generate_blobs(5, 40, 3, 1.2, 0.8, seed=42)


@pytest.fixture(scope="session")
def blobs5_graph(blobs5):
    return advgeo.build_knn_graph(blobs5, 6)


@pytest.fixture(scope="session")
def blobs5_sd(blobs5_graph):
    return advgeo.hopping_distance_matrix(blobs5_graph)


@pytest.fixture(scope="session")
def blobs10():
    """Ten overlapping blobs, the paper-scale class count."""
    return advgeo.generate_blobs(10, 40, 3, 1.2, 0.8, seed=7)


def make_dataset(features, labels, n_classes=None):
    features = np.asarray(features, dtype=float)
    return advgeo.LabeledDataset.from_arrays(
        np.arange(len(features)), labels, features, n_classes
    )
