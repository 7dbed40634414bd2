"""Inter-class distance matrices and centroid-based measures.

Two of the four measures live here: the N-D Euclidean distance between class
centers of mass and its cosine-scaled variant (Euclidean distance times the
cosine similarity of the two centroid vectors about the origin).  The other
two (2-D embedding distance, hopping distance) reuse ``DistanceMatrix``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledDataset, ValidationError

MEASURES = ("tsne", "euclidean", "euclidean_cosine", "hopping")


@dataclass(frozen=True)
class DistanceMatrix:
    """n x n inter-class distances for one measure.

    Diagonal is exactly zero.  Undirected matrices are symmetric; the hopping
    measure is directed and may contain +inf for unreachable class pairs.
    """

    measure: str
    values: np.ndarray
    directed: bool
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise ValidationError(f"unknown measure {self.measure!r}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValidationError("distance matrix must be square")
        if np.any(np.diag(values) != 0.0):
            raise ValidationError("distance matrix diagonal must be exactly 0")
        off = values[~np.eye(values.shape[0], dtype=bool)]
        if np.any(np.isnan(off)) or np.any(off < 0):
            raise ValidationError("off-diagonal distances must be >= 0 or +inf")
        if np.any(np.isinf(off)) and self.measure != "hopping":
            raise ValidationError("infinite distances only permitted for hopping")
        if not self.directed and not np.allclose(values, values.T, atol=1e-9):
            raise ValidationError("undirected distance matrix must be symmetric")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def n_classes(self) -> int:
        return self.values.shape[0]

    def off_diagonal(self) -> np.ndarray:
        n = self.n_classes
        return self.values[~np.eye(n, dtype=bool)]


@dataclass(frozen=True)
class ClassCentroids:
    """Per-class centers of mass (unit point mass: plain arithmetic means)."""

    centroids: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.centroids, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 2 or counts.shape != (c.shape[0],):
            raise ValidationError("centroids must be (n, dims) with one count per class")
        c.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "centroids", c)
        object.__setattr__(self, "counts", counts)

    @property
    def n_classes(self) -> int:
        return self.centroids.shape[0]


def class_centroids(dataset: LabeledDataset) -> ClassCentroids:
    """Arithmetic mean feature vector of each class."""
    n = dataset.n_classes
    centroids = np.empty((n, dataset.n_dims))
    counts = np.empty(n, dtype=np.int64)
    for c in range(n):
        mask = dataset.labels == c
        counts[c] = mask.sum()
        if counts[c] == 0:
            raise ValidationError(f"class {c} is empty")
        centroids[c] = dataset.features[mask].sum(axis=0) / counts[c]
    return ClassCentroids(centroids, counts)


def centroids_of_coords(coords: np.ndarray, labels: np.ndarray, n_classes: int) -> ClassCentroids:
    """Centroids of arbitrary coordinates (used for 2-D embeddings)."""
    coords = np.asarray(coords, dtype=np.float64)
    labels = np.asarray(labels)
    centroids = np.empty((n_classes, coords.shape[1]))
    counts = np.empty(n_classes, dtype=np.int64)
    for c in range(n_classes):
        mask = labels == c
        counts[c] = mask.sum()
        if counts[c] == 0:
            raise ValidationError(f"class {c} is empty")
        centroids[c] = coords[mask].sum(axis=0) / counts[c]
    return ClassCentroids(centroids, counts)


def _pairwise_euclidean(c: np.ndarray) -> np.ndarray:
    diff = c[:, None, :] - c[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(d, 0.0)
    return d


def euclidean_distance_matrix(centroids: ClassCentroids, measure: str = "euclidean") -> DistanceMatrix:
    """Euclidean distance between class centers of mass."""
    d = _pairwise_euclidean(centroids.centroids)
    d = (d + d.T) / 2.0  # exact symmetry
    return DistanceMatrix(measure, d, directed=False)


def cosine_scaled_distance_matrix(centroids: ClassCentroids) -> DistanceMatrix:
    """Euclidean centroid distance scaled by the centroid cosine similarity.

    The cosine is taken about the feature-space origin.  A negative cosine
    would produce a negative "distance", which the map threshold and the
    1/d weighting downstream cannot use, so the stored value uses |cos| and
    the signed product is kept in ``metadata["signed_values"]``.
    """
    c = centroids.centroids
    norms = np.linalg.norm(c, axis=1)
    if np.any(norms == 0):
        zero = int(np.flatnonzero(norms == 0)[0])
        raise ValidationError(f"class {zero} centroid is the zero vector; cosine undefined")
    euclid = _pairwise_euclidean(c)
    cos = (c @ c.T) / np.outer(norms, norms)
    cos = np.clip(cos, -1.0, 1.0)
    signed = euclid * cos
    values = euclid * np.abs(cos)
    values = (values + values.T) / 2.0
    signed = (signed + signed.T) / 2.0
    np.fill_diagonal(values, 0.0)
    np.fill_diagonal(signed, 0.0)
    signed.flags.writeable = False
    return DistanceMatrix(
        "euclidean_cosine", values, directed=False, metadata={"signed_values": signed}
    )
