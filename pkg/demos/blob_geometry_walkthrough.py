"""
Class geometry on synthetic blobs
=================================

Walk through the full geometric analysis on a small Gaussian-blob
dataset: build the k-NN graph, measure how many hops it takes to walk
from one class into another, derive the forbidden-distance threshold,
and draw the resulting class-to-class map.

Run with:  python3 demos/blob_geometry_walkthrough.py
"""

import numpy as np

import advgeo

# Five overlapping blobs in 3-D.  The spacing/spread ratio controls how
# entangled the classes are; 1.2 / 0.8 gives a connected k-NN graph.
dataset = advgeo.generate_blobs(
    n_classes=5, per_class=40, n_dims=3, centers=1.2, spread=0.8, seed=42
)
print(f"dataset: {dataset.n_points} points, {dataset.n_dims} dims, "
      f"{dataset.n_classes} classes")

# Centroid-based views of the same geometry.
cents = advgeo.class_centroids(dataset)
euclid = advgeo.euclidean_distance_matrix(cents)
cosine = advgeo.cosine_scaled_distance_matrix(cents)
print("\ncentroid Euclidean distances:")
print(np.round(euclid.values, 3))
print("\ncosine-scaled distances (shrink where centroids are near-orthogonal):")
print(np.round(cosine.values, 3))

# The hopping view: BFS depth on the directed 6-NN graph, averaged over
# every source point of a class, until the target class first appears.
graph = advgeo.build_knn_graph(dataset, k=6)
s_d = advgeo.hopping_distance_matrix(graph)
print("\nmean class-to-class hopping distances (directed):")
print(np.round(s_d.values, 3))

# One number summarizes the whole matrix: the mean finite off-diagonal
# entry.  Pairs farther apart than this are treated as out of reach.
f_d = advgeo.forbidden_distance(s_d)
print(f"\nforbidden distance threshold: {f_d.value:.3f} ({f_d.derivation})")

amap = advgeo.create_map(s_d, f_d)
print(f"map edges (source -> target, at most {dataset.n_classes - 1} per class):")
for src, tgt in sorted(amap.edge_pairs()):
    print(f"  {src} -> {tgt}   (distance {s_d.values[src, tgt]:.3f})")

# Which class does each point's neighborhood lean toward?  Row i gives
# the share of class-i points whose nearest out-of-class neighbor lies
# in each other class.
affinity = advgeo.nearest_class_affinity(graph)
print("\nnearest out-of-class neighbor shares:")
print(np.round(affinity, 3))
