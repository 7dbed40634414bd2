"""advgeo: class-geometry analysis of classifiers under adversarial attack."""

from .advmap import AdversarialMap, create_map, neighbor_consistency
from .dataset import (
    AttackLog,
    AttackRecord,
    DataPoint,
    LabeledDataset,
    ValidationError,
    generate_blobs,
    line_centers,
    load_attack_log,
    load_dataset,
    save_attack_log,
    save_dataset,
    simulate_attack,
    subsample,
)
from .distances import (
    ClassCentroids,
    DistanceMatrix,
    class_centroids,
    centroids_of_coords,
    cosine_scaled_distance_matrix,
    euclidean_distance_matrix,
)
from .knn import (
    ForbiddenDistance,
    HopResult,
    KnnGraph,
    average_displacement,
    build_knn_graph,
    forbidden_distance,
    hop_distance_point,
    hopping_distance_matrix,
    mean_off_diagonal,
    nearest_class_affinity,
)
from .susceptible import (
    AccuracyReport,
    SusceptibilityRanking,
    evaluate_accuracy,
    predict_targets,
    rank_global,
)
from .transition import (
    EntropyEntry,
    EntropyReport,
    TransitionModel,
    entropy_sweep,
    model_entropy,
    uniform_transition,
    weighted_transition,
)
from .tsne import (
    AffinityMatrix,
    Embedding2D,
    TsneParams,
    conditional_affinities,
    kl_divergence,
    kl_gradient,
    load_embedding,
    save_embedding,
    tsne_distance_matrix,
    tsne_embed,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
