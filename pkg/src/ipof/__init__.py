"""Score-propagation booster for unsupervised outlier detectors.

Workflow: score a dataset with any detector, build the exact k-nearest-neighbor
graph, transpose it into per-point in-edge lists, then repeatedly average each
point's score with its nearest in-pointing sources until the scores settle.
Points nobody points at keep their own score, so isolated outliers stay
separated while clustered inliers reach consensus.
"""

from ipof.data import Dataset, SyntheticConfig, generate_synthetic, load_dataset, write_dataset
from ipof.detectors import (
    ScoreVector,
    knn_distance_scores,
    load_scores,
    lof_scores,
    minmax_normalize,
)
from ipof.evaluation import EvalReport, auc, improvement
from ipof.graphs import (
    CommonNeighborGraph,
    NeighborGraph,
    build_common_neighbors,
    build_knn,
    top_in_edges,
    write_edges,
)
from ipof.pipeline import (
    BenchmarkReport,
    ExperimentResult,
    ExperimentSpec,
    SpecValidationError,
    StageError,
    eval_external_scores,
    export_outlier_edges,
    run_k_sweep,
    run_single,
)
from ipof.propagation import (
    PropagationConfig,
    PropagationTrace,
    backend_name,
    connected_components,
    propagate,
    propagate_step,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "SyntheticConfig",
    "generate_synthetic",
    "load_dataset",
    "write_dataset",
    "ScoreVector",
    "lof_scores",
    "knn_distance_scores",
    "load_scores",
    "minmax_normalize",
    "NeighborGraph",
    "CommonNeighborGraph",
    "build_knn",
    "build_common_neighbors",
    "top_in_edges",
    "write_edges",
    "PropagationConfig",
    "PropagationTrace",
    "propagate",
    "propagate_step",
    "connected_components",
    "backend_name",
    "EvalReport",
    "auc",
    "improvement",
    "ExperimentSpec",
    "ExperimentResult",
    "BenchmarkReport",
    "SpecValidationError",
    "StageError",
    "run_single",
    "run_k_sweep",
    "export_outlier_edges",
    "eval_external_scores",
    "__version__",
]
