"""Multi-view multiple (co-)clustering."""

try:
    from . import _mvmc as _core
except ImportError:  # development layout: extension sits in the build tree
    import _mvmc as _core

__all__ = [
    "ClusteringReport",
    "Dataset",
    "MvmcConfig",
    "MvmcError",
    "MvmcResult",
    "MvmccConfig",
    "MvmccResult",
    "SyntheticSpec",
    "TraceRow",
    "aggregated_kernels",
    "build_knn_graph",
    "build_report",
    "concat_standardized",
    "diversity_penalty",
    "dunn_index",
    "generate_synthetic",
    "harden_assignments",
    "hsic_pair",
    "jaccard",
    "kmeans_labels",
    "laplacian_sum",
    "load_dataset",
    "nmi",
    "save_dataset",
    "semi_nmf",
    "silhouette",
    "smoothness_penalty",
    "solve",
    "solve_cc",
]

globals().update({name: getattr(_core, name) for name in __all__})
