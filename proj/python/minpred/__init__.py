from ._minpred import (
    ConfigError,
    DataError,
    NumericalError,
    ShapeError,
    __version__,
    auc_pr,
    auc_roc,
    baseline,
    discover,
    generate,
    ksg_conditional_mi,
    ksg_mutual_information,
    knn_kl_divergence,
    load_csv,
    normalize,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "ShapeError",
    "__version__",
    "auc_pr",
    "auc_roc",
    "baseline",
    "discover",
    "generate",
    "ksg_conditional_mi",
    "ksg_mutual_information",
    "knn_kl_divergence",
    "load_csv",
    "normalize",
]
