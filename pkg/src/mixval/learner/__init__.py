"""Random forest learner with interchangeable compiled/pure-Python kernels."""

from .forest import (
    FittedModel,
    LearnerParams,
    Tree,
    active_backend,
    fit,
    load_model,
    majority_baseline,
    predict_class,
    predict_score,
    resolve_kernel,
    save_model,
)

__all__ = [
    "FittedModel",
    "LearnerParams",
    "Tree",
    "active_backend",
    "fit",
    "load_model",
    "majority_baseline",
    "predict_class",
    "predict_score",
    "resolve_kernel",
    "save_model",
]
