"""mixval: mixture-aware model validation.

Datasets of N-ary mixtures violate the independence assumptions behind
ordinary cross-validation: mixtures sharing constituents have correlated
properties, so random splits reward constituent memorization. This
package builds constituent-aware validation splits, quantifies how much
apparent performance is explained by that memorization (pseudodescriptor
and y-randomization baselines), and ships a self-contained random forest,
metrics, a toy-data simulator, and an experiment harness with a CLI.
"""

from .core import (
    CollectionSpec,
    ConstituentId,
    Dataset,
    MixtureKey,
    build_dataset,
    canonical_key,
    enumerate_complete,
)
from .descriptors import (
    CombinerPolicy,
    DescriptorTable,
    combine,
    combine_matrix,
    gen_pseudodescriptors,
    y_randomize,
)
from .folds import (
    FoldPartition,
    FoldSplit,
    build_fold,
    build_fractured_fold,
    make_fold_partitions,
    partition_collection,
    standard_split,
)
from .harness import ExperimentConfig, FileSource, run_experiment
from .learner import (
    FittedModel,
    LearnerParams,
    fit,
    majority_baseline,
    predict_class,
    predict_score,
)
from .metrics import FoldMetric, accuracy, aggregate, auc_roc
from .report import Report, format_report, read_report, write_report
from .simulate import SimConfig, informative_descriptors, simulate

__version__ = "0.1.0"

__all__ = [
    "CollectionSpec",
    "CombinerPolicy",
    "ConstituentId",
    "Dataset",
    "DescriptorTable",
    "ExperimentConfig",
    "FileSource",
    "FittedModel",
    "FoldMetric",
    "FoldPartition",
    "FoldSplit",
    "LearnerParams",
    "MixtureKey",
    "Report",
    "SimConfig",
    "accuracy",
    "aggregate",
    "auc_roc",
    "build_dataset",
    "build_fold",
    "build_fractured_fold",
    "canonical_key",
    "combine",
    "combine_matrix",
    "enumerate_complete",
    "fit",
    "format_report",
    "gen_pseudodescriptors",
    "informative_descriptors",
    "majority_baseline",
    "make_fold_partitions",
    "partition_collection",
    "predict_class",
    "predict_score",
    "read_report",
    "run_experiment",
    "simulate",
    "standard_split",
    "write_report",
    "y_randomize",
]
