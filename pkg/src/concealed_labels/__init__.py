"""Learning from concealed labels.

A numpy library for the privacy-preserving annotation setting where
sensitive classes never appear in the label set: data is annotated through
a randomized concealment channel, and classifiers are trained with an
unbiased (or non-negativity-corrected) empirical risk estimator that
recovers the ordinary supervised risk.
"""

from .class_space import (
    CONCEALED,
    NONE_LABEL,
    ClassSpace,
    ClassSpaceError,
    index_to_label,
    score_index,
)
from .data import (
    ConcealedData,
    ConcealedSample,
    DatasetError,
    LabeledData,
    annotate_dataset,
    annotate_sample,
    draw_label_subsets,
    make_gaussian_mixture,
)
from .idx import IdxFormatError, load_idx_pair, read_idx_images, read_idx_labels
from .losses import LossFamily, LossSpec, Surrogate, loss_grad, loss_matrix, loss_value
from .models import (
    Adam,
    EpochStats,
    LinearModel,
    MLPModel,
    SGD,
    ScoreModel,
    evaluate,
    load_checkpoint,
    predict,
    predict_from_scores,
    save_checkpoint,
    train,
    train_supervised,
)
from .oracle import (
    ChannelDistribution,
    FiniteDistribution,
    InvalidChannelError,
    MonteCarloResult,
    apply_channel,
    bayes_error_rate,
    exact_cl_risk,
    exact_error_rate,
    exact_supervised_risk,
    invert_channel,
    monte_carlo_unbiasedness,
    random_distribution,
    square_ovr_optimal_scores,
)
from .risk import (
    Correction,
    EmptyPartitionError,
    RiskReport,
    empirical_risk,
    per_class_risk,
    risk_gradient,
    supervised_risk,
)

__version__ = "0.1.0"

__all__ = [
    "CONCEALED",
    "NONE_LABEL",
    "ClassSpace",
    "ClassSpaceError",
    "index_to_label",
    "score_index",
    "ConcealedData",
    "ConcealedSample",
    "DatasetError",
    "LabeledData",
    "annotate_dataset",
    "annotate_sample",
    "draw_label_subsets",
    "make_gaussian_mixture",
    "IdxFormatError",
    "load_idx_pair",
    "read_idx_images",
    "read_idx_labels",
    "LossFamily",
    "LossSpec",
    "Surrogate",
    "loss_grad",
    "loss_matrix",
    "loss_value",
    "Adam",
    "EpochStats",
    "LinearModel",
    "MLPModel",
    "SGD",
    "ScoreModel",
    "evaluate",
    "load_checkpoint",
    "predict",
    "predict_from_scores",
    "save_checkpoint",
    "train",
    "train_supervised",
    "ChannelDistribution",
    "FiniteDistribution",
    "InvalidChannelError",
    "MonteCarloResult",
    "apply_channel",
    "bayes_error_rate",
    "exact_cl_risk",
    "exact_error_rate",
    "exact_supervised_risk",
    "invert_channel",
    "monte_carlo_unbiasedness",
    "random_distribution",
    "square_ovr_optimal_scores",
    "Correction",
    "EmptyPartitionError",
    "RiskReport",
    "empirical_risk",
    "per_class_risk",
    "risk_gradient",
    "supervised_risk",
    "__version__",
]
