from .evidence import LOG_EVALUE_FLOOR, LogEValue, EProcess, Verdict
from .sample import LabeledSample, LabeledSet
from .mlp import MODEL_FORMAT_VERSION, DenseLayer, MlpModel, init_mlp, mlp_forward, predict_prob
from .trainer import TrainConfig, TrainResult, fit_mlp, mlp_train
from .null_family import (
    BernoulliNull, GaussianMeanModel, bernoulli_mle, bernoulli_log_density, bernoulli_log_densities,
    label_log_likelihoods, gaussian_mean_mle
)

__all__ = [
    "LOG_EVALUE_FLOOR", "LogEValue", "EProcess", "Verdict",
    "LabeledSample", "LabeledSet",
    "MODEL_FORMAT_VERSION", "DenseLayer", "MlpModel", "init_mlp", "mlp_forward", "predict_prob",
    "TrainConfig", "TrainResult", "fit_mlp", "mlp_train",
    "BernoulliNull", "GaussianMeanModel", "bernoulli_mle", "bernoulli_log_density",
    "bernoulli_log_densities", "label_log_likelihoods", "gaussian_mean_mle"
]
