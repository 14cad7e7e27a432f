# app/mslrt/service.py
from .families import (
    BernoulliFamily, GaussianMeanFamily, LogisticOnZFamily, SingletonGaussianFamily,
    StratifiedBernoulliFamily
)
from app.models.trainer import TrainConfig
from .learners import ClassifierLearner, FixedGaussianLearner, GaussianRunningMeanLearner

def get_null_family(name: str, **kwargs):
    """Get the null family based on its name."""
    if name == "gaussian_mean":
        return GaussianMeanFamily(variance=kwargs.get("variance", 1.0))
    elif name == "gaussian_singleton":
        return SingletonGaussianFamily(mean=kwargs.get("mean", 0.0), variance=kwargs.get("variance", 1.0))
    elif name == "bernoulli":
        return BernoulliFamily()
    elif name == "stratified_bernoulli":
        return StratifiedBernoulliFamily()
    elif name == "logistic_on_z":
        return LogisticOnZFamily(allow_convex_mle=kwargs.get("allow_convex_mle", False))
    else:
        raise ValueError(f"Unsupported null family: {name}")

def get_alt_learner(name: str, **kwargs):
    """Get the alternative learner based on its name."""
    if name == "running_mean":
        return GaussianRunningMeanLearner(
            variance=kwargs.get("variance", 1.0), prior_mean=kwargs.get("prior_mean", 0.0)
        )
    elif name == "fixed_gaussian":
        return FixedGaussianLearner(mean=kwargs.get("mean", 0.0), variance=kwargs.get("variance", 1.0))
    elif name == "classifier":
        seed = kwargs.get("seed", 0)
        train_config = TrainConfig.model_validate(kwargs.get("train_config", {}))
        return ClassifierLearner(
            train_config.model_copy(update={"seed": seed}), val_fraction=kwargs.get("val_fraction", 0.2), seed=seed
        )
    else:
        raise ValueError(f"Unsupported alternative learner: {name}")
