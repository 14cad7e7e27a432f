# app/mslrt/learners.py
"""
Alternative learners. A learner sees the full history of earlier batches on
every call and returns a fitted density or classifier; nothing is updated
incrementally.
"""
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from app.models.mlp import PROB_CLAMP, MlpModel
from app.models.null_family import GaussianMeanModel, label_log_likelihoods
from app.models.sample import LabeledSet
from app.models.trainer import TrainConfig, mlp_train
from app.utils.exceptions import UsageError
from app.utils.seeding import make_rng


class FittedDensity(ABC):
    @abstractmethod
    def log_density(self, batch: LabeledSet) -> np.ndarray:
        """Per-point log density"""


class AltLearner(ABC):
    """fit(history of batches < m) -> density evaluated on batch m"""

    @abstractmethod
    def fit(self, history: Optional[LabeledSet]) -> FittedDensity:
        ...


class GaussianDensity(FittedDensity):
    def __init__(self, model: GaussianMeanModel):
        self.model = model

    def log_density(self, batch):
        return self.model.log_density(batch.x[:, 0])


class FixedGaussianLearner(AltLearner):
    """Always N(mean, variance), whatever the history"""

    def __init__(self, mean: float = 0.0, variance: float = 1.0):
        self.model = GaussianMeanModel(mean=mean, variance=variance)

    def fit(self, history):
        return GaussianDensity(self.model)


class GaussianRunningMeanLearner(AltLearner):
    """N(mean of all earlier points, variance); prior_mean before any data"""

    def __init__(self, variance: float = 1.0, prior_mean: float = 0.0):
        self.variance = variance
        self.prior_mean = prior_mean

    def fit(self, history):
        mean = self.prior_mean if history is None or len(history) == 0 else float(np.mean(history.x[:, 0]))
        return GaussianDensity(GaussianMeanModel(mean=mean, variance=self.variance))


class ConditionalClassifier(FittedDensity):
    """p_A(y | x, z) from a classifier on the concatenated features (x, z)"""

    def __init__(self, model: MlpModel):
        self.model = model

    def predict_proba(self, x: np.ndarray, z: Optional[np.ndarray] = None) -> np.ndarray:
        features = x if z is None else np.column_stack([x, z])
        return self.model.predict_proba(features)

    def log_density(self, batch):
        return label_log_likelihoods(self.predict_proba(batch.x, batch.z), batch.y)


class StaticClassifier(FittedDensity):
    """Fixed probability function of (x, z); used for oracle and test classifiers"""

    def __init__(self, prob_fn):
        self.prob_fn = prob_fn

    def predict_proba(self, x: np.ndarray, z: Optional[np.ndarray] = None) -> np.ndarray:
        return np.clip(np.asarray(self.prob_fn(x, z), dtype=float).reshape(-1), PROB_CLAMP, 1.0 - PROB_CLAMP)

    def log_density(self, batch):
        return label_log_likelihoods(self.predict_proba(batch.x, batch.z), batch.y)


class LookupClassifier(StaticClassifier):
    """P(Y=1 | X=x) read from a table indexed by the one-hot position of x"""

    def __init__(self, posterior: np.ndarray):
        posterior = np.asarray(posterior, dtype=float)
        super().__init__(lambda x, z=None: posterior[np.argmax(x, axis=1)])


class ClassifierLearner(AltLearner):
    """Trains an MlpModel on the history, holding out a validation fraction.

    Before two samples have been seen it predicts a fair coin.
    """

    def __init__(self, train_config: TrainConfig, val_fraction: float = 0.2, seed: int = 0):
        if not 0.0 < val_fraction < 1.0:
            raise UsageError("validation fraction must lie in (0, 1)")
        self.train_config = train_config
        self.val_fraction = val_fraction
        self.seed = seed

    def fit(self, history):
        if history is None or len(history) < 2:
            return StaticClassifier(lambda x, z=None: np.full(len(x), 0.5))
        features = history.x if history.z is None else np.column_stack([history.x, history.z])
        data = LabeledSet(features, history.y)
        train, val = data.split([1.0 - self.val_fraction, self.val_fraction], make_rng(self.seed))
        if len(train) == 0 or len(val) == 0:
            train, val = data.take(slice(0, -1)), data.take(slice(-1, None))
        return ConditionalClassifier(mlp_train(train, val, self.train_config))


def oracle_learner(posterior: np.ndarray):
    """E-C2ST learner that ignores the data and returns the Bayes classifier"""
    classifier = LookupClassifier(posterior)

    def learn(train: LabeledSet, val: LabeledSet, config: TrainConfig) -> LookupClassifier:
        return classifier

    return learn
