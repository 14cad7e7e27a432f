# app/models/null_family.py
"""
Closed-form maximum-likelihood null models: Bernoulli label model and
unit-variance Gaussian mean model.
"""
import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field

from app.utils.exceptions import DomainError, UsageError

LOG_2PI = math.log(2.0 * math.pi)


class BernoulliNull(BaseModel):
    """Label model Bern(q_hat)"""
    q_hat: float = Field(ge=0.0, le=1.0)


class GaussianMeanModel(BaseModel):
    """N(mean, variance) with the variance held fixed"""
    mean: float
    variance: float = Field(default=1.0, gt=0.0)

    def log_density(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float).reshape(-1)
        return -0.5 * (LOG_2PI + math.log(self.variance)) - (xs - self.mean) ** 2 / (2.0 * self.variance)


def _labels(labels: Sequence[int]) -> np.ndarray:
    y = np.asarray(labels, dtype=np.int64).reshape(-1)
    if y.size == 0:
        raise UsageError("cannot fit a Bernoulli model to an empty label sequence")
    if not np.isin(y, (0, 1)).all():
        raise UsageError("labels must be 0 or 1")
    return y


def bernoulli_mle(labels: Sequence[int]) -> BernoulliNull:
    """q_hat = #ones / length"""
    y = _labels(labels)
    return BernoulliNull(q_hat=int(y.sum()) / y.size)


def bernoulli_log_density(null: BernoulliNull, y: int) -> float:
    """y*log(q) + (1-y)*log(1-q), with log(1) = 0 at the certain outcome"""
    if y not in (0, 1):
        raise UsageError(f"label must be 0 or 1, got {y}")
    p = null.q_hat if y == 1 else 1.0 - null.q_hat
    if p <= 0.0:
        raise DomainError(f"label {y} has zero probability under q_hat={null.q_hat}")
    return math.log(p)


def bernoulli_log_densities(null: BernoulliNull, labels: Sequence[int]) -> np.ndarray:
    """Vectorized bernoulli_log_density"""
    y = _labels(labels)
    p = np.where(y == 1, null.q_hat, 1.0 - null.q_hat)
    if np.any(p <= 0.0):
        raise DomainError(f"labels contain an outcome with zero probability under q_hat={null.q_hat}")
    return np.log(p)


def label_log_likelihoods(probs: Sequence[float], labels: Sequence[int]) -> np.ndarray:
    """log p(y_n) under Bern(probs_n), one entry per point"""
    p = np.asarray(probs, dtype=float).reshape(-1)
    y = np.asarray(labels, dtype=np.int64).reshape(-1)
    return np.where(y == 1, np.log(p), np.log1p(-p))


def gaussian_mean_mle(xs: Sequence[float], variance: float = 1.0) -> GaussianMeanModel:
    """Sample mean with the variance fixed"""
    xs = np.asarray(xs, dtype=float).reshape(-1)
    if xs.size == 0:
        raise UsageError("cannot fit a Gaussian mean to an empty sample")
    return GaussianMeanModel(mean=float(np.mean(xs)), variance=variance)
