# app/mslrt/families.py
"""
Null families with exact maximum-likelihood fits.

The M-split denominator must be the maximum of the null likelihood over the
whole family on the current batch; an under-maximized denominator inflates the
e-value. Closed forms are used wherever they exist; the logistic family needs an
explicit opt-in and fails loudly when Newton's method does not converge.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, Iterable, List

import numpy as np
from pydantic import BaseModel
from scipy.special import expit

from app.models.null_family import (
    BernoulliNull, GaussianMeanModel, bernoulli_log_densities, bernoulli_mle, gaussian_mean_mle
)
from app.models.sample import LabeledSet
from app.utils.exceptions import MleConvergenceError, UsageError
from app.utils.logger import get_logger

logger = get_logger()


class NullFamily(ABC):
    """A parametric null family fitted by maximum likelihood on one batch"""

    name: str = "null"

    @abstractmethod
    def mle(self, batch: LabeledSet) -> Any:
        """Maximum-likelihood parameters on the batch"""

    @abstractmethod
    def log_density(self, batch: LabeledSet, params: Any) -> np.ndarray:
        """Per-point log density of the batch under params"""

    def log_likelihood(self, batch: LabeledSet, params: Any) -> float:
        return float(np.sum(self.log_density(batch, params)))

    def candidate_grid(self, batch: LabeledSet, size: int = 1000) -> Iterable[Any]:
        """Parameters to compare the MLE against"""
        return []


class GaussianMeanFamily(NullFamily):
    """{N(mu, variance) : mu real} on the first feature"""
    name = "gaussian_mean"

    def __init__(self, variance: float = 1.0):
        self.variance = variance

    def mle(self, batch):
        return gaussian_mean_mle(batch.x[:, 0], self.variance)

    def log_density(self, batch, params: GaussianMeanModel):
        return params.log_density(batch.x[:, 0])

    def candidate_grid(self, batch, size=1000):
        center = float(np.mean(batch.x[:, 0]))
        for mu in np.linspace(center - 3.0, center + 3.0, size):
            yield GaussianMeanModel(mean=float(mu), variance=self.variance)


class SingletonGaussianFamily(NullFamily):
    """The simple null {N(mean, variance)}"""
    name = "gaussian_singleton"

    def __init__(self, mean: float = 0.0, variance: float = 1.0):
        self.model = GaussianMeanModel(mean=mean, variance=variance)

    def mle(self, batch):
        return self.model

    def log_density(self, batch, params: GaussianMeanModel):
        return params.log_density(batch.x[:, 0])

    def candidate_grid(self, batch, size=1000):
        return [self.model]


class BernoulliFamily(NullFamily):
    """Labels independent of everything: {Bern(q) : q in [0, 1]}"""
    name = "bernoulli"

    def mle(self, batch):
        return bernoulli_mle(batch.y)

    def log_density(self, batch, params: BernoulliNull):
        return bernoulli_log_densities(params, batch.y)

    def candidate_grid(self, batch, size=1000):
        # interior grid; the endpoints have -inf likelihood whenever both labels occur
        for q in np.linspace(0.0, 1.0, size + 2)[1:-1]:
            yield BernoulliNull(q_hat=float(q))


class StratifiedBernoulliNull(BaseModel):
    """One Bernoulli label model per value of a discrete conditioning variable"""
    strata: Dict[float, BernoulliNull]


class StratifiedBernoulliFamily(NullFamily):
    """Y independent of X given a discrete Z: Bern(q_z) per stratum"""
    name = "stratified_bernoulli"

    @staticmethod
    def _strata(batch: LabeledSet) -> np.ndarray:
        if batch.z is None:
            return np.zeros(len(batch))
        return batch.z[:, 0]

    def mle(self, batch):
        z = self._strata(batch)
        return StratifiedBernoulliNull(
            strata={float(v): bernoulli_mle(batch.y[z == v]) for v in np.unique(z)}
        )

    def log_density(self, batch, params: StratifiedBernoulliNull):
        z = self._strata(batch)
        out = np.empty(len(batch))
        for value in np.unique(z):
            if float(value) not in params.strata:
                raise UsageError(f"stratum z={value} has no fitted parameters")
            mask = z == value
            out[mask] = bernoulli_log_densities(params.strata[float(value)], batch.y[mask])
        return out

    def candidate_grid(self, batch, size=1000):
        fitted = self.mle(batch)
        for q in np.linspace(0.0, 1.0, size + 2)[1:-1]:
            for key in fitted.strata:
                strata = dict(fitted.strata)
                strata[key] = BernoulliNull(q_hat=float(q))
                yield StratifiedBernoulliNull(strata=strata)


class LogisticNull(BaseModel):
    coef: List[float]  # intercept first


class LogisticOnZFamily(NullFamily):
    """P(Y=1 | Z=z) = sigmoid(b0 + b.z), fitted by Newton's method"""
    name = "logistic_on_z"

    def __init__(self, allow_convex_mle: bool = False, grad_tol: float = 1e-10, max_iter: int = 100):
        if not allow_convex_mle:
            raise UsageError(
                "logistic null family uses an iterative MLE; pass allow_convex_mle=True to opt in"
            )
        self.grad_tol = grad_tol
        self.max_iter = max_iter

    @staticmethod
    def _design(batch: LabeledSet) -> np.ndarray:
        z = batch.z if batch.z is not None else np.empty((len(batch), 0))
        return np.column_stack([np.ones(len(batch)), z])

    def mle(self, batch):
        design = self._design(batch)
        y = batch.y.astype(float)
        coef = np.zeros(design.shape[1])
        grad_norm = np.inf
        for iteration in range(1, self.max_iter + 1):
            p = expit(design @ coef)
            grad = design.T @ (y - p)
            grad_norm = float(np.linalg.norm(grad))
            if grad_norm <= self.grad_tol:
                return LogisticNull(coef=coef.tolist())
            hessian = design.T @ (design * (p * (1.0 - p))[:, None])
            try:
                coef = coef + np.linalg.solve(hessian, grad)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(coef)):
                break
        raise MleConvergenceError(
            "Logistic null MLE did not converge; the e-value denominator would be invalid",
            grad_norm, iteration,
        )

    def log_density(self, batch, params: LogisticNull):
        logits = self._design(batch) @ np.asarray(params.coef)
        y = batch.y
        return np.where(y == 1, -np.logaddexp(0.0, -logits), -np.logaddexp(0.0, logits))

    def candidate_grid(self, batch, size=1000):
        fitted = np.asarray(self.mle(batch).coef)
        rng = np.random.default_rng(0)
        for _ in range(size):
            yield LogisticNull(coef=(fitted + rng.normal(0.0, 0.5, size=fitted.shape)).tolist())
