# app/ec2st/evalues.py
"""
Batch e-values of the classifier two-sample test.

For batch m with labels y_n and classifier probabilities sigma_n (model trained on
earlier batches only) the e-value is

    prod_n  Bern(y_n; sigma_n) / Bern(y_n; q_hat),   q_hat = mean(y)

and its bounded version mixes every point with the null model,

    prod_n  (lambda + (1 - lambda) * E_n).
"""
from dataclasses import dataclass
from typing import Iterator, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, model_validator
from scipy.optimize import minimize

from app.models.null_family import bernoulli_log_densities, bernoulli_mle, label_log_likelihoods
from app.utils.exceptions import UsageError

LambdaMethod = Literal["bisection", "lbfgsb"]

DEFAULT_LAMBDA_BOUNDS = (1e-6, 1.0 - 1e-6)


class PointEValue(BaseModel):
    """Per-point likelihood ratio of alternative vs fitted null"""
    log_p_alt: float
    log_p_null: float
    log_e: float

    @model_validator(mode="after")
    def validate_consistency(self):
        if abs(self.log_e - (self.log_p_alt - self.log_p_null)) > 1e-12:
            raise ValueError("log_e must equal log_p_alt - log_p_null")
        return self


@dataclass(frozen=True)
class PointEValues:
    """Column view of the per-point records of one batch"""
    log_p_alt: np.ndarray
    log_p_null: np.ndarray

    @property
    def log_e(self) -> np.ndarray:
        return self.log_p_alt - self.log_p_null

    @classmethod
    def from_points(cls, points: Sequence[PointEValue]) -> "PointEValues":
        if len(points) == 0:
            raise UsageError("expected at least one point e-value")
        return cls(np.array([p.log_p_alt for p in points]), np.array([p.log_p_null for p in points]))

    def __len__(self) -> int:
        return len(self.log_p_alt)

    def __iter__(self) -> Iterator[PointEValue]:
        for a, b, e in zip(self.log_p_alt, self.log_p_null, self.log_e):
            yield PointEValue(log_p_alt=float(a), log_p_null=float(b), log_e=float(e))


def _as_points(points) -> PointEValues:
    if isinstance(points, PointEValues):
        if len(points) == 0:
            raise UsageError("expected at least one point e-value")
        return points
    return PointEValues.from_points(list(points))


def point_evalues(log_p_alt: np.ndarray, log_p_null: np.ndarray) -> Tuple[float, PointEValues]:
    """Batch log e-value and per-point records from per-point log densities"""
    points = PointEValues(np.asarray(log_p_alt, dtype=float), np.asarray(log_p_null, dtype=float))
    return float(np.sum(points.log_e)), points


def batch_log_evalue(probs: Sequence[float], labels: Sequence[int]) -> Tuple[float, PointEValues]:
    """Log of the batch e-value against the Bernoulli MLE of the batch's own labels"""
    probs = np.asarray(probs, dtype=float).reshape(-1)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if probs.size == 0:
        raise UsageError("batch is empty")
    if probs.size != labels.size:
        raise UsageError(f"probabilities and labels differ in length ({probs.size} vs {labels.size})")
    if np.any((probs <= 0.0) | (probs >= 1.0)):
        raise UsageError("classifier probabilities must lie strictly inside (0, 1)")

    null = bernoulli_mle(labels)
    return point_evalues(label_log_likelihoods(probs, labels), bernoulli_log_densities(null, labels))


def _validate_lambda(lam: float):
    if not 0.0 < lam < 1.0:
        raise UsageError(f"lambda must lie in (0, 1), got {lam}")


def bounded_point_log_evalues(points, lam: float) -> np.ndarray:
    """log(lambda + (1 - lambda) * E_n) per point"""
    _validate_lambda(lam)
    pts = _as_points(points)
    return np.logaddexp(np.log(lam), np.log1p(-lam) + pts.log_e)


def bounded_log_evalue(points, lam: float) -> float:
    """Sum over the batch of the per-point mixture log e-values"""
    return float(np.sum(bounded_point_log_evalues(points, lam)))


def lambda_objective(points, lam: float) -> float:
    """sum_n log(lam*p0_n + (1-lam)*pA_n) - sum_n log p0_n"""
    return bounded_log_evalue(points, lam)


def lambda_derivative(points, lam: float) -> float:
    """sum_n (p0_n - pA_n) / (lam*p0_n + (1-lam)*pA_n), written with E_n = pA_n / p0_n"""
    e = np.exp(_as_points(points).log_e)
    return float(np.sum((1.0 - e) / (lam + (1.0 - lam) * e)))


def optimize_lambda(points, bounds: Tuple[float, float] = DEFAULT_LAMBDA_BOUNDS,
                    method: LambdaMethod = "bisection", tol: float = 1e-8) -> float:
    """Maximize the concave mixture objective over [lambda_min, lambda_max].

    Bisection on the derivative; when the derivative keeps one sign over the
    interval the matching bound is returned, lambda_min on a flat objective.
    """
    pts = _as_points(points)
    lo, hi = bounds
    if not 0.0 < lo < hi < 1.0:
        raise UsageError(f"lambda bounds must satisfy 0 < min < max < 1, got {bounds}")

    if method == "lbfgsb":
        return _optimize_lambda_lbfgsb(pts, lo, hi)
    if method != "bisection":
        raise UsageError(f"Unsupported lambda solver: {method}")

    if lambda_derivative(pts, lo) <= 0.0:
        return lo
    if lambda_derivative(pts, hi) >= 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lambda_derivative(pts, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _optimize_lambda_lbfgsb(pts: PointEValues, lo: float, hi: float) -> float:
    start = min(max(0.5, lo), hi)
    res = minimize(
        lambda v: -lambda_objective(pts, float(v[0])),
        x0=np.array([start]),
        jac=lambda v: np.array([-lambda_derivative(pts, float(v[0]))]),
        bounds=[(lo, hi)],
        method="L-BFGS-B",
    )
    return float(np.clip(res.x[0], lo, hi))
