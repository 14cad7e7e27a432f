# app/baselines/mmd.py
"""
MMD two-sample test on features learned by the classifier.
"""
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist

from app.baselines.permutation import PermutationResult, permutation_test
from app.models.mlp import MlpModel
from app.utils.exceptions import UsageError


class FeatureExtractor:
    """Taps the last hidden layer of a trained classifier"""

    def __init__(self, model: MlpModel):
        self.model = model

    @property
    def feature_dim(self) -> int:
        return self.model.feature_dim

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.model.hidden_features(x)


def median_heuristic(pooled: np.ndarray) -> float:
    """Median pairwise Euclidean distance; 1.0 when all points coincide"""
    distances = pdist(np.asarray(pooled, dtype=float))
    positive = distances[distances > 0]
    return float(np.median(positive)) if positive.size else 1.0


def gaussian_kernel(a: np.ndarray, b: np.ndarray, bandwidth: float) -> np.ndarray:
    return np.exp(-cdist(a, b, "sqeuclidean") / (2.0 * bandwidth ** 2))


def mmd2_from_kernel(kernel: np.ndarray, labels: np.ndarray) -> float:
    """Biased MMD^2 between the label-0 and label-1 parts of a pooled kernel matrix"""
    m0, m1 = labels == 0, labels == 1
    return float(
        kernel[np.ix_(m0, m0)].mean() + kernel[np.ix_(m1, m1)].mean() - 2.0 * kernel[np.ix_(m0, m1)].mean()
    )


def mmd2_biased(features0: np.ndarray, features1: np.ndarray, bandwidth: float) -> float:
    """||mean embedding 0 - mean embedding 1||^2 under a Gaussian kernel"""
    pooled = np.vstack([features0, features1])
    labels = np.r_[np.zeros(len(features0), dtype=np.int64), np.ones(len(features1), dtype=np.int64)]
    return mmd2_from_kernel(gaussian_kernel(pooled, pooled, bandwidth), labels)


def mc2st(features0: np.ndarray, features1: np.ndarray, bandwidth: Optional[float] = None,
          n_permutations: int = 500, seed: int = 0, exact: bool = False) -> PermutationResult:
    """Permutation test of the biased MMD^2 over the pooled features"""
    f0 = np.atleast_2d(np.asarray(features0, dtype=float))
    f1 = np.atleast_2d(np.asarray(features1, dtype=float))
    if f0.size == 0 or f1.size == 0:
        raise UsageError("both feature sets must be non-empty")
    pooled = np.vstack([f0, f1])
    if bandwidth is None:
        bandwidth = median_heuristic(pooled)
    kernel = gaussian_kernel(pooled, pooled, bandwidth)
    labels = np.r_[np.zeros(len(f0), dtype=np.int64), np.ones(len(f1), dtype=np.int64)]
    return permutation_test(lambda y: mmd2_from_kernel(kernel, y), labels, n_permutations, seed, exact)
