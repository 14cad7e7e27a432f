# app/baselines/c2st.py
"""
Permutation classifier two-sample tests on a held-out test fold. The trained
classifier is fixed; only the test labels are shuffled.
"""
import numpy as np

from app.baselines.permutation import PermutationResult, permutation_test
from app.models.mlp import MlpModel
from app.models.sample import LabeledSet
from app.utils.exceptions import UsageError


def _check_test_set(test: LabeledSet):
    if len(test) == 0:
        raise UsageError("test set is empty")
    n0, n1 = test.class_counts
    if n0 == 0 or n1 == 0:
        raise UsageError("test set must contain both classes")


def sc2st(model: MlpModel, test: LabeledSet, n_permutations: int = 500, seed: int = 0,
          exact: bool = False) -> PermutationResult:
    """Accuracy of the thresholded classifier (predict 1 iff p > 0.5)"""
    _check_test_set(test)
    predictions = (model.predict_proba(test.x) > 0.5).astype(np.int64)
    return permutation_test(lambda y: float(np.mean(predictions == y)), test.y, n_permutations, seed, exact)


def mean_logit_difference(logits: np.ndarray, labels: np.ndarray) -> float:
    """|mean logit on class 1 - mean logit on class 0|"""
    return float(abs(logits[labels == 1].mean() - logits[labels == 0].mean()))


def lc2st(model: MlpModel, test: LabeledSet, n_permutations: int = 500, seed: int = 0,
          exact: bool = False) -> PermutationResult:
    """Two-sided difference of the classes' mean logits"""
    _check_test_set(test)
    logits = model.logits(test.x)
    return permutation_test(lambda y: mean_logit_difference(logits, y), test.y, n_permutations, seed, exact)
