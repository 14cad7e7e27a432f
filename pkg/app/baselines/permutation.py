# app/baselines/permutation.py
from itertools import combinations
from math import comb
from typing import Callable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from app.utils.exceptions import UsageError
from app.utils.seeding import derive_rng

# label arrangements beyond this count are never enumerated exhaustively
MAX_EXACT_PERMUTATIONS = 100_000


class PermutationResult(BaseModel):
    """Observed statistic with its permutation p-value"""
    statistic: float
    p_value: float = Field(gt=0.0, le=1.0)
    n_permutations: int
    permuted_statistics: Optional[List[float]] = None


def permutation_pvalue(observed: float, permuted: Sequence[float]) -> float:
    """(1 + #{permuted >= observed}) / (len + 1)"""
    permuted = np.asarray(permuted, dtype=float)
    if permuted.size == 0:
        raise UsageError("need at least one permuted statistic")
    return float((1 + np.count_nonzero(permuted >= observed)) / (permuted.size + 1))


def label_arrangements(labels: np.ndarray) -> List[np.ndarray]:
    """Every distinct rearrangement of a 0/1 label vector"""
    n, ones = len(labels), int(np.sum(labels))
    if comb(n, ones) > MAX_EXACT_PERMUTATIONS:
        raise UsageError("too many label arrangements for an exhaustive permutation test")
    arrangements = []
    for positions in combinations(range(n), ones):
        arranged = np.zeros(n, dtype=labels.dtype)
        arranged[list(positions)] = 1
        arrangements.append(arranged)
    return arrangements


def permutation_test(statistic: Callable[[np.ndarray], float], labels: Sequence[int], n_permutations: int,
                     seed: int = 0, exact: bool = False, keep_statistics: bool = False) -> PermutationResult:
    """Recompute ``statistic`` under label shuffles.

    Shuffle b uses its own generator derived from (seed, b), so the result does
    not depend on the order permutations are evaluated in. With ``exact`` every
    distinct arrangement is used instead of random shuffles.
    """
    labels = np.asarray(labels, dtype=np.int64)
    observed = float(statistic(labels))
    if exact:
        shuffles = label_arrangements(labels)
    else:
        if n_permutations < 1:
            raise UsageError("need at least one permutation")
        shuffles = (derive_rng(seed, b, "permutation").permutation(labels) for b in range(n_permutations))
    permuted = [float(statistic(shuffled)) for shuffled in shuffles]
    return PermutationResult(
        statistic=observed,
        p_value=permutation_pvalue(observed, permuted),
        n_permutations=len(permuted),
        permuted_statistics=permuted if keep_statistics else None,
    )
