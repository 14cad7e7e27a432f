# app/data/pooling.py
import numpy as np

from app.models.sample import LabeledSet
from app.utils.seeding import make_rng


def pool_and_label(sample0, sample1, seed=None) -> LabeledSet:
    """Label class-0 points 0 and class-1 points 1, then shuffle the pooled set"""
    s0 = np.asarray(sample0, dtype=float)
    s1 = np.asarray(sample1, dtype=float)
    dim = _dim(s0, s1)
    s0 = s0.reshape(-1, dim)
    s1 = s1.reshape(-1, dim)
    pooled = LabeledSet(
        np.concatenate([s0, s1]),
        np.concatenate([np.zeros(len(s0), dtype=np.int64), np.ones(len(s1), dtype=np.int64)]),
    )
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(0 if seed is None else seed)
    return pooled.shuffled(rng)


def _dim(s0: np.ndarray, s1: np.ndarray) -> int:
    for s in (s0, s1):
        if s.size:
            return s.shape[1] if s.ndim == 2 else 1
    return s0.shape[1] if s0.ndim == 2 else 1
