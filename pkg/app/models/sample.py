# app/models/sample.py
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, field_validator

from app.utils.exceptions import UsageError


class LabeledSample(BaseModel):
    """A single pooled observation: features plus class label"""
    x: List[float]
    y: int

    @field_validator("x")
    def validate_features(cls, v):
        if not np.all(np.isfinite(v)):
            raise ValueError("features must be finite")
        return v

    @field_validator("y")
    def validate_label(cls, v):
        if v not in (0, 1):
            raise ValueError("label must be 0 or 1")
        return v


@dataclass
class LabeledSet:
    """Column-oriented collection of labeled samples.

    ``x`` has shape (n, d), ``y`` shape (n,) with values in {0, 1}; ``z`` is an
    optional conditioning block of shape (n, k).
    """
    x: np.ndarray
    y: np.ndarray
    z: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if self.x.ndim == 1:
            self.x = self.x.reshape(-1, 1)
        self.y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if len(self.x) != len(self.y):
            raise UsageError(f"features and labels differ in length ({len(self.x)} vs {len(self.y)})")
        if self.z is not None:
            self.z = np.asarray(self.z, dtype=float)
            if self.z.ndim == 1:
                self.z = self.z.reshape(-1, 1)
            if len(self.z) != len(self.y):
                raise UsageError("conditioning block and labels differ in length")

    def __len__(self) -> int:
        return len(self.y)

    def __iter__(self) -> Iterator[LabeledSample]:
        for xi, yi in zip(self.x, self.y):
            yield LabeledSample(x=xi.tolist(), y=int(yi))

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def class_counts(self) -> Tuple[int, int]:
        ones = int(self.y.sum())
        return len(self.y) - ones, ones

    @classmethod
    def empty(cls, dim: int) -> "LabeledSet":
        return cls(np.empty((0, dim)), np.empty(0, dtype=np.int64))

    @classmethod
    def from_samples(cls, samples: Sequence[LabeledSample]) -> "LabeledSet":
        if not samples:
            raise UsageError("cannot build a labeled set from no samples")
        return cls(np.array([s.x for s in samples]), np.array([s.y for s in samples]))

    @classmethod
    def concat(cls, parts: Sequence["LabeledSet"]) -> "LabeledSet":
        parts = [p for p in parts if p is not None]
        if not parts:
            raise UsageError("nothing to concatenate")
        z = None
        if all(p.z is not None for p in parts):
            z = np.concatenate([p.z for p in parts])
        return cls(np.concatenate([p.x for p in parts]), np.concatenate([p.y for p in parts]), z)

    def take(self, index) -> "LabeledSet":
        z = self.z[index] if self.z is not None else None
        return LabeledSet(self.x[index], self.y[index], z)

    def split(self, fractions: Sequence[float], rng: Optional[np.random.Generator] = None) -> List["LabeledSet"]:
        """Split into consecutive parts with the given fractions (shuffled first if rng given).

        Cut points are rounded down; the last part absorbs the remainder.
        """
        n = len(self)
        order = rng.permutation(n) if rng is not None else np.arange(n)
        total = float(sum(fractions))
        bounds = np.floor(np.cumsum(fractions)[:-1] / total * n).astype(int)
        return [self.take(idx) for idx in np.split(order, bounds)]

    def stratified_split(self, fractions: Sequence[float], rng: np.random.Generator) -> List["LabeledSet"]:
        """Split each class separately so every part keeps the class ratio"""
        per_class = [self.take(np.flatnonzero(self.y == c)).split(fractions, rng) for c in (0, 1)]
        return [LabeledSet.concat([per_class[0][i], per_class[1][i]]) for i in range(len(fractions))]

    def shuffled(self, rng: np.random.Generator) -> "LabeledSet":
        return self.take(rng.permutation(len(self)))
