# app/data/discrete.py
"""
Discrete (X, Y) toys with an exactly known mutual information I(X;Y).

X takes values 0..K-1 and is one-hot encoded as features; Y is the label.
"""
from typing import List

import numpy as np
from pydantic import BaseModel, field_validator

from app.models.mlp import PROB_CLAMP


class DiscreteToyConfig(BaseModel):
    """Joint probability table, rows indexed by X, columns by Y in {0, 1}"""
    table: List[List[float]]

    @field_validator("table")
    def validate_table(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
            raise ValueError("table must have one row per X value and two columns")
        if np.any(arr < 0) or not np.isclose(arr.sum(), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("table entries must be non-negative and sum to 1")
        return v

    @property
    def joint(self) -> np.ndarray:
        return np.asarray(self.table, dtype=float)

    @property
    def n_values(self) -> int:
        return len(self.table)

    @property
    def mutual_information(self) -> float:
        return mutual_information(self.joint)

    @property
    def is_null(self) -> bool:
        return self.mutual_information <= 1e-15

    def bayes_posterior(self) -> np.ndarray:
        """P(Y=1 | X=x) for every x, clamped like classifier outputs"""
        joint = self.joint
        px = joint.sum(axis=1)
        post = np.divide(joint[:, 1], px, out=np.full(len(px), 0.5), where=px > 0)
        return np.clip(post, PROB_CLAMP, 1.0 - PROB_CLAMP)

    def sample(self, n: int, rng: np.random.Generator):
        """n i.i.d. draws from the joint table: (one-hot X, Y)"""
        cells = rng.choice(self.joint.size, size=n, p=self.joint.ravel())
        x_idx, y = np.divmod(cells, 2)
        return np.eye(self.n_values)[x_idx], y

    def sample_class(self, n: int, label: int, rng: np.random.Generator) -> np.ndarray:
        """n draws of one-hot X from P(X | Y=label)"""
        col = self.joint[:, label]
        x_idx = rng.choice(self.n_values, size=n, p=col / col.sum())
        return np.eye(self.n_values)[x_idx]


def mutual_information(joint: np.ndarray) -> float:
    """I(X;Y) in nats from a joint table"""
    joint = np.asarray(joint, dtype=float)
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    ratio = joint[mask] / (px @ py)[mask]
    return float(max(np.sum(joint[mask] * np.log(ratio)), 0.0))


def plugin_mutual_information(x_idx: np.ndarray, y: np.ndarray, n_values: int) -> float:
    """Plug-in estimate of I(X;Y) from samples"""
    counts = np.zeros((n_values, 2))
    np.add.at(counts, (np.asarray(x_idx), np.asarray(y)), 1.0)
    return mutual_information(counts / counts.sum())
