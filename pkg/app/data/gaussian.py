# app/data/gaussian.py
import numpy as np
from pydantic import BaseModel, Field


class GaussianTwoSampleConfig(BaseModel):
    """Two isotropic Gaussians in `dim` dimensions"""
    mean0: float = 0.0
    mean1: float = 0.0
    std0: float = Field(default=1.0, gt=0.0)
    std1: float = Field(default=1.0, gt=0.0)
    dim: int = Field(default=1, ge=1)

    @property
    def is_null(self) -> bool:
        return self.mean0 == self.mean1 and self.std0 == self.std1

    def sample(self, n: int, label: int, rng: np.random.Generator) -> np.ndarray:
        mean, std = (self.mean0, self.std0) if label == 0 else (self.mean1, self.std1)
        return rng.normal(mean, std, size=(n, self.dim))


class GaussianOneSampleConfig(BaseModel):
    """Data stream for one-sample tests: x ~ N(mean, std^2)"""
    mean: float = 0.0
    std: float = Field(default=1.0, gt=0.0)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(self.mean, self.std, size=(n, 1))
