# app/models/evidence.py
import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# exp(-745) is the smallest positive double; zero e-values are floored here
LOG_EVALUE_FLOOR = -745.0


class LogEValue(BaseModel):
    """A non-negative evidence value kept as its natural log (nats)"""
    model_config = ConfigDict(frozen=True)

    log_e: float

    @field_validator("log_e")
    def validate_finite(cls, v):
        if math.isnan(v) or v == math.inf:
            raise ValueError("log e-value must be finite")
        return max(v, LOG_EVALUE_FLOOR)

    @classmethod
    def from_value(cls, value: float) -> "LogEValue":
        """Build from a linear-domain e-value, flooring exact zeros"""
        if value < 0 or math.isnan(value):
            raise ValueError(f"e-values are non-negative, got {value}")
        if value == 0:
            return cls(log_e=LOG_EVALUE_FLOOR)
        return cls(log_e=math.log(value))

    @property
    def value(self) -> float:
        return math.exp(self.log_e)

    def __float__(self) -> float:
        return self.log_e


class EProcess(BaseModel):
    """Running product of batch e-values with its rejection ledger"""

    alpha: float = Field(default=0.05, gt=0.0, le=1.0)
    log_increments: List[float] = Field(default_factory=list)
    log_running: List[float] = Field(default_factory=list)
    rejected_at: Optional[int] = None  # 1-based batch index

    @property
    def threshold(self) -> float:
        """-log(alpha); rejection happens when the running log e-value reaches it"""
        return -math.log(self.alpha)

    @property
    def log_e(self) -> float:
        return self.log_running[-1] if self.log_running else 0.0

    @property
    def n_batches(self) -> int:
        return len(self.log_increments)

    @property
    def rejected(self) -> bool:
        return self.rejected_at is not None


class Verdict(BaseModel):
    """Outcome of a sequential test run"""

    rejected: bool
    at_batch: Optional[int] = None
    final_log_e: float = 0.0
    samples_consumed: int = 0

    @model_validator(mode="after")
    def validate_rejection(self):
        if self.rejected != (self.at_batch is not None):
            raise ValueError("at_batch must be set exactly when the test rejected")
        return self
