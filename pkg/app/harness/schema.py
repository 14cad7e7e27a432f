# app/harness/schema.py
"""
Declarative experiment description and the records an experiment produces.
"""
import math
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from app.baselines.service import BaselineConfig
from app.data.blob import BlobConfig
from app.data.csv_io import load_csv
from app.data.discrete import DiscreteToyConfig
from app.data.gaussian import GaussianOneSampleConfig, GaussianTwoSampleConfig
from app.data.streams import (
    BatchSource, BlobSource, DatasetSource, DiscreteToySource, GaussianOneSampleSource,
    GaussianTwoSampleSource
)
from app.ec2st.sequential import Ec2stConfig
from app.models.evidence import Verdict

ExperimentKind = Literal[
    "type1", "power", "stopping_time", "lambda_ablation", "batch_order", "inflation_demo", "growth_rate"
]
EXPERIMENT_KINDS: Tuple[str, ...] = ExperimentKind.__args__


class DataSpec(BaseModel):
    """Where the samples of every replication come from"""
    kind: Literal["blob", "gaussian", "gaussian_one_sample", "discrete", "csv"] = "blob"
    blob: BlobConfig = Field(default_factory=BlobConfig)
    gaussian: GaussianTwoSampleConfig = Field(default_factory=GaussianTwoSampleConfig)
    gaussian_one_sample: GaussianOneSampleConfig = Field(default_factory=GaussianOneSampleConfig)
    discrete: Optional[DiscreteToyConfig] = None
    csv_path: Optional[str] = None
    feature_columns: Optional[List[str]] = None
    label_column: str = "label"

    @model_validator(mode="after")
    def validate_source(self):
        if self.kind == "discrete" and self.discrete is None:
            raise ValueError("data.discrete is required when data.kind is 'discrete'")
        if self.kind == "csv" and not self.csv_path:
            raise ValueError("data.csv_path is required when data.kind is 'csv'")
        return self

    @property
    def is_null(self) -> Optional[bool]:
        """Whether both classes share one distribution; None when it cannot be known"""
        if self.kind == "blob":
            return self.blob.is_null
        if self.kind == "gaussian":
            return self.gaussian.is_null
        if self.kind == "discrete":
            return self.discrete.is_null
        return None

    @property
    def mutual_information(self) -> Optional[float]:
        return self.discrete.mutual_information if self.kind == "discrete" else None

    @property
    def supports_balanced(self) -> bool:
        return self.kind != "gaussian_one_sample"

    def source(self, seed: int = 0) -> BatchSource:
        if self.kind == "blob":
            return BlobSource(self.blob)
        if self.kind == "gaussian":
            return GaussianTwoSampleSource(self.gaussian)
        if self.kind == "gaussian_one_sample":
            return GaussianOneSampleSource(self.gaussian_one_sample)
        if self.kind == "discrete":
            return DiscreteToySource(self.discrete)
        dataset = load_csv(self.csv_path, self.feature_columns, self.label_column)
        return DatasetSource(dataset, seed=seed)


class MsplitSpec(BaseModel):
    null_family: str = "gaussian_singleton"
    alt_learner: str = "running_mean"
    null_params: Dict[str, Any] = Field(default_factory=dict)
    alt_params: Dict[str, Any] = Field(default_factory=dict)


class MethodSpec(BaseModel):
    """One test compared in an experiment"""
    name: Literal["ec2st", "sc2st", "lc2st", "mc2st", "msplit"] = "ec2st"
    label: Optional[str] = None
    ec2st: Ec2stConfig = Field(default_factory=Ec2stConfig)
    baseline: BaselineConfig = Field(default_factory=BaselineConfig)
    msplit: MsplitSpec = Field(default_factory=MsplitSpec)

    @property
    def display_name(self) -> str:
        return self.label or self.name

    @property
    def is_sequential(self) -> bool:
        return self.name in ("ec2st", "msplit")


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one experiment from its master seed"""
    kind: ExperimentKind
    data: DataSpec = Field(default_factory=DataSpec)
    methods: List[MethodSpec] = Field(default_factory=lambda: [MethodSpec()])
    alpha: float = Field(default=0.05, gt=0.0, le=1.0)
    batch_size: int = Field(default=90, ge=2)
    balanced: bool = True
    replications: int = Field(default=100, ge=1)
    sample_sizes: Optional[List[int]] = None
    max_batches: int = Field(default=20, ge=1)
    master_seed: int = Field(default=0, ge=0)
    jobs: int = Field(default=1, ge=1)
    output_dir: str = "results"
    svg: bool = False

    # stopping_time
    batch_sizes: List[int] = Field(default_factory=lambda: [8, 16, 32, 64, 128])
    max_samples: int = Field(default=2560, ge=2)

    # lambda_ablation
    ablation_batch_size: int = Field(default=32, ge=2)
    initial_lambdas: List[float] = Field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    include_fixed_lambda: bool = True

    # batch_order
    n_orders: int = Field(default=10, ge=1)

    # inflation_demo
    inflation_tests: List[Literal["ttest", "lc2st", "ec2st"]] = Field(
        default_factory=lambda: ["ttest", "lc2st", "ec2st"]
    )
    inflation_batches: int = Field(default=50, ge=1)
    per_class_range: Tuple[int, int] = (32, 64)
    lc2st_batches: int = Field(default=20, ge=1)
    lc2st_batch_size: int = Field(default=64, ge=2)

    # growth_rate
    growth_learner: Literal["oracle", "mlp"] = "oracle"

    @field_validator("sample_sizes", "batch_sizes", "initial_lambdas", "methods", "inflation_tests")
    def validate_non_empty(cls, v):
        if v is not None and len(v) == 0:
            raise ValueError("grids must be non-empty")
        return v

    @field_validator("sample_sizes", "batch_sizes")
    def validate_sizes(cls, v):
        if v is not None and any(s < 2 for s in v):
            raise ValueError("sizes must be at least 2")
        return v

    @model_validator(mode="after")
    def validate_methods(self):
        for method in self.methods:
            method.ec2st = method.ec2st.model_copy(update={"alpha": self.alpha, "batch_size": self.batch_size})
        lo, hi = self.per_class_range
        if not 1 <= lo <= hi:
            raise ValueError("per_class_range must satisfy 1 <= low <= high")
        return self

    def grid(self, batch_size: Optional[int] = None) -> List[int]:
        """The sample-size grid; defaults to 3..max_batches whole batches"""
        if self.sample_sizes is not None and batch_size is None:
            return sorted(self.sample_sizes)
        b = batch_size or self.batch_size
        return [k * b for k in range(min(3, self.max_batches), self.max_batches + 1)]


class RejectionCurve(BaseModel):
    """Rejection rate per sample size over R replications"""
    method: str
    sample_sizes: List[int]
    rejection_rates: List[float]
    stderr: List[float]
    replications: int = Field(ge=1)

    @model_validator(mode="after")
    def validate_alignment(self):
        if not len(self.sample_sizes) == len(self.rejection_rates) == len(self.stderr):
            raise ValueError("sample sizes, rates and standard errors must align")
        if any(not 0.0 <= r <= 1.0 for r in self.rejection_rates):
            raise ValueError("rejection rates must lie in [0, 1]")
        return self

    @classmethod
    def from_rejections(cls, method: str, sample_sizes: List[int], rejections) -> "RejectionCurve":
        """Build from a replications x sizes boolean matrix"""
        matrix = np.asarray(rejections, dtype=bool).reshape(-1, len(sample_sizes))
        n_reps = matrix.shape[0]
        rates = [float(np.count_nonzero(col)) / n_reps for col in matrix.T]
        return cls(
            method=method,
            sample_sizes=list(sample_sizes),
            rejection_rates=rates,
            stderr=[math.sqrt(r * (1.0 - r) / n_reps) for r in rates],
            replications=n_reps,
        )


class RunRecord(BaseModel):
    """One replication of one method; reproducible from (config, master_seed, replication)"""
    replication: int
    seed: int
    method: str
    batches: List[Dict[str, Any]] = Field(default_factory=list)
    p_values: List[Tuple[int, float]] = Field(default_factory=list)
    verdict: Optional[Verdict] = None

    @property
    def censored(self) -> bool:
        return self.verdict is not None and not self.verdict.rejected

    def rejected_within(self, sample_size: int, alpha: float) -> bool:
        """Sequential runs: rejected with at most ``sample_size`` samples consumed.
        Fixed-horizon runs: the test at ``sample_size`` has p <= alpha."""
        if self.verdict is not None:
            return self.verdict.rejected and self.verdict.samples_consumed <= sample_size
        return any(n == sample_size and p <= alpha for n, p in self.p_values)

    def rejected_by_step(self, step: int, alpha: float) -> bool:
        """Rejected at or before batch ``step``; for repeated tests, any p <= alpha so far"""
        if self.verdict is not None:
            return self.verdict.rejected and self.verdict.at_batch <= step
        return any(k <= step and p <= alpha for k, p in self.p_values)


class ExperimentResult(BaseModel):
    config: ExperimentConfig
    curves: List[RejectionCurve] = Field(default_factory=list)
    runs: List[RunRecord] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
