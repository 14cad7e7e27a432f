from .schema import (
    EXPERIMENT_KINDS, DataSpec, MethodSpec, MsplitSpec, ExperimentConfig, ExperimentResult,
    RejectionCurve, RunRecord
)
from .runner import run_replications
from .experiments import (
    make_stream, run_sequential, run_fixed_horizon, rejection_curve, run_type1, run_power,
    run_stopping_time, run_lambda_ablation, run_batch_order, run_inflation_demo, run_growth_rate,
    per_sample_log_growth, growth_report
)
from .reports import emit_reports, write_curves_csv, read_curves_csv, write_runs_jsonl, curves_from_frame
from .svg import render_curves
from .service import get_experiment_runner, run_experiment

__all__ = [
    "EXPERIMENT_KINDS", "DataSpec", "MethodSpec", "MsplitSpec", "ExperimentConfig", "ExperimentResult",
    "RejectionCurve", "RunRecord", "run_replications", "make_stream", "run_sequential",
    "run_fixed_horizon", "rejection_curve", "run_type1", "run_power", "run_stopping_time",
    "run_lambda_ablation", "run_batch_order", "run_inflation_demo", "run_growth_rate",
    "per_sample_log_growth", "growth_report", "emit_reports", "write_curves_csv", "read_curves_csv",
    "write_runs_jsonl", "curves_from_frame", "render_curves", "get_experiment_runner", "run_experiment"
]
