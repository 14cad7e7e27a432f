from .evalues import (
    PointEValue, PointEValues, batch_log_evalue, bounded_log_evalue, bounded_point_log_evalues,
    lambda_objective, lambda_derivative, optimize_lambda
)
from .sequential import (
    Ec2stConfig, Ec2stState, BatchRecord, new_ec2st_state, ec2st_step, ec2st_run
)
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    "PointEValue", "PointEValues", "batch_log_evalue", "bounded_log_evalue",
    "bounded_point_log_evalues", "lambda_objective", "lambda_derivative", "optimize_lambda",
    "Ec2stConfig", "Ec2stState", "BatchRecord", "new_ec2st_state", "ec2st_step", "ec2st_run",
    "save_checkpoint", "load_checkpoint"
]
