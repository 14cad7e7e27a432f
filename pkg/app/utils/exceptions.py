# app/utils/exceptions.py
from typing import Any, Dict, Optional


class Ec2stError(Exception):
    """Base class for every error raised by the package"""


class UsageError(Ec2stError, ValueError):
    """A precondition of an operation was violated"""


class DomainError(UsageError):
    """A density was evaluated outside its support"""


class SchemaError(UsageError):
    """Input data does not match the expected schema"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[str] = None):
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigError(UsageError):
    """Experiment configuration is invalid"""


class CheckpointError(Ec2stError, ValueError):
    """A serialized model or checkpoint has an unknown format"""


class TrainingError(Ec2stError, RuntimeError):
    """Classifier training diverged"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        if self.diagnostics:
            details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} ({details})"
        super().__init__(message)


class MleConvergenceError(Ec2stError, RuntimeError):
    """A convex null-family MLE did not reach its gradient tolerance"""

    def __init__(self, message: str, grad_norm: float, iterations: int):
        super().__init__(f"{message} (grad_norm={grad_norm:.3e}, iterations={iterations})")
        self.grad_norm = grad_norm
        self.iterations = iterations
