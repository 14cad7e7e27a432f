# app/eprocess/algebra.py
"""
Log-domain e-value algebra.

Products of conditional e-variables are e-variables, and so are convex
combinations and averages of e-variables for the same null. Everything is
computed on natural-log values; additions go through log-sum-exp.
"""
import math
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from app.models.evidence import LogEValue
from app.utils.exceptions import UsageError


def _logs(values: Sequence[LogEValue]) -> np.ndarray:
    if len(values) == 0:
        raise UsageError("expected a non-empty sequence of e-values")
    return np.array([v.log_e for v in values], dtype=float)


def ev_product(values: Sequence[LogEValue]) -> LogEValue:
    """Product of e-values, i.e. the exactly rounded sum of their logs"""
    logs = _logs(values)
    return LogEValue(log_e=math.fsum(logs))


def ev_convex_combine(g: float, e_hi: LogEValue, e_lo: LogEValue) -> LogEValue:
    """log(g*E_hi + (1-g)*E_lo)"""
    if not 0.0 <= g <= 1.0:
        raise UsageError(f"mixing weight must lie in [0, 1], got {g}")
    logs = np.array([e_hi.log_e, e_lo.log_e])
    out = float(logsumexp(logs, b=np.array([g, 1.0 - g])))
    # stay inside the hull of the inputs despite rounding
    return LogEValue(log_e=min(max(out, logs.min()), logs.max()))


def ev_average(values: Sequence[LogEValue]) -> LogEValue:
    """log of the arithmetic mean of the e-values"""
    logs = _logs(values)
    return LogEValue(log_e=float(logsumexp(logs) - math.log(len(logs))))


def ev_to_pvalue(e: LogEValue) -> float:
    """p = min(1, 1/E)"""
    if e.log_e <= 0.0:
        return 1.0
    return math.exp(-e.log_e)


def validate_alpha(alpha: float) -> float:
    if not 0.0 < alpha <= 1.0:
        raise UsageError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def decide_fixed(e: LogEValue, alpha: float) -> bool:
    """Reject when E >= 1/alpha"""
    validate_alpha(alpha)
    return e.log_e >= -math.log(alpha)
