# app/eprocess/process.py
from typing import Iterable, Union

from app.eprocess.algebra import validate_alpha
from app.models.evidence import EProcess, LogEValue, Verdict
from app.utils.logger import get_logger

logger = get_logger()

Increment = Union[LogEValue, float]


def new_process(alpha: float) -> EProcess:
    return EProcess(alpha=validate_alpha(alpha))


def ep_update(process: EProcess, increment: Increment) -> EProcess:
    """Append one batch e-value and record the first threshold crossing.

    Mutates and returns ``process``; the owner has exclusive access.
    """
    log_inc = increment.log_e if isinstance(increment, LogEValue) else LogEValue(log_e=increment).log_e
    running = process.log_e + log_inc
    process.log_increments.append(log_inc)
    process.log_running.append(running)

    if process.rejected_at is None and running >= process.threshold:
        process.rejected_at = process.n_batches
        logger.info(
            f"E-process crossed 1/alpha at batch {process.rejected_at} "
            f"(log E={running:.4f} >= {process.threshold:.4f})"
        )
    return process


def ep_extend(process: EProcess, increments: Iterable[Increment]) -> EProcess:
    for inc in increments:
        ep_update(process, inc)
    return process


def to_verdict(process: EProcess, samples_consumed: int) -> Verdict:
    return Verdict(
        rejected=process.rejected,
        at_batch=process.rejected_at,
        final_log_e=process.log_e,
        samples_consumed=samples_consumed,
    )
