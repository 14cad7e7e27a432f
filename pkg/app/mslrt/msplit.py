# app/mslrt/msplit.py
"""
M-split likelihood ratio e-process.

Batch m contributes  prod_n p_A(x_n | earlier batches) / max_{theta in null} prod_n p_theta(x_n),
the alternative fitted on strictly earlier batches, the null fitted on batch m itself.
"""
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from app.eprocess.process import ep_update, new_process, to_verdict
from app.models.evidence import EProcess, Verdict
from app.models.sample import LabeledSet
from app.mslrt.families import NullFamily
from app.mslrt.learners import AltLearner, FittedDensity
from app.utils.exceptions import UsageError
from app.utils.logger import get_logger

logger = get_logger()


@dataclass
class MsplitState:
    process: EProcess
    history: Optional[LabeledSet] = None
    batch_index: int = 0
    samples_consumed: int = 0


def msplit_batch_log_evalue(alt: FittedDensity, null_family: NullFamily, batch: LabeledSet) -> float:
    """sum log p_A(x_n) - sum log p_0(x_n; MLE on this batch)"""
    if len(batch) == 0:
        raise UsageError("batch is empty")
    params = null_family.mle(batch)
    return float(np.sum(alt.log_density(batch)) - np.sum(null_family.log_density(batch, params)))


def msplit_step(state: MsplitState, batch: LabeledSet, learner: AltLearner,
                null_family: NullFamily) -> MsplitState:
    alt = learner.fit(state.history)
    increment = msplit_batch_log_evalue(alt, null_family, batch)
    ep_update(state.process, increment)
    state.batch_index += 1
    state.samples_consumed += len(batch)
    state.history = batch if state.history is None else LabeledSet.concat([state.history, batch])
    logger.debug(f"M-split batch {state.batch_index}: increment={increment:.4f} log E={state.process.log_e:.4f}")
    return state


def msplit_run(stream: Iterable[LabeledSet], learner: AltLearner, null_family: NullFamily,
               alpha: float, max_batches: int, state: Optional[MsplitState] = None) -> Verdict:
    """Anytime-valid sequential M-split test"""
    if state is None:
        state = MsplitState(process=new_process(alpha))
    batches = iter(stream)
    while state.batch_index < max_batches and not state.process.rejected:
        batch = next(batches, None)
        if batch is None:
            break
        msplit_step(state, batch, learner, null_family)
    return to_verdict(state.process, state.samples_consumed)
