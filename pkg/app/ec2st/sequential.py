# app/ec2st/sequential.py
"""
Sequential E-C2ST.

Batch 1 is only split into training and validation data (its e-value is 1).
At batch m >= 2 a classifier is trained on everything seen before, the bounded
e-value of batch m is multiplied into the e-process, lambda is re-fitted on
batch m, the previous validation batch joins the training data and batch m
becomes the validation data.
"""
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Protocol, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from app.ec2st.evalues import DEFAULT_LAMBDA_BOUNDS, LambdaMethod, batch_log_evalue, bounded_log_evalue, optimize_lambda
from app.eprocess.process import ep_update, new_process, to_verdict
from app.models.evidence import EProcess, Verdict
from app.models.mlp import MlpModel
from app.models.sample import LabeledSet
from app.models.trainer import TrainConfig, mlp_train
from app.utils.exceptions import UsageError
from app.utils.logger import get_logger
from app.utils.seeding import derive_seed, make_rng

logger = get_logger()


class Classifier(Protocol):
    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        ...


Learner = Callable[[LabeledSet, LabeledSet, TrainConfig], Classifier]


class Ec2stConfig(BaseModel):
    """Inputs of one sequential E-C2ST run"""
    alpha: float = Field(default=0.05, gt=0.0, le=1.0)
    batch_size: int = Field(default=90, ge=2)
    initial_lambda: float = 0.5
    lambda_bounds: Tuple[float, float] = DEFAULT_LAMBDA_BOUNDS
    lambda_method: LambdaMethod = "bisection"
    adapt_lambda: bool = True
    bounded: bool = True
    train_config: TrainConfig = Field(default_factory=TrainConfig)
    first_batch_split: Tuple[float, float] = (0.8, 0.2)

    @model_validator(mode="after")
    def validate_config(self):
        lo, hi = self.lambda_bounds
        if not 0.0 < lo < hi < 1.0:
            raise ValueError("lambda bounds must satisfy 0 < min < max < 1")
        if not lo <= self.initial_lambda <= hi:
            raise ValueError("initial lambda must lie within the lambda bounds")
        if any(f <= 0 for f in self.first_batch_split) or abs(sum(self.first_batch_split) - 1.0) > 1e-9:
            raise ValueError("first batch split fractions must be positive and sum to 1")
        return self


class BatchRecord(BaseModel):
    """One row of the per-batch ledger"""
    batch: int
    samples: int
    lam: float
    log_increment: float
    log_e: float
    rejected: bool

    def to_row(self) -> dict:
        return {
            "batch": self.batch,
            "samples": self.samples,
            "lambda": self.lam,
            "log_increment": self.log_increment,
            "log_e": self.log_e,
            "rejected": self.rejected,
        }


@dataclass
class Ec2stState:
    """Cumulative data, current lambda and e-process of one run"""
    process: EProcess
    lambda_m: float
    train_set: Optional[LabeledSet] = None
    val_set: Optional[LabeledSet] = None
    batch_index: int = 0
    samples_consumed: int = 0
    model: Optional[MlpModel] = None
    history: List[BatchRecord] = field(default_factory=list)


def new_ec2st_state(config: Ec2stConfig) -> Ec2stState:
    return Ec2stState(process=new_process(config.alpha), lambda_m=config.initial_lambda)


def split_first_batch(batch: LabeledSet, config: Ec2stConfig) -> Tuple[LabeledSet, LabeledSet]:
    """Shuffled train/val split of batch 1; both parts keep at least one point"""
    n = len(batch)
    if n < 2:
        raise UsageError("the first batch needs at least two samples")
    rng = make_rng(derive_seed(config.train_config.seed, 1, "first-split"))
    order = rng.permutation(n)
    n_train = min(max(int(round(config.first_batch_split[0] * n)), 1), n - 1)
    return batch.take(order[:n_train]), batch.take(order[n_train:])


def _record(state: Ec2stState, samples: int, lam: float, log_increment: float) -> Verdict:
    state.history.append(BatchRecord(
        batch=state.batch_index,
        samples=samples,
        lam=lam,
        log_increment=log_increment,
        log_e=state.process.log_e,
        rejected=state.process.rejected,
    ))
    logger.debug(
        f"E-C2ST batch {state.batch_index}: lambda={lam:.4f} "
        f"increment={log_increment:.4f} log E={state.process.log_e:.4f}"
    )
    return to_verdict(state.process, state.samples_consumed)


def ec2st_step(state: Ec2stState, batch: LabeledSet, config: Ec2stConfig,
               learner: Optional[Learner] = None) -> Tuple[Ec2stState, Verdict]:
    """Consume one batch; mutates and returns ``state``"""
    if len(batch) == 0:
        raise UsageError("batch is empty")
    state.batch_index += 1
    state.samples_consumed += len(batch)
    m = state.batch_index

    if m == 1:
        state.train_set, state.val_set = split_first_batch(batch, config)
        ep_update(state.process, 0.0)
        return state, _record(state, len(batch), state.lambda_m, 0.0)

    train_config = config.train_config.model_copy(
        update={"seed": derive_seed(config.train_config.seed, m, "train")}
    )
    model = (learner or mlp_train)(state.train_set, state.val_set, train_config)
    probs = model.predict_proba(batch.x)

    log_e, points = batch_log_evalue(probs, batch.y)
    lam = state.lambda_m
    increment = bounded_log_evalue(points, lam) if config.bounded else log_e
    ep_update(state.process, increment)

    if config.adapt_lambda:
        state.lambda_m = optimize_lambda(points, config.lambda_bounds, config.lambda_method)
    state.train_set = LabeledSet.concat([state.train_set, state.val_set])
    state.val_set = batch
    state.model = model if isinstance(model, MlpModel) else None
    return state, _record(state, len(batch), lam, increment)


def ec2st_run(stream: Iterable[LabeledSet], config: Ec2stConfig, max_batches: int,
              state: Optional[Ec2stState] = None, learner: Optional[Learner] = None) -> Verdict:
    """Step through the stream until rejection, max_batches or exhaustion.

    Pass a ``state`` (fresh or from load_checkpoint) to inspect or resume it.
    """
    if state is None:
        state = new_ec2st_state(config)
    batches = iter(stream)
    while state.batch_index < max_batches and not state.process.rejected:
        batch = next(batches, None)
        if batch is None:
            logger.info(f"Stream exhausted after {state.batch_index} batches")
            break
        ec2st_step(state, batch, config, learner)
    return to_verdict(state.process, state.samples_consumed)
