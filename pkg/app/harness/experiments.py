# app/harness/experiments.py
"""
Monte-Carlo experiments.

Every replication is a module-level task ``task(payload, index)`` so the runner
can ship it to worker processes. All randomness of replication ``index`` comes
from seeds derived from (master_seed, index, role), which makes each record
reproducible on its own.
"""
import math
from itertools import islice
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import ttest_ind

from app.baselines.service import BaselineConfig, run_baseline
from app.data.streams import BatchStream, PreDrawnSource
from app.ec2st.sequential import Ec2stConfig, ec2st_run, ec2st_step, new_ec2st_state
from app.eprocess.process import new_process, to_verdict
from app.harness.runner import run_replications
from app.harness.schema import ExperimentConfig, ExperimentResult, MethodSpec, RejectionCurve, RunRecord
from app.models.evidence import EProcess
from app.models.sample import LabeledSet
from app.mslrt.learners import oracle_learner
from app.mslrt.msplit import MsplitState, msplit_run
from app.mslrt.service import get_alt_learner, get_null_family
from app.utils.config_loader import get_baseline_config, get_ec2st_config
from app.utils.exceptions import ConfigError
from app.utils.logger import get_logger
from app.utils.seeding import derive_rng, derive_seed

logger = get_logger()


def _seed(config: ExperimentConfig, index: int, role: str) -> int:
    return derive_seed(config.master_seed, index, role)


def make_stream(config: ExperimentConfig, index: int, batch_size: Optional[int] = None,
                per_class_range: Optional[Tuple[int, int]] = None, balanced: Optional[bool] = None,
                role: str = "stream") -> BatchStream:
    """Batch stream of replication ``index``; the same role always replays the same batches"""
    if balanced is None:
        balanced = config.balanced and config.data.supports_balanced
    source = config.data.source(_seed(config, index, "dataset"))
    return BatchStream(source, batch_size or config.batch_size, balanced=balanced,
                       seed=_seed(config, index, role), per_class_range=per_class_range)


def _ec2st_config(config: ExperimentConfig, method: MethodSpec, index: int, **updates) -> Ec2stConfig:
    train_config = method.ec2st.train_config.model_copy(update={"seed": _seed(config, index, "train")})
    return method.ec2st.model_copy(update={"train_config": train_config, **updates})


def _ec2st_method(config: ExperimentConfig) -> MethodSpec:
    for method in config.methods:
        if method.name == "ec2st":
            return method
    defaults = get_ec2st_config().model_copy(update={"alpha": config.alpha, "batch_size": config.batch_size})
    return MethodSpec(ec2st=defaults)


def _sequential_method(config: ExperimentConfig) -> MethodSpec:
    for method in config.methods:
        if method.is_sequential:
            return method
    raise ConfigError(f"{config.kind} needs a sequential method (ec2st or msplit)")


def _baseline_config(config: ExperimentConfig, name: str) -> BaselineConfig:
    for method in config.methods:
        if method.name == name:
            return method.baseline
    return get_baseline_config()


def process_rows(process: EProcess) -> List[Dict[str, Any]]:
    """Ledger rows for processes that carry no lambda"""
    rows = []
    for i, (inc, running) in enumerate(zip(process.log_increments, process.log_running), start=1):
        rows.append({
            "batch": i,
            "lambda": None,
            "log_increment": inc,
            "log_e": running,
            "rejected": process.rejected_at is not None and i >= process.rejected_at,
        })
    return rows


def run_sequential(config: ExperimentConfig, method: MethodSpec, index: int, stream: BatchStream,
                   max_batches: int, learner=None, **updates) -> RunRecord:
    """One anytime-valid run; ``updates`` override fields of the E-C2ST config"""
    if method.name == "ec2st":
        ec_config = _ec2st_config(config, method, index, **updates)
        state = new_ec2st_state(ec_config)
        verdict = ec2st_run(stream, ec_config, max_batches, state=state, learner=learner)
        rows = [record.to_row() for record in state.history]
    elif method.name == "msplit":
        spec = method.msplit
        state = MsplitState(process=new_process(config.alpha))
        verdict = msplit_run(
            stream,
            get_alt_learner(spec.alt_learner, **{"seed": _seed(config, index, "train"), **spec.alt_params}),
            get_null_family(spec.null_family, **spec.null_params),
            config.alpha,
            max_batches,
            state=state,
        )
        rows = process_rows(state.process)
    else:
        raise ConfigError(f"{method.name} is not a sequential test")
    return RunRecord(replication=index, seed=stream.seed, method=method.display_name, batches=rows, verdict=verdict)


def run_fixed_horizon(config: ExperimentConfig, method: MethodSpec, index: int,
                      sample_sizes: List[int]) -> RunRecord:
    """One permutation test per grid size, each on freshly drawn data"""
    p_values = []
    for n in sample_sizes:
        role = f"baseline:{n}"
        data = make_stream(config, index, batch_size=n, role=role).batch_at(0)
        if data is None:
            raise ConfigError(f"not enough data for a sample of size {n}")
        result = run_baseline(method.name, data, method.baseline, seed=_seed(config, index, role))
        p_values.append((n, result.p_value))
    return RunRecord(replication=index, seed=_seed(config, index, "baseline"), method=method.display_name,
                     p_values=p_values)


def rejection_curve(label: str, xs: List[int], records: List[RunRecord], alpha: float,
                    by_step: bool = False) -> RejectionCurve:
    rows = [
        [record.rejected_by_step(x, alpha) if by_step else record.rejected_within(x, alpha) for x in xs]
        for record in records
    ]
    return RejectionCurve.from_rejections(label, xs, rows)


# type-I and power curves

def _curve_task(payload: Tuple[ExperimentConfig, int], index: int) -> RunRecord:
    config, method_index = payload
    method = config.methods[method_index]
    sizes = config.grid()
    if method.is_sequential:
        max_batches = math.ceil(sizes[-1] / config.batch_size)
        return run_sequential(config, method, index, make_stream(config, index), max_batches)
    return run_fixed_horizon(config, method, index, sizes)


def _run_curves(config: ExperimentConfig) -> ExperimentResult:
    sizes = config.grid()
    result = ExperimentResult(config=config)
    for i, method in enumerate(config.methods):
        if not method.is_sequential and not config.data.supports_balanced:
            raise ConfigError(f"{method.name} needs two-sample data")
        records = run_replications(_curve_task, (config, i), config.replications, config.jobs)
        result.runs.extend(records)
        result.curves.append(rejection_curve(method.display_name, sizes, records, config.alpha))
    return result


def run_type1(config: ExperimentConfig) -> ExperimentResult:
    """Rejection rate per sample size when both classes share one distribution"""
    if config.data.is_null is False:
        raise ConfigError(f"type-I experiments need identical class distributions ({config.data.kind})")
    return _run_curves(config)


def run_power(config: ExperimentConfig) -> ExperimentResult:
    """Rejection rate per sample size when the classes differ"""
    if config.data.is_null is True:
        raise ConfigError(f"power experiments need different class distributions ({config.data.kind})")
    return _run_curves(config)


# stopping time

def _stopping_task(payload: Tuple[ExperimentConfig, int], index: int) -> RunRecord:
    config, batch_size = payload
    method = _sequential_method(config)
    stream = make_stream(config, index, batch_size=batch_size, role=f"stream:{batch_size}")
    record = run_sequential(config, method, index, stream, config.max_samples // batch_size,
                            batch_size=batch_size)
    record.method = f"{method.display_name}[batch_size={batch_size}]"
    return record


def _stopping_summary(batch_size: int, max_batches: int, records: List[RunRecord]) -> Dict[str, Any]:
    budget = max_batches * batch_size
    steps = [r.verdict.at_batch if r.verdict.rejected else max_batches for r in records]
    samples = [r.verdict.samples_consumed if r.verdict.rejected else budget for r in records]
    rejected = sum(r.verdict.rejected for r in records)
    return {
        "batch_size": batch_size,
        "budget_batches": max_batches,
        "budget_samples": budget,
        "rejected": rejected,
        "censored": len(records) - rejected,
        "mean_steps": float(np.mean(steps)),
        "mean_samples": float(np.mean(samples)),
        "median_samples": float(np.median(samples)),
    }


def run_stopping_time(config: ExperimentConfig) -> ExperimentResult:
    """Sample until rejection for each batch size; censored runs count the full budget"""
    method = _sequential_method(config)
    if config.data.is_null:
        logger.warning("Stopping-time experiment on null data: most runs will be censored")
    result = ExperimentResult(config=config)
    stopping = []
    for batch_size in config.batch_sizes:
        max_batches = config.max_samples // batch_size
        if max_batches < 1:
            raise ConfigError(f"max_samples {config.max_samples} is smaller than batch size {batch_size}")
        records = run_replications(_stopping_task, (config, batch_size), config.replications, config.jobs)
        result.runs.extend(records)
        xs = [k * batch_size for k in range(1, max_batches + 1)]
        result.curves.append(
            rejection_curve(f"{method.display_name}[batch_size={batch_size}]", xs, records, config.alpha)
        )
        stopping.append(_stopping_summary(batch_size, max_batches, records))
    result.summary = {"stopping_times": stopping}
    return result


# lambda ablation

def _lambda_label(lam: float, adapt: bool) -> str:
    return f"ec2st[lambda={lam:g}]" if adapt else f"ec2st[lambda={lam:g},fixed]"


def _lambda_task(payload: Tuple[ExperimentConfig, float, bool], index: int) -> RunRecord:
    config, lam, adapt = payload
    batch_size = config.ablation_batch_size
    stream = make_stream(config, index, batch_size=batch_size, role="stream:ablation")
    record = run_sequential(config, _ec2st_method(config), index, stream, config.max_batches,
                            batch_size=batch_size, initial_lambda=lam, adapt_lambda=adapt)
    record.method = _lambda_label(lam, adapt)
    return record


def run_lambda_ablation(config: ExperimentConfig) -> ExperimentResult:
    """Power per initial lambda at one batch size, adaptive and (optionally) fixed"""
    lo, hi = _ec2st_method(config).ec2st.lambda_bounds
    if any(not lo <= lam <= hi for lam in config.initial_lambdas):
        raise ConfigError(f"initial lambdas must lie within the lambda bounds [{lo}, {hi}]")
    settings = [(lam, True) for lam in config.initial_lambdas]
    if config.include_fixed_lambda:
        settings += [(lam, False) for lam in config.initial_lambdas]
    xs = config.grid(config.ablation_batch_size)
    result = ExperimentResult(config=config)
    for lam, adapt in settings:
        records = run_replications(_lambda_task, (config, lam, adapt), config.replications, config.jobs)
        result.runs.extend(records)
        result.curves.append(rejection_curve(_lambda_label(lam, adapt), xs, records, config.alpha))
    return result


# batch order

def _order_task(config: ExperimentConfig, index: int) -> List[RunRecord]:
    method = _sequential_method(config)
    stream = make_stream(config, index)
    batches = [stream.batch_at(cursor) for cursor in range(config.max_batches)]
    if any(batch is None for batch in batches):
        raise ConfigError(f"not enough data for {config.max_batches} batches")
    records = []
    order_seed = _seed(config, index, "order")
    for k in range(config.n_orders):
        order = list(range(config.max_batches))
        if k > 0:
            order = [int(i) for i in derive_rng(order_seed, k, "order").permutation(config.max_batches)]
        replay = BatchStream(PreDrawnSource(batches, order), config.batch_size, balanced=False, seed=stream.seed)
        record = run_sequential(config, method, index, replay, config.max_batches)
        record.method = f"{method.display_name}[order={k}]"
        records.append(record)
    return records


def run_batch_order(config: ExperimentConfig) -> ExperimentResult:
    """Replay the same batches in several orders; report the spread of the power curves"""
    method = _sequential_method(config)
    sizes = config.grid()
    per_replication = run_replications(_order_task, config, config.replications, config.jobs)
    result = ExperimentResult(config=config)
    for records in per_replication:
        result.runs.extend(records)

    rates = []
    for k in range(config.n_orders):
        curve = rejection_curve(
            f"{method.display_name}[order={k}]", sizes, [records[k] for records in per_replication], config.alpha
        )
        result.curves.append(curve)
        rates.append(curve.rejection_rates)
    rates = np.asarray(rates)
    mean = rates.mean(axis=0)
    lower, upper = np.percentile(rates, [2.5, 97.5], axis=0)
    result.curves.append(RejectionCurve(
        method=f"{method.display_name}[mean]",
        sample_sizes=sizes,
        rejection_rates=[float(r) for r in mean],
        stderr=[math.sqrt(r * (1.0 - r) / config.replications) for r in mean],
        replications=config.replications,
    ))
    result.summary = {
        "orders": config.n_orders,
        "mean": mean.tolist(),
        "lower": lower.tolist(),
        "upper": upper.tolist(),
        "max_deviation": float(np.max(np.abs(rates - mean))),
    }
    return result


# naive repeated testing

def _inflation_stream(config: ExperimentConfig, index: int) -> BatchStream:
    return make_stream(config, index, per_class_range=config.per_class_range, role="stream:inflation")


def _ttest_record(config: ExperimentConfig, index: int) -> RunRecord:
    """Welch t-test on the first coordinate, recomputed on all data after each batch"""
    stream = _inflation_stream(config, index)
    x0, x1, p_values = [], [], []
    for k, batch in enumerate(islice(stream, config.inflation_batches), start=1):
        x0.append(batch.x[batch.y == 0, 0])
        x1.append(batch.x[batch.y == 1, 0])
        p = ttest_ind(np.concatenate(x0), np.concatenate(x1), equal_var=False).pvalue
        p_values.append((k, float(p)))
    return RunRecord(replication=index, seed=stream.seed, method="ttest", p_values=p_values)


def _lc2st_record(config: ExperimentConfig, index: int) -> RunRecord:
    """L-C2ST retrained and retested on all data after each batch"""
    stream = make_stream(config, index, batch_size=config.lc2st_batch_size, role="stream:lc2st")
    baseline = _baseline_config(config, "lc2st")
    seen, p_values = [], []
    for k, batch in enumerate(islice(stream, config.lc2st_batches), start=1):
        seen.append(batch)
        result = run_baseline("lc2st", LabeledSet.concat(seen), baseline, seed=_seed(config, index, f"lc2st:{k}"))
        p_values.append((k, result.p_value))
    return RunRecord(replication=index, seed=stream.seed, method="lc2st", p_values=p_values)


def _inflation_task(payload: Tuple[ExperimentConfig, str], index: int) -> RunRecord:
    config, test = payload
    if test == "ttest":
        return _ttest_record(config, index)
    if test == "lc2st":
        return _lc2st_record(config, index)
    record = run_sequential(config, _ec2st_method(config), index, _inflation_stream(config, index),
                            config.inflation_batches)
    record.method = "ec2st"
    return record


def run_inflation_demo(config: ExperimentConfig) -> ExperimentResult:
    """Cumulative false-rejection rate against the number of batches seen.

    The curves' sample-size column holds the batch count.
    """
    if config.data.is_null is False:
        raise ConfigError("the inflation demo needs null data")
    result = ExperimentResult(config=config)
    for test in config.inflation_tests:
        records = run_replications(_inflation_task, (config, test), config.replications, config.jobs)
        result.runs.extend(records)
        steps = list(range(1, (config.lc2st_batches if test == "lc2st" else config.inflation_batches) + 1))
        result.curves.append(rejection_curve(test, steps, records, config.alpha, by_step=True))
    return result


# growth rate

def _growth_task(config: ExperimentConfig, index: int) -> List[RunRecord]:
    """Raw and bounded E-C2ST on one stream, never stopping at rejection"""
    method = _ec2st_method(config)
    learner = None
    if config.growth_learner == "oracle":
        learner = oracle_learner(config.data.discrete.bayes_posterior())
    records = []
    for bounded in (False, True):
        stream = make_stream(config, index, balanced=False, role="stream:growth")
        ec_config = _ec2st_config(config, method, index, bounded=bounded)
        state = new_ec2st_state(ec_config)
        for batch in islice(stream, config.max_batches):
            ec2st_step(state, batch, ec_config, learner)
        records.append(RunRecord(
            replication=index,
            seed=stream.seed,
            method="ec2st[bounded]" if bounded else "ec2st[raw]",
            batches=[record.to_row() for record in state.history],
            verdict=to_verdict(state.process, state.samples_consumed),
        ))
    return records


def per_sample_log_growth(record: RunRecord) -> float:
    """Final log E over the samples of the evidence-bearing batches (all but the first)"""
    n_evidence = sum(row["samples"] for row in record.batches[1:])
    return record.batches[-1]["log_e"] / n_evidence


def growth_report(label: str, records: List[RunRecord], mutual_information: float) -> Dict[str, Any]:
    rates = np.asarray([per_sample_log_growth(r) for r in records])
    estimate = float(rates.mean())
    stderr = float(rates.std(ddof=1) / math.sqrt(len(rates))) if len(rates) > 1 else 0.0
    return {
        "method": label,
        "estimate": estimate,
        "stderr": stderr,
        "mutual_information": mutual_information,
        "within_bound": bool(estimate <= mutual_information + 3.0 * stderr + 1e-12),
    }


def run_growth_rate(config: ExperimentConfig) -> ExperimentResult:
    """Average per-sample log e-value next to the mutual-information bound"""
    if config.data.kind != "discrete":
        raise ConfigError("the growth-rate diagnostic needs a discrete table with known mutual information")
    if config.max_batches < 2:
        raise ConfigError("the growth-rate diagnostic needs at least two batches")
    per_replication = run_replications(_growth_task, config, config.replications, config.jobs)
    raw = [records[0] for records in per_replication]
    bounded = [records[1] for records in per_replication]
    result = ExperimentResult(config=config, runs=raw + bounded)
    mi = config.data.mutual_information
    result.summary = {
        "learner": config.growth_learner,
        "growth": [growth_report("ec2st[raw]", raw, mi), growth_report("ec2st[bounded]", bounded, mi)],
    }
    logger.info(
        f"Growth rate {result.summary['growth'][0]['estimate']:.6f} nats/sample "
        f"against I(X;Y)={mi:.6f}"
    )
    return result
