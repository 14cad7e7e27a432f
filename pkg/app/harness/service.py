# app/harness/service.py
from .experiments import (
    run_batch_order, run_growth_rate, run_inflation_demo, run_lambda_ablation, run_power,
    run_stopping_time, run_type1
)

def get_experiment_runner(kind: str):
    """Get the experiment runner based on the experiment kind."""
    if kind == "type1":
        return run_type1
    elif kind == "power":
        return run_power
    elif kind == "stopping_time":
        return run_stopping_time
    elif kind == "lambda_ablation":
        return run_lambda_ablation
    elif kind == "batch_order":
        return run_batch_order
    elif kind == "inflation_demo":
        return run_inflation_demo
    elif kind == "growth_rate":
        return run_growth_rate
    else:
        raise ValueError(f"Unsupported experiment kind: {kind}")

def run_experiment(config):
    """Run the experiment described by ``config``."""
    return get_experiment_runner(config.kind)(config)
