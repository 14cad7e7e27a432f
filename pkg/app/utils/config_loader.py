# app/utils/config_loader.py
import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Union

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError

from config.settings import AppSettings
from app.utils.exceptions import ConfigError
from app.utils.logger import get_logger

logger = get_logger()


@lru_cache()
def get_settings() -> AppSettings:
    """Get cached settings instance"""
    return AppSettings()


def load_env_file(file_path: Union[str, Path] = ".env") -> bool:
    """Export EC2ST_* variables from an env file and drop the cached settings.

    Variables already set in the environment win. Returns False when the file
    does not exist.
    """
    if not os.path.exists(file_path):
        logger.warning(f"Environment file {file_path} not found")
        return False
    load_dotenv(file_path)
    get_settings.cache_clear()
    logger.debug(f"Loaded environment from {file_path}")
    return True


def get_train_config():
    """Get classifier training defaults"""
    from app.models.trainer import TrainConfig

    settings = get_settings()
    return TrainConfig(
        learning_rate=settings.learning_rate,
        max_epochs=settings.max_epochs,
        patience=settings.patience,
        hidden_sizes=list(settings.hidden_sizes),
        seed=settings.master_seed,
    )


def get_baseline_config():
    """Get fixed-horizon baseline defaults"""
    from app.baselines.service import BaselineConfig

    settings = get_settings()
    return BaselineConfig(n_permutations=settings.n_permutations, train_config=get_train_config())


def get_ec2st_config():
    """Get sequential test defaults"""
    from app.ec2st.sequential import Ec2stConfig

    settings = get_settings()
    return Ec2stConfig(
        alpha=settings.alpha,
        batch_size=settings.batch_size,
        initial_lambda=settings.initial_lambda,
        lambda_bounds=(settings.lambda_min, settings.lambda_max),
        train_config=get_train_config(),
        first_batch_split=(settings.first_batch_train_fraction, 1.0 - settings.first_batch_train_fraction),
    )


def _read_mapping(path: Path) -> Dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read experiment config {path}: {e}") from e
    try:
        raw = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot parse experiment config {path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"experiment config {path} must be a mapping")
    return raw


def _with_settings_defaults(raw: Dict[str, Any]) -> Dict[str, Any]:
    settings = get_settings()
    merged = {
        "alpha": settings.alpha,
        "batch_size": settings.batch_size,
        "replications": settings.replications,
        "master_seed": settings.master_seed,
        "jobs": settings.jobs,
        "output_dir": settings.output_dir,
    }
    merged.update(raw)
    return merged


def parse_experiment_config(raw: Dict[str, Any]):
    """Validate a mapping into an ExperimentConfig; missing top-level keys come from settings"""
    from app.harness.schema import ExperimentConfig

    try:
        return ExperimentConfig.model_validate(_with_settings_defaults(raw))
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ConfigError(f"invalid experiment config at '{key}': {first['msg']}") from e


def load_experiment_config(path: Union[str, Path]):
    """Read a YAML (or .json) experiment file into an ExperimentConfig"""
    path = Path(path)
    config = parse_experiment_config(_read_mapping(path))
    logger.debug(f"Loaded {config.kind} experiment config from {path}")
    return config
