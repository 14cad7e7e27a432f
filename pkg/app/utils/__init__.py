from .config_loader import get_settings, load_experiment_config
from .logger import get_logger

__all__ = ["get_settings", "load_experiment_config", "get_logger"]
