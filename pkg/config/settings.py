# config/settings.py
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional

class AppSettings(BaseSettings):
    """Application settings configuration"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EC2ST_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = "E-C2ST"
    app_version: str = "1.0.0"
    debug: bool = False

    # Server
    host: str = "0.0.0.0"
    port: int = 8000
    reload: bool = False
    api_token: Optional[str] = None

    # Testing
    alpha: float = 0.05
    batch_size: int = 90
    initial_lambda: float = 0.5
    lambda_min: float = 1e-6
    lambda_max: float = 1 - 1e-6
    first_batch_train_fraction: float = 0.8

    # Training
    learning_rate: float = 5e-4
    max_epochs: int = 200
    patience: int = 20
    hidden_sizes: list[int] = [30, 30]

    # Baselines
    n_permutations: int = 500

    # Experiments
    replications: int = 100
    master_seed: int = 0
    jobs: int = 1
    output_dir: str = "results"

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

# Global settings instance
settings = AppSettings()
