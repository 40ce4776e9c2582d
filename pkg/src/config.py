"""Process-level configuration for the PRIMEBALL harness."""

from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings, read from the environment and an optional .env file."""

    model_config = SettingsConfigDict(
        env_prefix="PRIMEBALL_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    environment: str = "production"
    debug: bool = False
    log_level: str = "INFO"

    # Logging settings
    log_format: str = "standard"  # "standard" or "detailed"
    log_file: str = "primeball.log"
    logs_dir: Path = Path("logs")

    # Working directories
    data_dir: Path = Path("data")
    reports_dir: Path = Path("reports")

    default_seed: int = 42
    worker_threads: int = Field(default=1, ge=1, description="Threads for per-document pipeline stages")

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v):
        """Accept lower-case level names from the environment."""
        if isinstance(v, str):
            return v.strip().upper() or "INFO"
        return v

    @property
    def is_development(self) -> bool:
        """Check if running in development mode."""
        return self.environment.lower() in ["development", "dev", "local"]

    @property
    def is_production(self) -> bool:
        """Check if running in production mode."""
        return self.environment.lower() in ["production", "prod"]

    def ensure_directories(self) -> None:
        """Create working directories; failures are tolerated (read-only hosts)."""
        for dir_path in [self.logs_dir, self.data_dir, self.reports_dir]:
            try:
                dir_path.mkdir(parents=True, exist_ok=True)
            except OSError:
                pass


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the settings singleton."""
    global _settings
    if _settings is None:
        try:
            _settings = Settings()
        except Exception:
            # Broken environment values fall back to defaults
            _settings = Settings(_env_file=None)
    return _settings


def reset_settings() -> None:
    """Drop the cached settings (tests and CLI overrides)."""
    global _settings
    _settings = None


def get_log_level() -> str:
    """Get log level."""
    return get_settings().log_level
