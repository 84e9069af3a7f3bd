"""Process-level configuration."""

from __future__ import annotations

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime configuration loaded from ``SLOWFAST_*`` environment variables or `.env`."""

    log_level: str = "INFO"
    output_dir: str = "./output"
    seed: int = 0
    max_workers: int = Field(4, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="SLOWFAST_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """Return cached settings instance."""

    return Settings()
