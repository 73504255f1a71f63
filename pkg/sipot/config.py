"""Runtime settings.

Only logging is configured from the environment. Tolerances, seeds and every
other job parameter come from the job document (see ``sipot.cli``), so one job
file always produces the same output.
"""

from __future__ import annotations

from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv(override=True)


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="SIPOT_", extra="ignore")

    log_level: str = Field(default="WARNING", description="root log level for the sipot logger")
    log_file: str | None = Field(default=None, description="append logs here instead of stderr")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
