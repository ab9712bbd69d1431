"""Environment-driven settings."""

from __future__ import annotations

import os
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class Settings(BaseModel):
    """Runtime settings read from ``QSV_*`` environment variables."""

    model_config = ConfigDict(frozen=True)

    threads: int = Field(
        default=0,
        ge=0,
        description="Worker cap for parallel simulation (QSV_THREADS); 0 selects the CPU count",
        examples=[0, 1, 8],
    )
    log_level: LogLevel = Field(
        default="WARNING",
        description="Root log level (QSV_LOG_LEVEL)",
        examples=["WARNING", "DEBUG"],
    )
    log_file: str | None = Field(
        default=None,
        description="Optional rotating log file (QSV_LOG_FILE)",
        examples=["logs/qsvplan.log"],
    )

    @classmethod
    def from_env(cls) -> Settings:
        values: dict[str, object] = {}
        if (threads := os.environ.get("QSV_THREADS")) is not None:
            values["threads"] = threads
        if (level := os.environ.get("QSV_LOG_LEVEL")) is not None:
            values["log_level"] = level.upper()
        if log_file := os.environ.get("QSV_LOG_FILE"):
            values["log_file"] = log_file
        return cls.model_validate(values)

    @property
    def worker_count(self) -> int:
        return self.threads or (os.cpu_count() or 1)
