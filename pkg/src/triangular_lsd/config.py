import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Field, field_validator

DEFAULT_SEED = 20120406
DEFAULT_WORKERS = 1

ENV_SEED = "TRILSD_SEED"
ENV_WORKERS = "TRILSD_WORKERS"
ENV_LOG_LEVEL = "TRILSD_LOG_LEVEL"

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger(__name__)


def default_seed() -> int:
    """Master seed when --seed is absent (env:TRILSD_SEED > default)."""
    return int(os.environ.get(ENV_SEED, DEFAULT_SEED))


def default_workers() -> int:
    return int(os.environ.get(ENV_WORKERS, DEFAULT_WORKERS))


def configure_logging(level: Optional[str] = None, fallback: str = "WARNING") -> None:
    """basicConfig for entry points: explicit level > env:TRILSD_LOG_LEVEL > fallback."""
    name = (level or os.environ.get(ENV_LOG_LEVEL) or fallback).upper()
    logging.basicConfig(level=getattr(logging, name, logging.WARNING), format=LOG_FORMAT)


def load_config_file(path: str) -> Dict[str, str]:
    """
    Read a KEY=value file. Keys are flag names; dashes and case are
    normalized so 'N-LIST', 'n_list' and 'n-list' all map to 'n_list'.
    """
    file = Path(path)
    if not file.is_file():
        raise ValueError(f"Config file not found: {path}")
    values = {}
    for key, value in dotenv_values(file).items():
        if value is None:
            continue
        values[key.strip().lower().replace("-", "_")] = value
    logger.debug(f"Loaded {len(values)} settings from {path}")
    return values


class RunConfig(BaseModel):
    """Everything needed to reproduce one CLI run; embedded in every artifact."""

    subcommand: str
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64)
    workers: int = Field(DEFAULT_WORKERS, ge=1)
    out: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("params")
    @classmethod
    def numeric_params_positive(cls, params: Dict[str, Any]) -> Dict[str, Any]:
        for key, value in params.items():
            items = value if isinstance(value, (list, tuple)) else [value]
            for item in items:
                if isinstance(item, bool) or not isinstance(item, (int, float)):
                    continue
                if item <= 0:
                    raise ValueError(f"Parameter {key} must be positive, got {value}")
        return params

    def header(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True)
