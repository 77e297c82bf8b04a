"""
config.py
──────────────────────────────────────────────────────────────────────────────
Job configuration: field, window, death convention, seed and size caps.
Defaults come from the environment (.env is loaded once), command-line flags
override them.

    GRIDMOD_CAP        default total-dimension cap for decompositions
    GRIDMOD_LOG_LEVEL  logging level name (WARNING)
──────────────────────────────────────────────────────────────────────────────
"""

import logging
import os
from typing import Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, ValidationError

from core import linalg as la
from core.decomp import DEFAULT_BUDGET, DEFAULT_MAX_TOTAL_DIM
from core.errors import ContractViolationError, FieldError
from core.gridmod import Bigrade, Window
from core.linalg import DEFAULT_PRIME

load_dotenv()

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _env_int(key: str, default: int) -> int:
    raw = os.environ.get(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ContractViolationError(f"{key}={raw!r} is not an integer") from None


class JobConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    field: int = DEFAULT_PRIME
    window: Optional[Tuple[int, int, int, int]] = None
    closed_deaths: bool = False
    seed: int = 0
    cap: int = DEFAULT_MAX_TOTAL_DIM
    budget: int = DEFAULT_BUDGET
    workers: int = 1
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, **overrides) -> "JobConfig":
        values = {
            "cap": _env_int("GRIDMOD_CAP", DEFAULT_MAX_TOTAL_DIM),
            "log_level": os.environ.get("GRIDMOD_LOG_LEVEL", "WARNING").upper(),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return validate_job_config(cls(**values))

    def grid_window(self) -> Optional[Window]:
        if self.window is None:
            return None
        x0, y0, x1, y1 = self.window
        return Window(Bigrade(x0, y0), Bigrade(x1, y1))


def validate_job_config(cfg: JobConfig) -> JobConfig:
    """Prime field, ordered window corners, positive caps."""
    try:
        la.FieldSpec(p=cfg.field)
    except ValidationError:
        raise FieldError(f"--field {cfg.field} is not a prime") from None
    if cfg.window is not None:
        x0, y0, x1, y1 = cfg.window
        if x0 > x1 or y0 > y1:
            raise ContractViolationError(f"window ({x0},{y0})..({x1},{y1}) has its corners out of order")
    for name in ("cap", "budget", "workers"):
        if getattr(cfg, name) <= 0:
            raise ContractViolationError(f"{name} must be positive, got {getattr(cfg, name)}")
    if cfg.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ContractViolationError(f"unknown log level {cfg.log_level!r}")
    return cfg


def configure_logging(cfg: JobConfig) -> None:
    logging.basicConfig(level=getattr(logging, cfg.log_level), format=LOG_FORMAT)
