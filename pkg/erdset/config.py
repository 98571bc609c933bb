"""Runtime configuration read from ERDSET_* environment variables and .env."""

import os
from functools import lru_cache
from typing import Any, Dict, Literal

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Library-wide defaults; command-line keys override them per run."""

    model_config = SettingsConfigDict(env_prefix="ERDSET_", env_file=".env", extra="ignore")

    # Grids
    max_cells: int = Field(2**30, ge=1, description="Largest grid (cells) a run may allocate")
    threads: int = Field(1, ge=1, description="Worker cap for sampling and Monte Carlo")

    # Detector
    default_epsilon: float = Field(1e-4, gt=0, description="Robustness margin for negative verdicts")
    default_budget: int = Field(10**7, ge=0, description="Boxes the branch-and-bound may explore")
    batch_size: int = Field(1024, ge=1, description="Boxes evaluated per vectorised step")
    boundary_precision: float = Field(1e-12, gt=0, description="Relative band-threshold resolution")

    # Construction
    slack: float = Field(1.0, gt=0, description="Extra log(k)/k margin below the p_n threshold")
    ratio_window: int = Field(64, ge=1, description="Consecutive ratios checked when locating k0")
    scan_budget: int = Field(10**6, ge=1, description="Indices scanned per annulus selection")
    r_check: Literal["off", "warn", "enforce"] = Field(
        "warn", description="Policy when product-family r_n is not strictly decreasing"
    )

    # Experiments
    confidence_z: float = Field(3.0, gt=0, description="z used for sampled measure intervals")
    assembly_refine: int = Field(256, ge=3, description="Largest refinement multiplier when intersecting stages")

    log_level: str = Field("INFO", description="Root log level for the command line")


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


def configure_settings(values: Dict[str, Any]) -> Settings:
    """Pin settings to a snapshot (e.g. from a run manifest) and reset the cache."""
    for name, value in values.items():
        if name in Settings.model_fields:
            os.environ[f"ERDSET_{name.upper()}"] = str(value)
    get_settings.cache_clear()
    return get_settings()
