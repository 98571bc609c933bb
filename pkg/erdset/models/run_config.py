"""Per-command configuration; unknown keys are rejected."""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from erdset.services.sequences import SequenceFamily, build_family

FamilyName = Literal["polygon", "product", "sphere", "annulus", "geometric", "progression"]


class RunConfig(BaseModel):
    """Keys shared by every command."""
    model_config = ConfigDict(extra="forbid")

    master_seed: int = Field(0, ge=0, lt=2**64, description="Master 64-bit seed")
    output_dir: Path = Field(Path("out"), description="Directory for artefacts")
    threads: Optional[int] = Field(None, ge=1, description="Worker cap (defaults to settings)")


class FamilyConfig(RunConfig):
    """A named family and its parameters."""
    family: FamilyName = Field("polygon", description="Family name")
    ratio: float = Field(0.5, gt=0, lt=1, description="polygon radius ratio / geometric ratio")
    perturb: Optional[float] = Field(None, ge=0, lt=1, description="polygon radial jitter eta")
    rho_exponent: float = Field(2.0, gt=0, description="product: rho_n = 1 - (n+1)^-rho_exponent")
    norm_power: float = Field(1.0, gt=0, description="sphere/annulus: norms k^-norm_power")
    direction: Literal["fixed", "alternate", "rotate"] = Field("fixed", description="sphere directions")
    r_check: Optional[Literal["off", "warn", "enforce"]] = Field(None, description="product r_n policy")

    def build_family(self) -> SequenceFamily:
        return build_family(
            self.family,
            ratio=self.ratio,
            perturb=self.perturb,
            rho_exponent=self.rho_exponent,
            norm_power=self.norm_power,
            direction=self.direction,
            r_check=self.r_check,
        )


class SeqConfig(FamilyConfig):
    n_max: int = Field(20, ge=1, description="Rows n = 1..n_max")
    alpha: Optional[float] = Field(None, gt=0, lt=1, description="Add stage columns for this band")
    slack: Optional[float] = Field(None, ge=0, description="p_n slack")


class ConstructConfig(FamilyConfig):
    n: int = Field(..., ge=1, description="Stage index")
    alpha: float = Field(0.5, gt=0, lt=1, description="Band parameter")
    slack: Optional[float] = Field(None, ge=0, description="p_n slack")
    max_cells: Optional[int] = Field(None, ge=1, description="Cell cap override")


class DetectConfig(RunConfig):
    grid: Path = Field(..., description="ERDGRID file")
    points: Path = Field(..., description="Point-set file")
    alpha: float = Field(0.5, gt=0, lt=1, description="Band parameter")
    epsilon: Optional[float] = Field(None, gt=0, description="Robustness margin")
    budget: Optional[int] = Field(None, ge=0, description="Box budget")
    copy_regions: bool = Field(True, description="Write the exact copy regions for d = 1")


class ExtractionConfig(FamilyConfig):
    family: FamilyName = Field("progression", description="Family name")
    alpha: float = Field(0.5, gt=0, lt=1, description="Band parameter")
    quality_k: int = Field(4, ge=2, description="Acceptance quality")
    n_min: int = Field(2, ge=1, description="First stage scanned")
    n_max: int = Field(200, ge=1, description="Last stage scanned")
    omega_trials: int = Field(16, ge=0, description="Grids drawn per stage")
    mode: Literal["exact_1d", "sampled"] = Field("exact_1d", description="mu(V) method")
    x_samples: int = Field(200, ge=1, description="Translations for sampled mode")
    epsilon: Optional[float] = Field(None, gt=0, description="Detector margin for sampled mode")
    budget: Optional[int] = Field(None, ge=0, description="Detector budget for sampled mode")
    slack: Optional[float] = Field(None, ge=0, description="p_n slack")

    @model_validator(mode="after")
    def check_range(self):
        if self.n_max < self.n_min:
            raise ValueError("n_max must be >= n_min")
        return self


class AssemblyConfig(FamilyConfig):
    family: FamilyName = Field("progression", description="Family name")
    stages: int = Field(2, ge=1, description="Number K of bands alpha_k = 4^-k")
    quality_k: int = Field(4, ge=2, description="Acceptance quality")
    n_min: int = Field(2, ge=1, description="First stage scanned")
    n_max: int = Field(200, ge=1, description="Last stage scanned")
    omega_trials: int = Field(16, ge=1, description="Grids drawn per stage")
    pivot_index: int = Field(0, description="Pivot a0 used for normalisation")
    epsilon: Optional[float] = Field(None, gt=0, description="Verification margin")
    budget: Optional[int] = Field(None, ge=0, description="Verification box budget")
    slack: Optional[float] = Field(None, ge=0, description="p_n slack")

    @model_validator(mode="after")
    def check_range(self):
        if self.n_max < self.n_min:
            raise ValueError("n_max must be >= n_min")
        return self


class RerunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    output_dir: Optional[Path] = Field(None, description="Write artefacts here instead")


COMMAND_CONFIGS = {
    "seq": SeqConfig,
    "construct": ConstructConfig,
    "detect": DetectConfig,
    "prop23": ExtractionConfig,
    "theorem21": AssemblyConfig,
}
