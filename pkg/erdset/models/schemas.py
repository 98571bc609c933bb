from pydantic import BaseModel, Field
from typing import Any, Literal, Optional


class StageParams(BaseModel):
    """Stage constants of the random construction for one A_n."""
    n: int = Field(..., ge=0, description="Stage index (keys the per-cell hash stream)")
    dim: int = Field(..., ge=1, description="Ambient dimension d")
    alpha: float = Field(..., gt=0, lt=1, description="Band parameter alpha")
    k_n: int = Field(..., ge=2, description="Number of points #A_n")
    delta_n: float = Field(..., gt=0, le=2, description="Relative separation delta(A_n)")
    M_n: float = Field(..., gt=0, description="Maximum norm over A_n")
    L_n: int = Field(..., ge=1, description="Cells per axis")
    p_n: float = Field(..., ge=0, le=1, description="Per-cell selection probability")
    log_p: float = Field(..., description="Natural log of p_n before clamping")
    slack: float = Field(..., ge=0, description="Extra log(k_n)/k_n margin")

    @property
    def total_cells(self) -> int:
        return self.L_n ** self.dim


class ConditionRow(BaseModel):
    """One row of the -log(delta)/#A condition table."""
    n: int = Field(..., ge=1, description="Index in the family")
    k_n: int = Field(..., ge=2, description="Number of points")
    delta_n: float = Field(..., description="Relative separation")
    score: float = Field(..., description="-log(delta_n) / k_n")


class MeasureInterval(BaseModel):
    """Enclosure of a Lebesgue measure in [0, 1]."""
    lower: float = Field(..., ge=0, le=1, description="Lower bound")
    upper: float = Field(..., ge=0, le=1, description="Upper bound")
    method: Literal["exact", "sampled"] = Field(..., description="How the bounds were obtained")
    samples: int = Field(0, ge=0, description="Number of x samples (0 for exact)")
    found: int = Field(0, ge=0, description="Samples with a verified copy")
    certified_absent: int = Field(0, ge=0, description="Samples certified copy-free")


class AffineMapRecord(BaseModel):
    """JSON form of an affine map."""
    matrix: list[list[float]] = Field(..., description="Linear part, row-major")
    shift: list[float] = Field(..., description="Translation")


class DetectionReport(BaseModel):
    """Outcome of one detector run."""
    verdict: Literal["Found", "NotFoundCertified", "Inconclusive"] = Field(..., description="Detector verdict")
    witness: Optional[AffineMapRecord] = Field(None, description="Verified copy when Found")
    epsilon: float = Field(..., description="Robustness margin (0 for exact decisions)")
    boxes_explored: int = Field(0, ge=0, description="Parameter boxes evaluated")
    boxes_remaining: int = Field(0, ge=0, description="Unresolved boxes when Inconclusive")
    wall_time_ms: float = Field(0.0, ge=0, description="Elapsed wall time")


class StageReport(BaseModel):
    """An accepted (or constructed) stage: parameters, grid measure, copy measure, bound."""
    params: StageParams
    mu_E: str = Field(..., description="Exact grid measure as a fraction string")
    selected_cells: int = Field(..., ge=0, description="Selected cells")
    total_cells: int = Field(..., ge=1, description="L_n ** d")
    mu_V: Optional[MeasureInterval] = Field(None, description="Measure of translations admitting a copy")
    bound: float = Field(..., ge=0, description="Analytic bound on E[mu(V_n)] (may exceed 1)")
    stage_constant: float = Field(..., description="C~ = d/alpha + 2 M_n")
    resolution_within_constant: bool = Field(..., description="L_n <= C~ / (M_n delta_n)")
    decay_factor: float = Field(..., description="C~^(d^2) / k_n")
    seed: int = Field(..., ge=0, description="Seed the grid was sampled with")
    omega_accepted: bool = Field(False, description="Both acceptance thresholds met")
    quality_k: Optional[int] = Field(None, description="Acceptance quality when extracted")
    statistics: list[dict[str, Any]] = Field(default_factory=list, description="Per-n rejection counts")


class StageRecord(BaseModel):
    """One stage of the finite-stage assembly."""
    alpha_k: float = Field(..., description="Band parameter 4^-k")
    pivot_index: int = Field(..., description="Pivot used to normalise A_n")
    stage_points: list[list[float]] = Field(..., description="S_n = (A_n - a0) u {0}")
    report: StageReport
    grid_file: Optional[str] = Field(None, description="Stage grid artefact")
    cover_cells: int = Field(0, ge=0, description="Cells of the V cover at the common resolution")
    mu_E_tilde: str = Field(..., description="Measure at the common resolution after removing the cover")
    loss: float = Field(..., ge=0, description="1 - measure of the refined stage set")


class AvoidingSetReport(BaseModel):
    """Finite-stage assembly of the avoiding set."""
    stages: list[StageRecord] = Field(default_factory=list)
    resolution: int = Field(..., ge=1, description="Common grid resolution")
    final_measure: str = Field(..., description="Exact measure of the final grid")
    final_measure_lower: float = Field(..., description="1 - sum of stage losses")
    final_grid_file: Optional[str] = Field(None, description="Final grid artefact")
    verification: list[DetectionReport] = Field(default_factory=list, description="detect_bb verdicts on the final grid per stage")


class RunManifest(BaseModel):
    """Everything needed to repeat a command."""
    command: str = Field(..., description="Subcommand name")
    config: dict[str, Any] = Field(..., description="Resolved command configuration")
    master_seed: int = Field(..., ge=0, description="Master seed")
    version: str = Field(..., description="Package version")
    settings: dict[str, Any] = Field(default_factory=dict, description="Settings snapshot")
    artefacts: list[str] = Field(default_factory=list, description="Files written by the run")
