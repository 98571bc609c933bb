import logging
from fractions import Fraction

import pytest

from erdset.errors import DomainError, ResourceError
from erdset.services.agents import (
    AgentOrchestrator,
    CoverAgent,
    TaskType,
    assemble_avoiding_set,
    get_orchestrator,
)
from erdset.services.agents.base import BaseAgent
from erdset.services.agents.cover_agent import cover_grid
from erdset.services.agents.extraction_agent import stage_point_set
from erdset.services.agents.orchestrator import common_resolution, stage_alpha
from erdset.services.experiment import build_stage_report
from erdset.services.geometry import PointSet, strip_origin
from erdset.services.grid import GridSet, intersect, refine
from erdset.services.sequences import gen_polygon_family, gen_progression_family
from tests.conftest import make_params


def test_cover_grid_inflates_by_one_cell():
    """[0.3, 0.5] at L = 10 covers cells 2..5."""
    cover = cover_grid([(Fraction(3, 10), Fraction(1, 2))], 10)
    assert cover == GridSet.from_cells(1, 10, [2, 3, 4, 5])


def test_cover_grid_clips_to_unit_interval():
    """Covers never leave the grid."""
    cover = cover_grid([(Fraction(0), Fraction(1, 20)), (Fraction(19, 20), Fraction(1))], 10)
    assert cover == GridSet.from_cells(1, 10, [0, 1, 8, 9])


def test_common_resolution():
    """lcm(4, 6) = 12 times the largest refinement that fits."""
    assert common_resolution([4, 6], 1, 4, 2**30) == 48
    assert common_resolution([4, 6], 1, 4, 40) == 36
    with pytest.raises(ResourceError):
        common_resolution([4, 6], 1, 4, 30)


def test_stage_alpha():
    """Bands shrink by a factor four per stage."""
    assert stage_alpha(1) == 0.25
    assert stage_alpha(3) == 1 / 64


def test_stage_point_set_contains_origin():
    """Normalising about the pivot puts it at the origin."""
    S = stage_point_set(PointSet([0.25, 0.5, 1.0]), 1)
    assert sorted(S.coords[:, 0].tolist()) == [-0.25, 0.0, 0.5]
    assert strip_origin(S).size == 2


def test_cover_agent_removes_copy_translations():
    """On the full line every translation admits a copy, so nothing survives."""
    out = CoverAgent().execute({
        "grid": GridSet.full(1, 8),
        "copy_points": PointSet([0.25]),
        "alpha": 0.5,
    })
    assert out["grid"].count == 0
    assert out["cover_cells"] == 8
    assert out["intervals"] == [(Fraction(0), Fraction(1))]


def test_cover_agent_needs_line(full_line_grid):
    """The cover step is one-dimensional."""
    with pytest.raises(DomainError):
        CoverAgent().execute({
            "grid": GridSet.full(2, 2),
            "copy_points": PointSet([[0.25, 0.0]]),
            "alpha": 0.5,
        })


def test_orchestrator_singleton_and_repr():
    """One orchestrator per process; agents print their names."""
    orchestrator = get_orchestrator()
    assert orchestrator is get_orchestrator()
    assert isinstance(orchestrator, AgentOrchestrator)
    assert repr(orchestrator.cover_agent) == "CoverAgent(name='CoverAgent')"


def test_orchestrator_rejects_planar_family():
    """Assembly is only defined on the line."""
    with pytest.raises(DomainError):
        get_orchestrator().run(
            TaskType.ASSEMBLE, family=gen_polygon_family(lambda n: 0.5 ** n),
            alpha_stages=1, quality_k=2, n_search=range(2, 4), omega_trials=1, seed=0,
        )
    with pytest.raises(DomainError):
        get_orchestrator().run(
            TaskType.ASSEMBLE, family=gen_progression_family(),
            alpha_stages=0, quality_k=2, n_search=range(2, 4), omega_trials=1, seed=0,
        )


def test_task_type_values():
    """Task types compare equal to their wire names."""
    assert TaskType("extract") is TaskType.EXTRACT
    assert TaskType.ASSEMBLE == "assemble"


@pytest.mark.slow
def test_extraction_task_returns_stage_points():
    """EXTRACT returns the accepted grid with its normalised point set."""
    out = get_orchestrator().run(
        TaskType.EXTRACT, family=gen_progression_family(), alpha=0.25, quality_k=2,
        n_search=range(2, 120), omega_trials=4, seed=3,
    )
    report = out["report"]
    assert report.omega_accepted
    assert out["grid"].L == report.params.L_n
    assert out["stage_points"].size == out["copy_points"].size + 1


@pytest.mark.slow
def test_single_stage_assembly_has_no_copies():
    """The assembled set contains no verified copy of the stage point set."""
    result = assemble_avoiding_set(
        gen_progression_family(), 1, 2, budget=20000, seed=5,
        n_search=range(2, 120), omega_trials=4,
    )
    report = result["report"]
    assert len(report.stages) == 1
    assert all(r.verdict != "Found" for r in report.verification)
    final = result["final_grid"]
    assert final.L == report.resolution
    assert final == result["stage_grids"][0]
    assert report.final_measure_lower == pytest.approx(1 - report.stages[0].loss)


# --- agent runs -------------------------------------------------------------------


def test_agent_run_checks_required_inputs():
    """run() names the missing keys before executing."""
    with pytest.raises(DomainError, match="copy_points"):
        CoverAgent().run({"grid": GridSet.full(1, 4), "alpha": 0.5})


def test_agent_run_logs_each_step(caplog):
    """Each step is logged with the agent name and its output keys."""
    caplog.set_level(logging.INFO, logger="erdset")
    CoverAgent().run({"grid": GridSet.full(1, 4), "copy_points": PointSet([0.25]), "alpha": 0.5})
    done = [r.getMessage() for r in caplog.records if r.name.endswith("agents.base")]
    assert len(done) == 1
    assert done[0].startswith("CoverAgent: done in")
    assert done[0].endswith("cover_cells, grid, intervals")


def test_cover_agent_at_finer_resolution(two_points, two_cell_grid):
    """A cover snapped at a finer resolution keeps everything the coarse cover keeps."""
    inputs = {"grid": two_cell_grid, "copy_points": two_points, "alpha": 0.4}
    coarse = CoverAgent().run(inputs)["grid"]
    fine = CoverAgent().run({**inputs, "resolution": 64})["grid"]
    assert fine.L == 64
    assert intersect(refine(coarse, 16), fine) == refine(coarse, 16)
    assert intersect(fine, refine(two_cell_grid, 16)) == fine
    assert fine.measure >= refine(coarse, 16).measure


def test_cover_agent_rejects_incompatible_resolution(two_points, two_cell_grid):
    """The target resolution must be a multiple of the stage resolution."""
    with pytest.raises(DomainError):
        CoverAgent().run({"grid": two_cell_grid, "copy_points": two_points, "alpha": 0.4, "resolution": 6})


class FixedExtraction(BaseAgent):
    """Returns prepared stage grids in order."""

    def __init__(self, grids):
        super().__init__(name="FixedExtraction", description="prepared stages")
        self.grids = list(grids)

    def execute(self, input_data):
        E = self.grids.pop(0)
        # one far point: no copy fits in [0, 1] for these bands, so V is empty
        points = PointSet([0.0, 64.0])
        return {
            "report": build_stage_report(make_params(E.L, 0.5), E, input_data["seed"]),
            "grid": E,
            "stage_points": points,
            "copy_points": strip_origin(points),
        }


class NoVerification(BaseAgent):
    def __init__(self):
        super().__init__(name="NoVerification", description="skips detect_bb")

    def execute(self, input_data):
        return {"reports": [], "found": 0}


def test_two_stage_accounting():
    """Losses are measured at the common resolution and the lower bound stays positive."""
    orchestrator = AgentOrchestrator()
    E1 = GridSet.from_cells(1, 4, [0, 1, 2])
    E2 = GridSet.from_cells(1, 8, range(7))
    orchestrator.extraction_agent = FixedExtraction([E1, E2])
    orchestrator.verification_agent = NoVerification()

    result = orchestrator.run(
        TaskType.ASSEMBLE, family=gen_progression_family(), alpha_stages=2, quality_k=4,
        n_search=range(2, 4), omega_trials=1, seed=0,
    )
    report = result["report"]
    assert report.resolution == 8 * 256
    mu = [Fraction(3, 4) * Fraction(510, 512), Fraction(7, 8) * Fraction(254, 256)]
    assert [Fraction(s.mu_E_tilde) for s in report.stages] == mu
    assert [s.loss for s in report.stages] == pytest.approx([1 - float(m) for m in mu])
    assert report.final_measure_lower == pytest.approx(float(mu[0] + mu[1] - 1))
    assert report.final_measure_lower > 0.6
    assert Fraction(report.final_measure) == Fraction(1524, 2048)
    assert Fraction(report.final_measure) >= report.final_measure_lower
    assert all(g.L == report.resolution for g in result["stage_grids"])


@pytest.mark.slow
def test_two_stage_assembly_has_no_copies():
    """Two bands alpha = 1/4, 1/16: positive final measure and no verified copy in either band."""
    result = assemble_avoiding_set(
        gen_progression_family(), 2, 2, budget=20000, seed=5,
        n_search=range(2, 200), omega_trials=16,
    )
    report = result["report"]
    assert [s.alpha_k for s in report.stages] == [0.25, 0.0625]
    assert len(report.verification) == 2
    assert all(r.verdict != "Found" for r in report.verification)
    final = Fraction(report.final_measure)
    assert final > 0
    assert final >= report.final_measure_lower
    assert report.final_measure_lower == pytest.approx(1 - sum(s.loss for s in report.stages))
    assert result["final_grid"].measure == final
