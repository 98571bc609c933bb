# Services package
"""
erdset services

Core services for the random construction and its verification:
- geometry: point sets, affine maps, singular-value enclosures, band test
- intervals: outward-rounded interval helpers for the detector
- streams: frozen counter-based hash and seed derivation
- sequences: example families and the condition checker
- grid: stage parameters, random grids, set algebra
- arrangement: Buck's bound, region enumeration, copy regions in d = 1
- detector: witness verification, branch-and-bound, exact d = 1 oracles
- experiment: Monte Carlo estimators, analytic bound, Markov extraction
- formats: text, PBM, CSV and JSON artefacts
- agents: finite-stage assembly pipeline
"""

from .geometry import (
    AffineMap,
    PointSet,
    SigmaBounds,
    apply_affine,
    delta,
    in_operator_band,
    normalize_origin,
    op_norm_bounds,
    strip_origin,
)
from .grid import GridSet, contains_open, intersect, locate, measure, refine, sample_grid, stage_params, subtract
from .sequences import SequenceFamily, build_family, condition_report, select_annulus_subsequence
from .detector import detect_1d_at_x, detect_bb, exact_V_1d, sample_witness_search, verify_witness
from .experiment import analytic_bound, estimate_mean_measure, estimate_mu_V, extract_good_omega

__all__ = [
    # geometry
    "AffineMap",
    "PointSet",
    "SigmaBounds",
    "apply_affine",
    "delta",
    "in_operator_band",
    "normalize_origin",
    "op_norm_bounds",
    "strip_origin",
    # grid
    "GridSet",
    "contains_open",
    "intersect",
    "locate",
    "measure",
    "refine",
    "sample_grid",
    "stage_params",
    "subtract",
    # sequences
    "SequenceFamily",
    "build_family",
    "condition_report",
    "select_annulus_subsequence",
    # detector
    "detect_1d_at_x",
    "detect_bb",
    "exact_V_1d",
    "sample_witness_search",
    "verify_witness",
    # experiment
    "analytic_bound",
    "estimate_mean_measure",
    "estimate_mu_V",
    "extract_good_omega",
]
