"""
Experiments on the random construction.

Monte Carlo estimates of E[mu(E_n)] and mu(V_n), the analytic bound on
E[mu(V_n)], and the Markov-inequality search for a good stage (n, omega).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Literal, Optional, Tuple

import numpy as np

from erdset.config import get_settings
from erdset.errors import DomainError, SearchFailed
from erdset.models.schemas import MeasureInterval, StageParams, StageReport
from erdset.services.detector import Found, NotFoundCertified, detect_bb, exact_V_1d
from erdset.services.geometry import PointSet
from erdset.services.grid import GridSet, check_cells, sample_grid, stage_params
from erdset.services.sequences import SequenceFamily
from erdset.services.streams import derive_seed, hash_counter, uniform_from_hash

logger = logging.getLogger(__name__)

Mode = Literal["exact_1d", "sampled"]


def estimate_mean_measure(
    params: StageParams, num_samples: int, seed: int, threads: Optional[int] = None
) -> Tuple[float, float]:
    """
    Sample mean and standard error of mu(E_n) over num_samples grids.

    Sample i uses derive_seed(seed, i).
    """
    if num_samples < 2:
        raise DomainError(f"num_samples must be >= 2, got {num_samples}")
    check_cells(params.dim, params.L_n)
    workers = threads or get_settings().threads

    def one(i: int) -> float:
        return float(sample_grid(params, derive_seed(seed, i), threads=1).measure)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.array(list(pool.map(one, range(num_samples))))
    else:
        values = np.array([one(i) for i in range(num_samples)])
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(num_samples))


def wilson_interval(successes: int, trials: int, z: float) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def sample_translations(seed: int, count: int, dim: int) -> np.ndarray:
    """Uniform points of [0,1]^d from the counter hash; row s is fixed by (seed, s)."""
    out = np.empty((count, dim))
    for s in range(count):
        for axis in range(dim):
            out[s, axis] = uniform_from_hash(hash_counter(seed, s, axis))
    return out


def estimate_mu_V(
    A: PointSet,
    params: StageParams,
    E: GridSet,
    mode: Mode = "exact_1d",
    seed: int = 0,
    x_samples: int = 200,
    epsilon: Optional[float] = None,
    budget: Optional[int] = None,
    confidence_z: Optional[float] = None,
    threads: Optional[int] = None,
) -> MeasureInterval:
    """
    Enclose the measure of V_n = {x : some band T has T A + x inside E}.

    exact_1d: length of the exact x-projection of the copy regions (d = 1 only).
    sampled: detector runs at uniform x; the Found fraction gives the lower
    bound and the fraction not certified copy-free gives the upper bound,
    each widened to a Wilson interval.
    """
    settings = get_settings()
    if mode == "exact_1d":
        if A.dim != 1:
            raise DomainError("exact_1d mode needs d = 1")
        _, total = exact_V_1d(A, E, params.alpha)
        value = float(total)
        return MeasureInterval(lower=value, upper=value, method="exact", samples=0)
    if mode != "sampled":
        raise DomainError(f"unknown mode {mode!r}")

    z = confidence_z or settings.confidence_z
    xs = sample_translations(seed, x_samples, A.dim)

    def one(x: np.ndarray):
        return detect_bb(A, E, params.alpha, epsilon=epsilon, budget=budget, shift=x)

    workers = threads or settings.threads
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, xs))
    else:
        results = [one(x) for x in xs]

    found = sum(isinstance(r, Found) for r in results)
    absent = sum(isinstance(r, NotFoundCertified) for r in results)
    lower, _ = wilson_interval(found, x_samples, z)
    _, upper = wilson_interval(x_samples - absent, x_samples, z)
    return MeasureInterval(
        lower=lower, upper=max(lower, upper), method="sampled",
        samples=x_samples, found=found, certified_absent=absent,
    )


def bound_constant(dim: int, alpha: float) -> float:
    """(d^2 + 1)(8d/alpha)^(d^2)."""
    d2 = dim * dim
    return (d2 + 1) * (8 * dim / alpha) ** d2


def analytic_bound(params: StageParams) -> float:
    """
    C (L M k)^(d^2) p^k with C = (d^2 + 1)(8d/alpha)^(d^2), evaluated in log space.

    Values above 1 are returned unchanged.
    """
    if params.k_n < 2:
        raise DomainError(f"analytic_bound needs k_n >= 2, got {params.k_n}")
    if params.p_n <= 0:
        return 0.0
    d2 = params.dim * params.dim
    log_c = math.log(d2 + 1) + d2 * math.log(8 * params.dim / params.alpha)
    log_bound = (
        log_c
        + d2 * math.log(params.L_n * params.M_n * params.k_n)
        + params.k_n * math.log(params.p_n)
    )
    return math.exp(log_bound) if log_bound < 709 else math.inf


def stage_constant_bound(params: StageParams) -> Tuple[float, bool]:
    """C~ = d/alpha + 2 M_n and whether L_n <= C~ / (M_n delta_n)."""
    constant = params.dim / params.alpha + 2 * params.M_n
    return constant, params.L_n <= constant / (params.M_n * params.delta_n)


def bound_decay_factor(params: StageParams) -> float:
    """C~^(d^2) / k_n."""
    constant, _ = stage_constant_bound(params)
    return constant ** (params.dim * params.dim) / params.k_n


def build_stage_report(
    params: StageParams,
    E: GridSet,
    seed: int,
    mu_V: Optional[MeasureInterval] = None,
    accepted: bool = False,
    quality_k: Optional[int] = None,
    statistics: Optional[List[Dict[str, Any]]] = None,
) -> StageReport:
    constant, within = stage_constant_bound(params)
    return StageReport(
        params=params,
        mu_E=str(E.measure),
        selected_cells=E.count,
        total_cells=E.total_cells,
        mu_V=mu_V,
        bound=analytic_bound(params),
        stage_constant=constant,
        resolution_within_constant=within,
        decay_factor=bound_decay_factor(params),
        seed=seed,
        omega_accepted=accepted,
        quality_k=quality_k,
        statistics=statistics or [],
    )


def extract_good_omega(
    family: SequenceFamily,
    alpha: float,
    quality_k: int,
    n_search: Iterable[int],
    omega_trials: int,
    seed: int,
    mode: Mode = "exact_1d",
    slack: Optional[float] = None,
    x_samples: int = 200,
    epsilon: Optional[float] = None,
    budget: Optional[int] = None,
    point_set=None,
) -> Tuple[StageReport, GridSet]:
    """
    Scan n in ascending order for a grid with mu(E) > 1 - 1/q and mu(V) < 1/q.

    Trial t at stage n samples with derive_seed(seed, n, t). The first grid
    meeting both thresholds is returned with its report.

    Args:
        point_set: optional map n -> PointSet replacing family.at(n)

    Raises:
        SearchFailed: no grid accepted; carries per-n rejection counts
    """
    if quality_k < 2:
        raise DomainError(f"quality_k must be >= 2, got {quality_k}")
    threshold_E = 1 - Fraction(1, quality_k)
    threshold_V = 1 / quality_k
    statistics: List[Dict[str, Any]] = []

    for n in n_search:
        if omega_trials <= 0:
            break
        A = point_set(n) if point_set is not None else family.at(n)
        params = stage_params(A, alpha, slack, n=n)
        check_cells(params.dim, params.L_n)
        row = {"n": n, "k_n": params.k_n, "L_n": params.L_n, "p_n": params.p_n,
               "trials": 0, "rejected_measure": 0, "rejected_copies": 0}
        statistics.append(row)

        for t in range(omega_trials):
            trial_seed = derive_seed(seed, n, t)
            E = sample_grid(params, trial_seed)
            row["trials"] += 1
            if E.measure <= threshold_E:
                row["rejected_measure"] += 1
                continue
            mu_V = estimate_mu_V(A, params, E, mode=mode, seed=trial_seed,
                                 x_samples=x_samples, epsilon=epsilon, budget=budget)
            if mu_V.upper >= threshold_V:
                row["rejected_copies"] += 1
                continue
            logger.info(
                f"accepted n={n} trial={t}: mu(E)={float(E.measure):.4f}, "
                f"mu(V)<={mu_V.upper:.4f} (L={params.L_n}, k={params.k_n})"
            )
            report = build_stage_report(params, E, trial_seed, mu_V, True, quality_k, statistics)
            return report, E
        logger.info(
            f"n={n}: {row['rejected_measure']} rejected on mu(E), "
            f"{row['rejected_copies']} on mu(V) of {row['trials']} trials"
        )

    raise SearchFailed(f"no stage accepted at quality {quality_k}", statistics={"stages": statistics})
