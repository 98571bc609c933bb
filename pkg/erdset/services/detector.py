"""
Affine-copy detection.

Does the open grid set E contain T A + x with T in the band S_alpha^{1/alpha}?

- verify_witness: rigorous check of one candidate map
- detect_bb: certified interval branch-and-bound over (T, x) for any d
- detect_1d_at_x / exact_V_1d: exact answers for d = 1
- sample_witness_search: random candidates, rigorous when they succeed
"""

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from erdset.config import get_settings
from erdset.errors import BoundaryUndecidable, DomainError
from erdset.models.schemas import AffineMapRecord, DetectionReport
from erdset.services import intervals
from erdset.services.arrangement import copy_regions_1d, representative_scalars_1d
from erdset.services.geometry import AffineMap, PointSet, in_operator_band
from erdset.services.grid import CellIndex, GridSet, locate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Found:
    map: AffineMap
    boxes_explored: int = 0

    verdict = "Found"


@dataclass(frozen=True)
class NotFoundCertified:
    epsilon: float
    boxes_explored: int = 0

    verdict = "NotFoundCertified"


@dataclass(frozen=True)
class Inconclusive:
    boxes_remaining: int
    boxes_explored: int = 0

    verdict = "Inconclusive"


DetectionResult = Union[Found, NotFoundCertified, Inconclusive]


def to_report(result: DetectionResult, wall_time_ms: float = 0.0) -> DetectionReport:
    """JSON-ready record of a detection result."""
    witness = None
    if isinstance(result, Found):
        witness = AffineMapRecord(matrix=result.map.matrix.tolist(), shift=result.map.shift.tolist())
    return DetectionReport(
        verdict=result.verdict,
        witness=witness,
        epsilon=getattr(result, "epsilon", 0.0),
        boxes_explored=result.boxes_explored,
        boxes_remaining=getattr(result, "boxes_remaining", 0),
        wall_time_ms=wall_time_ms,
    )


def _check_inputs(A: PointSet, E: GridSet, alpha: float) -> None:
    if A.dim != E.dim:
        raise DomainError(f"point dimension {A.dim} does not match grid dimension {E.dim}")
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def _exact_image(affine: AffineMap, point: np.ndarray) -> List[Fraction]:
    d = affine.dim
    return [
        sum((Fraction(float(affine.matrix[r, c])) * Fraction(float(point[c])) for c in range(d)),
            Fraction(float(affine.shift[r])))
        for r in range(d)
    ]


def verify_witness(affine: AffineMap, A: PointSet, E: GridSet, alpha: float) -> bool:
    """
    True iff T is in the band and every T a_i + x lies strictly inside a selected cell.

    Images are enclosed with outward rounding; a point whose enclosure is not
    certified inside one cell is re-evaluated in exact rationals.

    Raises:
        BoundaryUndecidable: from the band test
    """
    if affine.dim != A.dim:
        raise DomainError(f"map dimension {affine.dim} does not match point dimension {A.dim}")
    _check_inputs(A, E, alpha)
    if not in_operator_band(affine.matrix, alpha):
        return False

    params = affine.params()[None, :]
    y_lo, y_hi = intervals.image_enclosure(params, params, A.coords)
    j_lo, j_hi = intervals.cell_span((y_lo[0], y_hi[0]), E.L)
    certain = np.all((j_lo == j_hi) & (j_lo >= 0) & (j_lo < E.L), axis=1)

    for i in range(A.size):
        if certain[i]:
            if not E.cell_bit(tuple(int(j) for j in j_lo[i])):
                return False
            continue
        where = locate(_exact_image(affine, A.coords[i]), E.L)
        if not isinstance(where, CellIndex) or not E.cell_bit(where):
            return False
    return True


def _root_box(d: int, alpha: float, shift: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    beta_up = float(intervals.up(np.float64(1.0 / alpha)))
    lo = np.full(d * d + d, -beta_up)
    hi = np.full(d * d + d, beta_up)
    if shift is None:
        lo[d * d:], hi[d * d:] = 0.0, 1.0
    else:
        lo[d * d:], hi[d * d:] = shift, shift
    return lo[None, :], hi[None, :]


def _prune(lo: np.ndarray, hi: np.ndarray, A: PointSet, E: GridSet, alpha: float, beta: float):
    """
    Boolean mask of boxes that cannot hold a copy, plus the image enclosures.
    """
    d = A.dim
    sigma = intervals.box_sigma_bounds(lo, hi, d)
    dead = (
        (sigma["sigma_max_lo"] >= beta)
        | (sigma["sigma_min_hi"] <= alpha)
        | (sigma["sigma_min_lo"] >= beta)
        | (sigma["sigma_max_hi"] <= alpha)
    )

    y_lo, y_hi = intervals.image_enclosure(lo, hi, A.coords)
    j_lo, j_hi = intervals.cell_span((y_lo, y_hi), E.L)
    j_lo = np.maximum(j_lo, 0)
    j_hi = np.minimum(j_hi, E.L - 1)
    empty_range = np.any(j_lo > j_hi, axis=2)  # (B, k)
    dead |= np.any(empty_range, axis=1)

    alive = np.flatnonzero(~dead)
    if alive.size:
        b, k = alive.size, A.size
        counts = E.count_in_boxes(
            j_lo[alive].reshape(b * k, d),
            np.maximum(j_hi[alive], j_lo[alive]).reshape(b * k, d),
        ).reshape(b, k)
        misses = np.any(counts == 0, axis=1)
        dead[alive[misses]] = True
    return dead, y_lo, y_hi


def _center_candidates(
    centers: np.ndarray, A: PointSet, E: GridSet, alpha: float, beta: float
) -> np.ndarray:
    """Float pre-filter: indices of centres worth a rigorous check."""
    d = A.dim
    b = centers.shape[0]
    matrices = centers[:, : d * d].reshape(b, d, d)
    shifts = centers[:, d * d:]
    singular = np.linalg.svd(matrices, compute_uv=False)
    in_band = (singular[:, -1] > alpha) & (singular[:, 0] < beta)

    images = np.einsum("brc,kc->bkr", matrices, A.coords) + shifts[:, None, :]
    scaled = images * E.L
    cells = np.floor(scaled).astype(np.int64)
    inside = np.all((cells >= 0) & (cells < E.L) & (scaled > cells), axis=2)
    ok = in_band & np.all(inside, axis=1)

    idx = np.flatnonzero(ok)
    if idx.size:
        flat = np.zeros((idx.size, A.size), dtype=np.int64)
        for axis in range(d):
            flat = flat * E.L + cells[idx, :, axis]
        selected = np.all(E.bits[flat], axis=1)
        idx = idx[selected]
    return idx


def detect_bb(
    A: PointSet,
    E: GridSet,
    alpha: float,
    epsilon: Optional[float] = None,
    budget: Optional[int] = None,
    shift: Optional[np.ndarray] = None,
    batch_size: Optional[int] = None,
) -> DetectionResult:
    """
    Certified branch-and-bound over the parameter box [-1/alpha, 1/alpha]^(d^2) x [0,1]^d.

    A box is pruned when its singular-value bounds leave the band or some image
    enclosure meets no selected cell. The centre of every surviving box is
    checked with verify_witness. A box whose image enclosures are all narrower
    than epsilon, and whose matrix box has Frobenius width below epsilon, cannot
    hold an epsilon-robust copy once its centre fails, and is discarded.

    Args:
        A: points to copy
        E: grid set
        alpha: band parameter
        epsilon: robustness margin for the negative verdict
        budget: maximum number of boxes evaluated
        shift: fix the translation to this point instead of searching [0,1]^d
        batch_size: boxes evaluated per vectorised step

    Returns:
        Found, NotFoundCertified(epsilon) or Inconclusive(boxes_remaining)
    """
    _check_inputs(A, E, alpha)
    settings = get_settings()
    epsilon = settings.default_epsilon if epsilon is None else epsilon
    budget = settings.default_budget if budget is None else budget
    batch_size = batch_size or settings.batch_size
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if budget < 0:
        raise DomainError(f"budget must be nonnegative, got {budget}")

    d = A.dim
    beta = 1.0 / alpha
    n_matrix = d * d
    if shift is not None:
        shift = np.asarray(shift, dtype=np.float64).reshape(d)

    effect = np.concatenate([np.full(n_matrix, A.max_norm), np.ones(d)])
    resolved_effect = np.concatenate([np.ones(n_matrix), np.zeros(d)])

    stack = [_root_box(d, alpha, shift)]
    explored = 0
    while stack:
        if explored >= budget:
            remaining = sum(lo.shape[0] for lo, _ in stack)
            logger.info(f"detector budget of {budget} boxes exhausted with {remaining} boxes open")
            return Inconclusive(boxes_remaining=remaining, boxes_explored=explored)

        lo, hi = stack.pop()
        take = min(batch_size, budget - explored)
        if lo.shape[0] > take:
            stack.append((lo[:-take], hi[:-take]))
            lo, hi = lo[-take:], hi[-take:]
        explored += lo.shape[0]

        dead, y_lo, y_hi = _prune(lo, hi, A, E, alpha, beta)
        keep = np.flatnonzero(~dead)
        if keep.size == 0:
            continue
        lo, hi, y_lo, y_hi = lo[keep], hi[keep], y_lo[keep], y_hi[keep]

        centers = (lo + hi) / 2
        for idx in _center_candidates(centers, A, E, alpha, beta):
            candidate = AffineMap(centers[idx, :n_matrix].reshape(d, d), centers[idx, n_matrix:])
            try:
                if verify_witness(candidate, A, E, alpha):
                    logger.info(f"copy found after {explored} boxes")
                    return Found(map=candidate, boxes_explored=explored)
            except BoundaryUndecidable:
                continue

        widths = hi - lo
        image_small = np.all((y_hi - y_lo) < epsilon, axis=(1, 2))
        frob = np.sqrt(np.sum(widths[:, :n_matrix] ** 2, axis=1))
        split = ~(image_small & (frob < epsilon))
        if not np.any(split):
            continue
        lo, hi, widths, image_small = lo[split], hi[split], widths[split], image_small[split]

        weights = np.where(image_small[:, None], resolved_effect[None, :], effect[None, :])
        axis = np.argmax(widths * weights, axis=1)
        rows = np.arange(lo.shape[0])
        mid = (lo[rows, axis] + hi[rows, axis]) / 2

        left_hi = hi.copy()
        left_hi[rows, axis] = mid
        right_lo = lo.copy()
        right_lo[rows, axis] = mid
        stack.append((np.concatenate([right_lo, lo]), np.concatenate([hi, left_hi])))
        logger.debug(f"explored {explored} boxes, {sum(b.shape[0] for b, _ in stack)} open")

    logger.info(f"no {epsilon}-robust copy after {explored} boxes")
    return NotFoundCertified(epsilon=epsilon, boxes_explored=explored)


def detect_1d_at_x(A: PointSet, E: GridSet, alpha: float, x: float) -> DetectionResult:
    """Exact decision for a fixed translation x in d = 1 via representative scalars."""
    if A.dim != 1:
        raise DomainError("detect_1d_at_x needs d = 1")
    _check_inputs(A, E, alpha)
    if E.count == 0:
        return NotFoundCertified(epsilon=0.0)
    reps = representative_scalars_1d(x, A, E.L, alpha)
    for count, lam in enumerate(reps, start=1):
        candidate = AffineMap([[float(lam)]], [x])
        try:
            if verify_witness(candidate, A, E, alpha):
                return Found(map=candidate, boxes_explored=count)
        except BoundaryUndecidable:
            continue
    return NotFoundCertified(epsilon=0.0, boxes_explored=len(reps))


def exact_V_1d(A: PointSet, E: GridSet, alpha: float) -> Tuple[List[Tuple[Fraction, Fraction]], Fraction]:
    """
    Translations admitting a copy, as disjoint open intervals, and their total length.

    The x-projection of every copy polygon is an open interval; overlapping
    intervals are merged.
    """
    regions = copy_regions_1d(A, E, alpha)
    spans = sorted(region.x_range for region in regions)
    merged: List[Tuple[Fraction, Fraction]] = []
    for start, end in spans:
        if merged and start < merged[-1][1]:
            if end > merged[-1][1]:
                merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    total = sum((end - start for start, end in merged), Fraction(0))
    return merged, total


def sample_witness_search(
    A: PointSet, E: GridSet, alpha: float, trials: int, seed: int
) -> Optional[AffineMap]:
    """
    Random (T, x) candidates filtered by verify_witness.

    T = U diag(s) V with s log-uniform in the band and U, V random orthogonal;
    x places the image of the first point at a uniform point of a random
    selected cell. A returned map is always verified; None proves nothing.
    """
    _check_inputs(A, E, alpha)
    selected = np.flatnonzero(E.bits)
    if selected.size == 0 or trials <= 0:
        return None

    d = A.dim
    rng = np.random.Generator(np.random.Philox(seed))
    log_lo, log_hi = np.log(alpha), -np.log(alpha)
    for trial in range(1, trials + 1):
        u, _ = np.linalg.qr(rng.standard_normal((d, d)))
        v, _ = np.linalg.qr(rng.standard_normal((d, d)))
        s = np.exp(rng.uniform(log_lo, log_hi, size=d))
        matrix = u @ np.diag(s) @ v

        cell = np.unravel_index(rng.choice(selected), (E.L,) * d)
        target = (np.asarray(cell) + rng.uniform(0.0, 1.0, size=d)) / E.L
        shift = target - matrix @ A.coords[0]
        if np.any(shift < 0) or np.any(shift > 1):
            continue

        candidate = AffineMap(matrix, shift)
        try:
            if verify_witness(candidate, A, E, alpha):
                logger.info(f"witness found after {trial} trials")
                return candidate
        except BoundaryUndecidable:
            continue
    logger.info(f"no witness in {trials} trials")
    return None


def timed(fn, *args, **kwargs) -> Tuple[DetectionResult, float]:
    """Run a detector and return (result, wall time in ms)."""
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, (time.perf_counter() - start) * 1000.0
