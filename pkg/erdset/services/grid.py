"""
Random subcube grids.

[0,1]^d is cut into L^d open cells I_j = prod (j_i/L, (j_i+1)/L). A GridSet is
the open union of the selected cells, stored as a flat boolean array in
linear-index order j_1*L^(d-1) + ... + j_d (j_d fastest).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, reduce
from itertools import product
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from erdset.config import get_settings
from erdset.errors import DomainError, ResourceError
from erdset.models.schemas import StageParams
from erdset.services.geometry import PointSet, delta, exact_min_gap_1d, min_distance
from erdset.services.streams import TWO64, hash_range, selection_threshold

logger = logging.getLogger(__name__)

SAMPLE_CHUNK = 1 << 20


@dataclass(frozen=True)
class CellIndex:
    """Integer coordinates (j_1, ..., j_d) of an open cell."""

    coords: Tuple[int, ...]


class Placement(str, Enum):
    """Non-cell outcomes of locate."""
    ON_BOUNDARY = "on_boundary"
    OUTSIDE = "outside"


def check_cells(dim: int, L: int, max_cells: Optional[int] = None) -> int:
    """Return L**dim, raising ResourceError above the cell cap."""
    cap = max_cells if max_cells is not None else get_settings().max_cells
    cells = L ** dim
    if cells > cap:
        raise ResourceError(f"grid with L={L}, d={dim} has {cells} cells, above the cap of {cap}")
    return cells


class GridSet:
    """Selected open subcubes of [0,1]^d at resolution L."""

    def __init__(self, dim: int, L: int, bits: np.ndarray, seed: Optional[int] = None):
        if dim < 1 or L < 1:
            raise DomainError(f"grid needs d >= 1 and L >= 1, got d={dim}, L={L}")
        bits = np.ascontiguousarray(bits, dtype=bool).reshape(-1)
        if bits.shape[0] != L ** dim:
            raise DomainError(f"expected {L ** dim} cells, got {bits.shape[0]}")
        bits.setflags(write=False)
        self.dim = dim
        self.L = L
        self.bits = bits
        self.seed = seed

    @classmethod
    def empty(cls, dim: int, L: int) -> "GridSet":
        return cls(dim, L, np.zeros(L ** dim, dtype=bool))

    @classmethod
    def full(cls, dim: int, L: int) -> "GridSet":
        return cls(dim, L, np.ones(L ** dim, dtype=bool))

    @classmethod
    def from_cells(cls, dim: int, L: int, cells: Iterable[Union[int, Sequence[int]]]) -> "GridSet":
        """Grid selecting the given cells (linear indices or coordinate tuples)."""
        bits = np.zeros(L ** dim, dtype=bool)
        for cell in cells:
            index = cell if isinstance(cell, (int, np.integer)) else linear_index(cell, L)
            bits[index] = True
        return cls(dim, L, bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridSet)
            and self.dim == other.dim
            and self.L == other.L
            and np.array_equal(self.bits, other.bits)
        )

    def __repr__(self):
        return f"GridSet(dim={self.dim}, L={self.L}, count={self.count}, seed={self.seed})"

    @property
    def total_cells(self) -> int:
        return self.bits.shape[0]

    @cached_property
    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def measure(self) -> Fraction:
        return Fraction(self.count, self.total_cells)

    def cube(self) -> np.ndarray:
        """L x ... x L boolean view indexed by (j_1, ..., j_d)."""
        return self.bits.reshape((self.L,) * self.dim)

    def cell_bit(self, index: Union[CellIndex, Sequence[int]]) -> bool:
        coords = index.coords if isinstance(index, CellIndex) else tuple(index)
        return bool(self.bits[linear_index(coords, self.L)])

    @cached_property
    def summed_area(self) -> np.ndarray:
        """S[j] = number of selected cells with every coordinate below j; shape (L+1,)^d."""
        table = np.zeros((self.L + 1,) * self.dim, dtype=np.int64)
        acc = self.cube().astype(np.int64)
        for axis in range(self.dim):
            acc = np.cumsum(acc, axis=axis)
        table[(slice(1, None),) * self.dim] = acc
        return table

    def count_in_boxes(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """
        Selected-cell counts over inclusive index boxes.

        Args:
            lo, hi: (B, d) integer arrays already clipped to [0, L-1], lo <= hi

        Returns:
            (B,) counts
        """
        table = self.summed_area
        total = np.zeros(lo.shape[0], dtype=np.int64)
        for corner in product((0, 1), repeat=self.dim):
            index = tuple(
                lo[:, axis] if take_lo else hi[:, axis] + 1
                for axis, take_lo in enumerate(corner)
            )
            sign = -1 if sum(corner) % 2 else 1
            total += sign * table[index]
        return total


def linear_index(coords: Sequence[int], L: int) -> int:
    index = 0
    for j in coords:
        if not 0 <= j < L:
            raise DomainError(f"cell coordinate {j} outside [0, {L})")
        index = index * L + int(j)
    return index


def stage_resolution(
    dim: int,
    alpha: float,
    max_norm: float = 1.0,
    delta_n: float = 1.0,
    gap: Optional[Fraction] = None,
) -> int:
    """
    L = ceil(d / (alpha M delta)), evaluated exactly on the given floats.

    M * delta is the minimum pairwise distance; pass it as gap to skip the
    float product.
    """
    if gap is None:
        gap = Fraction(max_norm) * Fraction(delta_n)
    if gap <= 0:
        raise DomainError(f"minimum gap must be positive, got {gap}")
    return math.ceil(Fraction(dim) / (Fraction(alpha) * Fraction(gap)))


def log_selection_probability(dim: int, k: int, delta_n: float, slack: float) -> float:
    """log p = d^2 log(delta)/k - (d^2 + 1 + slack) log(k)/k."""
    d2 = dim * dim
    return d2 * math.log(delta_n) / k - (d2 + 1 + slack) * math.log(k) / k


def stage_params(A: PointSet, alpha: float, slack: Optional[float] = None, n: int = 0) -> StageParams:
    """
    Stage constants for A_n.

    M_n * delta_n is the minimum pairwise distance, so L_n is computed from it
    directly (exactly in d = 1).

    Raises:
        DomainError: alpha outside (0, 1), fewer than two points or the origin in A_n
    """
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if A.size < 2:
        raise DomainError("stage_params needs at least two points")
    if A.contains_origin():
        raise DomainError("A_n must not contain the origin")
    slack = get_settings().slack if slack is None else slack

    d, k = A.dim, A.size
    gap = exact_min_gap_1d(A) if d == 1 else Fraction(min_distance(A))
    L = stage_resolution(d, alpha, gap=gap)
    delta_n = delta(A)

    log_p = log_selection_probability(d, k, delta_n, slack)
    tiny = float(np.nextafter(0.0, 1.0))
    p = min(max(math.exp(log_p), tiny), float(np.nextafter(1.0, 0.0)))

    return StageParams(
        n=n, dim=d, alpha=alpha, k_n=k, delta_n=delta_n, M_n=A.max_norm,
        L_n=L, p_n=p, log_p=log_p, slack=slack,
    )


def sample_grid(
    params: StageParams,
    seed: int,
    threads: Optional[int] = None,
    max_cells: Optional[int] = None,
) -> GridSet:
    """
    Select each cell independently with probability p_n.

    Cell i is selected iff H(seed, n, i) < ceil(p_n * 2^64); the output does not
    depend on the number of worker threads.
    """
    settings = get_settings()
    cells = check_cells(params.dim, params.L_n, max_cells)
    threshold = selection_threshold(params.p_n)

    if threshold >= TWO64:
        return GridSet(params.dim, params.L_n, np.ones(cells, dtype=bool), seed)
    if threshold == 0:
        return GridSet(params.dim, params.L_n, np.zeros(cells, dtype=bool), seed)

    bits = np.empty(cells, dtype=bool)
    limit = np.uint64(threshold)

    def fill(start: int) -> None:
        stop = min(start + SAMPLE_CHUNK, cells)
        bits[start:stop] = hash_range(seed, params.n, start, stop) < limit

    workers = threads or settings.threads
    starts = range(0, cells, SAMPLE_CHUNK)
    if workers > 1 and cells > SAMPLE_CHUNK:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for start in starts:
            fill(start)
    return GridSet(params.dim, params.L_n, bits, seed)


def measure(E: GridSet) -> Fraction:
    """Exact popcount / L^d."""
    return E.measure


def locate(p: Sequence, L: int) -> Union[CellIndex, Placement]:
    """
    Exact location of p against the grid of resolution L.

    Outside is reported before OnBoundary; coordinates may be floats or Fractions.
    """
    values = [Fraction(c) for c in p]
    if any(v < 0 or v > 1 for v in values):
        return Placement.OUTSIDE
    scaled = [v * L for v in values]
    if any(t.denominator == 1 for t in scaled):
        return Placement.ON_BOUNDARY
    return CellIndex(tuple(math.floor(t) for t in scaled))


def contains_open(E: GridSet, p: Sequence) -> bool:
    if len(p) != E.dim:
        raise DomainError(f"point dimension {len(p)} does not match grid dimension {E.dim}")
    where = locate(p, E.L)
    return isinstance(where, CellIndex) and E.cell_bit(where)


def refine(E: GridSet, factor: int, max_cells: Optional[int] = None) -> GridSet:
    """
    Resolution L*factor keeping only subcells strictly inside selected parents.

    Each selected parent keeps ((factor-2)/factor)^d of its measure; factor 1 is the identity.
    """
    if factor < 1:
        raise DomainError(f"refine factor must be >= 1, got {factor}")
    if factor == 1:
        return GridSet(E.dim, E.L, E.bits.copy(), E.seed)
    check_cells(E.dim, E.L * factor, max_cells)

    inner = np.zeros(factor, dtype=np.uint8)
    inner[1:factor - 1] = 1
    mask = reduce(np.multiply.outer, [inner] * E.dim)
    refined = np.kron(E.cube().astype(np.uint8), mask).astype(bool)
    return GridSet(E.dim, E.L * factor, refined.reshape(-1))


def _check_compatible(E1: GridSet, E2: GridSet) -> None:
    if E1.dim != E2.dim or E1.L != E2.L:
        raise DomainError(
            f"grids differ in resolution: (d={E1.dim}, L={E1.L}) vs (d={E2.dim}, L={E2.L})"
        )


def intersect(E1: GridSet, E2: GridSet) -> GridSet:
    _check_compatible(E1, E2)
    return GridSet(E1.dim, E1.L, E1.bits & E2.bits)


def subtract(E1: GridSet, E2: GridSet) -> GridSet:
    _check_compatible(E1, E2)
    return GridSet(E1.dim, E1.L, E1.bits & ~E2.bits)
