"""
Vector and matrix predicates.

Point sets, affine maps, relative separation delta(A), certified singular
value enclosures and the operator-norm band test S_alpha^{1/alpha}.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from erdset.config import get_settings
from erdset.errors import BoundaryUndecidable, DomainError

logger = logging.getLogger(__name__)

Point = Sequence[float]
Matrix = Union[np.ndarray, Sequence[Sequence[float]]]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PointSet:
    """Finite ordered set of pairwise-distinct points in R^d, stored as a (k, d) array."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64) + 0.0  # folds -0.0 into 0.0
        if coords.ndim == 1:
            coords = coords.reshape(-1, 1)
        if coords.ndim != 2 or coords.shape[0] == 0 or coords.shape[1] == 0:
            raise DomainError("PointSet needs at least one point of dimension >= 1")
        if not np.all(np.isfinite(coords)):
            raise DomainError("PointSet coordinates must be finite")
        if len({row.tobytes() for row in coords}) != coords.shape[0]:
            raise DomainError("PointSet points must be pairwise distinct")
        object.__setattr__(self, "coords", _readonly(coords))

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def size(self) -> int:
        return self.coords.shape[0]

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.coords)

    def __eq__(self, other) -> bool:
        return isinstance(other, PointSet) and np.array_equal(self.coords, other.coords)

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.coords, axis=1)

    @property
    def max_norm(self) -> float:
        return float(self.norms.max())

    def contains_origin(self) -> bool:
        return bool(np.any(np.all(self.coords == 0.0, axis=1)))

    def exact(self) -> List[Tuple[Fraction, ...]]:
        """Points as tuples of exact rationals."""
        return [tuple(Fraction(float(c)) for c in row) for row in self.coords]


@dataclass(frozen=True, eq=False)
class AffineMap:
    """The map y = T a + x."""

    matrix: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        if matrix.ndim == 0:
            matrix = matrix.reshape(1, 1)
        shift = np.array(self.shift, dtype=np.float64).reshape(-1)
        d = shift.shape[0]
        if matrix.shape != (d, d):
            raise DomainError(f"matrix shape {matrix.shape} does not match shift dimension {d}")
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(shift))):
            raise DomainError("AffineMap entries must be finite")
        object.__setattr__(self, "matrix", _readonly(matrix))
        object.__setattr__(self, "shift", _readonly(shift))

    @property
    def dim(self) -> int:
        return self.shift.shape[0]

    def params(self) -> np.ndarray:
        """Matrix entries row-major followed by the shift."""
        return np.concatenate([self.matrix.reshape(-1), self.shift])

    def __repr__(self):
        return f"AffineMap(matrix={self.matrix.tolist()}, shift={self.shift.tolist()})"


@dataclass(frozen=True)
class SigmaBounds:
    """Certified enclosures of the smallest and largest singular values."""

    sigma_min_lo: float
    sigma_min_hi: float
    sigma_max_lo: float
    sigma_max_hi: float


def delta(A: PointSet) -> float:
    """
    Relative separation: minimum pairwise distance over maximum norm.

    Raises:
        DomainError: fewer than two points, or every point is the origin
    """
    if A.size < 2:
        raise DomainError("delta needs at least two points")
    max_norm = A.max_norm
    if max_norm == 0:
        raise DomainError("delta is undefined when the maximum norm is 0")
    return min_distance(A) / max_norm


def min_distance(A: PointSet) -> float:
    """Smallest pairwise Euclidean distance."""
    if A.dim == 1:
        ordered = np.sort(A.coords[:, 0])
        return float(np.min(np.diff(ordered)))
    best = math.inf
    for i in range(A.size - 1):
        gaps = np.linalg.norm(A.coords[i + 1:] - A.coords[i], axis=1)
        best = min(best, float(gaps.min()))
    return best


def exact_min_gap_1d(A: PointSet) -> Fraction:
    """Smallest gap between sorted points of a one-dimensional set, exactly."""
    if A.dim != 1:
        raise DomainError("exact_min_gap_1d needs d = 1")
    values = sorted(Fraction(float(v)) for v in A.coords[:, 0])
    return min(b - a for a, b in zip(values, values[1:]))


def as_matrix(T: Matrix) -> np.ndarray:
    matrix = np.array(T, dtype=np.float64)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("matrix entries must be finite")
    return matrix


def _gram(matrix: np.ndarray) -> List[List[Fraction]]:
    exact = [[Fraction(float(v)) for v in row] for row in matrix]
    d = len(exact)
    return [
        [sum((exact[r][i] * exact[r][j] for r in range(d)), Fraction(0)) for j in range(d)]
        for i in range(d)
    ]


def _positive_definite(a: List[List[Fraction]]) -> bool:
    """LDL^T pivots of a symmetric rational matrix are all positive."""
    a = [row[:] for row in a]
    n = len(a)
    for i in range(n):
        pivot = a[i][i]
        if pivot <= 0:
            return False
        for r in range(i + 1, n):
            factor = a[r][i] / pivot
            if factor:
                for c in range(i, n):
                    a[r][c] -= factor * a[i][c]
    return True


def _shifted(gram: List[List[Fraction]], t: Fraction, sign: int) -> List[List[Fraction]]:
    # sign=+1: G - t^2 I ; sign=-1: t^2 I - G
    t2 = t * t
    d = len(gram)
    return [
        [(sign * gram[i][j]) - (sign * t2 if i == j else 0) for j in range(d)]
        for i in range(d)
    ]


def sigma_min_exceeds(gram: List[List[Fraction]], t: Fraction) -> bool:
    """sigma_min(T) > t, decided exactly from the Gram matrix."""
    return _positive_definite(_shifted(gram, t, 1))


def sigma_max_below(gram: List[List[Fraction]], t: Fraction) -> bool:
    """sigma_max(T) < t, decided exactly from the Gram matrix."""
    return _positive_definite(_shifted(gram, t, -1))


def _tighten(ok: Callable[[float], bool], candidate: float, fallback: float, iterations: int = 80) -> float:
    """Return candidate if ok, otherwise bisect towards the known-valid fallback."""
    if ok(candidate):
        return candidate
    bad, good = candidate, fallback
    for _ in range(iterations):
        mid = (bad + good) / 2
        if mid in (bad, good):
            break
        if ok(mid):
            good = mid
        else:
            bad = mid
    return good


def op_norm_bounds(T: Matrix) -> SigmaBounds:
    """
    Certified enclosures of sigma_min(T) and sigma_max(T).

    A floating-point SVD supplies the estimate, padded by 1e-13 * (1 + sigma_max);
    every endpoint is then certified by an exact positive-definiteness test on
    T^T T -+ t^2 I and bisected towards a trivially valid bound if certification fails.
    """
    matrix = as_matrix(T)
    if matrix.shape == (1, 1):
        s = abs(float(matrix[0, 0]))
        return SigmaBounds(s, s, s, s)

    gram = _gram(matrix)
    singular = np.linalg.svd(matrix, compute_uv=False)
    smax, smin = float(singular[0]), float(singular[-1])
    pad = 1e-13 * (1.0 + smax)

    frob_sq = float(sum(gram[i][i] for i in range(len(gram))))
    frob_up = math.nextafter(math.sqrt(math.nextafter(frob_sq, math.inf)), math.inf)
    ceiling = math.nextafter(max(frob_up, smax + pad), math.inf)

    def min_lower(t: float) -> bool:
        return t == 0 or sigma_min_exceeds(gram, Fraction(t))

    def min_upper(t: float) -> bool:
        return not sigma_min_exceeds(gram, Fraction(t))

    def max_lower(t: float) -> bool:
        return t == 0 or not sigma_max_below(gram, Fraction(t))

    def max_upper(t: float) -> bool:
        return sigma_max_below(gram, Fraction(t))

    return SigmaBounds(
        sigma_min_lo=_tighten(min_lower, max(0.0, smin - pad), 0.0),
        sigma_min_hi=_tighten(min_upper, smin + pad, ceiling),
        sigma_max_lo=_tighten(max_lower, max(0.0, smax - pad), 0.0),
        sigma_max_hi=_tighten(max_upper, smax + pad, ceiling),
    )


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def in_operator_band(T: Matrix, alpha: float, precision: Optional[float] = None) -> bool:
    """
    True iff sigma_min(T) > alpha and sigma_max(T) < 1/alpha.

    Decided from op_norm_bounds when the enclosures clear both thresholds;
    otherwise the thresholds are tested exactly at t(1 -+ precision).

    Raises:
        DomainError: alpha outside (0, 1)
        BoundaryUndecidable: a singular value lies within the relative precision of a threshold
    """
    _check_alpha(alpha)
    matrix = as_matrix(T)
    alpha_f = Fraction(alpha)
    beta_f = 1 / alpha_f

    bounds = op_norm_bounds(matrix)
    if Fraction(bounds.sigma_min_lo) > alpha_f and Fraction(bounds.sigma_max_hi) < beta_f:
        return True
    if Fraction(bounds.sigma_min_hi) <= alpha_f or Fraction(bounds.sigma_max_lo) >= beta_f:
        return False

    eps = Fraction(precision if precision is not None else get_settings().boundary_precision)
    gram = _gram(matrix)

    if sigma_min_exceeds(gram, alpha_f * (1 + eps)):
        lower = True
    elif not sigma_min_exceeds(gram, alpha_f * (1 - eps)):
        lower = False
    else:
        lower = None

    if sigma_max_below(gram, beta_f * (1 - eps)):
        upper = True
    elif not sigma_max_below(gram, beta_f * (1 + eps)):
        upper = False
    else:
        upper = None

    if lower is False or upper is False:
        return False
    if lower is None or upper is None:
        raise BoundaryUndecidable(f"singular value of {matrix.tolist()} sits on the band edge for alpha={alpha}")
    return True


def apply_affine(affine: AffineMap, A: PointSet) -> PointSet:
    """
    {T a + x : a in A}, order-preserving.

    The image is again a PointSet, so a map that sends two points of A to the
    same point (singular T) is rejected rather than returning a multiset.

    Raises:
        DomainError: dimension mismatch, or two images coincide
    """
    if affine.dim != A.dim:
        raise DomainError(f"map dimension {affine.dim} does not match point dimension {A.dim}")
    return PointSet(A.coords @ affine.matrix.T + affine.shift)


def normalize_origin(A: PointSet, pivot_index: int) -> Tuple[PointSet, float]:
    """
    Translate A so that A[pivot_index] becomes the origin.

    Returns:
        (A - a0, C~) with C~ = C / (C + |a0|) and C the minimum norm over A.
        C~ is 0 (with a warning) when A already contains the origin.
    """
    if not -A.size <= pivot_index < A.size:
        raise IndexError(f"pivot_index {pivot_index} out of range for {A.size} points")
    pivot = A.coords[pivot_index]
    shifted = PointSet(A.coords - pivot)

    c_min = float(A.norms.min())
    if c_min == 0:
        logger.warning("Pivot normalisation on a set containing the origin: C~ = 0")
        return shifted, 0.0
    return shifted, c_min / (c_min + float(np.linalg.norm(pivot)))


def strip_origin(A: PointSet) -> PointSet:
    """A without the zero vector."""
    keep = ~np.all(A.coords == 0.0, axis=1)
    if not np.any(keep):
        raise DomainError("strip_origin would leave an empty set")
    return PointSet(A.coords[keep])
