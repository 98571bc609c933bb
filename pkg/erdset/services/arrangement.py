"""
Hyperplane arrangements.

Buck's region bound, exact region enumeration on the line and in the plane,
the Lambda windows of grid hyperplanes near a translation x, representative
scalars for d = 1, and the exact copy regions in the (lambda, x) plane.

All geometry in this module is done in exact rationals.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import numpy as np

from erdset.errors import DomainError
from erdset.services.geometry import PointSet
from erdset.services.grid import GridSet

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]
Vertex = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Hyperplane:
    """{y : normal . y + offset = 0} with a unit normal."""

    normal: Tuple[float, ...]
    offset: float

    def __post_init__(self):
        if abs(math.hypot(*self.normal) - 1.0) > 1e-12:
            raise DomainError(f"hyperplane normal {self.normal} is not unit length")

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[float], offset: float) -> "Hyperplane":
        """Normalise c . y + b = 0 to unit normal form."""
        norm = math.hypot(*coefficients)
        if norm == 0:
            raise DomainError("hyperplane coefficients are all zero")
        return cls(tuple(float(c) / norm for c in coefficients), float(offset) / norm)

    def evaluate(self, point: Sequence[Number]) -> Fraction:
        """Exact value of normal . point + offset."""
        return sum(
            (Fraction(n) * Fraction(p) for n, p in zip(self.normal, point)),
            Fraction(self.offset),
        )


@dataclass(frozen=True)
class Region:
    """An open region of an arrangement with one interior point."""

    sign_vector: Tuple[str, ...]
    representative: Tuple[Fraction, ...]


@dataclass(frozen=True)
class LambdaWindow:
    """Grid lines j/L along axis ell within reach of the image of point i (both 1-based)."""

    ell: int
    i: int
    js: Tuple[int, ...]


@dataclass(frozen=True)
class CopyRegion:
    """Open convex polygon in the (lambda, x) plane, vertices counterclockwise."""

    vertices: Tuple[Vertex, ...]

    @property
    def area(self) -> Fraction:
        return _area(self.vertices)

    @property
    def x_range(self) -> Tuple[Fraction, Fraction]:
        xs = [v[1] for v in self.vertices]
        return min(xs), max(xs)

    def contains(self, lam: Number, x: Number) -> bool:
        """Strict interior test."""
        p = (Fraction(lam), Fraction(x))
        n = len(self.vertices)
        for idx in range(n):
            a, b = self.vertices[idx], self.vertices[(idx + 1) % n]
            if _cross(a, b, p) <= 0:
                return False
        return True

    def to_dict(self) -> dict:
        """Float vertices for plotting, exact fraction strings for reading back."""
        return {
            "vertices": [[float(lam), float(x)] for lam, x in self.vertices],
            "exact": [[str(lam), str(x)] for lam, x in self.vertices],
            "area": float(self.area),
        }


def buck_bound(num_hyperplanes: int, ambient_dim: int) -> int:
    """Maximum number of regions cut from R^dim by n hyperplanes."""
    if num_hyperplanes < 0 or ambient_dim < 0:
        raise DomainError("buck_bound needs nonnegative inputs")
    return sum(math.comb(num_hyperplanes, k) for k in range(ambient_dim + 1))


def enumerate_regions_1d(breakpoints: Sequence[Number]) -> List[Region]:
    """Regions of the line cut at the given points, with midpoint representatives."""
    points = sorted(set(breakpoints))
    if not points:
        return [Region(sign_vector=(), representative=(0,))]

    reps = [points[0] - 1]
    reps += [(a + b) / 2 for a, b in zip(points, points[1:])]
    reps.append(points[-1] + 1)
    return [
        Region(sign_vector=tuple("+" if rep > b else "-" for b in points), representative=(rep,))
        for rep in reps
    ]


# --- plane --------------------------------------------------------------------


def _cross(o: Vertex, a: Vertex, b: Vertex) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _area(vertices: Sequence[Vertex]) -> Fraction:
    n = len(vertices)
    twice = sum(
        (vertices[i][0] * vertices[(i + 1) % n][1] - vertices[(i + 1) % n][0] * vertices[i][1] for i in range(n)),
        Fraction(0),
    )
    return twice / 2


def _clip(polygon: Sequence[Vertex], a: Fraction, b: Fraction, c: Fraction) -> List[Vertex]:
    """Part of a convex polygon with a*u + b*v + c >= 0."""
    out: List[Vertex] = []
    n = len(polygon)
    for idx in range(n):
        p, q = polygon[idx], polygon[(idx + 1) % n]
        sp = a * p[0] + b * p[1] + c
        sq = a * q[0] + b * q[1] + c
        if sp >= 0:
            out.append(p)
        if (sp > 0 > sq) or (sp < 0 < sq):
            t = sp / (sp - sq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    deduped: List[Vertex] = []
    for v in out:
        if not deduped or deduped[-1] != v:
            deduped.append(v)
    if len(deduped) > 1 and deduped[0] == deduped[-1]:
        deduped.pop()
    return deduped


def _centroid(polygon: Sequence[Vertex]) -> Vertex:
    n = len(polygon)
    return (sum((v[0] for v in polygon), Fraction(0)) / n, sum((v[1] for v in polygon), Fraction(0)) / n)


def enumerate_regions_2d(
    lines: Sequence[Hyperplane], bbox: Tuple[Number, Number, Number, Number]
) -> Tuple[int, List[Region]]:
    """
    Open regions of bbox minus the lines, by exact incremental splitting.

    Args:
        lines: hyperplanes of R^2
        bbox: (xmin, ymin, xmax, ymax)

    Returns:
        (count, regions) with one vertex-centroid representative per region

    Raises:
        DomainError: empty or degenerate bbox, or a hyperplane not in R^2
    """
    xmin, ymin, xmax, ymax = (Fraction(v) for v in bbox)
    if not (xmin < xmax and ymin < ymax):
        raise DomainError(f"degenerate bounding box {bbox}")
    polygons = [[(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]]

    exact_lines = []
    for line in lines:
        if len(line.normal) != 2:
            raise DomainError("enumerate_regions_2d needs lines in the plane")
        exact_lines.append((Fraction(line.normal[0]), Fraction(line.normal[1]), Fraction(line.offset)))

    for a, b, c in exact_lines:
        split = []
        for polygon in polygons:
            values = [a * v[0] + b * v[1] + c for v in polygon]
            if all(s >= 0 for s in values) or all(s <= 0 for s in values):
                split.append(polygon)
                continue
            for piece in (_clip(polygon, a, b, c), _clip(polygon, -a, -b, -c)):
                if len(piece) >= 3 and _area(piece) > 0:
                    split.append(piece)
        polygons = split

    regions = []
    for polygon in polygons:
        rep = _centroid(polygon)
        signs = tuple("+" if a * rep[0] + b * rep[1] + c > 0 else "-" for a, b, c in exact_lines)
        regions.append(Region(sign_vector=signs, representative=rep))
    return len(regions), regions


# --- Lambda windows and d = 1 representatives ------------------------------------


def _decimal(value: float) -> Fraction:
    """Exact value of the shortest decimal that round-trips to this float."""
    return Fraction(repr(float(value)))


def window_budget(dim: int, max_norm: float, L: int, k: int, alpha: float) -> float:
    """8 d M L k / alpha, the bound on the total number of window hyperplanes."""
    return 8 * dim * max_norm * L * k / alpha


def representative_bound(dim: int, alpha: float, L: int, max_norm: float, k: int) -> float:
    """(d^2 + 1)(8d/alpha)^(d^2) (L M k)^(d^2)."""
    d2 = dim * dim
    return (d2 + 1) * (8 * dim / alpha) ** d2 * (L * max_norm * k) ** d2


def lambda_windows(x: Sequence[float], A: PointSet, L: int, alpha: float) -> List[LambdaWindow]:
    """
    For each axis and point, the j in [0, L] with |x_ell - j/L| < |a_i|/alpha + 1/L.

    Membership is decided exactly on the shortest decimal values of x, |a_i| and alpha.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape[0] != A.dim:
        raise DomainError(f"x has dimension {x.shape[0]}, A has {A.dim}")
    alpha_q = _decimal(alpha)
    norms = [_decimal(v) for v in A.norms]

    windows = []
    for ell in range(A.dim):
        center = _decimal(x[ell]) * L
        for i, norm in enumerate(norms):
            reach = (norm / alpha_q + Fraction(1, L)) * L
            j_lo = max(0, math.floor(center - reach) + 1)
            j_hi = min(L, math.ceil(center + reach) - 1)
            windows.append(LambdaWindow(ell=ell + 1, i=i + 1, js=tuple(range(j_lo, j_hi + 1))))

    total = sum(len(w.js) for w in windows)
    budget = window_budget(A.dim, A.max_norm, L, A.size, alpha)
    if total > budget:
        logger.warning(f"window total {total} exceeds 8dMLk/alpha = {budget:.3f}")
    return windows


def _in_band(lam: Fraction, alpha: Fraction) -> bool:
    beta = 1 / alpha
    return alpha < abs(lam) < beta


def representative_scalars_1d(x: float, A: PointSet, L: int, alpha: float) -> List[Fraction]:
    """
    One scalar per region of the band cut by the breakpoints (j/L - x)/a_i.

    Any lambda in the band with lambda A + x inside E is matched by a returned
    scalar whose images lie in the same cells.
    """
    if A.dim != 1:
        raise DomainError("representative_scalars_1d needs d = 1")
    if A.contains_origin():
        raise DomainError("representative_scalars_1d needs nonzero points")
    alpha_f = Fraction(alpha)
    x_f = Fraction(float(x))
    points = [Fraction(float(a)) for a in A.coords[:, 0]]

    breakpoints = {alpha_f, -alpha_f, 1 / alpha_f, -1 / alpha_f}
    for window in lambda_windows([x], A, L, alpha):
        a = points[window.i - 1]
        for j in window.js:
            breakpoints.add((Fraction(j, L) - x_f) / a)

    reps = [region.representative[0] for region in enumerate_regions_1d(sorted(breakpoints))]
    reps = [lam for lam in reps if _in_band(lam, alpha_f)]

    bound = representative_bound(1, alpha, L, A.max_norm, A.size)
    if len(reps) > bound:
        logger.warning(f"{len(reps)} representatives exceed the bound {bound:.3f}")
    return reps


def _band_boxes(alpha: Fraction) -> List[List[Vertex]]:
    beta = 1 / alpha
    zero, one = Fraction(0), Fraction(1)
    return [
        [(alpha, zero), (beta, zero), (beta, one), (alpha, one)],
        [(-beta, zero), (-alpha, zero), (-alpha, one), (-beta, one)],
    ]


def copy_regions_1d(A: PointSet, E: GridSet, alpha: float) -> List[CopyRegion]:
    """
    Exact decomposition of {(lambda, x) : lambda in the band, x in [0,1], lambda A + x in E}.

    Each band box is clipped to the slab of every selected cell the current
    point's image can reach, one point at a time. Points are processed with
    the largest |a| first, then by distance from it, which keeps the slabs
    of later points narrow.
    """
    if A.dim != 1 or E.dim != 1:
        raise DomainError("copy_regions_1d needs d = 1")
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if E.count == 0:
        return []

    values = [Fraction(float(a)) for a in A.coords[:, 0]]
    anchor = max(values, key=abs)
    order = sorted(values, key=lambda a: (a != anchor, abs(a - anchor)))
    L = E.L
    bits = E.bits

    polygons = _band_boxes(Fraction(alpha))
    for a in order:
        clipped = []
        for polygon in polygons:
            images = [lam * a + x for lam, x in polygon]
            j_lo = max(0, math.floor(min(images) * L))
            j_hi = min(L - 1, math.ceil(max(images) * L) - 1)
            if j_lo > j_hi:
                continue
            for j in np.flatnonzero(bits[j_lo:j_hi + 1]) + j_lo:
                j = int(j)
                # j/L < lam*a + x < (j+1)/L
                piece = _clip(polygon, a, Fraction(1), -Fraction(j, L))
                if len(piece) < 3:
                    continue
                piece = _clip(piece, -a, Fraction(-1), Fraction(j + 1, L))
                if len(piece) >= 3 and _area(piece) > 0:
                    clipped.append(piece)
        polygons = clipped
        if not polygons:
            break

    return [CopyRegion(vertices=tuple(p)) for p in polygons]
