"""
Example families {A_n} and the -log(delta)/#A condition checker.

Every family maps n >= first_index (1 unless stated) to a PointSet without
the origin. Sequence-valued
parameters are accepted either as callables of the 1-based index or as
sequences indexed from 1.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from erdset.config import get_settings
from erdset.errors import DomainError, SearchExhausted
from erdset.models.schemas import ConditionRow
from erdset.services.geometry import PointSet, delta

logger = logging.getLogger(__name__)

Rule = Union[Callable[[int], float], Sequence[float]]
VectorRule = Union[Callable[[int], Sequence[float]], Sequence[Sequence[float]]]

FAMILY_NAMES = ("polygon", "product", "sphere", "annulus", "geometric", "progression")


def _as_rule(values):
    if callable(values):
        return values

    def rule(index: int):
        if not 1 <= index <= len(values):
            raise DomainError(f"sequence has {len(values)} terms, index {index} requested")
        return values[index - 1]

    return rule


@dataclass(frozen=True)
class SequenceFamily:
    """A rule n -> A_n."""

    dim: int
    label: str
    generator: Callable[[int], PointSet]
    first_index: int = 1

    def at(self, n: int) -> PointSet:
        if n < self.first_index:
            raise DomainError(f"{self.label}: index must be >= {self.first_index}, got {n}")
        A = self.generator(n)
        if A.dim != self.dim:
            raise DomainError(f"{self.label}: A_{n} has dimension {A.dim}, expected {self.dim}")
        if A.contains_origin():
            raise DomainError(f"{self.label}: A_{n} contains the origin")
        return A


def gen_polygon_family(radii: Rule, perturb: Optional[float] = None) -> SequenceFamily:
    """
    Vertices of a regular (n+1)-gon of radius a_n.

    With perturb = eta, vertex j is pushed radially to a_n (1 + eta (j+1)/(n+2)),
    which makes every norm in the union of the family distinct when the a_n
    are separated by more than a factor 1 + eta.
    """
    radius = _as_rule(radii)
    if perturb is not None and not 0 <= perturb < 1:
        raise DomainError(f"perturbation must lie in [0, 1), got {perturb}")

    def generate(n: int) -> PointSet:
        a = float(radius(n))
        if not a > 0:
            raise DomainError(f"polygon radius must be positive, got a_{n} = {a}")
        j = np.arange(n + 1)
        r = np.full(n + 1, a)
        if perturb:
            r = a * (1.0 + perturb * (j + 1) / (n + 2))
        angle = 2.0 * np.pi * j / (n + 1)
        return PointSet(np.column_stack([r * np.cos(angle), r * np.sin(angle)]))

    label = "polygon" if not perturb else f"polygon(perturb={perturb})"
    return SequenceFamily(dim=2, label=label, generator=generate)


def _check_unit(value: float, name: str, index: int) -> Fraction:
    if not 0 < value < 1:
        raise DomainError(f"{name}_{index} must lie in (0, 1), got {value}")
    return Fraction(value)


def gen_product_family(r_seq: Rule, rho_seq: Rule, r_check: Optional[str] = None) -> SequenceFamily:
    """
    A_n = {r_1...r_n rho_1 rho_2^2 ... rho_{n-1}^{n-1} rho_n^k : k = 0..n}.

    The prefix product is carried in exact rationals so every point is the
    correctly rounded value; delta(A_n) is checked against rho_n^{n-1} - rho_n^n.

    Args:
        r_seq: r_n in (0, 1), expected strictly decreasing
        rho_seq: rho_n in (0, 1)
        r_check: policy when r_n fails to decrease: "off", "warn" or "enforce"
    """
    r_rule, rho_rule = _as_rule(r_seq), _as_rule(rho_seq)
    policy = r_check or get_settings().r_check

    def generate(n: int) -> PointSet:
        r = [_check_unit(float(r_rule(i)), "r", i) for i in range(1, n + 1)]
        rho = [_check_unit(float(rho_rule(i)), "rho", i) for i in range(1, n + 1)]

        if policy != "off":
            bad = [i + 1 for i in range(n - 1) if r[i + 1] >= r[i]]
            if bad:
                message = f"r_n is not strictly decreasing at n={bad[0]}"
                if policy == "enforce":
                    raise DomainError(message)
                logger.warning(message)

        prefix = Fraction(1)
        for value in r:
            prefix *= value
        for i in range(1, n):
            prefix *= rho[i - 1] ** i
        rho_n = rho[-1]
        A = PointSet([float(prefix * rho_n ** k) for k in range(n + 1)])

        expected = float(rho_n ** (n - 1) - rho_n ** n)
        computed = delta(A)
        if abs(computed - expected) > 1e-12 * expected:
            logger.warning(f"product family self-check drift at n={n}: delta={computed!r}, formula={expected!r}")
        return A

    return SequenceFamily(dim=1, label="product", generator=generate)


def gen_sphere_family(norms: Rule, directions: VectorRule) -> SequenceFamily:
    """
    Prefix family of the points a_k u_k: A_n holds the first n+1 of them.

    Raises (from at()):
        DomainError: nonpositive norm or a direction more than 1e-12 off unit length
    """
    norm_rule, direction_rule = _as_rule(norms), _as_rule(directions)
    dim = len(direction_rule(1))

    def element(k: int) -> np.ndarray:
        a = float(norm_rule(k))
        if not a > 0:
            raise DomainError(f"sphere norm must be positive, got a_{k} = {a}")
        u = np.asarray(direction_rule(k), dtype=np.float64)
        if u.shape != (dim,) or abs(float(np.linalg.norm(u)) - 1.0) > 1e-12:
            raise DomainError(f"direction u_{k} = {u.tolist()} is not a unit vector in R^{dim}")
        return a * u

    def generate(n: int) -> PointSet:
        return PointSet(np.stack([element(k) for k in range(1, n + 2)]))

    return SequenceFamily(dim=dim, label="sphere", generator=generate)


def gen_geometric_family(ratio: float = 0.5) -> SequenceFamily:
    """
    A_n = {r, r^2, ..., r^n} for n >= 2.

    delta(A_n) = r^(n-2) (1 - r), so at r = 1/2 the score is (n-1) log 2 / n.
    """
    if not 0 < ratio < 1:
        raise DomainError(f"ratio must lie in (0, 1), got {ratio}")

    def generate(n: int) -> PointSet:
        return PointSet([ratio ** j for j in range(1, n + 1)])

    return SequenceFamily(dim=1, label=f"geometric(ratio={ratio})", generator=generate, first_index=2)


def gen_progression_family() -> SequenceFamily:
    """A_n = {j / 2^m : j = 1..n+1} with 2^m the smallest power of two >= n+1."""

    def generate(n: int) -> PointSet:
        scale = 1 << n.bit_length()
        return PointSet([j / scale for j in range(1, n + 2)])

    return SequenceFamily(dim=1, label="progression", generator=generate)


@dataclass(frozen=True)
class AnnulusSelection:
    """Chosen indices of a_1, a_3, ..., a_(2n+1) and the constants that located them."""

    indices: List[int]
    rho: float
    m: int
    k0: int


def annulus_rho(n: int) -> float:
    """rho_n = 1 - exp(-sqrt(n))."""
    return -math.expm1(-math.sqrt(n))


def select_annulus_subsequence(
    norms: Callable[[int], float],
    n: int,
    ratio_window: Optional[int] = None,
    scan_budget: Optional[int] = None,
) -> AnnulusSelection:
    """
    Pick one index per odd annulus [rho^(m+j), rho^(m+j-1)), j = 1, 3, ..., 2n+1.

    Args:
        norms: |x_k| for k >= 1, positive, ratios tending to 1 and values to 0
        n: stage, n >= 1
        ratio_window: consecutive ratios that must exceed rho_n at k0
        scan_budget: indices examined in each of the two scans

    Raises:
        SearchExhausted: no k0 or no annulus member within the scan budget
        DomainError: the selected set violates delta >= rho^(2n-1) (1 - rho)
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    settings = get_settings()
    window = ratio_window or settings.ratio_window
    budget = scan_budget or settings.scan_budget
    rho = annulus_rho(n)

    # Step 1: k0 = smallest k whose next `window` ratios all exceed rho
    k0, run, k = None, 0, 1
    previous = float(norms(1))
    while k <= budget:
        current = float(norms(k + 1))
        run = run + 1 if current > rho * previous else 0
        if run == window:
            k0 = k + 1 - window
            break
        previous, k = current, k + 1
    if k0 is None:
        raise SearchExhausted(f"no run of {window} ratios above rho={rho:.6f} within {budget} indices")

    # Step 2: smallest m >= 1 with rho^m <= |x_k0|
    anchor = float(norms(k0))
    m = 1
    while rho ** m > anchor:
        m += 1

    # Step 3: single scan from k0, first hit per odd annulus
    targets = {j: (rho ** (m + j), rho ** (m + j - 1)) for j in range(1, 2 * n + 2, 2)}
    chosen = {}
    k = k0
    while len(chosen) < len(targets):
        if k - k0 >= budget:
            missing = sorted(set(targets) - set(chosen))
            raise SearchExhausted(f"annuli {missing} empty within {budget} indices from k0={k0}")
        value = float(norms(k))
        for j, (low, high) in targets.items():
            if j not in chosen and low <= value < high:
                chosen[j] = k
        k += 1

    indices = [chosen[j] for j in sorted(chosen)]
    selected = PointSet([float(norms(i)) for i in indices])
    floor = rho ** (2 * n - 1) * (1 - rho)
    if delta(selected) < floor * (1 - 1e-12):
        raise DomainError(f"selected set has delta {delta(selected)!r} below rho^(2n-1)(1-rho) = {floor!r}")
    return AnnulusSelection(indices=indices, rho=rho, m=m, k0=k0)


def gen_annulus_family(norms: Callable[[int], float], directions: Optional[VectorRule] = None) -> SequenceFamily:
    """A_n = the annulus-selected points x_k of a sequence with ratios tending to 1."""
    direction_rule = _as_rule(directions) if directions is not None else (lambda k: (1.0,))
    dim = len(direction_rule(1))

    def generate(n: int) -> PointSet:
        selection = select_annulus_subsequence(norms, n)
        return PointSet(np.stack([
            float(norms(k)) * np.asarray(direction_rule(k), dtype=np.float64) for k in selection.indices
        ]))

    return SequenceFamily(dim=dim, label="annulus", generator=generate)


def condition_report(family: SequenceFamily, n_max: int) -> List[ConditionRow]:
    """Rows n = first_index..n_max of -log(delta(A_n)) / #A_n."""
    if n_max < family.first_index:
        raise DomainError(f"n_max must be >= {family.first_index}, got {n_max}")
    rows = []
    for n in range(family.first_index, n_max + 1):
        A = family.at(n)
        d = delta(A)
        rows.append(ConditionRow(n=n, k_n=A.size, delta_n=d, score=-math.log(d) / A.size))
    return rows


def rho_condition_scores(rho_seq: Rule, n_max: int) -> List[float]:
    """log(1 - rho_n) / n for n = 1..n_max; a decrease in rho_n is logged."""
    rule = _as_rule(rho_seq)
    values = [float(rule(n)) for n in range(1, n_max + 1)]
    for n in range(1, n_max):
        if values[n] < values[n - 1]:
            logger.warning(f"rho_n decreases at n={n + 1}: {values[n - 1]!r} -> {values[n]!r}")
            break
    return [math.log1p(-v) / n for n, v in enumerate(values, start=1)]


def distinct_norms(family: SequenceFamily, n_max: int) -> bool:
    """True when no norm repeats across A_1, ..., A_n_max."""
    seen = set()
    for n in range(family.first_index, n_max + 1):
        for value in family.at(n).norms:
            if float(value) in seen:
                return False
            seen.add(float(value))
    return True


def build_family(
    name: str,
    ratio: float = 0.5,
    perturb: Optional[float] = None,
    rho_exponent: float = 2.0,
    norm_power: float = 1.0,
    direction: str = "fixed",
    r_check: Optional[str] = None,
) -> SequenceFamily:
    """
    Named families with their command-line parameters.

    - polygon: a_n = ratio^n, optional radial perturbation
    - product: r_n = 1/(n+1), rho_n = 1 - (n+1)^(-rho_exponent)
    - sphere: a_k = k^(-norm_power), direction fixed (1,0), alternate (+-1,0) or rotate
    - annulus: x_k = k^(-norm_power) on the positive axis
    - geometric: {ratio^1, ..., ratio^n}, n >= 2
    - progression: {j / 2^m : j = 1..n+1}
    """
    if name == "polygon":
        return gen_polygon_family(lambda n: ratio ** n, perturb=perturb)
    if name == "product":
        return gen_product_family(
            lambda n: 1.0 / (n + 1),
            lambda n: 1.0 - (n + 1) ** (-rho_exponent),
            r_check=r_check,
        )
    if name == "sphere":
        if direction == "fixed":
            directions = lambda k: (1.0, 0.0)
        elif direction == "alternate":
            directions = lambda k: (1.0 if k % 2 else -1.0, 0.0)
        elif direction == "rotate":
            directions = lambda k: (math.cos(k), math.sin(k))
        else:
            raise DomainError(f"unknown direction rule {direction!r}")
        return gen_sphere_family(lambda k: k ** (-norm_power), directions)
    if name == "annulus":
        return gen_annulus_family(lambda k: k ** (-norm_power))
    if name == "geometric":
        return gen_geometric_family(ratio)
    if name == "progression":
        return gen_progression_family()
    raise DomainError(f"unknown family {name!r}; expected one of {', '.join(FAMILY_NAMES)}")
