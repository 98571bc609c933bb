"""
Outward-rounded interval arithmetic on numpy arrays.

An interval is a pair of arrays (lo, hi). Every operation rounds the lower
end down and the upper end up by one ulp, which encloses the exact result of
the round-to-nearest float operation.

Parameter boxes are (B, D) arrays with D = d*d + d: matrix entries row-major,
then the shift.
"""

from typing import Dict, Tuple

import numpy as np

Interval = Tuple[np.ndarray, np.ndarray]


def down(x: np.ndarray) -> np.ndarray:
    return np.nextafter(x, -np.inf)


def up(x: np.ndarray) -> np.ndarray:
    return np.nextafter(x, np.inf)


def add(a: Interval, b: Interval) -> Interval:
    return down(a[0] + b[0]), up(a[1] + b[1])


def scale(a: Interval, c: np.ndarray) -> Interval:
    """Multiply by exact point values c (broadcast)."""
    p, q = a[0] * c, a[1] * c
    return down(np.minimum(p, q)), up(np.maximum(p, q))


def mul(a: Interval, b: Interval) -> Interval:
    products = np.stack([a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]])
    return down(products.min(axis=0)), up(products.max(axis=0))


def mig(a: Interval) -> np.ndarray:
    """Smallest absolute value in the interval."""
    lo, hi = a
    return np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))


def mag(a: Interval) -> np.ndarray:
    """Largest absolute value in the interval."""
    return np.maximum(np.abs(a[0]), np.abs(a[1]))


def square(a: Interval) -> Interval:
    m, g = mig(a), mag(a)
    return down(m * m), up(g * g)


def _sum_down(terms: np.ndarray, axis: int) -> np.ndarray:
    total = np.take(terms, 0, axis=axis)
    for idx in range(1, terms.shape[axis]):
        total = down(total + np.take(terms, idx, axis=axis))
    return total


def _sum_up(terms: np.ndarray, axis: int) -> np.ndarray:
    total = np.take(terms, 0, axis=axis)
    for idx in range(1, terms.shape[axis]):
        total = up(total + np.take(terms, idx, axis=axis))
    return total


def split_params(lo: np.ndarray, hi: np.ndarray, d: int) -> Tuple[Interval, Interval]:
    """Reshape (B, D) boxes into matrix intervals (B, d, d) and shift intervals (B, d)."""
    b = lo.shape[0]
    return (
        (lo[:, : d * d].reshape(b, d, d), hi[:, : d * d].reshape(b, d, d)),
        (lo[:, d * d:], hi[:, d * d:]),
    )


def image_enclosure(lo: np.ndarray, hi: np.ndarray, points: np.ndarray) -> Interval:
    """
    Enclose T a_i + x over every box.

    Args:
        lo, hi: (B, D) parameter boxes
        points: (k, d) point coordinates

    Returns:
        (ylo, yhi), each of shape (B, k, d)
    """
    d = points.shape[1]
    (t_lo, t_hi), (x_lo, x_hi) = split_params(lo, hi, d)
    # (B, 1, d_row, d_col) * (1, k, 1, d_col)
    terms = scale((t_lo[:, None, :, :], t_hi[:, None, :, :]), points[None, :, None, :])
    y_lo = _sum_down(terms[0], axis=3)
    y_hi = _sum_up(terms[1], axis=3)
    return add((y_lo, y_hi), (x_lo[:, None, :], x_hi[:, None, :]))


def cell_span(y: Interval, L: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Range of open cells (j/L, (j+1)/L) meeting the closed interval [ylo, yhi].

    Unclipped: the lower index may be negative and the upper may reach L or more.
    """
    j_lo = np.floor(down(y[0] * L))
    j_hi = np.ceil(up(y[1] * L)) - 1
    return j_lo.astype(np.int64), j_hi.astype(np.int64)


def box_sigma_bounds(lo: np.ndarray, hi: np.ndarray, d: int) -> Dict[str, np.ndarray]:
    """
    Rigorous singular-value bounds valid for every matrix in each box.

    - sigma_max_lo: largest row or column norm lower bound
    - sigma_min_hi: smallest row or column norm upper bound
    - sigma_max_hi: Frobenius norm upper bound
    - sigma_min_lo: Gershgorin lower bound on lambda_min(T^T T), square-rooted
    """
    (t_lo, t_hi), _ = split_params(lo, hi, d)
    sq_lo, sq_hi = square((t_lo, t_hi))

    # down(0) is -tiny; clamp before the root
    col_lo = np.sqrt(np.maximum(_sum_down(sq_lo, axis=1), 0.0))
    row_lo = np.sqrt(np.maximum(_sum_down(sq_lo, axis=2), 0.0))
    col_hi = np.sqrt(_sum_up(sq_hi, axis=1))
    row_hi = np.sqrt(_sum_up(sq_hi, axis=2))

    sigma_max_lo = down(np.maximum(col_lo.max(axis=1), row_lo.max(axis=1)))
    sigma_min_hi = up(np.minimum(col_hi.min(axis=1), row_hi.min(axis=1)))
    sigma_max_hi = up(np.sqrt(_sum_up(sq_hi.reshape(sq_hi.shape[0], -1), axis=1)))

    if d == 1:
        sigma_min_lo = down(np.sqrt(np.maximum(sq_lo[:, 0, 0], 0.0)))
    else:
        # G = T^T T, G[c, c'] = sum_r T[r, c] T[r, c']
        gershgorin = None
        for c in range(d):
            diag_lo = _sum_down(sq_lo[:, :, c], axis=1)
            radius = np.zeros_like(diag_lo)
            for c2 in range(d):
                if c2 == c:
                    continue
                g_lo, g_hi = mul((t_lo[:, :, c], t_hi[:, :, c]), (t_lo[:, :, c2], t_hi[:, :, c2]))
                entry = mag((_sum_down(g_lo, axis=1), _sum_up(g_hi, axis=1)))
                radius = up(radius + entry)
            disc = down(diag_lo - radius)
            gershgorin = disc if gershgorin is None else np.minimum(gershgorin, disc)
        sigma_min_lo = down(np.sqrt(np.maximum(gershgorin, 0.0)))
    sigma_min_lo = np.maximum(sigma_min_lo, 0.0)

    return {
        "sigma_min_lo": sigma_min_lo,
        "sigma_min_hi": sigma_min_hi,
        "sigma_max_lo": np.maximum(sigma_max_lo, 0.0),
        "sigma_max_hi": sigma_max_hi,
    }
