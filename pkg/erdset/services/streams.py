"""
Counter-based 64-bit hash streams.

The function below is frozen: grids, Monte Carlo samples and derived seeds
depend on it bit for bit, so changing any constant changes every artefact.

    GAMMA  = 0x9E3779B97F4A7C15
    mix(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
             z ^= z >> 27; z *= 0x94D049BB133111EB
             z ^= z >> 31                          (all mod 2**64)

    key(seed, n)  = mix(seed + mix(n * GAMMA))
    H(seed, n, i) = mix(key(seed, n) + (i + 1) * GAMMA)

H depends only on its arguments, so any subset of cells can be hashed in any
order, by any number of workers, with identical results.
"""

import math
from fractions import Fraction
from typing import Union

import numpy as np

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB
TWO64 = 1 << 64

_GAMMA_U = np.uint64(GAMMA)
_MUL1_U = np.uint64(MUL1)
_MUL2_U = np.uint64(MUL2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


def mix(z: int) -> int:
    """Finalise one 64-bit word."""
    z &= MASK
    z = ((z ^ (z >> 30)) * MUL1) & MASK
    z = ((z ^ (z >> 27)) * MUL2) & MASK
    return z ^ (z >> 31)


def stream_key(seed: int, n: int) -> int:
    """Key of the stream for stage n under a master seed."""
    return mix((seed & MASK) + mix((n * GAMMA) & MASK))


def hash_counter(seed: int, n: int, i: int) -> int:
    """H(seed, n, i) for one counter value."""
    return mix(stream_key(seed, n) + (((i + 1) * GAMMA) & MASK))


def mix_array(z: np.ndarray) -> np.ndarray:
    """Vectorised mix over a uint64 array (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _MUL1_U
        z = (z ^ (z >> _S27)) * _MUL2_U
        return z ^ (z >> _S31)


def hash_range(seed: int, n: int, start: int, stop: int) -> np.ndarray:
    """H(seed, n, i) for i in [start, stop) as a uint64 array."""
    key = np.uint64(stream_key(seed, n))
    counters = np.arange(start + 1, stop + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix_array(key + counters * _GAMMA_U)


def derive_seed(master: int, *keys: int) -> int:
    """Fold H over the keys to get an independent substream seed."""
    seed = master & MASK
    for depth, key in enumerate(keys):
        seed = hash_counter(seed, depth, key)
    return seed


def selection_threshold(p: Union[float, Fraction]) -> int:
    """
    Integer threshold t with H < t selecting a cell with probability p.

    Returns 2**64 (select everything) for p >= 1 and 0 for p <= 0.
    """
    if p <= 0:
        return 0
    if p >= 1:
        return TWO64
    return min(TWO64, math.ceil(Fraction(p) * TWO64))


def uniform_from_hash(h: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
    """Map 64-bit hashes to [0, 1) using their top 53 bits."""
    if isinstance(h, np.ndarray):
        return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
    return (h >> 11) * (1.0 / (1 << 53))
