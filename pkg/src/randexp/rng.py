"""Counter-based random numbers.

Every draw is a pure function of ``(seed, counter)``: draw n is the n-th
output of the SplitMix64 stream started at ``seed``, i.e. the splitmix64 mix of
``seed + n * golden`` (mod 2**64), and its 53 high bits are mapped to a double
in the open interval (0, 1).  No generator state is carried between draws, so
queries can be made in any order and from any number of threads.

Stepping the counter by the golden gamma rather than mixing ``seed ^ n``
matters: with the xor, seeds that differ in low bits only produce
permutations of each other's draws (seed 1 is seed 0 with neighbours swapped).
Streams of different small seeds here share no states over any practical
horizon; two seeds collide only if they differ by a small multiple of gamma.
"""

import numpy as np

from .errors import InvalidParameterError

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO_M53 = 2.0**-53


def splitmix64(x):
    """First splitmix64 output for state ``x`` (python int in [0, 2**64))."""
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def splitmix64_array(x):
    """Vectorised :func:`splitmix64` over a uint64 array (wrapping arithmetic)."""
    x = np.asarray(x, dtype=np.uint64) + np.uint64(_GOLDEN)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


def stream_state(seed, n):
    """Pre-mix state of draw ``n`` of stream ``seed``."""
    return (int(seed) + (int(n) & MASK64) * _GOLDEN) & MASK64


def stream_states(seed, idx):
    """Vectorised :func:`stream_state` over a uint64 index array."""
    return np.uint64(seed) + np.asarray(idx, dtype=np.uint64) * np.uint64(_GOLDEN)


def to_unit(h):
    """Map the 53 high bits k of ``h`` to k / 2**53, with k = 0 sent to 2**-54.

    Every value is exact and lies in the open interval (0, 1).
    """
    if isinstance(h, np.ndarray):
        return np.maximum((h >> np.uint64(11)).astype(np.float64), 0.5) * _TWO_M53
    return max(float(h >> 11), 0.5) * _TWO_M53


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def uniform(seed, n):
    """The n-th uniform draw of stream ``seed``."""
    return to_unit(splitmix64(stream_state(check_seed(seed), n)))


def uniform_array(seed, first, count):
    """Draws ``first, first+1, ..., first+count-1`` of stream ``seed``."""
    idx = np.arange(first, first + count, dtype=np.uint64)
    return to_unit(splitmix64_array(stream_states(check_seed(seed), idx)))


def trial_seed(master, trial):
    """Seed of trial ``trial`` derived from a master seed."""
    return splitmix64(stream_state(check_seed(master), trial))


def trial_seeds(master, trials):
    idx = np.arange(trials, dtype=np.uint64)
    return splitmix64_array(stream_states(check_seed(master), idx))


def inverse_cdf(u, xs, fs):
    """Inverse of the piecewise-linear CDF through the knots ``(xs, fs)``.

    ``fs`` must be nondecreasing from 0 to 1; flat pieces are skipped.  Works on
    scalars and arrays with the same floating-point operation order, so both
    paths (and the compiled kernel) give identical bits.
    """
    if isinstance(u, np.ndarray):
        j = np.searchsorted(fs, u, side="right") - 1
        return xs[j] + ((u - fs[j]) / (fs[j + 1] - fs[j])) * (xs[j + 1] - xs[j])
    lo, hi = 0, len(fs) - 1
    # largest j with fs[j] <= u
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fs[mid] <= u:
            lo = mid
        else:
            hi = mid
    j = lo
    return xs[j] + ((u - fs[j]) / (fs[j + 1] - fs[j])) * (xs[j + 1] - xs[j])
