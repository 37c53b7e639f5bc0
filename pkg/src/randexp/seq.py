"""Parameter sequences (lambda_n) for the maps z -> lambda_n * exp(z).

Every sequence is an immutable, indexable object: ``seq.query(n)`` returns
lambda_n and ``seq.values(first, count)`` returns a float64 array of
consecutive terms.  Random kinds derive the n-th term from a counter-based
stream keyed by ``(seed, n)`` so queries are order independent.

Sequences round-trip through plain dicts / JSON::

    {"kind": "uniform_random", "delta": 0.1, "seed": 7}
"""

import json
import math
from enum import Enum
from pathlib import Path

import numpy as np

from . import rng
from .constants import ONE_OVER_E
from .errors import InvalidParameterError, UndefinedIndexError

__all__ = [
    "Kind",
    "ParameterSequence",
    "ConstantSeq",
    "UniformRandomSeq",
    "BorelRandomSeq",
    "PowerLawSeq",
    "CriticalExactSeq",
    "BlockRepeatSeq",
    "constant_seq",
    "uniform_random_seq",
    "borel_random_seq",
    "power_law_seq",
    "critical_exact_seq",
    "block_repeat_seq",
    "from_spec",
    "load_sequence",
    "block_of",
]


class Kind(str, Enum):
    CONSTANT = "constant"
    UNIFORM_RANDOM = "uniform_random"
    BOREL_RANDOM = "borel_random"
    POWER_LAW = "power_law"
    CRITICAL_EXACT = "critical_exact"
    BLOCK_REPEAT = "block_repeat"
    ADAPTIVE_ESCAPE = "adaptive_escape"

    @classmethod
    def parse(cls, name):
        key = str(name).replace("-", "").replace("_", "").lower()
        for kind in cls:
            if kind.value.replace("_", "") == key:
                return kind
        raise InvalidParameterError(f"unknown sequence kind {name!r}")


class ParameterSequence:
    """Base class.  Subclasses implement ``_values(idx)`` for an int64 index array."""

    kind = None
    start_index = 1

    def query(self, n):
        n = int(n)
        self._check_index(n)
        return float(self._values(np.array([n], dtype=np.int64))[0])

    def values(self, first, count):
        """Terms ``first, ..., first + count - 1`` as a float64 array."""
        first, count = int(first), int(count)
        if count < 0:
            raise InvalidParameterError("count must be nonnegative")
        if count == 0:
            return np.empty(0, dtype=np.float64)
        self._check_index(first)
        return self._values(np.arange(first, first + count, dtype=np.int64))

    def __getitem__(self, n):
        return self.query(n)

    def _check_index(self, n):
        if n < self.start_index:
            raise UndefinedIndexError(
                f"{self.kind.value} sequence is defined from index {self.start_index}, got {n}"
            )

    def _values(self, idx):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.to_json())

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items() if k != "kind")
        return f"{type(self).__name__}({args})"


class ConstantSeq(ParameterSequence):
    kind = Kind.CONSTANT

    def __init__(self, lam):
        lam = float(lam)
        if not lam > 0 or not math.isfinite(lam):
            raise InvalidParameterError(f"lambda must be a positive real, got {lam}")
        self.lam = lam

    def _values(self, idx):
        return np.full(idx.shape, self.lam)

    def to_dict(self):
        return {"kind": self.kind.value, "lambda": self.lam}


def _open_bounds(lo, hi):
    return math.nextafter(lo, math.inf), math.nextafter(hi, -math.inf)


class UniformRandomSeq(ParameterSequence):
    """i.i.d. uniform terms on (1/e - delta, 1/e + delta)."""

    kind = Kind.UNIFORM_RANDOM

    def __init__(self, delta, seed):
        delta = float(delta)
        if not 0 < delta < ONE_OVER_E:
            raise InvalidParameterError(f"delta must lie in (0, 1/e), got {delta}")
        self.delta = delta
        self.seed = rng.check_seed(seed)
        self.lo = ONE_OVER_E - delta
        self.hi = ONE_OVER_E + delta
        self.lo_open, self.hi_open = _open_bounds(self.lo, self.hi)
        # a two-knot CDF makes the inverse-CDF path reduce to lo + u * (hi - lo)
        self.cdf_x = np.array([self.lo, self.hi])
        self.cdf_f = np.array([0.0, 1.0])

    def _values(self, idx):
        u = rng.to_unit(rng.splitmix64_array(rng.stream_states(self.seed, idx)))
        return np.clip(rng.inverse_cdf(u, self.cdf_x, self.cdf_f), self.lo_open, self.hi_open)

    def query(self, n):
        n = int(n)
        self._check_index(n)
        u = rng.uniform(self.seed, n)
        lam = rng.inverse_cdf(u, self.cdf_x, self.cdf_f)
        return min(max(lam, self.lo_open), self.hi_open)

    def to_dict(self):
        return {"kind": self.kind.value, "delta": self.delta, "seed": self.seed}


def _validate_cdf(cdf, delta):
    arr = np.asarray(cdf, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise InvalidParameterError("cdf must be a list of at least two [x, F] pairs")
    xs, fs = arr[:, 0].copy(), arr[:, 1].copy()
    lo, hi = ONE_OVER_E - delta, ONE_OVER_E + delta
    tol = 1e-12
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("cdf knots must be finite")
    if np.any(np.diff(xs) <= 0):
        raise InvalidParameterError("cdf abscissae must be strictly increasing")
    if np.any(np.diff(fs) < 0):
        raise InvalidParameterError("cdf is not monotone")
    if abs(fs[0]) > tol or abs(fs[-1] - 1.0) > tol:
        raise InvalidParameterError("cdf is not normalized: F must run from 0 to 1")
    if xs[0] < lo - tol or xs[-1] > hi + tol:
        raise InvalidParameterError(f"cdf support must lie in [1/e - delta, 1/e + delta] = [{lo}, {hi}]")
    fs[0], fs[-1] = 0.0, 1.0
    return xs, fs


class BorelRandomSeq(ParameterSequence):
    """i.i.d. terms drawn by inverse-CDF sampling of a piecewise-linear CDF."""

    kind = Kind.BOREL_RANDOM

    def __init__(self, delta, cdf, seed):
        delta = float(delta)
        if not 0 < delta < ONE_OVER_E:
            raise InvalidParameterError(f"delta must lie in (0, 1/e), got {delta}")
        self.delta = delta
        self.seed = rng.check_seed(seed)
        self.cdf_x, self.cdf_f = _validate_cdf(cdf, delta)
        self.lo_open, self.hi_open = _open_bounds(ONE_OVER_E - delta, ONE_OVER_E + delta)

    def cdf_at(self, x):
        """Value of the CDF at ``x`` (linear interpolation, clamped to [0, 1])."""
        return float(np.interp(x, self.cdf_x, self.cdf_f, left=0.0, right=1.0))

    def mean(self):
        """Mean of the piecewise-uniform distribution."""
        w = np.diff(self.cdf_f)
        mid = 0.5 * (self.cdf_x[1:] + self.cdf_x[:-1])
        return float(np.sum(w * mid))

    def _values(self, idx):
        u = rng.to_unit(rng.splitmix64_array(rng.stream_states(self.seed, idx)))
        return np.clip(rng.inverse_cdf(u, self.cdf_x, self.cdf_f), self.lo_open, self.hi_open)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "delta": self.delta,
            "seed": self.seed,
            "cdf": [[float(x), float(f)] for x, f in zip(self.cdf_x, self.cdf_f)],
        }


class PowerLawSeq(ParameterSequence):
    """lambda_n = 1/e + c / n**p."""

    kind = Kind.POWER_LAW

    def __init__(self, p, c=1.0):
        p, c = float(p), float(c)
        if not c > 0 or not math.isfinite(c) or not math.isfinite(p):
            raise InvalidParameterError(f"need finite p and c > 0, got p={p}, c={c}")
        self.p = p
        self.c = c

    def _values(self, idx):
        if self.p == 0:
            return np.full(idx.shape, ONE_OVER_E + self.c)
        return ONE_OVER_E + self.c / idx.astype(np.float64) ** self.p

    def to_dict(self):
        return {"kind": self.kind.value, "p": self.p, "c": self.c}


class CriticalExactSeq(ParameterSequence):
    """lambda_n = e^(1/(n-1) - 1) (1 - 1/n), which makes F_n(0) = 1 - 1/n.

    The formula is singular at n = 1; the sequence starts at index 2 and an
    orbit of 0 started after index 1 (i.e. with F_1(0) = 0) reproduces the
    identity exactly.
    """

    kind = Kind.CRITICAL_EXACT
    start_index = 2

    def _values(self, idx):
        n = idx.astype(np.float64)
        return np.exp(1.0 / (n - 1.0) - 1.0) * (1.0 - 1.0 / n)

    def to_dict(self):
        return {"kind": self.kind.value}


def block_of(k, factor=48):
    """Block number n with k in (factor*n(n-1)/2, factor*n(n+1)/2]; works on arrays."""
    k = np.asarray(k, dtype=np.int64)
    n = np.ceil((np.sqrt(1.0 + 8.0 * k / factor) - 1.0) / 2.0).astype(np.int64)
    n = np.maximum(n, 1)

    def upper(m):
        return factor * m * (m + 1) // 2

    # float guess is off by at most one near block edges
    n = np.where(upper(n) < k, n + 1, n)
    n = np.where(upper(n - 1) >= k, n - 1, n)
    return n


class BlockRepeatSeq(ParameterSequence):
    """1/e + 1/n repeated ``factor * n`` times for n = 1, 2, ..."""

    kind = Kind.BLOCK_REPEAT

    def __init__(self, factor=48):
        factor = int(factor)
        if factor < 1:
            raise InvalidParameterError("block factor must be a positive integer")
        self.factor = factor

    def block(self, k):
        return int(block_of(k, self.factor))

    def block_start(self, n):
        """First index of block ``n``."""
        return self.factor * n * (n - 1) // 2 + 1

    def _values(self, idx):
        return ONE_OVER_E + 1.0 / block_of(idx, self.factor).astype(np.float64)

    def to_dict(self):
        return {"kind": self.kind.value, "factor": self.factor}


def constant_seq(lam):
    return ConstantSeq(lam)


def uniform_random_seq(delta, seed):
    return UniformRandomSeq(delta, seed)


def borel_random_seq(delta, cdf, seed):
    return BorelRandomSeq(delta, cdf, seed)


def power_law_seq(p, c=1.0):
    return PowerLawSeq(p, c)


def critical_exact_seq():
    return CriticalExactSeq()


def block_repeat_seq(factor=48):
    return BlockRepeatSeq(factor)


def from_spec(spec):
    """Build a sequence from a dict such as ``{"kind": "power_law", "p": 2, "c": 0.1}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidParameterError("sequence spec must be an object with a 'kind' field")
    kind = Kind.parse(spec["kind"])

    def need(key):
        if key not in spec:
            raise InvalidParameterError(f"{kind.value} sequence requires {key!r}")
        return spec[key]

    if kind is Kind.CONSTANT:
        return ConstantSeq(spec["lambda"] if "lambda" in spec else need("value"))
    if kind is Kind.UNIFORM_RANDOM:
        return UniformRandomSeq(need("delta"), spec.get("seed", 0))
    if kind is Kind.BOREL_RANDOM:
        return BorelRandomSeq(need("delta"), need("cdf"), spec.get("seed", 0))
    if kind is Kind.POWER_LAW:
        return PowerLawSeq(need("p"), spec.get("c", 1.0))
    if kind is Kind.CRITICAL_EXACT:
        return CriticalExactSeq()
    if kind is Kind.BLOCK_REPEAT:
        return BlockRepeatSeq(spec.get("factor", 48))
    from .adaptive import adaptive_from_spec

    return adaptive_from_spec(spec)


def load_sequence(text_or_path):
    """Parse a sequence from inline JSON text or from a path to a JSON file."""
    if isinstance(text_or_path, dict):
        return from_spec(text_or_path)
    text = str(text_or_path).strip()
    if not text.startswith("{"):
        path = Path(text)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InvalidParameterError(f"cannot read sequence file {path}: {exc}") from exc
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"invalid sequence JSON: {exc}") from exc
    return from_spec(spec)
