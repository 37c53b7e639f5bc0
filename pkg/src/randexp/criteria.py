"""Finite-horizon checks behind the Fatou/Julia dichotomies.

* real fixed points p <= q of lambda e^x,
* the critical-orbit test F_n^{n1}(0) < 1 (bounded evidence only),
* the largest C for which 1/e + C/n^2 sits below the exact critical sequence,
* the corridor constants (alpha, beta, L) for random sequences and a run
  detector for strings of top-quarter terms.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend, rng
from .constants import ONE_OVER_E
from .errors import CriterionError, InvalidParameterError

__all__ = [
    "FixedPointPair",
    "fixed_points",
    "FatouVerdict",
    "fatou_criterion",
    "CBound",
    "max_admissible_C",
    "c_bound_terms",
    "find_runs",
    "run_detector",
    "RunCriterion",
    "compute_run_criterion",
    "certify_run_criterion",
]

EVIDENCE_NOTE = "bounded evidence up to the stated horizon, not a proof"


@dataclass(frozen=True)
class FixedPointPair:
    p: float
    q: float
    lam: float


def _bisect(g, a, b, tol=0.0, max_iter=200):
    """Root of g on [a, b] with g(a), g(b) of opposite signs; runs to float resolution."""
    ga = g(a)
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if m == a or m == b or b - a <= tol:
            break
        gm = g(m)
        if gm == 0.0:
            return m
        if (gm < 0) == (ga < 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def fixed_points(lam):
    """Real solutions p <= q of lam * e^x = x, or None for lam > 1/e."""
    lam = float(lam)
    if not lam > 0 or not math.isfinite(lam):
        raise InvalidParameterError(f"lambda must be a positive real, got {lam}")
    if lam > ONE_OVER_E:
        return None
    if lam == ONE_OVER_E:
        return FixedPointPair(1.0, 1.0, lam)

    def g(x):
        return x - lam * math.exp(x)

    p = _bisect(g, 0.0, 1.0)
    hi = 50.0
    # q = -W_{-1}(-lam) passes 50 only for lam below ~1e-20
    while g(hi) > 0:
        hi *= 2.0
    q = _bisect(g, 1.0, hi)
    return FixedPointPair(p, q, lam)


@dataclass(frozen=True)
class FatouVerdict:
    holds: bool
    horizon: int
    violated_at: int = None
    max_value: float = None
    note: str = EVIDENCE_NOTE

    @property
    def label(self):
        if self.holds:
            return f"holds up to N={self.horizon} ({self.note})"
        return f"violated at k={self.violated_at}"


def fatou_criterion(seq, n1, N, kernels=None, chunk=1 << 20):
    """Check F_n^{n1}(0) < 1 for n = 1..N.

    An orbit that overflows counts as a violation (it has left (-inf, 1)).
    """
    N, n1 = int(N), int(n1)
    if N < 1:
        raise InvalidParameterError("N must be at least 1")
    k_mod = kernels or _backend.kernels
    x = 0.0
    xmax = 0.0
    done = 0
    while done < N:
        count = min(chunk, N - done)
        lams = seq.values(n1 + done + 1, count)
        hit, x, cmax = k_mod.real_crossing(lams, x, 1.0)
        xmax = max(xmax, cmax)
        if hit:
            return FatouVerdict(False, N, done + hit, xmax)
        done += count
    return FatouVerdict(True, N, None, xmax)


def c_bound_terms(n):
    """n^2 * (lambda*_n - 1/e) where lambda*_n = e^(1/(n-1) - 1)(1 - 1/n), n >= 2."""
    n = np.asarray(n, dtype=np.float64)
    x = 1.0 / n
    direct = 1.0 / (n - 1.0) + np.log1p(-x)
    # the exponent is sum_{k>=2} (k-1)/k x^k; all terms positive, so no
    # cancellation once x is small enough for 24 terms to converge
    series = np.zeros_like(x)
    for k in range(25, 1, -1):
        series = (series + (k - 1.0) / k) * x
    series = series * x
    a = np.where(n >= 8, series, direct)
    return n * n * ONE_OVER_E * np.expm1(a)


@dataclass(frozen=True)
class CBound:
    value: float
    argmin: int
    horizon: int
    asymptotic: float = 0.5 * ONE_OVER_E


def max_admissible_C(N):
    """Largest C with 1/e + C/n^2 <= lambda*_n for every 2 <= n <= N."""
    N = int(N)
    if N < 2:
        raise InvalidParameterError("N must be at least 2")
    terms = c_bound_terms(np.arange(2, N + 1))
    i = int(np.argmin(terms))
    return CBound(float(terms[i]), i + 2, N)


def find_runs(mask, min_length, first_index=1):
    """Start indices of maximal True runs of length >= min_length in a boolean array."""
    mask = np.asarray(mask, dtype=bool)
    if min_length < 1:
        raise InvalidParameterError("run length must be at least 1")
    padded = np.concatenate(([False], mask, [False]))
    d = np.diff(padded.astype(np.int8))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    keep = (ends - starts) >= min_length
    return (starts[keep] + first_index).tolist()


def top_quarter(values, delta):
    v = np.asarray(values, dtype=np.float64)
    return (v > ONE_OVER_E + 0.5 * delta) & (v < ONE_OVER_E + delta)


def run_detector(seq, delta, criterion, horizon, first=None):
    """Maximal runs of terms in (1/e + delta/2, 1/e + delta) at least L long.

    ``seq`` is a ParameterSequence or a plain array (indexed from 1);
    ``criterion`` is a RunCriterion or an integer L.
    """
    L = criterion.L if isinstance(criterion, RunCriterion) else int(criterion)
    if hasattr(seq, "values"):
        first = seq.start_index if first is None else int(first)
        vals = seq.values(first, int(horizon))
    else:
        first = 1 if first is None else int(first)
        vals = np.asarray(seq, dtype=np.float64)[: int(horizon)]
    return find_runs(top_quarter(vals, delta), L, first)


@dataclass(frozen=True)
class RunCriterion:
    delta: float
    alpha: float
    beta: float
    L: int
    eps: float
    p: float
    q: float
    # (gap over left corridor, right corridor, push region, stay margin)
    parts: tuple = field(default=(), compare=False)


def _gap(lam, x, y):
    # Re f_lambda(z) - Re z on a grid
    return lam * np.exp(x)[None, :] * np.cos(y)[:, None] - x[None, :]


def _corridor_minima(delta, p, q, alpha, eps, grid):
    lam_min = ONE_OVER_E - delta
    lam_push = ONE_OVER_E + 0.5 * delta
    y = np.linspace(0.0, eps, grid)
    left = np.linspace(p - alpha - 1.0, p - alpha, grid)
    right = np.linspace(q + alpha, q + alpha + 1.0, grid)
    mid = np.linspace(p - alpha, q + alpha, grid)
    g_left = float(_gap(lam_min, left, y).min())
    g_right = float(_gap(lam_min, right, y).min())
    g_push = float(_gap(lam_push, mid, y).min())
    stay = float((lam_min * np.exp(mid)[None, :] * np.cos(y)[:, None]).min() - (p - alpha))
    return g_left, g_right, g_push, stay


def compute_run_criterion(delta, alpha=None, grid=200, safety=0.9, eps0=0.5, eps_min=1e-6):
    """Corridor margin alpha, push constant beta and required run length L for delta.

    beta is ``safety`` times the sampled minimum of Re f(z) - Re z over
    |Im z| <= eps outside [p - alpha, q + alpha] at the smallest lambda,
    and over the corridor itself at lambda = 1/e + delta/2.  The gap is
    monotone in Re z away from the corridor, so unit-width windows next to
    it carry the infimum.  eps is halved from eps0 until beta > 0 and the
    corridor maps into Re > p - alpha.
    """
    delta = float(delta)
    if not 0 < delta < ONE_OVER_E:
        raise InvalidParameterError(f"delta must lie in (0, 1/e), got {delta}")
    fp = fixed_points(ONE_OVER_E - delta)
    p, q = fp.p, fp.q
    alpha = (q - p) / 10.0 if alpha is None else float(alpha)
    if not alpha > 0:
        raise InvalidParameterError("alpha must be positive")
    eps = float(eps0)
    while eps >= eps_min:
        parts = _corridor_minima(delta, p, q, alpha, eps, int(grid))
        beta = safety * min(parts[:3])
        if beta > 0 and parts[3] > 0:
            L = math.ceil((q - p + 2.0 * alpha) / beta)
            return RunCriterion(delta, alpha, beta, int(L), eps, p, q, parts)
        eps *= 0.5
    raise CriterionError(f"no positive beta for delta={delta} down to eps={eps_min}")


def certify_run_criterion(crit, samples=10_000, seed=12345):
    """Re-test beta on fresh random points.  Returns the minimum observed gap / beta."""
    u = rng.uniform_array(seed, 0, 4 * samples).reshape(4, samples)
    y = (2.0 * u[0] - 1.0) * crit.eps
    lam_min = ONE_OVER_E - crit.delta
    lam_push = ONE_OVER_E + 0.5 * crit.delta + u[1] * 0.5 * crit.delta
    lo, hi = crit.p - crit.alpha, crit.q + crit.alpha
    # outside the corridor: half the points left, half right
    side = u[2] < 0.5
    x_out = np.where(side, lo - u[3], hi + u[3])
    x_in = lo + u[3] * (hi - lo)
    lam_any = lam_min + u[1] * 2.0 * crit.delta
    g_out = lam_any * np.exp(x_out) * np.cos(y) - x_out
    g_in = lam_push * np.exp(x_in) * np.cos(y) - x_in
    return float(min(g_out.min(), g_in.min()) / crit.beta)
