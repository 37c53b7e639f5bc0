"""Hyperbolic geometry of the strip S+ = {0 < Im z < pi} and the constants of
the sqrt(n)-rate construction.

Regions: P = (1/2, 3/2) x (0, 1/2) and S_n = (1/2, 3/2) x (0, eps_n) with
eps_n = 1/sqrt(n).  The strip metric has density 1/sin(Im z); distances are
computed by mapping through exp to the upper half-plane.

Most functions accept numpy arrays as well as scalars.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .constants import DIAM_P, ONE_OVER_E
from .errors import DomainError, InvalidParameterError, ScheduleError

__all__ = [
    "eps_n",
    "strip_density",
    "hyp_derivative",
    "inverse_branch",
    "upper_half_plane_distance",
    "strip_distance",
    "contraction_factor",
    "contraction_diagonal",
    "strip_push_check",
    "push_threshold",
    "expansion_bound_check",
    "expansion_threshold",
    "sampled_C",
    "measure_C_prime",
    "koebe_lower_bound",
    "koebe_too_large",
    "product_inequality_check",
    "product_ratio",
    "DeltaSchedule",
    "delta_schedule",
    "RateConstants",
    "rate_constants",
    "angle_inequality_check",
    "verify_chain",
]

SAFETY = 0.9
M_OVER_K = 8  # M_n / K_n = 48n / 6n


def eps_n(n):
    return 1.0 / np.sqrt(n)


def _in_strip(y):
    y = np.asarray(y)
    return np.all((y > 0) & (y < math.pi))


def strip_density(z):
    """Density 1/sin(Im z) of the hyperbolic metric on S+."""
    y = np.imag(z)
    if not _in_strip(y):
        raise DomainError("strip density needs 0 < Im z < pi")
    return 1.0 / np.sin(y)


def hyp_derivative(lam, z, check=True, tol=1e-10):
    """|f_lam'(z)|_rho = t / sin t with t = Im f_lam(z).

    With ``check`` the value is compared with |f'(z)| rho(f(z)) / rho(z)
    and a mismatch above ``tol`` (relative) raises AssertionError.
    """
    z = np.asarray(z, dtype=np.complex128)
    if not _in_strip(z.imag):
        raise DomainError("hyp_derivative needs z in the strip 0 < Im z < pi")
    fz = lam * np.exp(z)
    t = fz.imag
    if not _in_strip(t):
        raise DomainError("image f(z) is outside the strip 0 < Im < pi")
    d = t / np.sin(t)
    if check:
        # |f'| = |f| for the exponential family
        alt = np.abs(fz) * np.sin(z.imag) / np.sin(t)
        err = np.max(np.abs(alt - d) / d)
        if err > tol:
            raise AssertionError(f"hyperbolic derivative formulas disagree by {err:.3e}")
    return d if d.ndim else float(d)


def inverse_branch(lam, z):
    """g_lam(z) = log(z / lam), the inverse of lam e^z taking S+ into S+."""
    z = np.asarray(z, dtype=np.complex128)
    if not _in_strip(z.imag):
        raise DomainError("inverse branch needs z in the strip 0 < Im z < pi")
    w = np.log(z) - math.log(lam)
    return w if w.ndim else complex(w)


def upper_half_plane_distance(u, v):
    """Hyperbolic distance in {Im > 0} with density 1/Im."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    return 2.0 * np.arcsinh(np.abs(u - v) / (2.0 * np.sqrt(u.imag * v.imag)))


def strip_distance(a, b):
    """Hyperbolic distance in S+ (exp is an isometry onto the upper half-plane)."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if not (_in_strip(a.imag) and _in_strip(b.imag)):
        raise DomainError("points must lie in the strip 0 < Im z < pi")
    return upper_half_plane_distance(np.exp(a), np.exp(b))


def contraction_factor(lam, cloud):
    """Largest ratio d(g z, g w) / d(z, w) over distinct pairs of the cloud.

    The cloud must sit strictly inside S+.  The ratio does not depend on
    lam: g_lam is log followed by a horizontal translation, an isometry.
    """
    pts = np.unique(np.asarray(cloud, dtype=np.complex128).ravel())
    if pts.size < 2:
        raise InvalidParameterError("need at least two distinct points")
    if not _in_strip(pts.imag):
        raise DomainError("cloud touches the boundary of the strip")
    g = inverse_branch(lam, pts)
    i, j = np.triu_indices(pts.size, k=1)
    num = strip_distance(g[i], g[j])
    den = strip_distance(pts[i], pts[j])
    return float(np.max(num / den))


def contraction_diagonal(z):
    """Infinitesimal contraction of g at z: sin(Im z) / Im z."""
    y = np.imag(z)
    if not _in_strip(y):
        raise DomainError("z must lie in the strip")
    return np.sin(y) / y


def _grid(x0, x1, y0, y1, samples):
    side = max(2, int(math.ceil(math.sqrt(samples))))
    xs = np.linspace(x0, x1, side)
    ys = np.linspace(y0, y1, side)
    return xs[None, :], ys[:, None]


def strip_push_check(n, samples=10_000):
    """min over a grid on the closure of S_n of Re f(z) - Re z - 1/(6n), f(z) = e^(z-1)(1 + 1/n)."""
    n = int(n)
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    x, y = _grid(0.5, 1.5, 0.0, float(eps_n(n)), samples)
    lam = ONE_OVER_E * (1.0 + 1.0 / n)
    margin = lam * np.exp(x) * np.cos(y) - x - 1.0 / (6.0 * n)
    return float(margin.min())


def push_threshold(n_max, samples=2_500):
    """Smallest n0 such that the sampled push margin is >= 0 for all n0 <= n <= n_max (None if none)."""
    ok = [strip_push_check(n, samples) >= 0 for n in range(1, int(n_max) + 1)]
    n0 = None
    for n in range(len(ok), 0, -1):
        if not ok[n - 1]:
            break
        n0 = n
    return n0


def expansion_bound_check(n, samples=10_000):
    """Sampled min of t/sin t over w = f(z) in P minus S_n, and its margin over 1 + 1/(7n).

    Returns ``(min_value, margin)``; both are inf when P minus S_n is empty
    (eps_n >= 1/2, i.e. n <= 4).  The bound depends on w only through Im w.
    """
    n = int(n)
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    e = float(eps_n(n))
    if e >= 0.5:
        return math.inf, math.inf
    t = np.linspace(e, 0.5, max(2, int(samples)), endpoint=False)
    vals = t / np.sin(t)
    vmin = float(vals.min())
    return vmin, vmin - (1.0 + 1.0 / (7.0 * n))


def expansion_threshold(n_max, samples=2_000):
    """Smallest n with a non-vacuous, satisfied expansion bound (None if none up to n_max)."""
    for n in range(1, int(n_max) + 1):
        v, m = expansion_bound_check(n, samples)
        if math.isfinite(v) and m > 0:
            return n
    return None


def sampled_C(n, samples=10_000, safety=SAFETY):
    """C_n = safety * inf rho(z) / rho(f(z)) over f(z) = w in P minus S_n.

    z = g(w) has Im z = arg w, so the ratio is sin(Im w) / sin(arg w),
    independent of lambda.  None when the region is empty.
    """
    e = float(eps_n(n))
    if e >= 0.5:
        return None
    x, y = _grid(0.5, 1.5, e, 0.5, samples)
    w = x + 1j * y
    ratio = np.sin(w.imag) / np.sin(np.angle(w))
    return safety * float(ratio.min())


def measure_C_prime(n_values, samples=2_500):
    """C' = min over n of sqrt(n) * C_n, so that C_n >= C' / sqrt(n) on the sampled range."""
    best = math.inf
    for n in n_values:
        c = sampled_C(n, samples)
        if c is not None:
            best = min(best, math.sqrt(n) * c)
    if not math.isfinite(best):
        raise InvalidParameterError("no n with a non-empty P minus S_n")
    return best


def koebe_lower_bound(r, log_deriv):
    """log of the radius r |F'| / 4 guaranteed inside F(D(z, r))."""
    if not r > 0:
        raise InvalidParameterError("radius must be positive")
    return math.log(r / 4.0) + log_deriv


def koebe_too_large(r, log_deriv):
    """True when the guaranteed disc is wider than diam(P), so it cannot fit in P."""
    return koebe_lower_bound(r, log_deriv) > math.log(DIAM_P)


def _log_gap_terms(N):
    k = np.arange(1, int(N) + 1, dtype=np.float64)
    # log of (1 + 1/(7k))^7 / (1 + 1/k), every term positive
    return 7.0 * np.log1p(1.0 / (7.0 * k)) - np.log1p(1.0 / k)


def product_ratio(N):
    """prod_{k<=n} (1 + 1/(7k))^7 / (n + 1) for n = 1..N."""
    return np.exp(np.cumsum(_log_gap_terms(N)))


def product_inequality_check(N):
    """True iff prod_{k<=n} (1 + 1/(7k))^7 > n + 1 for every n <= N (log-domain sums)."""
    N = int(N)
    if N < 1:
        raise InvalidParameterError("N must be at least 1")
    return bool(np.all(np.cumsum(_log_gap_terms(N)) > 0))


@dataclass(frozen=True)
class DeltaSchedule:
    n: np.ndarray
    delta: np.ndarray
    bound: np.ndarray
    C_prime: float


def delta_schedule(N, C_prime, with_alpha=True, n0=1):
    """delta_n = 2 * 4 diam(P) / (C_n prod_{k<=n} alpha_k^8), C_n = C' / sqrt(n).

    Raises ScheduleError unless delta_n is strictly decreasing for n >= n0.
    ``with_alpha=False`` drops the expansion product (every alpha_k = 1).
    """
    N = int(N)
    if N < 1 or not C_prime > 0:
        raise InvalidParameterError("need N >= 1 and C' > 0")
    n = np.arange(1, N + 1)
    k = n.astype(np.float64)
    log_prod = np.cumsum(M_OVER_K * np.log1p(1.0 / (7.0 * k))) if with_alpha else np.zeros(N)
    log_bound = math.log(4.0 * DIAM_P / C_prime) + 0.5 * np.log(k) - log_prod
    bound = np.exp(log_bound)
    delta = 2.0 * bound
    tail = delta[int(n0) - 1:]
    if tail.size > 1 and not np.all(np.diff(tail) < 0):
        raise ScheduleError("delta_n is not decreasing, so it cannot tend to 0")
    return DeltaSchedule(n, delta, bound, float(C_prime))


@dataclass(frozen=True)
class RateConstants:
    n: int
    eps_n: float
    beta_n: float
    K_n: int
    alpha_n: float
    C_n: float
    M_n: int
    delta_n: float

    def to_dict(self):
        return asdict(self)


def rate_constants(n, C_prime, samples=2_500):
    n = int(n)
    sched = delta_schedule(n, C_prime)
    c = sampled_C(n, samples)
    return RateConstants(
        n=n,
        eps_n=float(eps_n(n)),
        beta_n=1.0 / (6.0 * n),
        K_n=6 * n,
        alpha_n=1.0 + 1.0 / (7.0 * n),
        C_n=math.nan if c is None else c,
        M_n=48 * n,
        delta_n=float(sched.delta[-1]),
    )


def angle_inequality_check(radius=0.1, grid=200):
    """Test y (cos y - e^-x) < x sin y on (0, radius]^2.

    Returns ``(all_hold, largest_r)`` where largest_r is the biggest r on
    the grid such that the inequality holds on all sampled points of (0, r]^2.
    """
    s = np.linspace(radius / grid, radius, grid)
    x = s[None, :]
    y = s[:, None]
    ok = y * (np.cos(y) - np.exp(-x)) < x * np.sin(y)
    bad = ~ok
    if not bad.any():
        return True, float(radius)
    # first grid level at which a violation appears in the square
    level = np.maximum.outer(np.arange(grid), np.arange(grid))[bad].min()
    return False, float(s[level - 1]) if level > 0 else 0.0


def verify_chain(n_values, C_prime=None, samples=2_500):
    """Rows (n, eps, beta_margin, alpha_margin, C_n, delta_n, product_ok)."""
    n_values = [int(n) for n in n_values]
    if C_prime is None:
        C_prime = measure_C_prime(range(5, max(n_values + [5]) + 1), samples=400)
    N = max(n_values)
    sched = delta_schedule(N, C_prime)
    prod_ok = np.cumsum(_log_gap_terms(N)) > 0
    rows = []
    for n in n_values:
        _, a_margin = expansion_bound_check(n, samples)
        c = sampled_C(n, samples)
        rows.append({
            "n": n,
            "eps": float(eps_n(n)),
            "beta_margin": strip_push_check(n, samples),
            "alpha_margin": a_margin,
            "C_n": math.nan if c is None else c,
            "delta_n": float(sched.delta[n - 1]),
            "product_ok": bool(prod_ok[n - 1]),
        })
    return rows
