"""Cone escape for f(z) = e^z - 1 (parabolic fixed point at 0) and its
non-autonomous perturbations f_n(z) = e^z - 1 + n^-p.

S_theta = {pi/2 + theta < arg z < 3pi/2 - theta} with arg in [0, 2pi) is
the cone around the negative real axis.  Near 0 the dynamics is studied in
the inverted coordinate w = s/z, where g(w) = s / f(s/w).  For large |w|,
g(w) = w - s/2 + O(1/w); the default ``scale=4`` gives g(w) ~ w - 2.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend, rng
from .errors import ConeExitError, DomainError, InvalidParameterError, PoleError

__all__ = [
    "ConeSpec",
    "RateBounds",
    "ExitResult",
    "cone_bounds",
    "in_cone",
    "parabolic_map",
    "inverted_map",
    "sandwich_margins",
    "sample_cone",
    "measure_R0",
    "probe_radius",
    "invariance_violations",
    "modulus_drop_violations",
    "rate_check",
    "cone_exit_time",
    "exit_time_scaling",
    "sweep",
    "rows_to_csv",
]

TWO_PI = 2.0 * math.pi
# w = 4/z normalises g(w) to w - 2; with scale 1 the lower sandwich bound fails
DEFAULT_SCALE = 4.0


def _check_theta(theta):
    theta = float(theta)
    if not 0 < theta < 0.5 * math.pi:
        raise InvalidParameterError(f"theta must lie in (0, pi/2), got {theta}")
    return theta


@dataclass(frozen=True)
class ConeSpec:
    theta: float
    r: float = 1.0
    p: float = 1.0

    def __post_init__(self):
        _check_theta(self.theta)
        if not self.r > 0:
            raise InvalidParameterError("radius must be positive")

    def contains(self, z):
        return in_cone(z, self.theta)


@dataclass(frozen=True)
class RateBounds:
    C1: float
    C2: float
    lower: float
    upper: float

    @property
    def contained(self):
        return self.lower < self.C1 <= self.C2 < self.upper


@dataclass(frozen=True)
class ExitResult:
    step: int  # None if the orbit never left the cone
    z: complex

    @property
    def modulus(self):
        return abs(self.z)


def cone_bounds(theta):
    return 0.5 * math.pi + theta, 1.5 * math.pi - theta


def _arg(z):
    a = np.angle(z)
    return np.where(a < 0, a + TWO_PI, a)


def in_cone(z, theta):
    """Membership in S_theta; works elementwise on arrays."""
    theta = _check_theta(theta)
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z == 0):
        raise DomainError("the cone membership of 0 is undefined")
    lo, hi = cone_bounds(theta)
    a = _arg(z)
    out = (a > lo) & (a < hi)
    return bool(out) if out.ndim == 0 else out


def parabolic_map(z):
    """e^z - 1 evaluated without cancellation near 0."""
    z = np.asarray(z, dtype=np.complex128)
    x, y = z.real, z.imag
    s = np.sin(0.5 * y)
    w = (np.expm1(x) * np.cos(y) - 2.0 * s * s) + 1j * (np.exp(x) * np.sin(y))
    return w if w.ndim else complex(w)


def inverted_map(w, scale=DEFAULT_SCALE):
    """g(w) = scale / f(scale / w) with f(z) = e^z - 1."""
    w = np.asarray(w, dtype=np.complex128)
    if np.any(w == 0):
        raise PoleError("inverted map is undefined at w = 0")
    u = scale / w
    k = np.round(u.imag / TWO_PI)
    near = (k != 0) & (np.abs(u - 1j * TWO_PI * k) <= 1e-12 * np.abs(u))
    fu = parabolic_map(u)
    if np.any(near) or np.any(np.asarray(fu) == 0):
        raise PoleError("f(scale/w) vanishes (scale/w is a nonzero multiple of 2 pi i)")
    g = scale / np.asarray(fu)
    return g if g.ndim else complex(g)


def sandwich_margins(w, theta, scale=DEFAULT_SCALE):
    """(|g| - |w| - sin(theta/2), |w| + 3 - |g|); both positive when the per-step sandwich holds."""
    w = np.asarray(w, dtype=np.complex128)
    ag = np.abs(inverted_map(w, scale))
    aw = np.abs(w)
    return ag - aw - math.sin(0.5 * theta), aw + 3.0 - ag


def sample_cone(theta, r_min, r_max, samples, seed=0, log_radius=True):
    """Deterministic samples of S_theta with r_min < |z| < r_max."""
    theta = _check_theta(theta)
    lo, hi = cone_bounds(theta)
    u = rng.uniform_array(seed, 0, 2 * int(samples)).reshape(2, -1)
    a = lo + u[0] * (hi - lo)
    if log_radius:
        rad = r_min * (r_max / r_min) ** u[1]
    else:
        rad = r_min + u[1] * (r_max - r_min)
    return rad * np.exp(1j * a)


def measure_R0(theta, scale=DEFAULT_SCALE, samples=20_000, r_min=0.5, r_max=1e6, seed=1):
    """Smallest power of two beyond which no sampled w violates the sandwich.

    Samples |w| log-uniformly in (r_min, r_max).  Returns None when
    violations reach the top decade of the sample range (no R0 found).
    """
    w = sample_cone(theta, r_min, r_max, samples, seed)
    lower, upper = sandwich_margins(w, theta, scale)
    bad = (lower <= 0) | (upper <= 0)
    if not bad.any():
        return r_min
    worst = float(np.abs(w[bad]).max())
    if worst > r_max / 10.0:
        return None
    return 2.0 ** math.ceil(math.log2(worst))


def probe_radius(theta, scale=DEFAULT_SCALE, samples=1000, seed=2, levels=30):
    """Largest r in {1, 1/2, 1/4, ...} where |f(z)| < |z| and the sandwich
    hold on ``samples`` points of S_theta with |z| < r (w = scale / z)."""
    theta = _check_theta(theta)
    r = 1.0
    for _ in range(levels):
        z = sample_cone(theta, r * 1e-6, r, samples, seed)
        shrink = np.all(np.abs(parabolic_map(z)) < np.abs(z))
        lower, upper = sandwich_margins(scale / z, theta, scale)
        if shrink and np.all(lower > 0) and np.all(upper > 0):
            return r
        r *= 0.5
    return None


def invariance_violations(theta, R, scale=DEFAULT_SCALE, samples=1000, seed=3):
    """Number of sampled w in S'_theta (|w| > R) with g(w) outside S'_theta."""
    w = sample_cone(theta, R, 1e3 * R, samples, seed)
    g = inverted_map(w, scale)
    ok = in_cone(g, theta) & (np.abs(g) > R)
    return int(np.count_nonzero(~ok))


def modulus_drop_violations(theta, p=1.0, samples=1000, n_max=1000, seed=4):
    """Count sampled (u, n) with u and u + n^-p in S_theta but |u + n^-p| >= |u|."""
    u = sample_cone(theta, 1e-4, 3.0, samples, seed)
    n = np.floor(1 + rng.uniform_array(seed + 1, 0, samples) * n_max)
    v = u + n ** (-float(p))
    both = in_cone(u, theta) & in_cone(v, theta)
    return int(np.count_nonzero(both & ~(np.abs(v) < np.abs(u))))


def rate_check(z0, theta, N, scale=DEFAULT_SCALE, r=None, slack=0.0, kernels=None):
    """min/max of n |f^n(z0)| over n in [N/2, N] for the autonomous map.

    The bounds come from the inverted sandwich: scale/3 and scale/sin(theta/2).
    Raises ConeExitError if the orbit leaves S_theta.
    """
    theta = _check_theta(theta)
    N = int(N)
    if N < 2:
        raise InvalidParameterError("N must be at least 2")
    z0 = complex(z0)
    if not in_cone(z0, theta):
        raise InvalidParameterError("z0 must lie in the cone")
    if r is not None and not abs(z0) < r:
        raise InvalidParameterError(f"z0 must lie in B(0, {r})")
    k_mod = kernels or _backend.kernels
    traj = k_mod.parabolic_orbit(z0.real, z0.imag, N)
    inside = in_cone(traj[1:], theta)
    if not np.all(inside):
        raise ConeExitError(f"orbit left S_theta at step {int(np.argmin(inside)) + 1}")
    n = np.arange(N + 1)
    sl = slice(N // 2, N + 1)
    vals = n[sl] * np.abs(traj[sl])
    return RateBounds(
        float(vals.min()), float(vals.max()),
        scale / 3.0 - slack, scale / math.sin(0.5 * theta) + slack,
    )


def cone_exit_time(z0, p, theta, start_index=1, max_iter=100_000, kernels=None):
    """First n with F_n(z0) outside S_theta for f_k(z) = e^z - 1 + k^-p.

    The k-th map applied uses index ``start_index + k - 1``.  ``p = inf``
    with start_index >= 2 gives the unperturbed map.  Overflow counts as exit.
    """
    theta = _check_theta(theta)
    p = float(p)
    if not p < 2 and not math.isinf(p):
        raise InvalidParameterError("p must be below 2")
    if int(start_index) < 1:
        raise InvalidParameterError("start_index must be positive")
    if math.isinf(p) and int(start_index) < 2:
        raise InvalidParameterError("unperturbed runs need start_index >= 2")
    z0 = complex(z0)
    if not in_cone(z0, theta):
        raise InvalidParameterError("z0 must lie in the cone")
    k_mod = kernels or _backend.kernels
    step, zr, zi = k_mod.cone_exit(z0.real, z0.imag, p, theta, int(start_index), int(max_iter))
    return ExitResult(int(step) if step else None, complex(zr, zi))


def exit_time_scaling(p_values, theta, z0, max_iter=100_000, start_index=1):
    """Rows (p, exit_step, final_modulus) for each p."""
    rows = []
    for p in p_values:
        res = cone_exit_time(z0, p, theta, start_index, max_iter)
        rows.append({"p": float(p), "exit_step": res.step, "final_modulus": res.modulus})
    return rows


def grid_points(re_range, im_range, nx, ny):
    """Cell centres of an nx x ny grid over the open rectangle."""
    (x0, x1), (y0, y1) = re_range, im_range
    xs = x0 + (np.arange(nx) + 0.5) / nx * (x1 - x0)
    ys = y0 + (np.arange(ny) + 0.5) / ny * (y1 - y0)
    return (xs[None, :] + 1j * ys[:, None]).ravel()


def sweep(theta, p, re_range=(-1.0, -0.1), im_range=(0.0, 0.3), nx=10, ny=10,
          max_iter=100_000, start_index=1, workers=1):
    """Exit times for the grid points that lie in S_theta.

    Rows (z0_re, z0_im, exit_step, final_modulus) in grid order; the result
    does not depend on ``workers``.
    """
    pts = grid_points(re_range, im_range, int(nx), int(ny))
    pts = pts[in_cone(pts, theta)]

    def one(z):
        z = complex(z)
        res = cone_exit_time(z, p, theta, start_index, max_iter)
        return {"z0_re": z.real, "z0_im": z.imag, "exit_step": res.step,
                "final_modulus": res.modulus}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as ex:
            return list(ex.map(one, pts))
    return [one(z) for z in pts]


def rows_to_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["" if row[c] is None else repr(row[c]) if isinstance(row[c], float) else row[c]
                    for c in columns])
    return buf.getvalue()
