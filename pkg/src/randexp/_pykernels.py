"""Pure-Python/numpy implementations of the hot loops.

Signatures and results mirror ``_ckernels.pyx``.  Scalar loops use ``math``
(the same libm the compiled module calls); the grid and Monte Carlo loops are
vectorised with numpy across pixels or trials.
"""

import math

import numpy as np

from .constants import ONE_OVER_E
from .rng import inverse_cdf, splitmix64_array, stream_states, to_unit

ACTIVE, ESCAPED, OVERFLOWED = 0, 1, 2

_HALF_PI = 0.5 * math.pi
_TWO_PI = 2.0 * math.pi


def orbit(lams, zre, zim, re_threshold, overflow_re, record):
    traj = None
    if record:
        traj = np.empty(len(lams) + 1, dtype=np.complex128)
        traj[0] = complex(zre, zim)
    exp, cos, sin, log, isfinite = math.exp, math.cos, math.sin, math.log, math.isfinite
    lams = np.asarray(lams, dtype=np.float64).tolist()
    ld = 0.0
    n = 0
    status = ACTIVE
    status_step = 0
    for lam in lams:
        if zre > overflow_re:
            status, status_step = OVERFLOWED, n + 1
            break
        try:
            m = lam * exp(zre)
        except OverflowError:
            status, status_step = OVERFLOWED, n + 1
            break
        nre = m * cos(zim)
        nim = m * sin(zim)
        if not (isfinite(nre) and isfinite(nim)):
            status, status_step = OVERFLOWED, n + 1
            break
        ld += log(lam) + zre
        zre, zim = nre, nim
        n += 1
        if record:
            traj[n] = complex(zre, zim)
        if zre > re_threshold:
            status, status_step = ESCAPED, n
            break
    if record:
        traj = traj[: n + 1]
    return zre, zim, n, ld, status, status_step, traj


def real_crossing(lams, x0, bound):
    exp = math.exp
    lams = np.asarray(lams, dtype=np.float64).tolist()
    x = x0
    xmax = x0
    k = 0
    for lam in lams:
        k += 1
        try:
            x = lam * exp(x)
        except OverflowError:
            x = math.inf
        if x > xmax:
            xmax = x
        if x >= bound:
            return k, x, xmax
    return 0, x, xmax


def escape_grid(lams, re0, im0, re_threshold, out):
    lams = np.asarray(lams, dtype=np.float64)
    x = np.array(re0, dtype=np.float64)
    y = np.array(im0, dtype=np.float64)
    idx = np.arange(x.size)
    out[:] = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for k, lam in enumerate(lams):
            if idx.size == 0:
                break
            m = lam * np.exp(x)
            x = m * np.cos(y)
            y = m * np.sin(y)
            gone = ~(x <= re_threshold) | ~np.isfinite(m)
            if gone.any():
                out[idx[gone]] = k + 1
                keep = ~gone
                idx, x, y = idx[keep], x[keep], y[keep]


def mc_escape(seeds, start_index, cdf_x, cdf_f, lo_open, hi_open, cap, re_threshold, out):
    seeds = np.asarray(seeds, dtype=np.uint64)
    cdf_x = np.asarray(cdf_x, dtype=np.float64)
    cdf_f = np.asarray(cdf_f, dtype=np.float64)
    out[:] = 0
    idx = np.arange(seeds.size)
    s = seeds.copy()
    x = np.zeros(seeds.size)
    with np.errstate(over="ignore"):
        for k in range(cap):
            if idx.size == 0:
                break
            u = to_unit(splitmix64_array(stream_states(s, start_index + k)))
            lam = np.clip(inverse_cdf(u, cdf_x, cdf_f), lo_open, hi_open)
            x = lam * np.exp(x)
            gone = ~(x <= re_threshold)
            if gone.any():
                out[idx[gone]] = k + 1
                keep = ~gone
                idx, s, x = idx[keep], s[keep], x[keep]


def _cexpm1(x, y):
    # e^(x+iy) - 1 without cancellation near 0
    c = math.cos(y)
    s = math.sin(0.5 * y)
    return math.expm1(x) * c - 2.0 * s * s, math.exp(x) * math.sin(y)


def _in_cone(x, y, lo, hi):
    a = math.atan2(y, x)
    if a < 0.0:
        a += _TWO_PI
    return lo < a < hi


def cone_exit(zre, zim, p, theta, start_index, max_iter):
    lo = _HALF_PI + theta
    hi = 3.0 * _HALF_PI - theta
    isfinite = math.isfinite
    for k in range(max_iter):
        try:
            ere, eim = _cexpm1(zre, zim)
        except OverflowError:
            return k + 1, math.inf, zim
        zre = ere + float(start_index + k) ** (-p)
        zim = eim
        if not (isfinite(zre) and isfinite(zim)) or not _in_cone(zre, zim, lo, hi):
            return k + 1, zre, zim
    return 0, zre, zim


def parabolic_orbit(zre, zim, n):
    traj = np.empty(n + 1, dtype=np.complex128)
    traj[0] = complex(zre, zim)
    for k in range(1, n + 1):
        zre, zim = _cexpm1(zre, zim)
        traj[k] = complex(zre, zim)
    return traj


def adaptive_block(cre, cim, x, eps, need_reentry, min_steps, max_steps, re_bound, im_bound):
    """Iterate e^(z-1) on the cloud and on x until the boundary condition holds.

    The condition is tested before each step; ``cre``/``cim`` are updated in
    place.  Returns ``(steps, x, status, reentry_step)`` with status 0 = boundary
    reached, 1 = cloud left the tracked region, 2 = step budget exhausted.
    """
    exp, cos, sin = math.exp, math.cos, math.sin
    re = cre.tolist()
    im = cim.tolist()
    npts = len(re)
    reentry_step = -1 if need_reentry else 0
    steps = 0
    status = 2
    while True:
        if need_reentry and max(re) < 1.0:
            need_reentry = False
            reentry_step = steps
        if not need_reentry and steps >= min_steps and max(abs(v) for v in im) < eps:
            status = 0
            break
        if steps >= max_steps:
            break
        x = ONE_OVER_E * exp(x)
        bad = False
        for i in range(npts):
            m = ONE_OVER_E * exp(re[i])
            a = m * cos(im[i])
            b = m * sin(im[i])
            re[i] = a
            im[i] = b
            if a >= re_bound or b <= 0.0 or b >= im_bound:
                bad = True
        steps += 1
        if bad:
            status = 1
            break
    cre[:] = re
    cim[:] = im
    return steps, x, status, reentry_step
