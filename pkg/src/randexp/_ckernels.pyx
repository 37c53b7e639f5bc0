# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Same signatures and results as ``_pykernels``."""

from libc.math cimport exp, expm1, cos, sin, log, atan2, pow, fabs, isfinite, INFINITY, M_PI

import numpy as np

ctypedef unsigned long long u64

cdef enum:
    ACTIVE = 0
    ESCAPED = 1
    OVERFLOWED = 2

cdef double ONE_OVER_E = exp(-1.0)
cdef double TWO_M53 = 1.1102230246251565e-16


cdef inline u64 _splitmix64(u64 x) noexcept nogil:
    x = x + <u64>0x9E3779B97F4A7C15ULL
    x = (x ^ (x >> 30)) * <u64>0xBF58476D1CE4E5B9ULL
    x = (x ^ (x >> 27)) * <u64>0x94D049BB133111EBULL
    return x ^ (x >> 31)


cdef inline double _to_unit(u64 h) noexcept nogil:
    cdef double k = <double>(h >> 11)
    if k == 0.0:
        k = 0.5
    return k * TWO_M53


cdef inline double _inverse_cdf(double u, const double[::1] xs, const double[::1] fs) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = fs.shape[0] - 1, mid
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fs[mid] <= u:
            lo = mid
        else:
            hi = mid
    return xs[lo] + ((u - fs[lo]) / (fs[lo + 1] - fs[lo])) * (xs[lo + 1] - xs[lo])


def orbit(const double[::1] lams, double zre, double zim, double re_threshold,
          double overflow_re, bint record):
    cdef Py_ssize_t total = lams.shape[0], k
    cdef Py_ssize_t n = 0
    cdef int status = ACTIVE
    cdef Py_ssize_t status_step = 0
    cdef double ld = 0.0, lam, m, nre, nim
    cdef double complex[::1] tv
    traj = None
    if record:
        traj = np.empty(total + 1, dtype=np.complex128)
        tv = traj
        tv[0] = zre + 1j * zim
    for k in range(total):
        lam = lams[k]
        if zre > overflow_re:
            status = OVERFLOWED
            status_step = n + 1
            break
        m = lam * exp(zre)
        nre = m * cos(zim)
        nim = m * sin(zim)
        if not (isfinite(m) and isfinite(nre) and isfinite(nim)):
            status = OVERFLOWED
            status_step = n + 1
            break
        ld += log(lam) + zre
        zre = nre
        zim = nim
        n += 1
        if record:
            tv[n] = zre + 1j * zim
        if zre > re_threshold:
            status = ESCAPED
            status_step = n
            break
    if record:
        traj = traj[: n + 1]
    return zre, zim, n, ld, status, status_step, traj


def real_crossing(const double[::1] lams, double x0, double bound):
    cdef Py_ssize_t k, total = lams.shape[0], hit = 0
    cdef double x = x0, xmax = x0
    with nogil:
        for k in range(total):
            x = lams[k] * exp(x)
            if x > xmax:
                xmax = x
            if x >= bound:
                hit = k + 1
                break
    return hit, x, xmax


def escape_grid(const double[::1] lams, const double[::1] re0, const double[::1] im0,
                double re_threshold, int[::1] out):
    cdef Py_ssize_t npix = re0.shape[0], total = lams.shape[0], p, k
    cdef double x, y, m
    cdef int s
    with nogil:
        for p in range(npix):
            x = re0[p]
            y = im0[p]
            s = 0
            for k in range(total):
                m = lams[k] * exp(x)
                x = m * cos(y)
                y = m * sin(y)
                if not (x <= re_threshold) or not isfinite(m):
                    s = <int>(k + 1)
                    break
            out[p] = s


def mc_escape(const u64[::1] seeds, long long start_index, const double[::1] cdf_x,
              const double[::1] cdf_f, double lo_open, double hi_open, long long cap,
              double re_threshold, long long[::1] out):
    cdef Py_ssize_t t, ntr = seeds.shape[0]
    cdef long long k, s
    cdef u64 seed
    cdef double x, u, lam
    with nogil:
        for t in range(ntr):
            seed = seeds[t]
            x = 0.0
            s = 0
            for k in range(cap):
                u = _to_unit(_splitmix64(seed + <u64>(start_index + k) * <u64>0x9E3779B97F4A7C15ULL))
                lam = _inverse_cdf(u, cdf_x, cdf_f)
                # np.clip semantics: min(max(lam, lo), hi)
                if lam < lo_open:
                    lam = lo_open
                if lam > hi_open:
                    lam = hi_open
                x = lam * exp(x)
                if not (x <= re_threshold):
                    s = k + 1
                    break
            out[t] = s


cdef inline void _cexpm1(double x, double y, double* re, double* im) noexcept nogil:
    cdef double s = sin(0.5 * y)
    re[0] = expm1(x) * cos(y) - 2.0 * s * s
    im[0] = exp(x) * sin(y)


cdef inline bint _in_cone(double x, double y, double lo, double hi) noexcept nogil:
    cdef double a = atan2(y, x)
    if a < 0.0:
        a += 2.0 * M_PI
    return lo < a < hi


def cone_exit(double zre, double zim, double p, double theta, long long start_index,
              long long max_iter):
    cdef double lo = 0.5 * M_PI + theta
    cdef double hi = 3.0 * (0.5 * M_PI) - theta
    cdef double ere, eim
    cdef long long k
    for k in range(max_iter):
        _cexpm1(zre, zim, &ere, &eim)
        if not (isfinite(ere) and isfinite(eim)):
            return k + 1, INFINITY, zim
        zre = ere + pow(<double>(start_index + k), -p)
        zim = eim
        if not (isfinite(zre) and isfinite(zim)) or not _in_cone(zre, zim, lo, hi):
            return k + 1, zre, zim
    return 0, zre, zim


def parabolic_orbit(double zre, double zim, Py_ssize_t n):
    traj = np.empty(n + 1, dtype=np.complex128)
    cdef double complex[::1] tv = traj
    cdef Py_ssize_t k
    cdef double ere, eim
    tv[0] = zre + 1j * zim
    for k in range(1, n + 1):
        _cexpm1(zre, zim, &ere, &eim)
        zre = ere
        zim = eim
        tv[k] = zre + 1j * zim
    return traj


def adaptive_block(double[::1] cre, double[::1] cim, double x, double eps, bint need_reentry,
                   long long min_steps, long long max_steps, double re_bound, double im_bound):
    cdef Py_ssize_t i, npts = cre.shape[0]
    cdef long long steps = 0, reentry_step = -1 if need_reentry else 0
    cdef int status = 2
    cdef double m, a, b
    cdef bint ok, bad
    with nogil:
        while True:
            if need_reentry:
                ok = True
                for i in range(npts):
                    if not (cre[i] < 1.0):
                        ok = False
                        break
                if ok:
                    need_reentry = False
                    reentry_step = steps
            if not need_reentry and steps >= min_steps:
                ok = True
                for i in range(npts):
                    if not (fabs(cim[i]) < eps):
                        ok = False
                        break
                if ok:
                    status = 0
                    break
            if steps >= max_steps:
                break
            x = ONE_OVER_E * exp(x)
            bad = False
            for i in range(npts):
                m = ONE_OVER_E * exp(cre[i])
                a = m * cos(cim[i])
                b = m * sin(cim[i])
                cre[i] = a
                cim[i] = b
                if a >= re_bound or b <= 0.0 or b >= im_bound:
                    bad = True
            steps += 1
            if bad:
                status = 1
                break
    return steps, x, status, reentry_step
