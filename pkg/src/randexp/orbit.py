"""Orbits of compositions F_n = f_{lambda_{n1+n}} o ... o f_{lambda_{n1+1}}, f_lambda(z) = lambda e^z.

The derivative of a composition is the product of the iterates, which
overflows long before the iterates do, so it is tracked as
``log_deriv = sum(ln lambda_k + Re z_{k-1}) = ln |F_n'(z0)|``.
"""

import cmath
import math
from collections import deque
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import _backend
from .errors import InvalidParameterError, OrbitOverflowError

__all__ = [
    "Status",
    "OrbitState",
    "EscapeConfig",
    "step",
    "run",
    "misiurewicz_check",
    "real_orbit_escapes",
]

CHUNK = 1 << 16


class Status(IntEnum):
    ACTIVE = 0
    ESCAPED = 1
    OVERFLOWED = 2


@dataclass(frozen=True)
class EscapeConfig:
    re_threshold: float = 50.0
    max_iter: int = 1000
    overflow_re: float = 700.0

    def __post_init__(self):
        if not 0 < self.re_threshold < self.overflow_re:
            raise InvalidParameterError(
                f"need 0 < re_threshold < overflow_re, got {self.re_threshold}, {self.overflow_re}"
            )
        if int(self.max_iter) < 1:
            raise InvalidParameterError("max_iter must be a positive integer")
        if self.overflow_re > 709.0:
            raise InvalidParameterError("overflow_re above ln(DBL_MAX) cannot guard exp")


@dataclass
class OrbitState:
    z: complex
    n: int
    log_deriv: float
    status: Status = Status.ACTIVE
    status_step: int = 0

    @property
    def escaped(self):
        return self.status is Status.ESCAPED

    @property
    def active(self):
        return self.status is Status.ACTIVE


def step(z, lam, overflow_re=700.0):
    """lam * exp(z).  Raises OrbitOverflowError if Re z exceeds the guard."""
    z = complex(z)
    if z.real > overflow_re:
        raise OrbitOverflowError(f"Re z = {z.real} exceeds overflow guard {overflow_re}")
    return lam * cmath.exp(z)


def run(seq, z0, n1=None, cfg=None, record=False, keep_last=None, kernels=None):
    """Iterate the orbit of ``z0`` under the terms ``n1+1, n1+2, ...`` of ``seq``.

    ``n1`` defaults to ``seq.start_index - 1`` so the first map applied is the
    first defined term.  Stops on escape (Re z > threshold), overflow or after
    ``cfg.max_iter`` steps.

    With ``record=True`` the trajectory (z0 included) is returned as a complex
    array alongside the state; ``keep_last=K`` keeps only the last K points.
    """
    cfg = cfg or EscapeConfig()
    k_mod = kernels or _backend.kernels
    if n1 is None:
        n1 = seq.start_index - 1
    n1 = int(n1)
    z0 = complex(z0)
    zre, zim = z0.real, z0.imag
    n = 0
    ld = 0.0
    status = Status.ACTIVE
    status_step = 0
    pieces = deque() if record else None
    kept = 0
    if record:
        pieces.append(np.array([z0]))
        kept = 1
    remaining = int(cfg.max_iter)
    while remaining > 0:
        count = min(CHUNK, remaining)
        lams = seq.values(n1 + n + 1, count)
        zre, zim, m, dld, st, st_step, traj = k_mod.orbit(
            lams, zre, zim, cfg.re_threshold, cfg.overflow_re, record
        )
        if record and m:
            pieces.append(traj[1:])
            kept += m
            while keep_last is not None and kept - len(pieces[0]) >= keep_last:
                kept -= len(pieces.popleft())
        ld += dld
        if st:
            status = Status(st)
            status_step = n + st_step
        n += m
        remaining -= m
        if st:
            break
    state = OrbitState(complex(zre, zim), n, ld, status, status_step)
    if not record:
        return state
    traj = np.concatenate(list(pieces))
    if keep_last is not None:
        traj = traj[-int(keep_last):]
    return state, traj


def misiurewicz_check(z, seq, n, n1=None, tol=1e-12, kernels=None):
    """Compare ln|F_n'(z)| with ln|Im F_n(z)|.

    Returns ``(holds, margin)`` where margin = log_deriv - ln|Im F_n(z)|.  A
    real F_n(z) gives ``(True, inf)``.  ``tol`` absorbs rounding in the
    equality case, scaled by the size of the terms compared.
    """
    n = int(n)
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    k_mod = kernels or _backend.kernels
    if n1 is None:
        n1 = seq.start_index - 1
    lams = seq.values(int(n1) + 1, n)
    zc = complex(z)
    zre, zim, m, ld, st, _, _ = k_mod.orbit(lams, zc.real, zc.imag, math.inf, 700.0, False)
    if st == Status.OVERFLOWED or m < n:
        raise OrbitOverflowError(f"orbit overflowed before step {n}")
    if zim == 0.0:
        return True, math.inf
    margin = ld - math.log(abs(zim))
    slack = tol * (1.0 + abs(ld))
    return margin >= -slack, margin


def real_orbit_escapes(seq, x0, n1=None, cfg=None, kernels=None):
    """``(escaped, step)`` for the real orbit of ``x0``; step is 0 if it stays below threshold."""
    cfg = cfg or EscapeConfig()
    x0 = float(x0)
    state = run(seq, complex(x0, 0.0), n1, cfg, kernels=kernels)
    if state.status is Status.ACTIVE:
        return False, 0
    return True, state.status_step
