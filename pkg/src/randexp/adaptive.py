"""Adaptive sequence whose critical orbit escapes from every index while a
tracked open set stays in the Fatou set.

The sequence is 1/e except at boundary indices M_1 < M_2 < ...  At M_k the
term is chosen as exp(-x), where x is the orbit of 0 restarted after
M_{k-1}, so the restarted critical orbit lands exactly on 1.  A boundary is
placed once every point of a finite cloud sampled from the tracked set has
|Im| below eps_k and, from the second block on, the cloud has come back to
{Re z < 1} after the previous kick.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .constants import ONE_OVER_E
from .errors import ConstructionError, InvalidParameterError
from .seq import Kind, ParameterSequence

DEFAULT_RECT = (0.2, 0.8, 0.1, 0.4)

#: tracked region for the cloud: Re < RE_BOUND and 0 < Im < IM_BOUND
RE_BOUND = 2.0
IM_BOUND = 0.5


def default_cloud(rect=DEFAULT_RECT, m=5):
    """Corners and interior grid (m x m) of the rectangle x0 < Re < x1, y0 < Im < y1."""
    x0, x1, y0, y1 = map(float, rect)
    xs = np.linspace(x0, x1, int(m))
    ys = np.linspace(y0, y1, int(m))
    return (xs[None, :] + 1j * ys[:, None]).ravel()


def default_eps(k, eps0=1e-3):
    return eps0 * 2.0 ** (-k)


@dataclass
class AdaptiveConstructionState:
    """Record of one run of the construction.  Read-only once built."""

    boundaries: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    critical_values: list = field(default_factory=list)
    eps: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    reentry_steps: list = field(default_factory=list)
    initial_cloud: np.ndarray = None
    cloud: np.ndarray = None
    notes: str = (
        "eps_k schedule and re-entry test stand in for the unquantified cone angle; "
        "alphas are measured, not prescribed"
    )

    @property
    def block_index(self):
        return len(self.boundaries)


class AdaptiveEscapeSeq(ParameterSequence):
    kind = Kind.ADAPTIVE_ESCAPE

    def __init__(self, boundaries, lambdas, spec=None):
        if len(boundaries) != len(lambdas):
            raise InvalidParameterError("boundaries and lambdas must have equal length")
        self.boundaries = [int(m) for m in boundaries]
        self.lambdas = [float(v) for v in lambdas]
        if any(a >= b for a, b in zip(self.boundaries, self.boundaries[1:])):
            raise InvalidParameterError("boundaries must be strictly increasing")
        self.spec = dict(spec or {})
        self._m = np.array(self.boundaries, dtype=np.int64)
        self._v = np.array(self.lambdas, dtype=np.float64)

    def _values(self, idx):
        out = np.full(idx.shape, ONE_OVER_E)
        if self._m.size:
            pos = np.searchsorted(self._m, idx)
            pos = np.minimum(pos, self._m.size - 1)
            hit = self._m[pos] == idx
            out[hit] = self._v[pos[hit]]
        return out

    def to_dict(self):
        d = {"kind": self.kind.value}
        d.update(self.spec)
        return d


def adaptive_escape_seq(v_cloud=None, blocks=3, eps0=1e-3, eps=None, min_gap=1,
                        max_block_steps=10**7, kernels=None):
    """Run the construction for ``blocks`` boundaries.

    Parameters
    ----------
    v_cloud : array of complex, optional
        Finite sample of the tracked set; must lie in 0 < Re < 1, 0 < Im < 1/2.
        Defaults to :func:`default_cloud`.
    eps : callable k -> float, optional
        Imaginary-part tolerance for block k (1-based).  Defaults to
        ``eps0 * 2**-k``.
    min_gap : int
        Minimum number of 1/e steps between consecutive boundaries.

    Returns
    -------
    (AdaptiveEscapeSeq, AdaptiveConstructionState)
    """
    k_mod = kernels or _backend.kernels
    cloud = default_cloud() if v_cloud is None else np.asarray(v_cloud, dtype=np.complex128).ravel()
    if cloud.size == 0:
        raise InvalidParameterError("v_cloud is empty")
    if not (np.all(cloud.real > 0) and np.all(cloud.real < 1)
            and np.all(cloud.imag > 0) and np.all(cloud.imag < 0.5)):
        raise InvalidParameterError("v_cloud must lie in 0 < Re z < 1, 0 < Im z < 1/2")
    blocks = int(blocks)
    if blocks < 1:
        raise InvalidParameterError("need at least one block")
    eps_fn = eps or (lambda k: default_eps(k, eps0))

    state = AdaptiveConstructionState(initial_cloud=cloud.copy())
    cre = np.ascontiguousarray(cloud.real, dtype=np.float64)
    cim = np.ascontiguousarray(cloud.imag, dtype=np.float64)
    index = 0
    for k in range(1, blocks + 1):
        eps_k = float(eps_fn(k))
        steps, x, status, reentry = k_mod.adaptive_block(
            cre, cim, 0.0, eps_k, k > 1, int(min_gap), int(max_block_steps), RE_BOUND, IM_BOUND
        )
        if status == 1:
            raise ConstructionError(f"cloud left the tracked region in block {k}", index + steps)
        if status == 2:
            raise ConstructionError(f"no boundary found for block {k} within {max_block_steps} steps",
                                    index + steps)
        index += steps + 1
        lam = math.exp(-x)
        z = cre + 1j * cim
        alpha = float(np.min(np.angle(z - x)))
        m = lam * np.exp(cre)
        cre[:], cim[:] = m * np.cos(cim), m * np.sin(cim)
        if np.any(cre >= RE_BOUND) or np.any(cim <= 0) or np.any(cim >= IM_BOUND):
            raise ConstructionError(f"kick at boundary {k} pushed the cloud out of the tracked region",
                                    index)
        state.boundaries.append(index)
        state.lambdas.append(lam)
        state.critical_values.append(x)
        state.eps.append(eps_k)
        state.alphas.append(alpha)
        state.reentry_steps.append(None if k == 1 else int(reentry))
    state.cloud = cre + 1j * cim
    spec = {"blocks": blocks, "eps0": eps0, "min_gap": int(min_gap)}
    return AdaptiveEscapeSeq(state.boundaries, state.lambdas, spec), state


def block_critical_values(seq, kernels=None):
    """Orbit of 0 composed from index M_{k-1}+1 through M_k, for each boundary k."""
    k_mod = kernels or _backend.kernels
    out = []
    prev = 0
    for m in seq.boundaries:
        vals = seq.values(prev + 1, m - prev)
        _, x, _ = k_mod.real_crossing(vals, 0.0, math.inf)
        out.append(x)
        prev = m
    return out


def adaptive_from_spec(spec):
    rect = spec.get("rect", DEFAULT_RECT)
    grid = spec.get("grid", 5)
    seq, _ = adaptive_escape_seq(
        default_cloud(rect, grid),
        blocks=spec.get("blocks", 3),
        eps0=spec.get("eps0", 1e-3),
        min_gap=spec.get("min_gap", 1),
    )
    seq.spec.update({"rect": list(rect), "grid": grid})
    return seq
