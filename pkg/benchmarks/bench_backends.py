"""Time the compiled and pure-Python kernels on the same workloads.

    python benchmarks/bench_backends.py [--repeat 3]

Each workload is also checked for identical results across backends.
"""

import argparse
import math
import time

import numpy as np

from randexp import _backend, rng
from randexp.adaptive import default_cloud
from randexp.seq import UniformRandomSeq, constant_seq


def _grid(k, lam=1.0):
    n = 200
    xs = np.linspace(-2, 2, n)
    re0 = np.ascontiguousarray(np.repeat(xs[None, :], n, 0).ravel())
    im0 = np.ascontiguousarray(np.repeat(xs[:, None], n, 1).ravel())
    out = np.zeros(re0.size, dtype=np.int32)
    k.escape_grid(constant_seq(lam).values(1, 200), re0, im0, 50.0, out)
    return out


def _grid_bounded(k):
    # most orbits stay bounded, so every pixel runs to the cap
    return _grid(k, 0.3)


def _mc(k):
    proto = UniformRandomSeq(0.1, 0)
    seeds = rng.trial_seeds(7, 1000)
    out = np.zeros(seeds.size, dtype=np.int64)
    k.mc_escape(seeds, 1, proto.cdf_x, proto.cdf_f, proto.lo_open, proto.hi_open, 10_000, 50.0, out)
    return out


def _orbit(k):
    lams = np.full(200_000, math.exp(-1.0))
    return k.orbit(lams, 0.0, 0.0, 50.0, 700.0, False)[:5]


def _adaptive(k):
    c = default_cloud()
    cre, cim = c.real.copy(), c.imag.copy()
    return k.adaptive_block(cre, cim, 0.0, 5e-4, False, 1, 10**6, 2.0, 0.5)


def _cone(k):
    return k.cone_exit(-0.5, 0.05, 1.9, math.pi / 4, 100, 100_000)


WORKLOADS = {
    "escape_grid 200x200 cap 200": _grid,
    "escape_grid lambda=0.3 (to cap)": _grid_bounded,
    "mc_escape 1000 trials": _mc,
    "orbit 2e5 steps": _orbit,
    "adaptive_block (1 block)": _adaptive,
    "cone_exit p=1.9": _cone,
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = _backend.available()
    mods = {n: _backend.load(n) for n in names}
    print(f"backends: {', '.join(names)}")
    print(f"{'workload':32s}" + "".join(f"{n:>12s}" for n in names) + "   speedup  same")
    for label, fn in WORKLOADS.items():
        times, results = [], []
        for n in names:
            best = math.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                res = fn(mods[n])
                best = min(best, time.perf_counter() - t0)
            times.append(best)
            results.append(res)
        same = all(np.array_equal(np.asarray(r, dtype=object), np.asarray(results[0], dtype=object))
                   for r in results[1:])
        speed = times[-1] / times[0] if len(times) > 1 else 1.0
        print(f"{label:32s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times)
              + f"   {speed:6.1f}x  {same}")


if __name__ == "__main__":
    main()
