"""Seeded Monte Carlo experiments over random parameter sequences.

Trial t uses the sequence seed ``rng.trial_seed(master, t)``, so a report
depends only on (experiment, config, master seed) and never on how trials
are split across threads.  Results are evidence at a finite horizon.
"""

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _backend, rng
from .constants import ONE_OVER_E, Z95
from .criteria import find_runs, top_quarter
from .errors import InvalidParameterError
from .seq import BorelRandomSeq, UniformRandomSeq, from_spec

__all__ = [
    "wilson_interval",
    "ExperimentReport",
    "mc_escape_probability",
    "run_probability",
    "mc_run_frequency",
    "borel_mc",
    "sampler_sanity",
]

CSV_COLUMNS = ("trial", "seed", "outcome", "escape_step")


def wilson_interval(k, n, z=Z95):
    """Wilson score interval for k successes out of n."""
    if n <= 0:
        raise InvalidParameterError("need at least one trial")
    phat = k / n
    denom = 1.0 + z * z / n
    centre = (phat + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class ExperimentReport:
    experiment: str
    seed: int
    trials: int
    records: list
    summary: dict
    config: dict
    sidecar: dict = field(default_factory=dict, compare=False)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow([r[c] for c in CSV_COLUMNS])
        return buf.getvalue()

    def summary_json(self):
        doc = {"experiment": self.experiment, "seed": self.seed, "trials": self.trials,
               "config": self.config}
        doc.update(self.summary)
        return json.dumps(doc, sort_keys=True, indent=2)

    def write(self, csv_path=None, json_path=None):
        if csv_path is not None:
            Path(csv_path).write_text(self.to_csv())
        if json_path is not None:
            Path(json_path).write_text(self.summary_json() + "\n")
            # wall-clock data lives next to the summary, never inside it
            side = Path(str(json_path) + ".meta.json")
            side.write_text(json.dumps(self.sidecar, sort_keys=True) + "\n")


def _fraction_summary(hits, n):
    lo, hi = wilson_interval(hits, n)
    return {"fraction": hits / n, "ci_low": lo, "ci_high": hi, "successes": int(hits)}


def _run_escape_kernel(seeds, cdf_x, cdf_f, lo_open, hi_open, cap, re_threshold, workers, kernels):
    k_mod = kernels or _backend.kernels
    out = np.zeros(seeds.size, dtype=np.int64)
    cdf_x = np.ascontiguousarray(cdf_x, dtype=np.float64)
    cdf_f = np.ascontiguousarray(cdf_f, dtype=np.float64)

    def job(bounds):
        a, b = bounds
        part = np.zeros(b - a, dtype=np.int64)
        k_mod.mc_escape(np.ascontiguousarray(seeds[a:b]), 1, cdf_x, cdf_f, lo_open, hi_open,
                        int(cap), float(re_threshold), part)
        out[a:b] = part

    workers = max(1, int(workers))
    edges = np.linspace(0, seeds.size, workers + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if workers == 1:
        for c in chunks:
            job(c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(job, chunks))
    return out


def _escape_report(name, seed, trials, seeds, steps, config, started):
    records = [
        {"trial": t, "seed": int(s), "outcome": int(st > 0), "escape_step": int(st)}
        for t, (s, st) in enumerate(zip(seeds.tolist(), steps.tolist()))
    ]
    hits = int(np.count_nonzero(steps))
    summary = _fraction_summary(hits, trials)
    summary["mean_escape_step"] = float(steps[steps > 0].mean()) if hits else None
    summary["note"] = f"escape within cap={config['cap']} steps; finite-horizon evidence"
    side = {"started": started, "elapsed_s": time.time() - started}
    return ExperimentReport(name, seed, trials, records, summary, config, side)


def mc_escape_probability(delta, trials, cap=10_000, seed=0, re_threshold=50.0,
                          workers=1, kernels=None):
    """Fraction of uniform random sequences on (1/e - delta, 1/e + delta)
    whose orbit of 0 passes Re > re_threshold within ``cap`` steps.

    delta = 0 is accepted as the degenerate constant sequence 1/e.
    """
    started = time.time()
    delta = float(delta)
    trials = int(trials)
    if not 0 <= delta < ONE_OVER_E:
        raise InvalidParameterError(f"delta must lie in [0, 1/e), got {delta}")
    if trials < 1 or int(cap) < 1:
        raise InvalidParameterError("trials and cap must be positive")
    seed = rng.check_seed(seed)
    seeds = rng.trial_seeds(seed, trials)
    if delta == 0:
        cdf_x, cdf_f = np.array([ONE_OVER_E, ONE_OVER_E]), np.array([0.0, 1.0])
        lo_open = hi_open = ONE_OVER_E
    else:
        proto = UniformRandomSeq(delta, 0)
        cdf_x, cdf_f, lo_open, hi_open = proto.cdf_x, proto.cdf_f, proto.lo_open, proto.hi_open
    steps = _run_escape_kernel(seeds, cdf_x, cdf_f, lo_open, hi_open, cap, re_threshold,
                               workers, kernels)
    config = {"delta": delta, "cap": int(cap), "re_threshold": float(re_threshold),
              "sampler": "uniform"}
    return _escape_report("escape", seed, trials, seeds, steps, config, started)


def _parse_borel(cdf_spec, delta=None):
    if isinstance(cdf_spec, BorelRandomSeq):
        return cdf_spec
    if isinstance(cdf_spec, (str, bytes)):
        cdf_spec = json.loads(cdf_spec)
    if isinstance(cdf_spec, dict):
        spec = {"kind": "borel_random", "seed": 0, **cdf_spec}
        if delta is not None:
            spec.setdefault("delta", delta)
        return from_spec(spec)
    if delta is None:
        raise InvalidParameterError("a bare CDF knot list needs delta")
    return BorelRandomSeq(delta, cdf_spec, 0)


def borel_mc(cdf_spec, trials, cap=10_000, seed=0, delta=None, re_threshold=50.0,
             workers=1, kernels=None):
    """Escape fraction for i.i.d. terms drawn from a piecewise-linear CDF.

    ``cdf_spec`` is a dict ``{"delta": d, "cdf": [[x, F], ...]}``, its JSON
    text, a knot list (with ``delta``) or a BorelRandomSeq.  The CDF must
    put positive mass above 1/e.
    """
    started = time.time()
    proto = _parse_borel(cdf_spec, delta)
    if not proto.cdf_at(ONE_OVER_E) < 1.0:
        raise InvalidParameterError("the CDF puts no mass above 1/e")
    trials = int(trials)
    if trials < 1 or int(cap) < 1:
        raise InvalidParameterError("trials and cap must be positive")
    seed = rng.check_seed(seed)
    seeds = rng.trial_seeds(seed, trials)
    steps = _run_escape_kernel(seeds, proto.cdf_x, proto.cdf_f, proto.lo_open, proto.hi_open,
                               cap, re_threshold, workers, kernels)
    config = {"delta": proto.delta, "cap": int(cap), "re_threshold": float(re_threshold),
              "sampler": "borel",
              "cdf": [[float(x), float(f)] for x, f in zip(proto.cdf_x, proto.cdf_f)]}
    return _escape_report("borel", seed, trials, seeds, steps, config, started)


def run_probability(L, horizon, q=0.25):
    """P(at least one run of >= L successes in ``horizon`` Bernoulli(q) trials).

    Dynamic programme over the length of the current run (< L).
    """
    L, horizon = int(L), int(horizon)
    if L < 1:
        raise InvalidParameterError("L must be at least 1")
    if horizon < L:
        return 0.0
    state = np.zeros(L)
    state[0] = 1.0
    for _ in range(horizon):
        stay = state.sum()
        nxt = np.empty(L)
        nxt[0] = (1.0 - q) * stay
        nxt[1:] = q * state[:-1]
        state = nxt
    return float(1.0 - state.sum())


def mc_run_frequency(delta, L, horizon, trials, seed=0):
    """Fraction of uniform random sequences with a top-quarter run of length >= L within the horizon.

    Per-trial records use ``escape_step`` for the start index of the first
    run (0 if none).
    """
    started = time.time()
    delta = float(delta)
    L, horizon, trials = int(L), int(horizon), int(trials)
    if L < 1:
        raise InvalidParameterError("L must be at least 1")
    if trials < 1 or horizon < 0:
        raise InvalidParameterError("need trials >= 1 and horizon >= 0")
    seed = rng.check_seed(seed)
    seeds = rng.trial_seeds(seed, trials)
    records = []
    hits = 0
    for t, s in enumerate(seeds.tolist()):
        first = 0
        if horizon >= L:
            vals = UniformRandomSeq(delta, s).values(1, horizon)
            runs = find_runs(top_quarter(vals, delta), L, 1)
            first = runs[0] if runs else 0
        hits += first > 0
        records.append({"trial": t, "seed": int(s), "outcome": int(first > 0), "escape_step": first})
    summary = _fraction_summary(hits, trials)
    pred = run_probability(L, horizon)
    sigma = math.sqrt(max(pred * (1.0 - pred), 0.0) / trials)
    summary["predicted"] = pred
    summary["sigma"] = sigma
    summary["z_score"] = (hits / trials - pred) / sigma if sigma > 0 else 0.0
    config = {"delta": delta, "L": L, "horizon": horizon}
    side = {"started": started, "elapsed_s": time.time() - started}
    return ExperimentReport("runs", seed, trials, records, summary, config, side)


def sampler_sanity(seq_or_delta, draws=100_000, first=1):
    """(sample mean, distribution mean, sigma of the mean) for a random sequence's draws."""
    seq = seq_or_delta
    if not hasattr(seq, "values"):
        seq = UniformRandomSeq(float(seq_or_delta), 0)
    vals = seq.values(first, int(draws))
    if isinstance(seq, BorelRandomSeq):
        mean = seq.mean()
        # second moment of the piecewise-uniform law
        a, b = seq.cdf_x[:-1], seq.cdf_x[1:]
        m2 = float(np.sum(np.diff(seq.cdf_f) * (a * a + a * b + b * b) / 3.0))
        var = m2 - mean * mean
    else:
        mean = ONE_OVER_E
        var = (2.0 * seq.delta) ** 2 / 12.0
    return float(vals.mean()), float(mean), math.sqrt(var / vals.size)
