import itertools
import json
import math

import pytest

from randexp import experiments as ex
from randexp.constants import ONE_OVER_E
from randexp.errors import InvalidParameterError
from randexp.orbit import EscapeConfig, run
from randexp.seq import UniformRandomSeq, borel_random_seq


def test_wilson_extremes():
    z2 = 1.959963984540054 ** 2
    lo, hi = ex.wilson_interval(0, 10)
    assert lo == 0.0 and hi == pytest.approx(z2 / (10 + z2), rel=1e-12)
    lo, hi = ex.wilson_interval(10, 10)
    assert hi == pytest.approx(1.0) and lo == pytest.approx(10 / (10 + z2), rel=1e-12)
    lo, hi = ex.wilson_interval(50, 100)
    assert 0.5 - lo == pytest.approx(hi - 0.5)
    with pytest.raises(InvalidParameterError):
        ex.wilson_interval(0, 0)


def test_escape_report_deterministic(kernels):
    a = ex.mc_escape_probability(0.1, 200, cap=2000, seed=7, kernels=kernels)
    b = ex.mc_escape_probability(0.1, 200, cap=2000, seed=7, workers=8, kernels=kernels)
    assert a == b
    assert a.summary_json() == b.summary_json()
    c = ex.mc_escape_probability(0.1, 200, cap=2000, seed=8, kernels=kernels)
    assert c.records[0]["seed"] != a.records[0]["seed"]


def test_kernel_matches_orbit_run():
    rep = ex.mc_escape_probability(0.05, 40, cap=3000, seed=3)
    cfg = EscapeConfig(max_iter=3000)
    for rec in rep.records:
        st = run(UniformRandomSeq(0.05, rec["seed"]), 0, cfg=cfg)
        assert rec["escape_step"] == (st.status_step if st.escaped else 0)


def test_escape_fraction_monotone_in_cap():
    fr = [ex.mc_escape_probability(0.02, 300, cap=c, seed=1).summary["fraction"]
          for c in (50, 500, 5000)]
    assert fr == sorted(fr)


def test_escape_edge_cases():
    rep = ex.mc_escape_probability(0.0, 10, cap=1000)
    assert rep.summary["fraction"] == 0.0 and rep.summary["mean_escape_step"] is None
    with pytest.raises(InvalidParameterError):
        ex.mc_escape_probability(0.5, 10)
    with pytest.raises(InvalidParameterError):
        ex.mc_escape_probability(0.1, 0)
    with pytest.raises(InvalidParameterError):
        ex.mc_escape_probability(0.1, 10, seed=-1)


def test_report_files(tmp_path):
    rep = ex.mc_escape_probability(0.1, 5, cap=500, seed=2)
    csv_path, json_path = tmp_path / "t.csv", tmp_path / "s.json"
    rep.write(csv_path, json_path)
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "trial,seed,outcome,escape_step" and len(lines) == 6
    doc = json.loads(json_path.read_text())
    assert doc["trials"] == 5 and "elapsed_s" not in json.dumps(doc)
    side = json.loads((tmp_path / "s.json.meta.json").read_text())
    assert "elapsed_s" in side


def _brute_run_probability(L, h, q):
    total = 0.0
    for bits in itertools.product((0, 1), repeat=h):
        run_len = best = 0
        for b in bits:
            run_len = run_len + 1 if b else 0
            best = max(best, run_len)
        if best >= L:
            k = sum(bits)
            total += q ** k * (1 - q) ** (h - k)
    return total


@pytest.mark.parametrize("L,h", [(1, 5), (2, 8), (3, 10), (4, 12)])
def test_run_probability_brute_force(L, h):
    assert ex.run_probability(L, h) == pytest.approx(_brute_run_probability(L, h, 0.25), abs=1e-14)


def test_run_probability_closed_form():
    assert ex.run_probability(1, 40) == pytest.approx(1 - 0.75 ** 40, rel=1e-14)
    assert ex.run_probability(5, 4) == 0.0


def test_run_frequency_matches_prediction():
    rep = ex.mc_run_frequency(0.1, 4, 300, 1500, seed=11)
    assert abs(rep.summary["z_score"]) < 4
    assert rep.summary["predicted"] == ex.run_probability(4, 300)


def test_borel_mc():
    d = 0.1
    lin = {"delta": d, "cdf": [[ONE_OVER_E - d, 0.0], [ONE_OVER_E + d, 1.0]]}
    a = ex.borel_mc(lin, 100, cap=5000, seed=4)
    b = ex.borel_mc(json.dumps(lin), 100, cap=5000, seed=4)
    assert a == b and a.summary["fraction"] == 1.0
    below = {"delta": d, "cdf": [[ONE_OVER_E - d, 0.0], [ONE_OVER_E, 1.0]]}
    with pytest.raises(InvalidParameterError):
        ex.borel_mc(below, 10)
    with pytest.raises(InvalidParameterError):
        ex.borel_mc([[0.3, 0.0], [0.4, 1.0]], 10)


def test_sampler_sanity():
    mean, expected, sigma = ex.sampler_sanity(0.1, 50_000)
    assert abs(mean - expected) < 4 * sigma
    seq = borel_random_seq(0.1, [[ONE_OVER_E - 0.1, 0], [ONE_OVER_E, 0.8], [ONE_OVER_E + 0.1, 1]], 9)
    mean, expected, sigma = ex.sampler_sanity(seq, 50_000)
    assert abs(mean - expected) < 4 * sigma and expected < ONE_OVER_E
    assert math.isfinite(sigma)


def test_run_frequency_dp_long_horizon():
    rep = ex.mc_run_frequency(0.1, 3, 10**4, 300, seed=2)
    assert abs(rep.summary["z_score"]) < 3 or rep.summary["sigma"] < 1e-6
    short = ex.mc_run_frequency(0.1, 5, 4, 20)
    assert short.summary["fraction"] == 0.0


def test_borel_linear_matches_uniform_sampler():
    d = 0.02
    lin = {"delta": d, "cdf": [[ONE_OVER_E - d, 0.0], [ONE_OVER_E + d, 1.0]]}
    a = ex.borel_mc(lin, 400, cap=300, seed=6)
    b = ex.mc_escape_probability(d, 400, cap=300, seed=6)
    fa, fb = a.summary["fraction"], b.summary["fraction"]
    assert 0 < fb < 1
    assert abs(fa - fb) < 4 * math.sqrt(fb * (1 - fb) * 2 / 400)


def test_borel_top_quarter_always_escapes():
    d = 0.1
    top = {"delta": d, "cdf": [[ONE_OVER_E - d, 0.0], [ONE_OVER_E + d / 2, 0.0],
                               [ONE_OVER_E + d, 1.0]]}
    assert ex.borel_mc(top, 100, cap=200).summary["fraction"] == 1.0
