import json
import math

import numpy as np
import pytest

from randexp.constants import ONE_OVER_E
from randexp.errors import InvalidParameterError, UndefinedIndexError
from randexp.seq import (
    BlockRepeatSeq,
    Kind,
    block_of,
    block_repeat_seq,
    borel_random_seq,
    constant_seq,
    critical_exact_seq,
    from_spec,
    load_sequence,
    power_law_seq,
    uniform_random_seq,
)

# lambda_3 of the exact critical sequence, e^(1/2 - 1) * 2/3, mpmath at 30 digits
CRIT3 = 0.40435377314175562


def test_constant():
    assert constant_seq(ONE_OVER_E).query(7) == ONE_OVER_E
    assert constant_seq(1).query(1) == 1.0
    assert constant_seq(0.4).query(10**6) == 0.4
    for bad in (0, -1, math.inf, math.nan):
        with pytest.raises(InvalidParameterError):
            constant_seq(bad)


def test_uniform_range_and_determinism():
    s = uniform_random_seq(0.1, 42)
    v = s.values(1, 10**4)
    assert np.all(v > 0.26788) and np.all(v < 0.46788)
    assert s.query(77) == s.query(77)
    assert s.query(77) == v[76]
    assert np.array_equal(v, uniform_random_seq(0.1, 42).values(1, 10**4))


def test_uniform_open_interval_over_1e6_draws():
    s = uniform_random_seq(0.1, 3)
    v = s.values(1, 10**6)
    assert v.min() > ONE_OVER_E - 0.1 and v.max() < ONE_OVER_E + 0.1


def test_uniform_mean():
    d = 0.1
    v = uniform_random_seq(d, 11).values(1, 10**6)
    assert abs(v.mean() - ONE_OVER_E) < 3 * d / math.sqrt(10**6) * math.sqrt(1 / 3)


def test_uniform_validation():
    for d in (0, -0.1, ONE_OVER_E, 1):
        with pytest.raises(InvalidParameterError):
            uniform_random_seq(d, 0)


def test_power_law():
    assert power_law_seq(2, 1).query(1) == pytest.approx(1.3678794411714423, abs=1e-15)
    assert power_law_seq(0.5, 1).query(4) == pytest.approx(ONE_OVER_E + 0.5, abs=1e-15)
    s = power_law_seq(0, 0.25)
    assert s.values(1, 5).tolist() == [ONE_OVER_E + 0.25] * 5
    with pytest.raises(InvalidParameterError):
        power_law_seq(2, 0)


def test_critical_exact():
    s = critical_exact_seq()
    assert s.start_index == 2
    assert s.query(2) == pytest.approx(0.5, rel=1e-15)
    assert s.query(3) == pytest.approx(CRIT3, rel=1e-14)
    assert s.query(10**9) == pytest.approx(ONE_OVER_E, rel=1e-8)
    with pytest.raises(UndefinedIndexError):
        s.query(1)
    with pytest.raises(UndefinedIndexError):
        s.values(1, 3)


def test_block_repeat_examples():
    s = block_repeat_seq()
    assert s.query(1) == ONE_OVER_E + 1
    assert s.query(48) == ONE_OVER_E + 1
    assert s.query(49) == ONE_OVER_E + 0.5
    assert s.query(145) == ONE_OVER_E + 1 / 3
    assert s.query(144) == ONE_OVER_E + 1 / 2


def test_block_partition_lengths():
    k = np.arange(1, 48 * 200 * 201 // 2 + 1)
    n = block_of(k)
    counts = np.bincount(n)[1:]
    assert np.array_equal(counts, 48 * np.arange(1, 201))
    s = BlockRepeatSeq(48)
    assert s.block_start(3) == 145 and s.block(145) == 3


def test_block_of_large_indices():
    for n in (10**4, 10**6, 3 * 10**7):
        first = 24 * n * (n - 1) + 1
        last = 24 * n * (n + 1)
        assert block_of(first) == n and block_of(last) == n
        assert block_of(first - 1) == n - 1 and block_of(last + 1) == n + 1


def test_borel_validation():
    lo, hi = ONE_OVER_E - 0.1, ONE_OVER_E + 0.1
    ok = [[lo, 0], [ONE_OVER_E, 0.5], [hi, 1]]
    s = borel_random_seq(0.1, ok, 5)
    v = s.values(1, 10**4)
    assert np.all((v > lo) & (v < hi))
    assert s.cdf_at(ONE_OVER_E) == 0.5
    with pytest.raises(InvalidParameterError, match="monotone"):
        borel_random_seq(0.1, [[lo, 0], [ONE_OVER_E, 0.7], [ONE_OVER_E + 0.05, 0.6], [hi, 1]], 0)
    with pytest.raises(InvalidParameterError, match="normalized"):
        borel_random_seq(0.1, [[lo, 0], [hi, 0.9]], 0)
    with pytest.raises(InvalidParameterError, match="support"):
        borel_random_seq(0.1, [[lo - 0.1, 0], [hi, 1]], 0)


def test_borel_linear_cdf_matches_uniform_sampler():
    lo, hi = ONE_OVER_E - 0.1, ONE_OVER_E + 0.1
    b = borel_random_seq(0.1, [[lo, 0], [hi, 1]], 9)
    u = uniform_random_seq(0.1, 9)
    assert np.array_equal(b.values(1, 1000), u.values(1, 1000))


@pytest.mark.parametrize("spec", [
    {"kind": "constant", "lambda": 0.5},
    {"kind": "uniform_random", "delta": 0.1, "seed": 3},
    {"kind": "power_law", "p": 2.0, "c": 0.1},
    {"kind": "critical_exact"},
    {"kind": "block_repeat", "factor": 48},
    {"kind": "borel_random", "delta": 0.1, "seed": 1,
     "cdf": [[ONE_OVER_E - 0.1, 0.0], [ONE_OVER_E + 0.1, 1.0]]},
])
def test_spec_round_trip(spec, tmp_path):
    s = from_spec(spec)
    again = load_sequence(s.to_json())
    assert again == s and hash(again) == hash(s)
    p = tmp_path / "s.json"
    p.write_text(json.dumps(spec))
    assert load_sequence(str(p)) == s
    assert np.array_equal(again.values(2, 50), s.values(2, 50))


def test_bad_specs():
    with pytest.raises(InvalidParameterError):
        from_spec({"kind": "nope"})
    with pytest.raises(InvalidParameterError):
        from_spec({"delta": 0.1})
    with pytest.raises(InvalidParameterError):
        from_spec({"kind": "uniform_random"})
    with pytest.raises(InvalidParameterError):
        load_sequence("{not json")
    with pytest.raises(InvalidParameterError):
        load_sequence("/no/such/file.json")


def test_kind_parse():
    assert Kind.parse("UniformRandom") is Kind.UNIFORM_RANDOM
    assert Kind.parse("block-repeat") is Kind.BLOCK_REPEAT
