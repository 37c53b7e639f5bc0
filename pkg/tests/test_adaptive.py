import math

import numpy as np
import pytest

from randexp import adaptive
from randexp.constants import ONE_OVER_E
from randexp.errors import ConstructionError, InvalidParameterError
from randexp.seq import from_spec


@pytest.fixture(scope="module")
def built():
    return adaptive.adaptive_escape_seq(blocks=3)


def test_boundary_identities(built):
    seq, st = built
    assert st.block_index == 3
    assert st.boundaries == sorted(st.boundaries)
    for lam, x in zip(st.lambdas, st.critical_values):
        assert lam > ONE_OVER_E
        assert abs(lam * math.exp(x) - 1.0) <= 1e-12


def test_restarted_critical_orbit_returns_to_one(built):
    seq, _ = built
    for c in adaptive.block_critical_values(seq):
        assert abs(c - 1.0) < 1e-9


def test_restart_by_direct_composition(built):
    seq, st = built
    prev = 0
    for m in st.boundaries:
        x = 0.0
        for lam in seq.values(prev + 1, m - prev):
            x = lam * math.exp(x)
        assert abs(x - 1.0) < 1e-9
        prev = m


def test_one_over_e_between_boundaries(built):
    seq, st = built
    v = seq.values(1, st.boundaries[-1] + 100)
    mask = np.ones(v.size, dtype=bool)
    mask[np.array(st.boundaries) - 1] = False
    assert np.all(v[mask] == ONE_OVER_E)
    assert [seq.query(m) for m in st.boundaries] == st.lambdas


def test_state_records(built):
    _, st = built
    assert st.reentry_steps[0] is None
    assert all(r >= 0 for r in st.reentry_steps[1:])
    assert all(e == 1e-3 * 2.0 ** -(k + 1) for k, e in enumerate(st.eps))
    assert all(0 < a < math.pi for a in st.alphas)
    assert "stand in" in st.notes
    assert np.all(st.cloud.imag > 0)


def test_backends_agree(kernels, built):
    _, ref = built
    _, st = adaptive.adaptive_escape_seq(blocks=2, kernels=kernels)
    assert st.boundaries == ref.boundaries[:2]
    assert st.lambdas == ref.lambdas[:2]


def test_budget_exhaustion_raises_with_step():
    with pytest.raises(ConstructionError) as info:
        adaptive.adaptive_escape_seq(blocks=1, max_block_steps=10)
    assert info.value.step == 10


def test_invalid_cloud():
    with pytest.raises(InvalidParameterError):
        adaptive.adaptive_escape_seq(np.array([0.5 + 0.6j]))
    with pytest.raises(InvalidParameterError):
        adaptive.adaptive_escape_seq(np.array([1.2 + 0.1j]))
    with pytest.raises(InvalidParameterError):
        adaptive.adaptive_escape_seq(np.array([], dtype=complex))


def test_spec_rebuilds_same_sequence(built):
    seq, _ = built
    again = from_spec({"kind": "adaptive_escape", "blocks": 3})
    assert again.boundaries == seq.boundaries
    assert again.to_dict()["kind"] == "adaptive_escape"


def test_default_cloud_shape():
    c = adaptive.default_cloud()
    assert c.size == 25
    assert c.real.min() == 0.2 and c.real.max() == 0.8
    assert c.imag.min() == 0.1 and c.imag.max() == 0.4
