import cmath
import math

import numpy as np
import pytest

from randexp.constants import ONE_OVER_E
from randexp.errors import InvalidParameterError, OrbitOverflowError, UndefinedIndexError
from randexp.orbit import EscapeConfig, Status, misiurewicz_check, real_orbit_escapes, run, step
from randexp.seq import constant_seq, critical_exact_seq, power_law_seq, uniform_random_seq

E_E = 15.154262241479264  # e^e
E_E_E = 3814279.1047602206  # e^(e^e)


def test_step():
    assert step(0, 1) == 1
    assert step(1, ONE_OVER_E) == pytest.approx(1, abs=1e-15)
    assert step(1j * math.pi, 1) == pytest.approx(-1, abs=1e-15)
    with pytest.raises(OrbitOverflowError):
        step(701, 1)


def test_config_validation():
    with pytest.raises(InvalidParameterError):
        EscapeConfig(re_threshold=0)
    with pytest.raises(InvalidParameterError):
        EscapeConfig(re_threshold=800)
    with pytest.raises(InvalidParameterError):
        EscapeConfig(max_iter=0)


def test_lambda_one_from_one(kernels):
    st, traj = run(constant_seq(1), 1, cfg=EscapeConfig(), record=True, kernels=kernels)
    assert traj[1] == pytest.approx(math.e, rel=1e-15)
    assert traj[2] == pytest.approx(E_E, rel=1e-14)
    assert traj[3] == pytest.approx(E_E_E, rel=1e-13)
    # three maps take 1 past Re 50; the orbit of 0 needs a fourth
    assert st.status is Status.ESCAPED and st.status_step == 3
    st0 = run(constant_seq(1), 0, kernels=kernels)
    assert st0.status_step == 4


def test_parabolic_never_escapes(kernels):
    st = run(constant_seq(ONE_OVER_E), 0, cfg=EscapeConfig(max_iter=10**5), kernels=kernels)
    assert st.status is Status.ACTIVE and st.n == 10**5
    assert 0.999 < st.z.real < 1.0


def test_critical_identity(kernels):
    st, traj = run(critical_exact_seq(), 0, cfg=EscapeConfig(max_iter=99), record=True,
                   kernels=kernels)
    n = np.arange(1, 101)
    assert np.max(np.abs(traj.real - (1 - 1 / n))) < 1e-9


def test_undefined_index_propagates():
    with pytest.raises(UndefinedIndexError):
        run(critical_exact_seq(), 0, n1=0)


def test_log_deriv_matches_product(kernels):
    seq = uniform_random_seq(0.2, 5)
    st, traj = run(seq, 0.3 + 0.4j, cfg=EscapeConfig(max_iter=12), record=True, kernels=kernels)
    prod = np.prod(np.abs(traj[1:]))
    assert st.log_deriv == pytest.approx(math.log(prod), rel=1e-12)


def test_chain_rule_finite_difference():
    seq = uniform_random_seq(0.3, 8)
    z = 0.2 + 0.7j
    h = 1e-7
    for n in (1, 5, 10, 15):
        cfg = EscapeConfig(re_threshold=699, max_iter=n)
        a = run(seq, z, cfg=cfg)
        b = run(seq, z + h, cfg=cfg)
        fd = abs(b.z - a.z) / h
        assert math.exp(a.log_deriv) == pytest.approx(fd, rel=1e-3)


def test_overflow_status(kernels):
    cfg = EscapeConfig(re_threshold=600, max_iter=10)
    st = run(constant_seq(1e300), 0, cfg=cfg, kernels=kernels)
    assert st.status in (Status.ESCAPED, Status.OVERFLOWED)
    # a finite image past the threshold is an escape even when huge
    st = run(constant_seq(1), 650, cfg=EscapeConfig(re_threshold=699, max_iter=5), kernels=kernels)
    assert st.status is Status.ESCAPED and st.status_step == 1
    st = run(constant_seq(1), 710, cfg=EscapeConfig(re_threshold=699, max_iter=5), kernels=kernels)
    assert st.status is Status.OVERFLOWED and st.status_step == 1 and st.n == 0


def test_keep_last_ring_buffer():
    seq = constant_seq(ONE_OVER_E)
    cfg = EscapeConfig(max_iter=200_000)
    st, full = run(seq, 0, cfg=cfg, record=True)
    _, tail = run(seq, 0, cfg=cfg, record=True, keep_last=7)
    assert tail.size == 7 and np.array_equal(tail, full[-7:])


def test_chunked_run_equals_single_chunk(py_kernels, kernels):
    seq = power_law_seq(2, 0.1)
    cfg = EscapeConfig(max_iter=150_000)
    a = run(seq, 0.1j, cfg=cfg, kernels=kernels)
    b = run(seq, 0.1j, cfg=cfg, kernels=py_kernels)
    assert a == b


def test_misiurewicz():
    ok, margin = misiurewicz_check(1j * math.pi / 2, constant_seq(1), 1)
    assert ok and margin == pytest.approx(0.0, abs=1e-15)
    assert misiurewicz_check(0.3, uniform_random_seq(0.1, 1), 7) == (True, math.inf)
    ok, margin = misiurewicz_check(0.1 + 2j, constant_seq(2.0), 4)
    assert ok and margin > 0
    with pytest.raises(OrbitOverflowError):
        misiurewicz_check(0, constant_seq(1), 6)


def test_real_orbit_escapes():
    assert real_orbit_escapes(constant_seq(0.4), 0)[0]
    assert real_orbit_escapes(constant_seq(ONE_OVER_E), 0, cfg=EscapeConfig(max_iter=10**4)) == (False, 0)
    c = 0.5 * 0.18396424910116135
    seq = power_law_seq(2, c)
    assert real_orbit_escapes(seq, 0, n1=1, cfg=EscapeConfig(max_iter=10**4)) == (False, 0)


def test_real_axis_invariance_and_monotonicity():
    seq = power_law_seq(1, 0.5)
    st, traj = run(seq, 1.01, cfg=EscapeConfig(max_iter=200), record=True)
    assert np.all(traj.imag == 0)
    assert np.all(np.diff(traj.real) >= 0)
    assert cmath.isfinite(st.z)


def test_determinism(kernels):
    seq = uniform_random_seq(0.2, 77)
    cfg = EscapeConfig(max_iter=5000)
    assert run(seq, 0.1 + 0.1j, cfg=cfg, kernels=kernels) == run(seq, 0.1 + 0.1j, cfg=cfg, kernels=kernels)
