import numpy as np
import pytest
from hypothesis import given, strategies as st

from moebius_mipt.errors import NonRealTrace
from moebius_mipt.gates import block_pair
from moebius_mipt.mobius import trace
from moebius_mipt.trace_maps import (TmRegion, TraceOverflow, circuit_triple, escape_time, fib_invariant,
                                     fib_orbit, fib_step, initial_triple, invariant_Vk, tm_orbit,
                                     tm_region, tm_region_codes, tm_seed, tm_step, tm_trace_sequence)

unit = st.floats(-1, 1, allow_nan=False)
angle = st.floats(0, np.pi / 2, allow_nan=False)
lam_s = st.floats(0, 1.5, allow_nan=False)
mom = st.floats(0.01, np.pi - 0.01, allow_nan=False)


@given(unit, unit, unit)
def test_invariant_conserved(x, y, z):
    t = (x, y, z)
    I0 = fib_invariant(t)
    for _ in range(20):
        t = fib_step(t)
        if max(map(abs, t)) > 1e6:
            break
        assert abs(fib_invariant(t) - I0) <= 1e-9 * max(1, abs(I0), max(map(abs, t)) ** 2)


def test_period_six_cycle():
    orbit = fib_orbit((0.0, 0.0, 2.0), 12)
    assert np.allclose(orbit[6:], orbit[:-6])
    assert np.allclose(orbit[3], (0, 0, -2))
    assert escape_time((0.0, 0.0, 2.0)) is None


def test_escape_time():
    assert escape_time((2.0, 2.0, 2.0), threshold=100) == 3
    out = escape_time((np.array([0.0, 2.0]), np.array([0.0, 2.0]), np.array([2.0, 2.0])), threshold=100)
    assert list(out) == [-1, 3]


def test_overflow_raises():
    with pytest.raises(TraceOverflow):
        fib_step((0.0, 1e200, 1e200))


@given(angle, lam_s, mom)
def test_closed_form_invariant(T, lam, k):
    direct = fib_invariant(circuit_triple(T, lam, k))
    assert abs(invariant_Vk(T, lam, k) - direct) <= 1e-8 * max(1, abs(direct))


@given(angle, lam_s, mom)
def test_initial_triple_is_half_traces(T, lam, k):
    m0, m1 = block_pair("alternating", T, lam, k)
    x, y, z = initial_triple(m0, m1)
    assert np.isclose(x, trace(m0).real / 2)
    assert np.isclose(z, trace(m0 @ m1).real / 2)
    assert x == pytest.approx(y)


def test_non_real_traces_rejected():
    m0, m1 = block_pair("pulse", 0.3, 0.3, 1.0)
    with pytest.raises(NonRealTrace):
        initial_triple(m0, m1)
    with pytest.raises(NonRealTrace):
        tm_seed(m0, m1)


def test_tm_step_and_regions():
    assert tm_step((1.0, 3.0)) == (9.0, 3.0 - 2.0 + 2.0)
    assert tm_region((1.0, 0.0)) is TmRegion.REGION_I
    assert tm_region((1.0, 5.0)) is TmRegion.REGION_II
    assert tm_region((9.0, 1.0)) is TmRegion.REGION_III
    assert tm_region((-1.0, 0.0)) is TmRegion.OUTSIDE
    p = np.array([1.0, 1.0, 9.0, -1.0])
    q = np.array([0.0, 5.0, 1.0, 0.0])
    assert list(tm_region_codes(p, q)) == [1, 2, 3, 0]


def test_tm_orbit_stops_on_escape():
    rows = tm_orbit((4.0, 10.0), 50)
    assert rows[-1][-1] is True
    assert len(rows) < 51


def test_tm_sequence_matches_seed():
    mp, mm = block_pair("dipole", 0.3, 0.1, 1.2)
    p, q = tm_seed(mp, mm)
    xs = tm_trace_sequence(mp, mm, 3)
    assert np.isclose(xs[0] ** 2, p) and np.isclose(xs[1], q)
