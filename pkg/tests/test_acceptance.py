"""Acceptance criteria. Each test prints one PASS/FAIL line (visible with -s or in -v logs).

Run with ``pytest tests/test_acceptance.py -s``.
"""

import numpy as np
import pytest

from moebius_mipt import oracle
from moebius_mipt.circuit import CircuitSpec
from moebius_mipt.entanglement import (ModeAmplitudes, correlation_matrix, entropy, entropy_profile,
                                       evolve_modes, fit_log, fit_power, fourier_coeffs)
from moebius_mipt.gates import GATE_SETS, block_gates, block_pair
from moebius_mipt.lyapunov import (FLOQUET, log_norm_growth, log_norm_traceless, lyapunov_ensemble,
                                   lyapunov_over_k, word_indices)
from moebius_mipt.mobius import MomentumGrid, trace
from moebius_mipt.scans import (arcsinh_boundary, floquet_boundary_lambda, period6_momenta,
                                su2_similarity, trace_identity_check, trace_MF)
from moebius_mipt.sequences import (SequenceKind, bernoulli_word, fibonacci_word, realization_seed,
                                    thue_morse_word)
from moebius_mipt.trace_maps import (TraceOverflow, circuit_triple, fib_invariant, fib_orbit,
                                     initial_triple, invariant_Vk, tm_region_codes, tm_seed, tm_trace_sequence)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:2d} {'PASS' if ok else 'FAIL'}: {detail}")
        return ok
    return emit


def word_matrix(word, mats):
    """Operator-order product of letter matrices (leftmost letter last in time)."""
    m = np.eye(2, dtype=complex)
    for letter in word:
        m = m @ mats[0 if letter == "A" else 1]
    return m


# 1 -------------------------------------------------------------------------

def test_c01_oracle_equivalence(report):
    rng = np.random.default_rng(101)
    L = 8
    grid = MomentumGrid(L)
    worst = 0.0
    for trial in range(50):
        T = rng.uniform(0, np.pi / 2)
        lam = rng.uniform(0, 1)
        word = bernoulli_word(int(rng.integers(1, 21)), int(rng.integers(2**32)))
        mats = block_pair("alternating", T, lam, grid.k)
        coeffs = fourier_coeffs(evolve_modes(ModeAmplitudes.vacuum(grid), word, mats))
        gates = []
        for letter in reversed(word):
            gates += block_gates(GATE_SETS["alternating"][0 if letter == "A" else 1], T, lam)
        psi = oracle.run_gates(gates, L)
        for ell in range(1, 5):
            s_g = entropy(correlation_matrix(coeffs, ell))
            s_v = oracle.reduced_entropy(psi, ell, L)
            worst = max(worst, abs(s_g - s_v))
    ok = worst < 1e-6
    report(1, ok, f"max |S_gaussian - S_statevector| = {worst:.2e} over 50 circuits (tol 1e-6)")
    assert ok


# 2 -------------------------------------------------------------------------

def test_c02_floquet_boundary(report):
    n, L = 500, 2000
    grid = MomentumGrid(L)
    thresh = 10 / (3 * 2 * n)  # product norm bounded by e**10 counts as zero exponent
    T_grid = np.linspace(0, np.pi / 2, 52)[1:-1]
    assert not np.any(np.isclose(T_grid, np.pi / 4))
    bad = []
    for T in T_grid:
        lc = floquet_boundary_lambda(T)
        below = float(np.min(lyapunov_over_k(T, max(lc - 0.01, 0.0), grid, FLOQUET, n)))
        above = float(np.min(lyapunov_over_k(T, lc + 0.01, grid, FLOQUET, n)))
        if not (below <= thresh < above):
            bad.append((round(T, 4), lc, below, above))
    anchor = abs(floquet_boundary_lambda(np.pi / 8) - np.log(3) / 4)
    ok = not bad and anchor < 1e-3
    report(2, ok, f"{50 - len(bad)}/50 T values bracketed within 0.01; "
                  f"|lambda_c(pi/8) - ln3/4| = {anchor:.1e}")
    assert ok, bad


# 3 -------------------------------------------------------------------------

def test_c03_parabolic_line(report):
    lams = np.linspace(0, 2, 20)
    err = float(np.max(np.abs(trace_MF(np.pi / 4, lams, np.pi / 4) + 2)))
    ok = err < 1e-12
    report(3, ok, f"max |trace_MF(pi/4, lambda, pi/4) + 2| = {err:.1e} (tol 1e-12)")
    assert ok


# 4 -------------------------------------------------------------------------

def test_c04_trace_map_fidelity(report):
    rng = np.random.default_rng(404)
    fib_err = 0.0
    for _ in range(100):
        T, lam, k = rng.uniform(0, np.pi / 2), rng.uniform(0, 1), rng.uniform(0.01, np.pi - 0.01)
        mats = block_pair("alternating", T, lam, k)
        orbit = fib_orbit(initial_triple(*mats), 10)  # x_0 .. x_12
        xs = np.concatenate([orbit[0], orbit[1:, 2]])
        for n in range(13):
            direct = trace(word_matrix(fibonacci_word(n), mats)).real / 2
            fib_err = max(fib_err, abs(xs[n] - direct) / max(1.0, abs(direct)))
    tm_err, full_length = 0.0, 0
    for gate_set in ("alternating", "dipole"):
        for _ in range(50):
            T, lam, k = rng.uniform(0, np.pi / 2), rng.uniform(0, 1), rng.uniform(0.01, np.pi - 0.01)
            mats = block_pair(gate_set, T, lam, k)
            # word lengths 1 .. 256, cut where traces leave double range
            for n_max in range(9, 1, -1):
                try:
                    xs = tm_trace_sequence(*mats, n_max)
                    break
                except TraceOverflow:
                    continue
            full_length += n_max == 9
            for m, x in enumerate(xs, start=1):
                direct = trace(word_matrix(thue_morse_word(m), mats)).real
                tm_err = max(tm_err, abs(x - direct) / max(1.0, abs(direct)))
    ok = fib_err < 1e-8 and tm_err < 1e-6
    report(4, ok, f"Fibonacci rel err {fib_err:.1e} (tol 1e-8), Thue-Morse rel err {tm_err:.1e} "
                  f"(tol 1e-6; {full_length}/100 draws representable up to length 256)")
    assert ok


# 5 -------------------------------------------------------------------------

def test_c05_invariant_conservation(report):
    rng = np.random.default_rng(505)
    seeds = rng.uniform(-1.5, 1.5, size=(3, 200_000))
    x, y, z = seeds.copy()
    path = [(x, y, z)]
    bounded = np.ones(seeds.shape[1], dtype=bool)
    for _ in range(30):
        # escaped orbits are frozen so they cannot overflow
        nz = np.where(bounded, 2 * y * z - x, z)
        x, y, z = np.where(bounded, y, x), np.where(bounded, z, y), nz
        bounded &= np.maximum.reduce([np.abs(x), np.abs(y), np.abs(z)]) <= 10
        path.append((x, y, z))
    keep = np.flatnonzero(bounded)[:10_000]
    assert keep.size == 10_000
    I0 = fib_invariant([c[keep] for c in path[0]])
    drift = max(float(np.max(np.abs(fib_invariant([c[keep] for c in t]) - I0) / np.maximum(1, np.abs(I0))))
                for t in path)
    T = rng.uniform(0, np.pi / 2, 1000)
    lam = rng.uniform(0, 1.5, 1000)
    k = rng.uniform(0.01, np.pi - 0.01, 1000)
    closed = invariant_Vk(T, lam, k)
    direct = fib_invariant(circuit_triple(T, lam, k))
    v_err = float(np.max(np.abs(closed - direct) / np.maximum(1, np.abs(direct))))
    ok = drift <= 1e-9 and v_err < 1e-8
    report(5, ok, f"max relative invariant drift {drift:.1e} over 1e4 orbits x 30 steps (tol 1e-9); "
                  f"closed-form V_k error {v_err:.1e} (tol 1e-8)")
    assert ok


# 6 -------------------------------------------------------------------------

def test_c06_period_six(report):
    T, lam = np.pi / 4, 0.7
    k = np.arcsin((np.sqrt(5) - 1) / 2)
    x0, y0, z0 = circuit_triple(T, lam, k)
    triple_ok = abs(x0) < 1e-10 and abs(y0) < 1e-10
    orbit = fib_orbit((x0, y0, z0), 600) if max(abs(x0), abs(y0), abs(z0)) < 10 else None
    periodic = orbit is not None and np.allclose(orbit[6:], orbit[:-6], atol=1e-10)
    ok = triple_ok and periodic
    report(6, ok, f"triple at (pi/4, 0.7, arcsin((sqrt5-1)/2)) = ({x0:.4f}, {y0:.4f}, {z0:.4f}); "
                  f"6-periodic for 600 steps: {periodic}")
    assert ok


# 7 -------------------------------------------------------------------------

def _fib_ceff(T):
    spec = CircuitSpec(gate_set="alternating", sequence="fibonacci", T=T, lam=0.8, L=10_000, n=21)
    ells = np.unique(np.geomspace(30, 300, 12).astype(int))
    prof = entropy_profile(spec, ells=ells)
    return fit_log(prof), prof


def test_c07_critical_entropy(report):
    fit, prof = _fib_ceff(np.pi / 8 + 0.1)
    s_range = float(np.ptp(prof.S))
    main_ok = fit.c_eff > 0.05 and fit.residual < 0.05 * max(s_range, 1e-300)
    offsets = [0.025, 0.05, 0.1, 0.15, 0.2]
    fits = [_fib_ceff(np.pi / 8 + d)[0] for d in offsets]
    c = np.array([f.c_eff for f in fits])
    e = np.array([f.stderr for f in fits])
    mono = all(c[i + 1] - c[i] <= np.hypot(e[i], e[i + 1]) for i in range(len(c) - 1))
    ok = main_ok and mono
    report(7, ok, f"c_eff(pi/8+0.1) = {fit.c_eff:.2e} (need > 0.05), residual/S-range = "
                  f"{fit.residual / max(s_range, 1e-300):.2f}; c_eff over T = "
                  + ", ".join(f"{v:.1e}" for v in c) + f"; monotone decreasing: {mono}")
    assert ok


# 8 -------------------------------------------------------------------------

DIPOLE_T, DIPOLE_LAM = np.pi / 10, 0.2


def _dipolar_alpha(L, realizations, n=3000, window=None, ells=None):
    spec = CircuitSpec(gate_set="pulse", sequence=SequenceKind("multipolar", order=2), T=DIPOLE_T,
                       lam=DIPOLE_LAM, L=L, n=n, seed=1, realizations=realizations)
    ells = np.unique(np.geomspace(10, 100, 12).astype(int)) if ells is None else ells
    prof = entropy_profile(spec, ells=ells)
    return fit_power(prof, window), prof


def test_c08_dipolar_smoke(report):
    fit, _ = _dipolar_alpha(1000, 20)
    ok = 0.55 <= fit.alpha <= 0.95
    report(8, ok, f"smoke scale (L=1000, 20 realizations, n=3000 dipoles, ell in [10, 100]): "
                  f"alpha = {fit.alpha:.3f} (need [0.55, 0.95])")
    assert ok


@pytest.mark.slow
def test_c08_dipolar_full(report):
    fit, _ = _dipolar_alpha(4000, 100)
    ok = 0.64 <= fit.alpha <= 0.84
    report(8, ok, f"full scale (L=4000, 100 realizations, n=3000 dipoles, ell in [10, 100]): "
                  f"alpha = {fit.alpha:.3f} (need [0.64, 0.84])")
    assert ok


# 9 -------------------------------------------------------------------------

def test_c09_random_saturation(report):
    L = 4000
    spec = CircuitSpec(gate_set="pulse", sequence="bernoulli", T=DIPOLE_T, lam=DIPOLE_LAM,
                       L=L, n=6000, seed=1, realizations=20)
    hi = L // 6
    ells = np.unique(np.geomspace(hi / 10, hi, 8).astype(int))
    prof = entropy_profile(spec, ells=ells)
    slope = float(np.polyfit(prof.ell, prof.S, 1)[0])
    ok = abs(slope) < 0.01
    report(9, ok, f"Bernoulli S slope over ell in [{ells[0]}, {ells[-1]}] = {slope:.1e} nats/site (need < 0.01)")
    assert ok


# 10 ------------------------------------------------------------------------

def test_c10_su2_suite(report):
    rng = np.random.default_rng(1010)
    qualifying = []
    defect = resid = 0.0
    while len(qualifying) < 100:
        gate_set = "alternating" if len(qualifying) % 2 == 0 else "dipole"
        T, lam, k = rng.uniform(0, np.pi / 2), rng.uniform(0, 1), rng.uniform(0.01, np.pi - 0.01)
        mp, mm = block_pair(gate_set, T, lam, k)
        rep = su2_similarity(mp, mm)
        if rep.S is None:
            continue
        qualifying.append((gate_set, mp, mm))
        defect = max(defect, rep.unitarity_defect)
        resid = max(resid, trace_identity_check(mp, mm, rep.sigma))
    nonreal = 0
    for _ in range(100):
        T, lam, k = rng.uniform(0, np.pi / 2), rng.uniform(0.05, 1), rng.uniform(0.01, np.pi - 0.01)
        nonreal += not su2_similarity(*block_pair("pulse", T, lam, k)).traces_real
    # bounded products of the first ten qualifying pairs, ten seeds each
    lyap_q = max(lyapunov_ensemble(SequenceKind("bernoulli"), (mp, mm), 10_000, 10, seed,
                                   gates_per_block=3 * (1 + (gs == "dipole"))).value
                 for seed, (gs, mp, mm) in enumerate(qualifying[:10]))
    generic = [("pulse", 0.3, 0.3, 2.0), ("alternating", 0.2, 0.5, 1.0), ("sign_lambda", 0.3, 0.3, 1.0)]
    lyap_g = []
    for gs, T, lam, k in generic:
        mats = np.stack(block_pair(gs, T, lam, k))
        idx = np.stack([word_indices(bernoulli_word(10_000, realization_seed(7, s))) for s in range(10)])
        lyap_g.append(float(np.min(log_norm_growth(idx, mats) / (3 * idx.shape[1]))))
    ok = defect < 1e-10 and resid < 1e-8 and nonreal == 100 and lyap_q < 1e-2 and min(lyap_g) > 1e-2
    report(10, ok, f"qualifying defect {defect:.1e}, identity residual {resid:.1e}; "
                   f"pulse non-real traces {nonreal}/100; max qualifying exponent {lyap_q:.1e}; "
                   f"min generic exponent over 10 seeds {min(lyap_g):.1e}")
    assert ok


# 11 ------------------------------------------------------------------------

def test_c11_thue_morse_regions(report):
    grid = MomentumGrid(2000)
    lams = np.arange(0.0, 0.6, 0.0025)
    lines, all_ok = [], True
    for T, label in ((np.pi / 8, "pi/8"), (np.pi / 6, "pi/6"), (np.pi / 5, "pi/5")):
        edge = None
        for lam in lams:
            p, q = tm_seed(*block_pair("dipole", T, lam, grid.k))
            # transition: no grid momentum left in region I
            if not np.any(tm_region_codes(p, q) == 1):
                edge = lam
                break
        target = arcsinh_boundary(T)
        ok = edge is not None and abs(edge - target) <= 0.01
        all_ok &= ok
        lines.append(f"T={label}: region I empties at lambda = {edge}, arcsinh boundary {target:.4f}")
    rng = np.random.default_rng(1111)
    T = rng.uniform(0, np.pi / 2, 10_000)
    lam = rng.uniform(0, 2, 10_000)
    k = rng.uniform(0.01, np.pi - 0.01, 10_000)
    p, q = tm_seed(*block_pair("dipole", T[:, None], lam[:, None], k[:, None]))
    n3 = int(np.sum(tm_region_codes(p, q) == 3))
    all_ok &= n3 == 0
    report(11, all_ok, "; ".join(lines) + f"; region III hits {n3}/10000")
    assert all_ok


# 12 ------------------------------------------------------------------------

def test_c12_sqrt_n_scaling(report):
    # T = pi/4 makes the traceless momentum degenerate (M0 M1 = -1); pi/6 is generic
    T, lam = np.pi / 6, 0.7
    k = period6_momenta(T)[0]
    mats = np.stack(block_pair("alternating", T, lam, k))
    assert np.max(np.abs(trace(mats))) < 1e-12
    idx = np.stack([word_indices(bernoulli_word(10_000, realization_seed(12, r))) for r in range(200)])
    ns = np.unique(np.geomspace(100, 10_000, 20).astype(int))
    mean_log = log_norm_traceless(idx, mats, ns).mean(axis=1)
    beta = float(np.polyfit(np.log(ns), np.log(mean_log), 1)[0])
    ok = 0.4 <= beta <= 0.6
    report(12, ok, f"E log||Pi_n|| ~ n^beta over n in [1e2, 1e4], 200 realizations: beta = {beta:.3f} (need [0.4, 0.6])")
    assert ok
