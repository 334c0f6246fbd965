"""Fibonacci and Thue-Morse trace maps.

The Fibonacci map works on half traces x_n = Tr(M_n)/2, the Thue-Morse map on
full traces x_n = Tr(M_n). Keep the two conventions apart.
"""

import enum
from typing import NamedTuple

import numpy as np

from .errors import NonRealTrace
from .gates import block_pair
from .mobius import trace

OVERFLOW = 1e300
ESCAPE_THRESHOLD = 1e7
DEFAULT_STEPS = 24
REAL_TOL = 1e-8


class TraceOverflow(ArithmeticError):
    pass


class TraceTriple(NamedTuple):
    x: float
    y: float
    z: float


class TracePair(NamedTuple):
    p: float
    q: float


class TmRegion(enum.Enum):
    REGION_I = "I"
    REGION_II = "II"
    REGION_III = "III"
    OUTSIDE = "outside"


def fib_step(t):
    x, y, z = t
    nz = 2 * y * z - x
    if np.any(np.abs(nz) > OVERFLOW):
        raise TraceOverflow("Fibonacci trace map overflowed; stop at the escape threshold")
    return TraceTriple(y, z, nz)


def fib_invariant(t):
    x, y, z = t
    return x * x + y * y + z * z - 2 * x * y * z - 1


def _real_half_trace(m):
    tr = trace(m) / 2
    if np.any(np.abs(np.imag(tr)) > REAL_TOL * np.maximum(1, np.abs(tr))):
        raise NonRealTrace("Fibonacci seed traces must be real")
    return np.real(tr)


def initial_triple(m0, m1):
    """(Tr M0, Tr M1, Tr M0 M1) / 2; works on stacks of matrices too."""
    return TraceTriple(_real_half_trace(m0), _real_half_trace(m1), _real_half_trace(np.matmul(m0, m1)))


def circuit_triple(T, lam, k):
    m0, m1 = block_pair("alternating", T, lam, k)
    return initial_triple(m0, m1)


def invariant_Vk(T, lam, k):
    """Closed-form trace-map invariant V_k of the "alternating" blocks."""
    c2 = np.cosh(2 * lam) ** 2
    bracket = (-19 + 13 * np.cosh(4 * lam)
               + 2 * c2 * (3 * np.cos(4 * k) - 2 * (-4 * np.cos(4 * T) + np.cos(8 * T)) * np.sin(2 * k) ** 2))
    return c2 * np.sin(k) ** 2 * np.sin(4 * T) ** 2 * bracket / 8


def fib_orbit(t0, steps):
    """Orbit of length ``steps + 1`` starting at ``t0`` (array of shape (steps+1, 3))."""
    out = np.empty((steps + 1, 3))
    t = TraceTriple(*map(float, t0))
    out[0] = t
    for i in range(1, steps + 1):
        t = fib_step(t)
        out[i] = t
    return out


def escape_time(t0, threshold=ESCAPE_THRESHOLD, n_max=DEFAULT_STEPS):
    """First step n <= n_max with max|coordinate| > threshold, or None.

    Vectorized: ``t0`` may hold arrays (one orbit per entry); the result is
    then an integer array with -1 marking orbits that never escape.
    """
    x, y, z = (np.asarray(c, dtype=float) for c in t0)
    scalar = x.ndim == 0
    x, y, z = np.atleast_1d(x).copy(), np.atleast_1d(y).copy(), np.atleast_1d(z).copy()
    out = np.full(x.shape, -1, dtype=int)
    for n in range(n_max + 1):
        big = np.maximum(np.maximum(np.abs(x), np.abs(y)), np.abs(z)) > threshold
        newly = big & (out < 0)
        out[newly] = n
        live = out < 0
        if not live.any():
            break
        # escaped orbits are frozen so they never overflow
        nz = np.where(live, 2 * y * z - x, z)
        x, y, z = np.where(live, y, x), np.where(live, z, y), nz
    if scalar:
        return None if out[0] < 0 else int(out[0])
    return out


def tm_step(s):
    p, q = s
    nq = p * q - 2 * p + 2
    if np.any(np.abs(nq) > OVERFLOW) or np.any(np.abs(q) > np.sqrt(OVERFLOW)):
        raise TraceOverflow("Thue-Morse trace map overflowed")
    return TracePair(q * q, nq)


def tm_region(s):
    p, q = s
    if p < 0:
        return TmRegion.OUTSIDE
    if p - 2 <= q <= 2:
        return TmRegion.REGION_I
    if q >= 2:
        return TmRegion.REGION_II
    if q <= 2 and q <= p - 2:
        return TmRegion.REGION_III
    return TmRegion.OUTSIDE


def tm_region_codes(p, q):
    """Vectorized ``tm_region``: 1, 2, 3 for regions I-III and 0 outside."""
    p, q = np.asarray(p), np.asarray(q)
    ok = p >= 0
    r1 = ok & (p - 2 <= q) & (q <= 2)
    r2 = ok & ~r1 & (q >= 2)
    r3 = ok & ~r1 & ~r2 & (q <= p - 2)
    return np.select([r1, r2, r3], [1, 2, 3], 0)


def _real_full_trace(m):
    tr = trace(m)
    if np.any(np.abs(np.imag(tr)) > REAL_TOL * np.maximum(1, np.abs(tr))):
        raise NonRealTrace("Thue-Morse seed traces must be real")
    return np.real(tr)


def tm_seed(m_plus, m_minus):
    """(p_1, q_1) = (Tr(M+)**2, Tr(M+ M-))."""
    x1 = _real_full_trace(m_plus)
    x2 = _real_full_trace(np.matmul(m_plus, m_minus))
    return TracePair(x1 * x1, x2)


def tm_trace_sequence(m_plus, m_minus, n):
    """Full traces x_1..x_n of the Thue-Morse products, from the 1D recursion.

    x_1 = Tr(M+), x_2 = Tr(M+ M-), x_{m+1} = x_{m-1}**2 (x_m - 2) + 2. The
    recursion needs Tr(M+) == Tr(M-), true for every gate set with a
    conjugation symmetry and real traces.
    """
    xs = [float(_real_full_trace(m_plus)), float(_real_full_trace(np.matmul(m_plus, m_minus)))]
    while len(xs) < n:
        nxt = xs[-2] ** 2 * (xs[-1] - 2) + 2
        if abs(nxt) > OVERFLOW:
            raise TraceOverflow("Thue-Morse trace sequence overflowed")
        xs.append(nxt)
    return xs[:n]


def tm_orbit(s0, steps, threshold=ESCAPE_THRESHOLD):
    """Orbit rows (step, p, q, region, escaped) until ``steps`` or escape."""
    rows = []
    s = TracePair(float(s0[0]), float(s0[1]))
    for i in range(steps + 1):
        escaped = max(abs(s.p), abs(s.q)) > threshold
        rows.append((i, s.p, s.q, tm_region(s).value, escaped))
        if escaped:
            break
        s = tm_step(s)
    return rows
