"""Brute-force statevector simulation of the periodic spin chain (L <= 12).

Used only to validate the Gaussian pipeline. Site j is tensor axis j of the
state reshaped to (2,) * L. Fermions are attached to the X eigenbasis:
|+> is empty, so the all-|+> product state is the f = 0 coherent state.
"""

import numpy as np

from .errors import DomainError, SizeLimit

MAX_SITES = 12

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I = np.eye(2, dtype=complex)


def _check(L):
    if L > MAX_SITES:
        raise SizeLimit(f"statevector oracle is limited to L <= {MAX_SITES}")
    if L < 2 or L % 2:
        raise DomainError("oracle needs an even chain length >= 2")


def plus_state(L):
    _check(L)
    return np.full(2**L, 2.0 ** (-L / 2), dtype=complex)


def _apply_site(psi, L, j, op):
    t = psi.reshape((2,) * L)
    t = np.moveaxis(np.tensordot(op, t, axes=([1], [j])), 0, j)
    return t.reshape(-1)


def _apply_bond(psi, L, j, op4):
    """Apply a 4x4 operator on sites (j, j+1 mod L)."""
    k = (j + 1) % L
    t = psi.reshape((2,) * L)
    op = op4.reshape(2, 2, 2, 2)
    t = np.tensordot(op, t, axes=([2, 3], [j, k]))
    t = np.moveaxis(t, [0, 1], [j, k])
    return t.reshape(-1)


def apply_gate(psi, gate, L):
    """Exact action of one layer of kicked-Ising gates, renormalized if non-unitary."""
    _check(L)
    kind, t = gate.kind, gate.t
    if kind in ("X", "M"):
        # U_X(t) = prod_j exp(-it X_j); the measurement is U_X(i lambda)
        arg = -1j * t if kind == "X" else t
        op = np.cosh(arg) * _I + np.sinh(arg) * _X
        for j in range(L):
            psi = _apply_site(psi, L, j, op)
    elif kind in ("YY", "ZZ"):
        p = _Y if kind == "YY" else _Z
        op = np.cos(t) * np.eye(4) - 1j * np.sin(t) * np.kron(p, p)
        for j in range(L):
            psi = _apply_bond(psi, L, j, op)
    else:
        raise ValueError(f"unknown gate kind {kind!r}")
    if kind == "M":
        psi = psi / np.linalg.norm(psi)
    return psi


def run_gates(gates, L, psi=None):
    psi = plus_state(L) if psi is None else psi
    for g in gates:
        psi = apply_gate(psi, g, L)
    return psi


def reduced_entropy(psi, ell, L, start=0):
    """Von Neumann entropy (nats) of sites start .. start+ell-1 (periodic)."""
    _check(L)
    if not 1 <= ell < L:
        raise DomainError("need 1 <= ell < L")
    t = psi.reshape((2,) * L)
    sites = [(start + i) % L for i in range(ell)]
    rest = [j for j in range(L) if j not in sites]
    m = np.transpose(t, sites + rest).reshape(2**ell, -1)
    s = np.linalg.svd(m, compute_uv=False)
    p = s**2
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log(p)))


def majorana_operators(L):
    """Dense Jordan-Wigner Majoranas a_1 .. a_2L (0-based list) in the X frame.

    a_{2j-1} = (prod_{l<j} X_l) Z_j and a_{2j} = (prod_{l<j} X_l) Y_j.
    """
    _check(L)
    ops = []
    for j in range(L):
        for p in (_Z, _Y):
            factors = [_X] * j + [p] + [_I] * (L - j - 1)
            m = factors[0]
            for f in factors[1:]:
                m = np.kron(m, f)
            ops.append(m)
    return ops


def majorana_gamma(psi, L, ell=None):
    """Gamma with <a_m a_n> = delta_mn + i Gamma_mn, from the statevector."""
    ops = majorana_operators(L)
    n = 2 * (L if ell is None else ell)
    vecs = [op @ psi for op in ops[:n]]
    g = np.empty((n, n))
    for m in range(n):
        for q in range(n):
            val = np.vdot(vecs[m], vecs[q])  # <psi| a_m a_n |psi>, a_m Hermitian
            g[m, q] = 0.0 if m == q else val.imag
    return g
