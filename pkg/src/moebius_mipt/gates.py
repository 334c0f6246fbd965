"""Per-momentum SL(2,C) matrices of the kicked-Ising gates and circuit blocks.

Every function accepts a scalar momentum or an array of momenta; arrays give
a stack of matrices of shape ``(len(k), 2, 2)``.

Elementary gates are normalized with the analytic square root of their
determinant, so composite blocks have a sign that varies continuously with
(T, lambda, k). That fixes the sign of traces entering the trace maps.
"""

import enum
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .mobius import compose


class Gate(NamedTuple):
    """Elementary gate: ``kind`` in {"X", "YY", "ZZ", "M"} with argument ``t``.

    ``M`` is the postselected weak measurement U_X(i*lambda) with t = lambda.
    """

    kind: str
    t: float


class BlockKind(enum.Enum):
    U0 = "U0"
    U1 = "U1"
    UPLUS_SIGN = "UplusSign"
    UMINUS_SIGN = "UminusSign"
    UPLUS_PULSE = "UplusPulse"
    UMINUS_PULSE = "UminusPulse"
    DIPOLE_PLUS = "DipolePlus"
    DIPOLE_MINUS = "DipoleMinus"


# gate sets: name -> (block for letter A, block for letter B)
#   alternating: YY(+-T) M ZZ(-+T), the two Floquet/Fibonacci blocks
#   sign_lambda: YY(T) M(+-lambda) ZZ(-T)
#   pulse:       ZZ(pi/4 -+ T) X(pi/4 -+ T) M(lambda)
#   dipole:      the two orderings of the pulse pair
GATE_SETS = {
    "alternating": (BlockKind.U0, BlockKind.U1),
    "sign_lambda": (BlockKind.UPLUS_SIGN, BlockKind.UMINUS_SIGN),
    "pulse": (BlockKind.UPLUS_PULSE, BlockKind.UMINUS_PULSE),
    "dipole": (BlockKind.DIPOLE_PLUS, BlockKind.DIPOLE_MINUS),
}


def _check_k(k):
    k = np.asarray(k, dtype=float)
    if np.any((k <= 0) | (k >= np.pi)):
        raise DomainError("momentum must lie strictly inside (0, pi)")
    return k


def _stack(a, b, c, d):
    a, b, c, d = np.broadcast_arrays(a, b, c, d)
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0], out[..., 0, 1] = a, b
    out[..., 1, 0], out[..., 1, 1] = c, d
    return out


def mobius_X(t, k=None):
    """f -> exp(4it) f. Independent of k; broadcast to k's shape if given."""
    ph = np.exp(2j * t)
    shape = () if k is None else np.shape(k)
    z = np.zeros(shape)
    return _stack(ph + z, z, z, 1 / ph + z)


def mobius_measure(lam, k=None):
    """f -> exp(-4 lambda) f; negative lambda gives the inverse scaling."""
    shape = () if k is None else np.shape(k)
    z = np.zeros(shape)
    return _stack(np.exp(-2 * lam) + z, z, z, np.exp(2 * lam) + z)


def _pairing(t, k, sign):
    k = _check_k(k)
    tau = np.tan(k / 2)
    e = np.exp(4j * t)
    norm = np.exp(2j * t) * (1 + tau**2)
    off = sign * 1j * tau * (1 - e)
    return _stack((1 + tau**2 * e) / norm, off / norm, -off / norm, (tau**2 + e) / norm)


def mobius_YY(t, k):
    return _pairing(t, k, +1)


def mobius_ZZ(t, k):
    return _pairing(t, k, -1)


def gate_matrix(gate, k):
    if gate.kind == "X":
        return mobius_X(gate.t, k)
    if gate.kind == "YY":
        return mobius_YY(gate.t, k)
    if gate.kind == "ZZ":
        return mobius_ZZ(gate.t, k)
    if gate.kind == "M":
        return mobius_measure(gate.t, k)
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def block_gates(block, T, lam):
    """Elementary gates of a block, listed in the order they act in time."""
    block = BlockKind(block)
    q = np.pi / 4
    if block is BlockKind.U0 or block is BlockKind.UPLUS_SIGN:
        return [Gate("YY", T), Gate("M", lam), Gate("ZZ", -T)]
    if block is BlockKind.U1:
        return [Gate("YY", -T), Gate("M", lam), Gate("ZZ", T)]
    if block is BlockKind.UMINUS_SIGN:
        return [Gate("YY", T), Gate("M", -lam), Gate("ZZ", -T)]
    if block is BlockKind.UPLUS_PULSE:
        return [Gate("ZZ", q - T), Gate("X", q - T), Gate("M", lam)]
    if block is BlockKind.UMINUS_PULSE:
        return [Gate("ZZ", q + T), Gate("X", q + T), Gate("M", lam)]
    # dipoles: U+U- acts U- first
    if block is BlockKind.DIPOLE_PLUS:
        return block_gates(BlockKind.UMINUS_PULSE, T, lam) + block_gates(BlockKind.UPLUS_PULSE, T, lam)
    return block_gates(BlockKind.UPLUS_PULSE, T, lam) + block_gates(BlockKind.UMINUS_PULSE, T, lam)


def block_matrix(block, T, lam, k):
    """SL(2,C) matrix of a composite block; the latest gate is the left factor."""
    m = None
    for gate in block_gates(block, T, lam):
        g = gate_matrix(gate, k)
        m = g if m is None else compose(g, m)
    return m


def gates_per_block(block):
    return len(block_gates(block, 0.0, 0.0))


def block_pair(gate_set, T, lam, k):
    """Matrices for letters A and B of a named gate set."""
    a, b = GATE_SETS[gate_set]
    return block_matrix(a, T, lam, k), block_matrix(b, T, lam, k)
