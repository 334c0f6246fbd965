"""2x2 complex matrices acting as Moebius maps on pairing amplitudes.

Matrices are plain numpy arrays of shape ``(2, 2)``, or stacks of shape
``(..., 2, 2)`` when one matrix per momentum is needed. The point at infinity
of the Riemann sphere is ``complex('inf')`` (any value with ``np.isinf``).
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularMatrix

INFINITY = complex(np.inf, 0.0)

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": IDENTITY, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

CLASSIFY_TOL = 1e-10
SINGULAR_TOL = 1e-14


class MobiusClass(enum.Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"
    LOXODROMIC = "loxodromic"


@dataclass(frozen=True)
class MomentumGrid:
    """Positive half of the antiperiodic momentum grid of an even chain."""

    L: int
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.L <= 0 or self.L % 2:
            raise DomainError(f"chain length must be even and positive, got {self.L}")
        k = 2 * np.pi / self.L * (np.arange(self.L // 2) + 0.5)
        k.setflags(write=False)
        object.__setattr__(self, "k", k)

    def __len__(self):
        return self.L // 2

    def full(self):
        """All L momenta, ordered -pi < k < pi."""
        return 2 * np.pi / self.L * (np.arange(-self.L // 2, self.L // 2) + 0.5)


def mat(a, b, c, d):
    return np.array([[a, b], [c, d]], dtype=complex)


def is_infinity(z):
    return np.isinf(z)


def mobius_apply(m, f):
    """Image of ``f`` under ``z -> (a z + b) / (c z + d)``.

    Works on a single matrix and scalar, or broadcasts a stack ``(..., 2, 2)``
    against an array of amplitudes of shape ``(...)``.
    """
    m = np.asarray(m)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    f = np.asarray(f, dtype=complex)
    at_inf = np.isinf(f)
    f_fin = np.where(at_inf, 0, f)
    num = np.where(at_inf, a, a * f_fin + b)
    den = np.where(at_inf, c, c * f_fin + d)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / np.where(den == 0, 1, den)
    out = np.where(den == 0, INFINITY, out)
    if out.ndim == 0:
        return complex(out)
    return out


def det(m):
    m = np.asarray(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def normalize_to_sl2(m):
    """Divide by the principal square root of the determinant."""
    m = np.asarray(m, dtype=complex)
    dt = det(m)
    if np.any(np.abs(dt) <= SINGULAR_TOL):
        raise SingularMatrix("determinant vanishes; cannot normalize to SL(2,C)")
    return m / np.sqrt(dt)[..., None, None]


def compose(m_later, m_earlier):
    """Matrix of the map that applies ``m_earlier`` first, then ``m_later``."""
    return np.matmul(m_later, m_earlier)


def trace(m):
    m = np.asarray(m)
    return m[..., 0, 0] + m[..., 1, 1]


def classify(m, tol=CLASSIFY_TOL):
    """Fixed-point class of a det-1 matrix, decided from Tr(m)**2 alone.

    Tr**2 == 0 is reported as elliptic: traceless matrices square to -1 and
    generate bounded dynamics.
    """
    tau2 = complex(trace(m) ** 2)
    if abs(tau2.imag) > tol:
        return MobiusClass.LOXODROMIC
    re = tau2.real
    if re < -tol:
        return MobiusClass.LOXODROMIC
    if abs(re - 4) <= tol:
        return MobiusClass.PARABOLIC
    if re < 4:
        return MobiusClass.ELLIPTIC
    return MobiusClass.HYPERBOLIC


def frobenius(m):
    return np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))
