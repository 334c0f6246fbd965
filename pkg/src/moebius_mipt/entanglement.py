"""Mode evolution, Majorana correlation matrices and entanglement entropy.

The pairing amplitude on negative momenta is f(-k) = -f(k). With the Fourier
convention c_j = L**-1/2 sum_k exp(-ikj) c_k (the one under which the gate
matrices in ``gates`` act on f) and Majoranas a_{2j-1} = c_j + c_j^dag,
a_{2j} = i(c_j - c_j^dag), the two-point function
<a_m a_n> = delta_mn + i Gamma_mn of a sites-[0, ell) block is made of 2x2
blocks that depend on r = l - j only:

    Gamma[2j-1, 2l-1] = -phi_r      Gamma[2j-1, 2l] =  psi_r
    Gamma[2j,   2l-1] = -psi_{-r}   Gamma[2j,   2l] =  phi_r

(rows and columns 1-based as written). This layout matches the Majorana
correlations of the exact spin-chain statevector entry by entry.
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DimensionError, EigSolverFailure, InsufficientData, NonPositiveEntropy
from .mobius import MomentumGrid
from .lyapunov import word_indices


@dataclass
class ModeAmplitudes:
    grid: MomentumGrid
    f: np.ndarray

    @classmethod
    def vacuum(cls, grid):
        return cls(grid, np.zeros(len(grid), dtype=complex))


@dataclass
class FourierCoeffs:
    """phi_r and psi_r for r = -L/2 .. L/2 - 1 (array index r + L/2)."""

    phi: np.ndarray
    psi: np.ndarray

    @property
    def L(self):
        return len(self.phi)

    def _idx(self, r):
        return np.asarray(r) + self.L // 2

    def phi_at(self, r):
        return self.phi[self._idx(r)]

    def psi_at(self, r):
        return self.psi[self._idx(r)]


@dataclass
class EntropyProfile:
    ell: np.ndarray
    S: np.ndarray
    stderr: np.ndarray | None = None


class LogFit(NamedTuple):
    c_eff: float
    s0: float
    residual: float
    stderr: float


class PowerFit(NamedTuple):
    alpha: float
    prefactor: float
    residual: float
    stderr: float


def _homogeneous(f):
    """Bounded (u, v) with f = u / v; infinity maps to (1, 0)."""
    f = np.asarray(f, dtype=complex)
    inf = np.isinf(f)
    big = ~inf & (np.abs(f) > 1)
    safe = np.where(big, f, 1)
    u = np.where(inf | big, 1, f)
    v = np.where(inf, 0, np.where(big, 1 / safe, 1))
    return u.astype(complex), v.astype(complex)


def _from_homogeneous(u, v):
    with np.errstate(divide="ignore", invalid="ignore"):
        f = u / v
    return np.where(v == 0, complex(np.inf, 0), f)


def evolve_homogeneous(indices, mats, u, v):
    """Apply letter matrices in time order to homogeneous amplitudes.

    ``indices``: (R, N) letter indices in time order; ``mats``: (2, nk, 2, 2).
    ``u``, ``v`` broadcast to (R, nk). Returns the evolved (u, v), rescaled so
    max(|u|, |v|) = 1.
    """
    indices = np.atleast_2d(indices)
    mats = np.asarray(mats, dtype=complex)
    coeff = [mats[:, :, i, j] for i, j in ((0, 0), (0, 1), (1, 0), (1, 1))]  # each (2, nk)
    n_real, n_steps = indices.shape
    u = np.broadcast_to(u, (n_real, mats.shape[1])).copy()
    v = np.broadcast_to(v, (n_real, mats.shape[1])).copy()
    single = n_real == 1
    for step in range(n_steps):
        if single:
            letter = indices[0, step]
            a, b, c, d = (x[letter] for x in coeff)
        else:
            sel = indices[:, step]
            a, b, c, d = (x[sel] for x in coeff)
        u, v = a * u + b * v, c * u + d * v
        scale = np.maximum(np.abs(u), np.abs(v))
        u /= scale
        v /= scale
    return u, v


def evolve_modes(initial, word, mats, n_blocks=None):
    """Evolve amplitudes through ``word`` one Moebius map at a time.

    ``mats`` = (A, B), each a stack over the momentum grid. The word is in
    operator order, so its rightmost letter acts first. ``n_blocks`` limits
    the evolution to the earliest blocks.
    """
    if n_blocks is not None:
        word = word[len(word) - n_blocks:]
    u, v = _homogeneous(initial.f)
    u, v = evolve_homogeneous(word_indices(word)[None, :], np.stack(mats), u, v)
    return ModeAmplitudes(initial.grid, _from_homogeneous(u[0], v[0]))


def _integrands(f):
    u, v = _homogeneous(f)
    den = np.abs(u) ** 2 + np.abs(v) ** 2
    cross = u * np.conj(v)
    g_phi = 2 * cross.real / den
    g_psi = (2j * cross.imag + np.abs(u) ** 2 - np.abs(v) ** 2) / den
    return g_phi, g_psi


def fourier_coeffs(modes):
    """Discrete Fourier coefficients phi_r, psi_r over the full momentum grid."""
    L = modes.grid.L
    g_phi, g_psi = _integrands(modes.f)
    # full grid in FFT order: m = 0..L/2-1 are +k_j, m = -1..-L/2 are -k_j
    full_phi = np.concatenate([g_phi, -g_phi[::-1]])
    full_psi = np.concatenate([g_psi, np.conj(g_psi[::-1])])
    r = np.arange(-L // 2, L // 2)
    phase = np.exp(-1j * np.pi * r / L) / L
    phi = 1j * phase * np.fft.fft(full_phi)[r % L]
    psi = phase * np.fft.fft(full_psi)[r % L]
    return FourierCoeffs(phi.real.copy(), psi)


def correlation_matrix(coeffs, ell):
    """2ell x 2ell real antisymmetric Majorana correlation matrix of sites [0, ell)."""
    L = coeffs.L
    if ell < 1 or 2 * ell > L:
        raise DimensionError(f"need 1 <= ell <= L/2, got ell={ell}, L={L}")
    j = np.arange(ell)
    r = j[None, :] - j[:, None]
    phi = coeffs.phi_at(r)
    psi = np.real(coeffs.psi_at(r))
    psi_t = np.real(coeffs.psi_at(-r))
    gamma = np.empty((2 * ell, 2 * ell))
    gamma[0::2, 0::2] = -phi
    gamma[1::2, 1::2] = phi
    gamma[0::2, 1::2] = psi
    gamma[1::2, 0::2] = -psi_t
    return gamma


def h1(x):
    x = np.clip(x, 0.0, 1.0)
    p = (1 + x) / 2
    q = (1 - x) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -p * np.log(p) - np.where(q > 0, q * np.log(np.where(q > 0, q, 1)), 0.0)
    return out


def symplectic_values(gamma):
    """The ell values nu_j >= 0 with Gamma eigenvalues +-i nu_j, clamped to [0, 1]."""
    try:
        ev = scipy.linalg.eigvalsh(1j * gamma, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigSolverFailure(str(exc)) from exc
    nu = np.sort(np.abs(ev))[::2]
    return np.clip(nu, 0.0, 1.0)


def entropy(gamma):
    """Von Neumann entropy in nats from the Majorana correlation matrix."""
    return float(np.sum(h1(symplectic_values(gamma))))


def entropies(coeffs, ells):
    return np.array([entropy(correlation_matrix(coeffs, int(ell))) for ell in ells])


def default_ells(L, n_points=12):
    """Log-spaced subsystem sizes in [L/60, L/6], i.e. [ell_max/30, ell_max/3]."""
    lo, hi = max(2, L // 60), max(3, L // 6)
    return np.unique(np.geomspace(lo, hi, n_points).astype(int))


def entropy_profile(spec, n=None, ells=None):
    """Evolve from f = 0 per ``spec`` and return the (ensemble-averaged) S(ell)."""
    from .circuit import run_modes

    n = spec.n if n is None else n
    ells = spec.ells if ells is None else ells
    if ells is None or len(ells) == 0:
        ells = default_ells(spec.L)
    ells = np.asarray(ells, dtype=int)
    if 2 * ells.max() > spec.L:
        raise DimensionError("2 * max(ell) must not exceed L")
    if spec.sequence.name == "fibonacci":
        from .sequences import fibonacci_length
        if ells.max() >= fibonacci_length(n) / 10:
            warnings.warn("ell is not much smaller than F_n; finite-time effects may dominate", stacklevel=2)
    rows = []
    for modes in run_modes(spec, n):
        rows.append(entropies(fourier_coeffs(modes), ells))
    rows = np.array(rows)
    if len(rows) == 1:
        return EntropyProfile(ells, rows[0], None)
    return EntropyProfile(ells, rows.mean(axis=0), rows.std(axis=0, ddof=1) / np.sqrt(len(rows)))


def _window(profile, window):
    ell = np.asarray(profile.ell, dtype=float)
    S = np.asarray(profile.S, dtype=float)
    if window is not None:
        keep = (ell >= window[0]) & (ell <= window[1])
        ell, S = ell[keep], S[keep]
    if len(ell) < 5:
        raise InsufficientData(f"need at least 5 points in the fit window, got {len(ell)}")
    return ell, S


def _linfit(x, y):
    coef, cov = np.polyfit(x, y, 1, cov="unscaled")
    resid = y - np.polyval(coef, x)
    dof = max(len(x) - 2, 1)
    s2 = float(resid @ resid) / dof
    return coef, np.sqrt(np.diag(cov) * s2), float(np.sqrt(np.mean(resid**2)))


def fit_log(profile, window=None):
    """Least squares S = (c_eff/3) log(ell) + s0."""
    ell, S = _window(profile, window)
    (slope, s0), err, res = _linfit(np.log(ell), S)
    return LogFit(3 * slope, s0, res, 3 * err[0])


def fit_power(profile, window=None):
    """Least squares log S = alpha log(ell) + log(prefactor)."""
    ell, S = _window(profile, window)
    if np.any(S <= 0):
        raise NonPositiveEntropy("power-law fit needs S > 0 everywhere in the window")
    (alpha, logc), err, res = _linfit(np.log(ell), np.log(S))
    return PowerFit(alpha, float(np.exp(logc)), res, err[0])
