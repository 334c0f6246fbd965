"""Closed-form phase boundaries, phase-diagram scans and the SU(2) similarity check."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .errors import DegenerateEigenvectors, DomainError
from .gates import block_pair
from .lyapunov import lyapunov_over_k
from .mobius import IDENTITY, PAULIS, frobenius, trace
from .trace_maps import circuit_triple, invariant_Vk

BISECT_BRACKET = (0.0, 5.0)
BISECT_TOL = 1e-10
TRACE_TOL = 1e-9
COMPACT_TOL = 1e-9


def trace_MF(T, lam, k):
    """Tr(M_0 M_1) of the two-block Floquet cycle, in closed form.

    (-3 + 13 cosh 4lam + 2 cosh(2lam)**2 inner) / 8 with
    inner = 4 cos 4T - cos 8T + 8 cos 4k sin(2T)**4, rewritten with
    cosh 4lam = 2 cosh(2lam)**2 - 1 so the parabolic line is exact.
    """
    c2 = np.cosh(2 * lam) ** 2
    inner = 4 * np.cos(4 * T) - np.cos(8 * T) + 8 * np.cos(4 * k) * np.sin(2 * T) ** 4
    return -2 + c2 * (13 + inner) / 4


def _boundary_lhs(lam, T):
    c2 = np.cosh(2 * lam) ** 2
    return -2 * (-4 * np.cos(4 * T) + np.cos(8 * T)) * c2 + 5 * np.cosh(4 * lam) - 11


def floquet_boundary_lambda(T):
    """Critical measurement strength of the Floquet circuit, or None if there is none.

    Root in [0, 5] of -2 (-4 cos 4T + cos 8T) cosh(2 lam)**2 + 5 cosh(4 lam) = 11.
    The left side starts at -4 (cos 4T - 1)**2 - 11 + 11 <= 0 for lam = 0 and
    grows monotonically, so a root exists iff it is reached inside the bracket.
    """
    lo, hi = BISECT_BRACKET
    f_lo, f_hi = _boundary_lhs(lo, T), _boundary_lhs(hi, T)
    if f_lo >= 0:
        return lo if f_lo < BISECT_TOL else None
    if f_hi < 0:
        return None
    return float(bisect(_boundary_lhs, lo, hi, args=(T,), xtol=BISECT_TOL))


def period6_momenta(T):
    """Momenta in (0, pi) where the two Fibonacci blocks are traceless.

    Tr(M_0)/2 = cosh(2 lam) (1 - 2 sin(2T)**2 sin(k)**2) for every lam, so the
    condition is sin(k)**2 = 1 / (2 sin(2T)**2). Solutions exist exactly for
    T in [pi/8, 3pi/8] mod pi/2. There the trace map runs through the
    period-six cycle (0, 0, z) -> (0, z, 0) -> (z, 0, 0) -> (0, 0, -z) -> ...
    """
    s2 = abs(np.sin(2 * T))
    if 2 * s2 * s2 < 1 - 1e-15:
        return []
    s = 1 / (np.sqrt(2) * s2)
    if s > 1 - 1e-12:  # tangent case, single root
        return [float(np.pi / 2)]
    k = float(np.arcsin(s))
    return sorted({k, float(np.pi - k)})


def quasi_boundary_check(T, lam, grid):
    """True if some grid momentum of the Fibonacci circuit sits on a bounded orbit.

    That is V_k in (-1, 0), or the degenerate V_k = 0 surface with the seed
    triple inside the compact piece [-1, 1]**3.
    """
    k = grid.k
    V = invariant_Vk(T, lam, k)
    if np.any((V > -1) & (V < 0)):
        return True
    flat = np.abs(V) <= COMPACT_TOL
    if not flat.any():
        return False
    x, y, z = circuit_triple(T, lam, k[flat])
    inside = (np.abs(x) <= 1 + COMPACT_TOL) & (np.abs(y) <= 1 + COMPACT_TOL) & (np.abs(z) <= 1 + COMPACT_TOL)
    return bool(inside.any())


def arcsinh_boundary(T):
    """Largest measurement strength with SU(2)-similar dipole blocks at fixed T."""
    s = np.sin(2 * T)
    if abs(s) < 1e-15:
        raise DomainError("arcsinh boundary needs sin(2T) != 0")
    return 0.5 * np.arcsinh(np.cos(2 * T) ** 2 / s)


@dataclass
class Su2Report:
    conjugation_ok: bool
    traces_real: bool
    combined_trace_ok: bool
    S: np.ndarray | None = None
    unitarity_defect: float = float("nan")
    sigma: str | None = None

    def to_dict(self):
        d = {
            "conjugation_ok": bool(self.conjugation_ok),
            "traces_real": bool(self.traces_real),
            "combined_trace_ok": bool(self.combined_trace_ok),
            "sigma": self.sigma,
            "unitarity_defect": None if np.isnan(self.unitarity_defect) else float(self.unitarity_defect),
            "S": None,
        }
        if self.S is not None:
            d["S"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.S]
        return d


def _conjugation(m_plus, m_minus, tol=TRACE_TOL):
    """Name of the first Pauli sigma with M+ = sigma M-^* sigma, or None."""
    scale = max(1.0, float(frobenius(m_plus)))
    for name, s in PAULIS.items():
        if frobenius(m_plus - s @ np.conj(m_minus) @ s) <= tol * scale:
            return name
    return None


def _eigvecs_unit_det(m):
    """Eigenvector matrix of m with unit determinant."""
    tr = trace(m)
    if abs(tr * tr - 4) < 1e-10:
        if frobenius(m - np.sign(tr.real) * IDENTITY) < 1e-8:
            return IDENTITY.copy()
        raise DegenerateEigenvectors("M+ is parabolic and not diagonalizable")
    _, P = np.linalg.eig(m)
    return P / np.sqrt(np.linalg.det(P))


def _rebalanced(m_plus, sigma):
    """P, the normalized N = P^-1 sigma P^* and the rebalancing factor w."""
    s = PAULIS[sigma]
    P = _eigvecs_unit_det(m_plus)
    N = np.linalg.solve(P, s @ np.conj(P)) / np.sqrt(complex(np.linalg.det(s)))
    beta, gamma = N[0, 1], N[1, 0]
    if abs(beta) < 1e-14 and abs(gamma) < 1e-14:
        return P, N, 1.0
    w2 = -np.conj(beta) / gamma
    return P, N, float(np.sqrt(abs(w2)))


def su2_similarity(m_plus, m_minus, tol=TRACE_TOL):
    """Check whether M+ and M- are simultaneously similar to SU(2) matrices.

    Conditions: M+ = sigma M-^* sigma for some Pauli sigma (identity included),
    real traces of M+ and M-, and Tr(M+ M-) <= 2. When they all hold, returns
    S = P W^-1 with P the unit-determinant eigenvectors of M+ and W = diag(1, w)
    rebalancing the off-diagonal of P^-1 sigma P^*.
    """
    m_plus = np.asarray(m_plus, dtype=complex)
    m_minus = np.asarray(m_minus, dtype=complex)
    sigma = _conjugation(m_plus, m_minus, tol)
    traces = [trace(m_plus), trace(m_minus)]
    real = all(abs(t.imag) <= tol * max(1.0, abs(t)) for t in traces)
    tpm = trace(m_plus @ m_minus)
    combined = abs(tpm.imag) <= tol * max(1.0, abs(tpm)) and tpm.real <= 2 + tol
    report = Su2Report(sigma is not None, real, combined, sigma=sigma)
    if not (report.conjugation_ok and real and combined):
        return report
    P, _, w = _rebalanced(m_plus, sigma)
    S = P @ np.diag([1.0, 1.0 / w])
    S_inv = np.linalg.inv(S)
    defect = 0.0
    for m in (m_plus, m_minus):
        u = S_inv @ m @ S
        defect = max(defect, float(frobenius(u.conj().T @ u - IDENTITY)))
    report.S = S
    report.unitarity_defect = defect
    return report


def trace_identity_check(m_plus, m_minus, sigma=None):
    """Residual |Tr(M+ M-) - (2 + 4 v**2 beta gamma)| of the product-trace identity.

    beta and gamma are the off-diagonal entries of the normalized P^-1 sigma P^*
    and v**2 = 1 - (Tr M+ / 2)**2. For sigma_x, beta gamma equals
    (|a|**2 - |c|**2)(|b|**2 - |d|**2) in terms of the entries of P.
    """
    m_plus = np.asarray(m_plus, dtype=complex)
    m_minus = np.asarray(m_minus, dtype=complex)
    if sigma is None:
        sigma = _conjugation(m_plus, m_minus)
        if sigma is None:
            raise DomainError("M+ and M- are not related by a Pauli conjugation")
    _, N, _ = _rebalanced(m_plus, sigma)
    v2 = 1 - (trace(m_plus) / 2) ** 2
    predicted = 2 + 4 * v2 * N[0, 1] * N[1, 0]
    return float(abs(trace(m_plus @ m_minus) - predicted))


@dataclass
class PhaseDiagramGrid:
    T_values: np.ndarray
    lambda_values: np.ndarray
    cells: np.ndarray  # (len(T_values), len(lambda_values))
    boundary: np.ndarray = field(default=None)  # floquet_boundary_lambda per T (nan = none)
    quasi: np.ndarray | None = None  # Fibonacci bounded-orbit mask, same shape as cells

    def rows(self):
        """(T, lambda, value[, quasi]) rows in T-major order."""
        out = []
        for i, T in enumerate(self.T_values):
            for j, lam in enumerate(self.lambda_values):
                row = (float(T), float(lam), float(self.cells[i, j]))
                if self.quasi is not None:
                    row += (int(self.quasi[i, j]),)
                out.append(row)
        return out


def _boundary_or_nan(T):
    lc = floquet_boundary_lambda(T)
    return np.nan if lc is None else lc


def phase_diagram(kind, T_grid, lambda_grid, grid, n, gate_set="alternating", realizations=1, seed=0, threads=1):
    """Minimum over momenta of the per-gate Lyapunov exponent on a (T, lambda) grid.

    Cells are independent; rows are computed in a thread pool and assembled
    in grid order, so the result does not depend on ``threads``.
    """
    T_grid = np.asarray(T_grid, dtype=float)
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    if T_grid.size == 0 or lambda_grid.size == 0:
        raise DomainError("phase diagram grids must be nonempty")

    def row(T):
        return [float(np.min(lyapunov_over_k(T, lam, grid, kind, n, gate_set, realizations, seed)))
                for lam in lambda_grid]

    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        cells = np.array(list(pool.map(row, T_grid)))
    boundary = np.array([_boundary_or_nan(T) for T in T_grid])
    quasi = None
    if kind.name == "fibonacci":
        quasi = np.array([[quasi_boundary_check(T, lam, grid) for lam in lambda_grid] for T in T_grid])
    return PhaseDiagramGrid(T_grid, lambda_grid, cells, boundary, quasi)


def floquet_trace_matrix(T, lam, k):
    """Tr(M_0 M_1) from the block matrices (the closed form's matrix counterpart)."""
    m0, m1 = block_pair("alternating", T, lam, k)
    return trace(np.matmul(m0, m1))
