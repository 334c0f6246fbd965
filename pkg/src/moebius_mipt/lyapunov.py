"""Lyapunov exponents of SL(2,C) products, per elementary gate."""

from dataclasses import dataclass

import numpy as np

from .gates import block_pair
from .mobius import frobenius
from .sequences import SequenceKind, fibonacci_length, realization_seed
from .trace_maps import circuit_triple

GATES_PER_BLOCK = 3


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    stderr: float
    n_gates: int


def word_indices(word):
    """Letters in time order (right to left) as 0 for A and 1 for B."""
    codes = np.frombuffer(word.encode("ascii"), dtype=np.uint8)[::-1]
    return (codes == ord("B")).astype(np.intp)


def log_norm_growth(indices, mats, checkpoints=None):
    """Accumulate Frobenius log-norms of products taken in time order.

    ``indices`` has shape (R, N): letter index per realization and time step.
    ``mats`` has shape (2, ..., 2, 2): the A and B matrices, optionally a
    stack over momenta. Returns log||Pi_N|| of shape (R, ...), or an array
    (len(checkpoints), R, ...) of log||Pi_n|| at the requested step counts.
    """
    indices = np.atleast_2d(indices)
    mats = np.asarray(mats, dtype=complex)
    n_real, n_steps = indices.shape
    batch = mats.shape[1:-2]
    prod = np.broadcast_to(np.eye(2, dtype=complex), (n_real,) + batch + (2, 2)).copy()
    logs = np.zeros((n_real,) + batch)
    wanted = set() if checkpoints is None else {int(c) for c in checkpoints}
    snaps = {}
    for step in range(n_steps):
        m = mats[indices[:, step]]
        prod = np.matmul(m, prod)
        nrm = frobenius(prod)
        prod /= nrm[..., None, None]
        logs += np.log(nrm)
        if step + 1 in wanted:
            snaps[step + 1] = logs.copy()
    if checkpoints is None:
        return logs
    return np.stack([snaps[int(c)] for c in checkpoints])


def reduced_lengths(indices, checkpoints):
    """Length of the alternating word left after cancelling squares, at checkpoints.

    With M_A**2 = M_B**2 = -I a product reduces to +-(alternating word); its
    length takes a +-1 step per letter (reflected at zero). Returns
    (lengths, last_letter), each of shape (len(checkpoints), R).
    """
    indices = np.atleast_2d(indices)
    n_real, n_steps = indices.shape
    length = np.zeros(n_real, dtype=np.int64)
    last = np.full(n_real, -1)
    wanted = {int(c) for c in checkpoints}
    lens, lasts = {}, {}
    for step in range(n_steps):
        c = indices[:, step]
        cancel = (length > 0) & (c == last)
        length = np.where(cancel, length - 1, length + 1)
        # after a cancellation the newest surviving letter is the other one
        last = np.where(cancel, 1 - c, c)
        last = np.where(length == 0, -1, last)
        if step + 1 in wanted:
            lens[step + 1], lasts[step + 1] = length.copy(), last.copy()
    return (np.stack([lens[int(c)] for c in checkpoints]),
            np.stack([lasts[int(c)] for c in checkpoints]))


def log_norm_traceless(indices, mats, checkpoints, tol=1e-9):
    """log||Pi_n|| for traceless det-1 letters, using M**2 = -I exactly.

    Plain floating-point products lose these cancellations once the norm
    exceeds ~1e8, after which rounding noise grows like a generic random
    product. Here the word is reduced first and only the alternating
    remainder (a power of M_A M_B, possibly times one letter) is multiplied.
    """
    mats = np.asarray(mats, dtype=complex)
    if np.any(np.abs(np.trace(mats, axis1=-2, axis2=-1)) > tol):
        raise ValueError("log_norm_traceless needs traceless letters")
    lens, lasts = reduced_lengths(indices, checkpoints)
    # alternating word of length m ending (latest) in letter e: pairs of
    # (M_e M_o) then possibly one extra M_e at the earliest end
    out = np.zeros(lens.shape)
    cache = {}
    for pos in np.ndindex(lens.shape):
        m, e = int(lens[pos]), int(lasts[pos])
        if m == 0:
            out[pos] = np.log(np.sqrt(2.0))
            continue
        key = (m, e)
        if key not in cache:
            o = 1 - e
            pair = mats[e] @ mats[o]
            prod = np.linalg.matrix_power(pair, m // 2) if m >= 2 else np.eye(2, dtype=complex)
            if m % 2:
                prod = prod @ mats[e] if m >= 2 else mats[e]
            cache[key] = np.log(np.linalg.norm(prod))
        out[pos] = cache[key]
    return out


def lyapunov_product(word, mats, gates_per_block=GATES_PER_BLOCK, n_blocks=None):
    """Per-gate exponent (1/N) log||product|| over the first ``n_blocks`` blocks.

    ``mats`` is the pair (A, B), each a matrix or a stack over momenta; the
    result is a float or an array over momenta accordingly.
    """
    if n_blocks is not None:
        if len(word) < n_blocks:
            raise ValueError("word is shorter than the requested number of blocks")
        word = word[len(word) - n_blocks:]  # earliest blocks sit at the right end
    idx = word_indices(word)
    out = log_norm_growth(idx[None, :], np.stack(mats))[0] / (len(word) * gates_per_block)
    return float(out) if np.ndim(out) == 0 else out


def lyapunov_from_trace(trace, p):
    """(1/p) log of the spectral radius of a det-1 matrix with the given trace.

    For real traces this is zero when |Tr| <= 2, else
    (1/p) log((|Tr| + sqrt(Tr**2 - 4)) / 2).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    tr = np.asarray(trace, dtype=complex)
    disc = np.sqrt(tr * tr - 4)
    rad = np.maximum(np.abs(tr + disc), np.abs(tr - disc)) / 2
    out = np.log(np.maximum(rad, 1.0)) / p
    return float(out) if out.ndim == 0 else out


_LOG2 = np.log(2.0)


def fibonacci_log_trace(t0, n):
    """log|x_n| of the Fibonacci half-trace orbit starting at t0 = (x0, x1, x2).

    Orbits that outgrow double range continue on the recursion
    log|x_{m+1}| = log 2 + log|x_m| + log|x_{m-1}|, whose neglected term is
    x_{m-2} / (x_m x_{m-1}). Returns (log|x_n|, x_n) with x_n = nan where only
    the log is known.
    """
    x, y, z = (np.atleast_1d(np.asarray(c, dtype=float)).copy() for c in t0)
    with np.errstate(divide="ignore"):
        if n <= 2:
            val = (x, y, z)[n]
            return np.log(np.abs(val)), val
        ly = np.zeros(x.shape)
        lz = np.zeros(x.shape)
        in_log = np.zeros(x.shape, dtype=bool)
        for _ in range(n - 2):
            ay, az = np.abs(y), np.abs(z)
            switch = ~in_log & (np.maximum(ay, az) > 1e100) & (np.minimum(ay, az) > 1e10)
            ly = np.where(switch, np.log(ay), ly)
            lz = np.where(switch, np.log(az), lz)
            in_log |= switch
            ly, lz = lz, np.where(in_log, _LOG2 + ly + lz, 0.0)
            live = ~in_log
            nz = np.where(live, 2 * y * z - x, 0.0)
            x, y, z = y, z, nz
        lx = np.where(in_log, lz, np.log(np.abs(z)))
    return lx, np.where(in_log, np.nan, z)


def lyapunov_fibonacci(T, lam, k, n, gates_per_block=GATES_PER_BLOCK):
    """Per-gate exponent of the F_n-block periodic approximant, via the trace map."""
    if n < 2:
        raise ValueError("Fibonacci index must be >= 2")
    scalar = np.ndim(k) == 0
    t0 = circuit_triple(T, lam, np.atleast_1d(k))
    lx, x = fibonacci_log_trace(t0, n)
    big = np.isnan(x)
    ax = np.abs(np.where(big, 0.0, x))
    # log of the larger eigenvalue modulus, log(|x| + sqrt(x**2 - 1))
    growth = np.where(big, _LOG2 + lx, np.arccosh(np.maximum(ax, 1.0)))
    out = growth / (gates_per_block * fibonacci_length(n))
    return float(out[0]) if scalar else out


def lyapunov_ensemble(kind, blocks, n, realizations, master_seed=0,
                      gates_per_block=GATES_PER_BLOCK):
    """Mean and standard error of per-realization exponents over seeded words."""
    if realizations < 1:
        raise ValueError("need at least one realization")
    words = [kind.word(n, realization_seed(master_seed, r)) for r in range(realizations)]
    idx = np.stack([word_indices(w) for w in words])
    logs = log_norm_growth(idx, np.stack(blocks))
    vals = logs / (idx.shape[1] * gates_per_block)
    mean = vals.mean(axis=0)
    err = vals.std(axis=0, ddof=1) / np.sqrt(realizations) if realizations > 1 else np.zeros_like(mean)
    if np.ndim(mean) == 0:
        return LyapunovEstimate(float(mean), float(err), idx.shape[1] * gates_per_block)
    return LyapunovEstimate(mean, err, idx.shape[1] * gates_per_block)


def lyapunov_over_k(T, lam, grid, kind, n, gate_set="alternating", realizations=1, seed=0):
    """Per-momentum exponent array with the estimator suited to ``kind``."""
    k = grid.k
    if kind.name == "fibonacci":
        return lyapunov_fibonacci(T, lam, k, n)
    mats = block_pair(gate_set, T, lam, k)
    if kind.random:
        return lyapunov_ensemble(kind, mats, n, realizations, seed).value
    return lyapunov_product(kind.word(n), mats)


def min_lyapunov_over_k(T, lam, grid, kind, n, gate_set="alternating", realizations=1, seed=0):
    return float(np.min(lyapunov_over_k(T, lam, grid, kind, n, gate_set, realizations, seed)))


FLOQUET = SequenceKind("floquet")
FIBONACCI = SequenceKind("fibonacci")
