"""Run configuration and the mode-evolution driver shared by the CLI and experiments."""

from dataclasses import asdict, dataclass, field

import numpy as np

from .entanglement import ModeAmplitudes, _from_homogeneous, evolve_homogeneous
from .errors import ConfigError
from .gates import GATE_SETS, block_pair
from .lyapunov import word_indices
from .mobius import MomentumGrid
from .sequences import SequenceKind, realization_seed

SEQUENCES = ("floquet", "fibonacci", "thue_morse", "bernoulli", "multipolar")


@dataclass
class CircuitSpec:
    """All parameters of one run.

    ``n`` is the number of Floquet cycles, the Fibonacci or Thue-Morse index,
    or the number of random blocks (multipolar: number of order-``order``
    blocks, so n dipoles for order 2).
    """

    gate_set: str = "alternating"
    sequence: SequenceKind = field(default_factory=lambda: SequenceKind("floquet"))
    T: float = np.pi / 8
    lam: float = 0.5
    L: int = 1000
    n: int = 100
    ells: list | None = None
    seed: int = 0
    realizations: int = 1

    def __post_init__(self):
        if isinstance(self.sequence, str):
            self.sequence = SequenceKind(self.sequence)
        self.validate()

    def validate(self):
        if self.gate_set not in GATE_SETS:
            raise ConfigError("gate_set", f"unknown gate set {self.gate_set!r}; choose from {sorted(GATE_SETS)}")
        if self.sequence.name not in SEQUENCES:
            raise ConfigError("sequence", f"unknown sequence {self.sequence.name!r}; choose from {list(SEQUENCES)}")
        if self.sequence.order < 1:
            raise ConfigError("order", "multipolar order must be >= 1")
        if set(self.sequence.period) - {"A", "B"} or not self.sequence.period:
            raise ConfigError("period", "Floquet period must be a nonempty word over A, B")
        for name in ("T", "lam"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(name, "must be finite")
        if int(self.L) != self.L or self.L < 2 or self.L % 2:
            raise ConfigError("L", f"must be an even integer >= 2, got {self.L}")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError("n", f"must be a positive integer, got {self.n}")
        if self.realizations < 1:
            raise ConfigError("realizations", "must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        if self.ells is not None and len(self.ells):
            ells = np.asarray(self.ells)
            if np.any(ells < 1):
                raise ConfigError("ells", "subsystem sizes must be >= 1")
            if 2 * ells.max() > self.L:
                raise ConfigError("ells", f"2 * max(ell) = {2 * ells.max()} exceeds L = {self.L}")

    @property
    def grid(self):
        return MomentumGrid(self.L)

    def words(self):
        """One word per realization (a single word for deterministic sequences)."""
        if not self.sequence.random:
            return [self.sequence.word(self.n)]
        return [self.sequence.word(self.n, realization_seed(self.seed, r)) for r in range(self.realizations)]

    def to_dict(self):
        d = asdict(self)
        d["sequence"] = asdict(self.sequence)
        d["ells"] = None if self.ells is None else [int(e) for e in self.ells]
        return d


def run_modes(spec, n=None, chunk=32):
    """Yield the evolved ModeAmplitudes of each realization, starting from f = 0.

    Realizations of equal word length are evolved together, ``chunk`` at a time.
    """
    if n is not None and n != spec.n:
        spec = CircuitSpec(**{**spec.to_dict(), "sequence": spec.sequence, "n": n})
    grid = spec.grid
    mats = np.stack(block_pair(spec.gate_set, spec.T, spec.lam, grid.k))
    words = spec.words()
    for start in range(0, len(words), chunk):
        batch = words[start:start + chunk]
        idx = np.stack([word_indices(w) for w in batch])
        u, v = evolve_homogeneous(idx, mats, np.zeros(len(grid), complex), np.ones(len(grid), complex))
        for r in range(len(batch)):
            yield ModeAmplitudes(grid, _from_homogeneous(u[r], v[r]))
