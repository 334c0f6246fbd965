"""Temporal words over the two-letter alphabet {A, B}.

A word is a plain ``str``. Letters are written in operator order: the
leftmost letter is the block applied LAST, so the matrix of a word is the
left-to-right product of its letters' matrices. Time evolution therefore
walks a word from right to left.
"""

from dataclasses import dataclass

import numpy as np

_SWAP = str.maketrans("AB", "BA")


@dataclass(frozen=True)
class SequenceKind:
    """Which generator to use and its parameters.

    ``name`` is one of floquet, fibonacci, thue_morse, bernoulli, multipolar.
    ``order`` is only used by multipolar; ``period`` only by floquet.
    """

    name: str
    order: int = 2
    period: str = "AB"

    def word(self, n, seed=0):
        """Word for step count ``n`` (cycles, generator index or block count)."""
        if self.name == "floquet":
            return floquet_word(self.period, n)
        if self.name == "fibonacci":
            return fibonacci_word(n)
        if self.name == "thue_morse":
            return thue_morse_word(n)
        if self.name == "bernoulli":
            return bernoulli_word(n, seed)
        if self.name == "multipolar":
            return multipolar_word(self.order, n, seed)
        raise ValueError(f"unknown sequence kind {self.name!r}")

    @property
    def random(self):
        return self.name in ("bernoulli", "multipolar")


def floquet_word(period, cycles):
    return period * cycles


def fibonacci_length(n):
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def fibonacci_word(n):
    """W_0 = A, W_1 = B, W_n = W_{n-2} W_{n-1}."""
    if n < 0:
        raise ValueError("Fibonacci index must be >= 0")
    if n == 0:
        return "A"
    prev, cur = "A", "B"
    for _ in range(n - 1):
        prev, cur = cur, prev + cur
    return cur


def thue_morse_word(n):
    """W_1 = A and W_{n+1} = W_n with A -> AB, B -> BA; length 2**(n-1)."""
    if n < 1:
        raise ValueError("Thue-Morse index starts at 1")
    w = "A"
    for _ in range(n - 1):
        w = w + w.translate(_SWAP)
    return w


def realization_seed(master_seed, index):
    """Independent, reproducible seed for realization ``index`` of an ensemble."""
    return np.random.SeedSequence([int(master_seed), int(index)])


def _rng(seed):
    return np.random.default_rng(seed)


def bernoulli_word(length, seed):
    if length < 1:
        raise ValueError("word length must be >= 1")
    bits = _rng(seed).integers(0, 2, size=length)
    return "".join(np.where(bits == 0, "A", "B"))


def multipolar_word(order, num_blocks, seed):
    """Random concatenation of the two order-``order`` Thue-Morse blocks."""
    if order < 1:
        raise ValueError("multipolar order must be >= 1")
    block = thue_morse_word(order)
    blocks = (block, block.translate(_SWAP))
    bits = _rng(seed).integers(0, 2, size=num_blocks)
    return "".join(blocks[b] for b in bits)


def is_cube_free(word):
    n = len(word)
    for size in range(1, n // 3 + 1):
        for i in range(n - 3 * size + 1):
            u = word[i:i + size]
            if word[i + size:i + 2 * size] == u and word[i + 2 * size:i + 3 * size] == u:
                return False
    return True
