"""Deterministic pseudo-random number generation.

Every stochastic stage draws from its own xoshiro256** stream whose seed
is derived from the master seed and a stage name, so runs are reproducible
across platforms and stage order never shifts another stage's draws.
"""

from __future__ import annotations

import hashlib
import math

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state once; return (output, new_state)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK, state


def derive_seed(master_seed: int, stage: str) -> int:
    """Derive a stage seed: first 8 bytes (big-endian) of sha256("{master}:{stage}")."""
    digest = hashlib.sha256(f"{master_seed}:{stage}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256(object):
    """xoshiro256** generator with splitmix64 seed expansion.

    The four-word state is filled by four successive splitmix64 outputs of
    the integer seed. All derived draws (uniform doubles, bounded integers,
    shuffles, normals) are defined in terms of next_u64 so that any
    implementation of the same algorithm reproduces them bit for bit.
    """

    def __init__(self, seed: int) -> None:
        state = seed & _MASK
        s = []
        for _ in range(4):
            out, state = splitmix64(state)
            s.append(out)
        self._s = s

    @classmethod
    def from_state(cls, state: list[int]) -> "Xoshiro256":
        """Build a generator from an explicit four-word state (for tests)."""
        if len(state) != 4:
            raise ValueError("state must have exactly 4 words")
        gen = cls.__new__(cls)
        gen._s = [w & _MASK for w in state]
        return gen

    @property
    def state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """Uniform double in [0, 1): top 53 bits of the next output."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle (descending index order)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def normal(self) -> float:
        """Standard normal via Box-Muller (cosine branch)."""
        u1 = self.uniform()
        while u1 <= 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
