"""Shared and local randomness.

Both parties must derive identical position sets without communicating,
so the shared generator is a stateless counter-based construction: a
SplitMix64-style finalizer keyed by (seed, step, draw index).  The exact
mixing constants and the subset-sampling consumption order are pinned
here; any reimplementation that matches them reproduces the streams
bit for bit.

The shared generator is NOT claimed to be cryptographically strong; the
seed is assumed to have been exchanged out of band.
"""

from __future__ import annotations

import random
import secrets
from dataclasses import dataclass

from bitpact.bitstring import PositionSet

_MASK64 = (1 << 64) - 1

# SplitMix64 finalizer constants (Steele/Lea/Flood mix13).
_MIX_GAMMA = 0x9E3779B97F4A7C15
_MIX_M1 = 0xBF58476D1CE4E5B9
_MIX_M2 = 0x94D049BB133111EB

# Domain-separation salts for the step and draw counters.
_STEP_SALT = 0xA0761D6478BD642F
_DRAW_SALT = 0xE7037ED1A0B428DB


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijective mixing function."""
    z = (z + _MIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX_M1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_M2) & _MASK64
    return z ^ (z >> 31)


def shared_word(seed: int, step: int, draw: int) -> int:
    """The draw-th 64-bit word of the shared stream for a protocol step."""
    z = seed & _MASK64
    z ^= mix64(((step + 1) * _STEP_SALT) & _MASK64)
    z ^= mix64(((draw + 1) * _DRAW_SALT) & _MASK64)
    return mix64(z)


def derive_seed(seed: int, tag: int) -> int:
    """Deterministic sub-seed for an auxiliary stream (dealer, MPC masks,
    Monte Carlo trials)."""
    return mix64((seed & _MASK64) ^ mix64(tag & _MASK64))


@dataclass(frozen=True)
class SharedSeed:
    """The 64-bit seed both parties hold; round_counter offsets the step
    keying so a seed can be reused across sessions."""

    value: int
    round_counter: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.value <= _MASK64:
            raise ValueError("seed must fit in 64 bits")
        if self.round_counter < 0:
            raise ValueError("round_counter must be nonnegative")


class _SharedStream:
    """Word stream for one (seed, step), with rejection sampling."""

    def __init__(self, seed: SharedSeed, step: int):
        self._seed = seed.value
        self._step = step + seed.round_counter
        self._draw = 0

    def next_word(self) -> int:
        w = shared_word(self._seed, self._step, self._draw)
        self._draw += 1
        return w

    def next_below(self, bound: int) -> int:
        # Classic rejection below the largest multiple of bound.
        limit = _MASK64 + 1 - ((_MASK64 + 1) % bound)
        while True:
            w = self.next_word()
            if w < limit:
                return w % bound


def joint_rand(seed: SharedSeed, step: int, k: int, n: int) -> PositionSet:
    """Uniform k-subset of [0, n), identical at both parties for equal
    (seed, step, k, n).

    Sampling is a sparse partial Fisher-Yates shuffle: for i = 0..k-1
    draw j uniform in [i, n) and swap slots i and j of the virtual
    identity array.  Output is sorted ascending.
    """
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    stream = _SharedStream(seed, step)
    displaced: dict[int, int] = {}
    picked = []
    for i in range(k):
        j = i + stream.next_below(n - i) if i < n - 1 else i
        picked.append(displaced.get(j, j))
        displaced[j] = displaced.get(i, i)
    picked.sort()
    return PositionSet(tuple(picked), n)


class LocalRng:
    """A party's private randomness; seedable for reproducible tests,
    entropy-seeded otherwise.  Single-owner: not thread-safe."""

    def __init__(self, seed: int | None = None):
        if seed is None:
            seed = secrets.randbits(64)
        self.seed = seed
        self._rng = random.Random(seed)

    @classmethod
    def seeded(cls, seed: int) -> "LocalRng":
        return cls(seed)

    def getrandbits(self, n: int) -> int:
        return self._rng.getrandbits(n) if n > 0 else 0

    def randrange(self, bound: int) -> int:
        return self._rng.randrange(bound)

    def sample(self, population, k: int):
        return self._rng.sample(population, k)


def rand_subset(rng: LocalRng, l: int, s: PositionSet) -> PositionSet:
    """Uniform l-subset of s, drawn from the caller's private randomness."""
    if l > len(s):
        raise ValueError(f"l={l} exceeds |s|={len(s)}")
    if l < 1:
        raise ValueError("l must be >= 1")
    pool = list(s.indices)
    for i in range(l):
        j = i + rng.randrange(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    return PositionSet(tuple(sorted(pool[:l])), s.universe)


def random_bits(rng: LocalRng, count: int) -> list[int]:
    """count independent uniform bits (MPC masking material)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    word = rng.getrandbits(count)
    return [(word >> i) & 1 for i in range(count)]
