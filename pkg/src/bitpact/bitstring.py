"""Packed bit-string values and the position sets that index into them.

A :class:`BitString` is immutable; flipping returns a new value.  All
indexing is 0-based.  The ASCII rendering puts index 0 leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class BitString:
    """An n-bit string packed into a Python int (bit i of ``value`` is
    position i of the string)."""

    value: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError("value does not fit in length bits")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitString":
        value = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
            value |= b << i
        return cls(value, len(bits))

    @classmethod
    def from_string(cls, text: str) -> "BitString":
        """Parse an ASCII '0'/'1' string, index 0 leftmost."""
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_bits([int(ch) for ch in text])

    @classmethod
    def random(cls, n: int, rng) -> "BitString":
        return cls(rng.getrandbits(n), n)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __len__(self) -> int:
        return self.length

    def bits(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.length)]

    def __str__(self) -> str:
        return "".join("1" if (self.value >> i) & 1 else "0" for i in range(self.length))


@dataclass(frozen=True)
class PositionSet:
    """A strictly increasing tuple of distinct indices into [0, universe)."""

    indices: tuple[int, ...]
    universe: int

    def __post_init__(self) -> None:
        if self.universe < 1:
            raise ValueError("universe must be >= 1")
        prev = -1
        for i in self.indices:
            if i <= prev:
                raise ValueError("indices must be strictly increasing and distinct")
            prev = i
        if self.indices and not (0 <= self.indices[0] and self.indices[-1] < self.universe):
            raise ValueError("index out of universe range")

    @classmethod
    def from_iterable(cls, indices: Iterable[int], universe: int) -> "PositionSet":
        return cls(tuple(sorted(set(indices))), universe)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self.indices

    @property
    def mask(self) -> int:
        m = 0
        for i in self.indices:
            m |= 1 << i
        return m


def agreement_count(a: BitString, b: BitString) -> int:
    """Number of positions at which a and b hold the same bit."""
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} != {b.length}")
    return a.length - (a.value ^ b.value).bit_count()


def hamming_distance(a: BitString, b: BitString) -> int:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} != {b.length}")
    return (a.value ^ b.value).bit_count()


def restrict(a: BitString, s: PositionSet) -> BitString:
    """The |s|-bit substring of a at s's indices, in increasing index order."""
    if s.universe != a.length:
        raise ValueError(f"position universe {s.universe} != string length {a.length}")
    if not s.indices:
        raise ValueError("cannot restrict to an empty position set")
    value = 0
    for out, i in enumerate(s.indices):
        value |= ((a.value >> i) & 1) << out
    return BitString(value, len(s.indices))


def flip_positions(a: BitString, s: PositionSet) -> BitString:
    """Invert a's bits at s's indices; an involution."""
    if s.universe != a.length:
        raise ValueError(f"position universe {s.universe} != string length {a.length}")
    return BitString(a.value ^ s.mask, a.length)


def make_pair_with_agreement(n: int, x0_count: int, rng) -> tuple[BitString, BitString]:
    """Two random n-bit strings agreeing at exactly x0_count uniformly
    chosen positions.  Experiment setup helper."""
    if not 0 <= x0_count <= n:
        raise ValueError(f"x0_count {x0_count} out of [0, {n}]")
    a = BitString.random(n, rng)
    disagree = rng.sample(range(n), n - x0_count)
    mask = 0
    for i in disagree:
        mask |= 1 << i
    return a, BitString(a.value ^ mask, n)
