"""Fixed-size tile membership sets backed by a Python integer bitmask."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True, slots=True)
class TileSet:
    """A subset of the tiles ``0..m-1`` of one segment.

    Bit ``i`` of ``bits`` is set when tile ``i`` belongs to the set. Sets of
    different sizes ``m`` never compare equal and cannot be combined.
    """

    m: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"tile count must be >= 1, got {self.m}")
        if self.bits < 0 or self.bits >> self.m:
            raise ValueError(f"bits outside 0..{self.m - 1}")

    @classmethod
    def from_indices(cls, m: int, indices: Iterable[int]) -> TileSet:
        bits = 0
        for i in indices:
            i = int(i)
            if not 0 <= i < m:
                raise ValueError(f"tile index {i} out of range 0..{m - 1}")
            bits |= 1 << i
        return cls(m, bits)

    @classmethod
    def from_mask(cls, mask) -> TileSet:
        mask = np.asarray(mask, dtype=bool)
        return cls.from_indices(mask.size, np.flatnonzero(mask))

    @classmethod
    def full(cls, m: int) -> TileSet:
        return cls(m, (1 << m) - 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, index: object) -> bool:
        if not isinstance(index, (int, np.integer)) or not 0 <= index < self.m:
            return False
        return bool(self.bits >> int(index) & 1)

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __repr__(self) -> str:
        return f"TileSet(m={self.m}, {sorted(self)})"

    def _check(self, other: TileSet) -> None:
        if not isinstance(other, TileSet):
            raise TypeError(f"expected TileSet, got {type(other).__name__}")
        if other.m != self.m:
            raise ValueError(f"tile counts differ: {self.m} != {other.m}")

    def __and__(self, other: TileSet) -> TileSet:
        self._check(other)
        return TileSet(self.m, self.bits & other.bits)

    def __or__(self, other: TileSet) -> TileSet:
        self._check(other)
        return TileSet(self.m, self.bits | other.bits)

    def __sub__(self, other: TileSet) -> TileSet:
        self._check(other)
        return TileSet(self.m, self.bits & ~other.bits)

    def complement(self) -> TileSet:
        return TileSet(self.m, ((1 << self.m) - 1) & ~self.bits)

    def issubset(self, other: TileSet) -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def issuperset(self, other: TileSet) -> bool:
        return other.issubset(self)

    def overlap(self, other: TileSet) -> int:
        """Inner product of the two indicator vectors."""
        self._check(other)
        return (self.bits & other.bits).bit_count()

    def indices(self) -> np.ndarray:
        return np.fromiter(self, dtype=np.int64, count=len(self))

    def to_mask(self) -> np.ndarray:
        mask = np.zeros(self.m, dtype=bool)
        mask[self.indices()] = True
        return mask
