"""Dense element sets over a fixed ground set.

Element ids are plain non-negative integers indexing the base instance's
ground set.  Sets are stored as arbitrary-precision bitmasks, which keeps
union/difference/intersection at machine speed for the sizes this library
targets and makes sets hashable so recovered parts can be deduplicated by
value.  Views never re-index, so ids stay stable across peeling.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np


class ElementSet:
    """Immutable set of element ids backed by a bitmask."""

    __slots__ = ("_mask", "_count")

    def __init__(self, mask: int = 0):
        if mask < 0:
            raise ValueError("mask must be non-negative")
        self._mask = mask
        self._count = -1

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "ElementSet":
        mask = 0
        for i in indices:
            mask |= 1 << int(i)
        return cls(mask)

    @classmethod
    def full(cls, n: int) -> "ElementSet":
        return cls((1 << n) - 1)

    @property
    def mask(self) -> int:
        return self._mask

    def __len__(self) -> int:
        if self._count < 0:
            self._count = self._mask.bit_count()
        return self._count

    def __bool__(self) -> bool:
        return self._mask != 0

    def __contains__(self, i: int) -> bool:
        return (self._mask >> int(i)) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        m = self._mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __eq__(self, other) -> bool:
        return isinstance(other, ElementSet) and self._mask == other._mask

    def __hash__(self) -> int:
        return hash(self._mask)

    def __or__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self._mask | other._mask)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self._mask & other._mask)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self._mask & ~other._mask)

    def add(self, i: int) -> "ElementSet":
        return ElementSet(self._mask | (1 << int(i)))

    def remove(self, i: int) -> "ElementSet":
        return ElementSet(self._mask & ~(1 << int(i)))

    def issubset(self, other: "ElementSet") -> bool:
        return self._mask & ~other._mask == 0

    def isdisjoint(self, other: "ElementSet") -> bool:
        return self._mask & other._mask == 0

    def lowest(self, k: int) -> "ElementSet":
        """The k smallest ids of this set (all of them if k >= len)."""
        mask = 0
        m = self._mask
        while m and k > 0:
            low = m & -m
            mask |= low
            m ^= low
            k -= 1
        return ElementSet(mask)

    def indices(self) -> np.ndarray:
        """Members as an ascending int32 array."""
        if self._mask == 0:
            return np.empty(0, dtype=np.int32)
        nbytes = (self._mask.bit_length() + 7) // 8
        raw = np.frombuffer(self._mask.to_bytes(nbytes, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        return np.nonzero(bits)[0].astype(np.int32)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ElementSet":
        if len(arr) == 0:
            return cls(0)
        arr = np.asarray(arr, dtype=np.int64)
        size = int(arr.max()) + 1
        bits = np.zeros(size, dtype=np.uint8)
        bits[arr] = 1
        mask = int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")
        return cls(mask)

    def __repr__(self) -> str:
        ids = list(self)
        if len(ids) > 12:
            shown = ", ".join(map(str, ids[:12]))
            return f"ElementSet({{{shown}, ...}} size={len(ids)})"
        return f"ElementSet({{{', '.join(map(str, ids))}}})"


EMPTY = ElementSet(0)
