"""Increasing multi-indices over m Grassmann generators and their sign calculus.

A multi-index is stored as a bitmask: index ``a`` (1-based) occupies bit ``a - 1``.
Every sign below comes from counting adjacent transpositions, never from a table.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DomainError


@dataclass(frozen=True, order=False)
class MultiIndex:
    mask: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"ghost count must be positive, got {self.m}")
        if self.mask < 0 or self.mask >> self.m:
            raise DomainError(f"mask {self.mask:#b} has bits beyond m={self.m}")

    @classmethod
    def of(cls, indices: Iterable[int], m: int) -> "MultiIndex":
        """Build from an already increasing sequence of 1-based indices."""
        idx = tuple(indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DomainError(f"{idx} is not strictly increasing")
        mask = 0
        for a in idx:
            if not 1 <= a <= m:
                raise DomainError(f"index {a} outside 1..{m}")
            mask |= 1 << (a - 1)
        return cls(mask, m)

    @classmethod
    def empty(cls, m: int) -> "MultiIndex":
        return cls(0, m)

    @classmethod
    def full(cls, m: int) -> "MultiIndex":
        return cls((1 << m) - 1, m)

    @property
    def indices(self) -> tuple[int, ...]:
        return _indices(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, a: int) -> bool:
        return bool(self.mask >> (a - 1) & 1) if a >= 1 else False

    def __iter__(self):
        return iter(self.indices)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return len(self), self.indices

    def without(self, a: int) -> "MultiIndex":
        return MultiIndex(self.mask & ~(1 << (a - 1)), self.m)

    def count_below(self, a: int) -> int:
        """Number of entries strictly smaller than ``a``."""
        return (self.mask & ((1 << (a - 1)) - 1)).bit_count()

    def __repr__(self) -> str:
        return f"MultiIndex({self.indices}, m={self.m})"


@lru_cache(maxsize=None)
def _indices(mask: int) -> tuple[int, ...]:
    out = []
    a = 1
    while mask:
        if mask & 1:
            out.append(a)
        mask >>= 1
        a += 1
    return tuple(out)


def normalize(raw: Sequence[int], m: int) -> tuple[MultiIndex, int]:
    """Sort a product of generators ``g_{raw[0]} g_{raw[1]} ...`` into increasing order.

    Returns the sorted multi-index and the sign picked up by the permutation,
    or ``(empty, 0)`` when an index repeats.
    """
    for a in raw:
        if not 1 <= a <= m:
            raise DomainError(f"index {a} outside 1..{m}")
    if len(set(raw)) != len(raw):
        return MultiIndex.empty(m), 0
    inversions = sum(1 for i, j in combinations(range(len(raw)), 2) if raw[i] > raw[j])
    return MultiIndex.of(sorted(raw), m), -1 if inversions % 2 else 1


def merge_sign(left: MultiIndex, right: MultiIndex) -> tuple[MultiIndex, int]:
    """Product ``eta^left eta^right`` as ``sign * eta^(left | right)``."""
    if left.m != right.m:
        raise DomainError("multi-indices over different ghost counts")
    if left.mask & right.mask:
        return MultiIndex.empty(left.m), 0
    # each pair (i in left, j in right) with i > j is one transposition
    inversions = sum((left.mask >> j).bit_count() for j in right.indices)
    return MultiIndex(left.mask | right.mask, left.m), -1 if inversions % 2 else 1


def reversal_sign(index: MultiIndex) -> int:
    r = len(index)
    return -1 if (r * (r - 1) // 2) % 2 else 1


def complement(index: MultiIndex) -> MultiIndex:
    return MultiIndex(((1 << index.m) - 1) & ~index.mask, index.m)


@lru_cache(maxsize=None)
def all_multi_indices(m: int) -> tuple[MultiIndex, ...]:
    """Every increasing multi-index over 1..m, ordered by (length, lexicographic)."""
    out = []
    for r in range(m + 1):
        for combo in combinations(range(1, m + 1), r):
            out.append(MultiIndex.of(combo, m))
    return tuple(out)
