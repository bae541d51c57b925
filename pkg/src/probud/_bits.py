"""Bitmask helpers shared by the exact subset-enumeration routines."""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence


def mask_of(indices: Iterable[int]) -> int:
    """Encode a set of item indices as a bitmask."""
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class MaskWeights:
    """Total cost of item subsets encoded as bitmasks.

    Precomputes a full table when the universe is small enough; otherwise
    sums the set bits on every call.
    """

    def __init__(self, costs: Sequence[float], table_bits: int = 16):
        self._costs = tuple(costs)
        self._table: list[float] | None = None
        m = len(self._costs)
        if m <= table_bits:
            table = [0.0] * (1 << m)
            for mask in range(1, 1 << m):
                low = mask & -mask
                table[mask] = table[mask ^ low] + self._costs[low.bit_length() - 1]
            self._table = table

    def __call__(self, mask: int) -> float:
        if self._table is not None:
            return self._table[mask]
        return sum(self._costs[i] for i in bits(mask))
