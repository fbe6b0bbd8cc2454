"""Deterministic index schemes for direct sums of multilinear Hom spaces."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from math import prod
from typing import Hashable, Iterator, Sequence

import numpy as np

from .field import ContractError


def tensor_hom_dims(input_dims: Sequence[int], output_dim: int) -> int:
    """Dimension of ``Hom(V_1 ⊗ ... ⊗ V_n, W)``."""
    return prod(input_dims) * output_dim


@dataclass(frozen=True)
class Block:
    key: tuple
    shape: tuple[int, ...]
    offset: int

    @property
    def size(self) -> int:
        return prod(self.shape)


class IndexScheme:
    """Bijection between labels ``key + (positions,)`` and ``range(len(self))``.

    Blocks are sorted by key and each block is flattened in C order, so the
    global order is lexicographic on the full label tuple.
    """

    def __init__(self, blocks: dict[tuple, tuple[int, ...]]):
        offset = 0
        self.blocks: list[Block] = []
        self._by_key: dict[Hashable, Block] = {}
        for key in sorted(blocks):
            shape = tuple(int(d) for d in blocks[key])
            b = Block(key, shape, offset)
            if b.size == 0:
                continue
            self.blocks.append(b)
            self._by_key[key] = b
            offset += b.size
        self._starts = [b.offset for b in self.blocks]
        self.size = offset

    def __len__(self) -> int:
        return self.size

    def __contains__(self, key) -> bool:
        return key in self._by_key

    def block(self, key) -> Block:
        return self._by_key[key]

    def keys(self) -> list[tuple]:
        return [b.key for b in self.blocks]

    def index(self, label: tuple) -> int:
        *key, pos = label
        key = tuple(key)
        b = self._by_key.get(key)
        if b is None:
            raise ContractError(f"unknown label block {key!r}")
        if len(pos) != len(b.shape) or any(not 0 <= p < d for p, d in zip(pos, b.shape)):
            raise ContractError(f"position {pos!r} outside block of shape {b.shape}")
        return b.offset + int(np.ravel_multi_index(tuple(pos), b.shape))

    def label(self, idx: int) -> tuple:
        if not 0 <= idx < self.size:
            raise ContractError(f"index {idx} outside [0, {self.size})")
        b = self.blocks[bisect.bisect_right(self._starts, idx) - 1]
        pos = tuple(int(p) for p in np.unravel_index(idx - b.offset, b.shape))
        return b.key + (pos,)

    def labels(self) -> Iterator[tuple]:
        for i in range(self.size):
            yield self.label(i)
