"""Numpy implementation of the Hamming-code kernels.

Used when the compiled extension :mod:`lpreps._kernels` is unavailable.
The greedy search marks the Hamming ball of radius ``M - 1`` around every
accepted word in a boolean table of all ``2**N`` words, then scans forward
for the next unmarked word.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def _popcount(values: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(values).astype(np.int64)
    v = values.astype(np.uint64, copy=True)
    count = np.zeros(v.shape, dtype=np.int64)
    while v.any():
        count += (v & np.uint64(1)).astype(np.int64)
        v >>= np.uint64(1)
    return count


def ball_masks(n: int, radius: int) -> np.ndarray:
    """All ``n``-bit masks of weight at most ``radius``."""
    words = np.arange(1 << n, dtype=np.uint64)
    return words[_popcount(words) <= radius]


def greedy_code(n: int, m: int, seeds: list[int]) -> list[int]:
    """Greedy code of block length ``n`` and minimum distance ``m``.

    Accepts ``seeds`` in order, then scans the remaining words in increasing
    order and accepts each word at distance at least ``m`` from all accepted
    words.  Seeds are assumed to be pairwise ``m`` apart.
    """
    size = 1 << n
    blocked = np.zeros(size, dtype=bool)
    masks = ball_masks(n, m - 1)
    words: list[int] = []

    def accept(word: int) -> None:
        words.append(word)
        blocked[masks ^ np.uint64(word)] = True

    for seed in seeds:
        accept(seed)
    position = 0
    while True:
        free = np.flatnonzero(~blocked[position:])
        if free.size == 0:
            break
        word = position + int(free[0])
        accept(word)
        position = word + 1
    return words


def min_pairwise_distance(words: list[int]) -> int:
    """Smallest Hamming distance between two distinct entries (``-1`` if fewer than two)."""
    if len(words) < 2:
        return -1
    arr = np.asarray(words, dtype=np.uint64)
    best = None
    for i in range(len(arr) - 1):
        d = int(_popcount(arr[i + 1:] ^ arr[i]).min())
        best = d if best is None else min(best, d)
    return best
