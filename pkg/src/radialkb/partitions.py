"""Enumeration of contiguous alphabetical letter layouts.

A layout with k groups is determined by k-1 cut positions among the 25 gaps
between adjacent letters, so there are C(25, k-1) layouts for each k.  All
iteration is in lexicographic cut order, which gives every layout a stable
enumeration index usable for range splitting, checkpointing, and tie
breaking.
"""

from __future__ import annotations

from itertools import combinations, islice
from math import comb
from typing import Iterator

from .geometry import ALPHABET, LetterLayout

N_GAPS = len(ALPHABET) - 1  # cut positions 1..25


def layout_count(k: int) -> int:
    """Number of contiguous partitions of the alphabet into k groups."""
    if not 1 <= k <= 26:
        raise ValueError(f"group count must be in [1, 26], got {k}")
    return comb(N_GAPS, k - 1)


def total_layout_count(k_min: int, k_max: int) -> int:
    if k_min > k_max:
        raise ValueError(f"empty range [{k_min}, {k_max}]")
    return sum(layout_count(k) for k in range(k_min, k_max + 1))


def cuts_to_groups(cuts: tuple[int, ...]) -> tuple[str, ...]:
    bounds = (0, *cuts, 26)
    return tuple(ALPHABET[a:b] for a, b in zip(bounds, bounds[1:]))


def layout_from_cuts(cuts: tuple[int, ...]) -> LetterLayout:
    return LetterLayout(cuts_to_groups(cuts))


def cuts_at(k: int, index: int) -> tuple[int, ...]:
    """Cut tuple of the layout at `index` in lexicographic enumeration order."""
    total = layout_count(k)
    if not 0 <= index < total:
        raise IndexError(f"layout index {index} out of range for k={k} ({total} layouts)")
    r = k - 1
    cuts = []
    x = 0
    for i in range(r):
        while comb(N_GAPS - 1 - x, r - 1 - i) <= index:
            index -= comb(N_GAPS - 1 - x, r - 1 - i)
            x += 1
        cuts.append(x + 1)  # gap g sits after letter g, i.e. cut position g+1
        x += 1
    return tuple(cuts)


def layout_at(k: int, index: int) -> LetterLayout:
    return layout_from_cuts(cuts_at(k, index))


def iter_cuts(k: int, start: int = 0, stop: int | None = None) -> Iterator[tuple[int, ...]]:
    """Cut tuples for layouts with `k` groups, enumeration indices [start, stop)."""
    total = layout_count(k)
    if stop is None or stop > total:
        stop = total
    if start < 0 or start > stop:
        raise ValueError(f"bad enumeration range [{start}, {stop})")
    return islice(combinations(range(1, 26), k - 1), start, stop)


def enumerate_letter_layouts(
    k: int, start: int = 0, stop: int | None = None
) -> Iterator[tuple[int, LetterLayout]]:
    """Yield (enumeration index, layout) pairs in deterministic order."""
    for offset, cuts in enumerate(iter_cuts(k, start, stop)):
        yield start + offset, layout_from_cuts(cuts)


def group_table(cuts: tuple[int, ...]) -> bytes:
    """256-byte translate table: letter index (0..25) -> group index.

    Words encoded as bytes of letter indices turn into group-index
    signatures with a single `bytes.translate` call.
    """
    table = bytearray(256)
    g = 0
    prev = 0
    for cut in (*cuts, 26):
        for i in range(prev, cut):
            table[i] = g
        prev = cut
        g += 1
    return bytes(table)
