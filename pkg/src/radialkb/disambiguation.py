"""Word disambiguation scoring of letter layouts against a frequency lexicon.

A word's signature on a layout is the sequence of group indices of its
letters.  A word "survives" disambiguation if, scanning the lexicon from the
highest frequency down, fewer than `top_n` earlier words produced the same
signature - i.e. the word appears within the first `top_n` entries of the
frequency-ordered candidate list for its own key sequence.  The layout's
score is the surviving fraction of the lexicon.

Scoring is a single hash pass over the lexicon per layout (words are
pre-encoded as byte strings and signatures come from `bytes.translate`),
which is what makes full multi-million-layout sweeps feasible.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Iterable, Sequence

from .corpus import Lexicon
from .geometry import LetterLayout
from .partitions import (
    cuts_at,
    group_table,
    iter_cuts,
    layout_count,
    layout_from_cuts,
)

DEFAULT_TOP_N = 3
DEFAULT_K_RANGE = (5, 13)
DEFAULT_PER_K = 100

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class DisambiguationScore:
    layout: LetterLayout
    score: float
    k_letters: int


@dataclass(frozen=True)
class LayoutCandidate:
    """A surviving layout of the per-k top list, identified by (k, index)."""

    k: int
    index: int
    score: float

    @property
    def layout(self) -> LetterLayout:
        return layout_from_cuts(cuts_at(self.k, self.index))


def encode_words(lexicon: Lexicon) -> list[bytes]:
    """Lexicon words as byte strings of letter indices, in rank order."""
    return [bytes(ord(c) - 97 for c in e.word) for e in lexicon]


def score_encoded(codes: Sequence[bytes], table: bytes, top_n: int = DEFAULT_TOP_N) -> float:
    """Surviving fraction for one layout given pre-encoded rank-ordered words."""
    seen: dict[bytes, int] = {}
    hits = 0
    for code in codes:
        sig = code.translate(table)
        n = seen.get(sig, 0)
        if n < top_n:
            hits += 1
        seen[sig] = n + 1
    return hits / len(codes)


def disambiguation_score(
    layout: LetterLayout, lexicon: Lexicon, top_n: int = DEFAULT_TOP_N
) -> DisambiguationScore:
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    if len(lexicon) == 0:
        raise ValueError("empty lexicon")
    table = bytearray(256)
    lt = layout.letter_table()
    table[: len(lt)] = lt
    score = score_encoded(encode_words(lexicon), bytes(table), top_n)
    return DisambiguationScore(layout=layout, score=score, k_letters=layout.k_letters)


class _TopList:
    """Fixed-size best-score list; ties prefer the earlier enumeration index."""

    def __init__(self, size: int):
        self.size = size
        self._heap: list[tuple[float, int]] = []  # (score, -index); heap[0] is worst

    def offer(self, score: float, index: int) -> None:
        item = (score, -index)
        if len(self._heap) < self.size:
            heapq.heappush(self._heap, item)
        elif item > self._heap[0]:
            heapq.heapreplace(self._heap, item)

    def merge(self, other: "_TopList") -> None:
        for score, neg in other._heap:
            self.offer(score, -neg)

    def sorted_entries(self) -> list[tuple[int, float]]:
        """(index, score) pairs, best score first, ties by index ascending."""
        return [(-neg, score) for score, neg in sorted(self._heap, key=lambda t: (-t[0], -t[1]))]

    def state(self) -> list[list[float]]:
        return [[score, -neg] for score, neg in sorted(self._heap)]

    @classmethod
    def from_state(cls, size: int, state: Iterable[Sequence[float]]) -> "_TopList":
        top = cls(size)
        for score, index in state:
            top.offer(score, int(index))
        return top


def score_layout_range(
    codes: Sequence[bytes],
    k: int,
    start: int,
    stop: int,
    per_k: int,
    top_n: int = DEFAULT_TOP_N,
) -> _TopList:
    """Score one contiguous enumeration range; a unit of parallel work."""
    top = _TopList(per_k)
    index = start
    for cuts in iter_cuts(k, start, stop):
        top.offer(score_encoded(codes, group_table(cuts), top_n), index)
        index += 1
    return top


def top_layout_candidates(
    lexicon: Lexicon,
    k_range: tuple[int, int] = DEFAULT_K_RANGE,
    per_k: int = DEFAULT_PER_K,
    top_n: int = DEFAULT_TOP_N,
    max_layouts_per_k: int | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> dict[int, list[LayoutCandidate]]:
    """Per-k lists of the highest-scoring layouts.

    `max_layouts_per_k` truncates the enumeration for desk-scale runs; the
    full sweep is the checkpointed `run_sweep`.  `progress(k, n_scored)` is
    invoked periodically when given.
    """
    k_min, k_max = k_range
    if len(lexicon) == 0:
        raise ValueError("empty lexicon")
    codes = encode_words(lexicon)
    out: dict[int, list[LayoutCandidate]] = {}
    for k in range(k_min, k_max + 1):
        stop = layout_count(k)
        if max_layouts_per_k is not None:
            stop = min(stop, max_layouts_per_k)
        top = _TopList(per_k)
        index = 0
        for cuts in iter_cuts(k, 0, stop):
            top.offer(score_encoded(codes, group_table(cuts), top_n), index)
            index += 1
            if progress is not None and index % 100_000 == 0:
                progress(k, index)
        out[k] = [
            LayoutCandidate(k=k, index=i, score=s) for i, s in top.sorted_entries()
        ]
    return out


def merge_range_results(per_k: int, parts: Iterable[_TopList]) -> list[tuple[int, float]]:
    """Deterministic reduction of disjoint range results (fixed offer order)."""
    merged = _TopList(per_k)
    for part in parts:
        merged.merge(part)
    return merged.sorted_entries()


def _score_range_task(args: tuple) -> list[list[float]]:
    codes, k, start, stop, per_k, top_n = args
    return score_layout_range(codes, k, start, stop, per_k, top_n).state()


def parallel_top_layout_candidates(
    lexicon: Lexicon,
    k_range: tuple[int, int] = DEFAULT_K_RANGE,
    per_k: int = DEFAULT_PER_K,
    top_n: int = DEFAULT_TOP_N,
    workers: int = 2,
    max_layouts_per_k: int | None = None,
    chunk_size: int = 200_000,
) -> dict[int, list[LayoutCandidate]]:
    """Multi-process variant of `top_layout_candidates`.

    Enumeration ranges are scored independently and merged in submission
    order, so results are identical for any worker count.
    """
    from concurrent.futures import ProcessPoolExecutor

    codes = encode_words(lexicon)
    out: dict[int, list[LayoutCandidate]] = {}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for k in range(k_range[0], k_range[1] + 1):
            total = layout_count(k)
            if max_layouts_per_k is not None:
                total = min(total, max_layouts_per_k)
            edges = list(range(0, total, chunk_size)) + [total]
            tasks = [
                (codes, k, a, b, per_k, top_n) for a, b in zip(edges, edges[1:])
            ]
            merged = _TopList(per_k)
            for state in pool.map(_score_range_task, tasks):
                merged.merge(_TopList.from_state(per_k, state))
            out[k] = [
                LayoutCandidate(k=k, index=i, score=s)
                for i, s in merged.sorted_entries()
            ]
    return out


def write_candidates(
    candidates: dict[int, list[LayoutCandidate]],
    target: IO[str],
    header_lines: Sequence[str] = (),
) -> None:
    """Tab-separated candidate table: k, enumeration index, score, groups."""
    for line in header_lines:
        target.write(f"# {line}\n")
    target.write("k\tindex\tscore\tgroups\n")
    for k in sorted(candidates):
        for c in candidates[k]:
            groups = "|".join(c.layout.groups)
            target.write(f"{c.k}\t{c.index}\t{c.score!r}\t{groups}\n")


def read_candidates(source: str | Path | IO[str]) -> dict[int, list[LayoutCandidate]]:
    if hasattr(source, "read"):
        lines = source.read().splitlines()  # type: ignore[union-attr]
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    out: dict[int, list[LayoutCandidate]] = {}
    for line in lines:
        if not line or line.startswith("#") or line.startswith("k\t"):
            continue
        k, index, score, _groups = line.split("\t")
        out.setdefault(int(k), []).append(
            LayoutCandidate(k=int(k), index=int(index), score=float(score))
        )
    return out


# --- checkpointed sweep -----------------------------------------------------

def _checkpoint_doc(
    k_range: tuple[int, int],
    per_k: int,
    top_n: int,
    lexicon_size: int,
    done: dict[int, list[list[float]]],
    cursor_k: int,
    cursor_index: int,
) -> dict:
    return {
        "version": CHECKPOINT_VERSION,
        "k_min": k_range[0],
        "k_max": k_range[1],
        "per_k": per_k,
        "top_n": top_n,
        "lexicon_size": lexicon_size,
        "cursor_k": cursor_k,
        "cursor_index": cursor_index,
        "tops": {str(k): state for k, state in done.items()},
    }


def run_sweep(
    lexicon: Lexicon,
    checkpoint_path: str | Path,
    k_range: tuple[int, int] = DEFAULT_K_RANGE,
    per_k: int = DEFAULT_PER_K,
    top_n: int = DEFAULT_TOP_N,
    checkpoint_every: int = 100_000,
    resume: bool = False,
    progress: Callable[[int, int, int], None] | None = None,
) -> dict[int, list[LayoutCandidate]]:
    """Full enumeration sweep with periodic checkpointing.

    The checkpoint stores, per k, the current best list plus the enumeration
    cursor; an interrupted run resumes losing at most one checkpoint
    interval.  Resuming against a different lexicon size or parameter set is
    rejected.
    """
    checkpoint_path = Path(checkpoint_path)
    codes = encode_words(lexicon)
    k_min, k_max = k_range
    tops: dict[int, _TopList] = {k: _TopList(per_k) for k in range(k_min, k_max + 1)}
    cursor_k, cursor_index = k_min, 0

    if resume and checkpoint_path.exists():
        doc = json.loads(checkpoint_path.read_text(encoding="utf-8"))
        if doc.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version: {doc.get('version')!r}")
        same = (
            doc["k_min"] == k_min
            and doc["k_max"] == k_max
            and doc["per_k"] == per_k
            and doc["top_n"] == top_n
            and doc["lexicon_size"] == len(lexicon)
        )
        if not same:
            raise ValueError("checkpoint parameters do not match this sweep")
        for key, state in doc["tops"].items():
            tops[int(key)] = _TopList.from_state(per_k, state)
        cursor_k, cursor_index = doc["cursor_k"], doc["cursor_index"]

    def save(k: int, index: int) -> None:
        doc = _checkpoint_doc(
            k_range, per_k, top_n, len(lexicon),
            {kk: t.state() for kk, t in tops.items()}, k, index,
        )
        tmp = checkpoint_path.with_suffix(checkpoint_path.suffix + ".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")
        tmp.replace(checkpoint_path)

    for k in range(cursor_k, k_max + 1):
        start = cursor_index if k == cursor_k else 0
        total = layout_count(k)
        index = start
        top = tops[k]
        for cuts in iter_cuts(k, start, total):
            top.offer(score_encoded(codes, group_table(cuts), top_n), index)
            index += 1
            if index % checkpoint_every == 0:
                save(k, index)
                if progress is not None:
                    progress(k, index, total)
        save(k + 1, 0) if k < k_max else save(k, total)

    return {
        k: [LayoutCandidate(k=k, index=i, score=s) for i, s in t.sorted_entries()]
        for k, t in tops.items()
    }
