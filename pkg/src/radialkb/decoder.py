"""Key-sequence to word decoding over a frequency lexicon.

Exact mode matches a sequence of key indices against each word's key
signature and orders the hits by lexicon rank.  Bayes mode scores every
length-matching word by unigram frequency times an independent per-tap
Gaussian likelihood around the tapped positions, evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

from .corpus import Lexicon
from .geometry import Keyboard, Posture

MIN_SIGMA = 1e-4
DEFAULT_PAGE_SIZE = 5


@dataclass(frozen=True)
class SpatialModel:
    """Tap distribution per non-space key: (center, sigma) on the axis."""

    posture: Posture
    key_indices: tuple[int, ...]
    centers: tuple[float, ...]
    sigmas: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.key_indices) == len(self.centers) == len(self.sigmas)):
            raise ValueError("key_indices, centers, and sigmas must align")
        if any(b <= a for a, b in zip(self.centers, self.centers[1:])):
            raise ValueError("key centers must be strictly increasing")
        if any(s < MIN_SIGMA for s in self.sigmas):
            object.__setattr__(
                self, "sigmas", tuple(max(s, MIN_SIGMA) for s in self.sigmas)
            )

    @classmethod
    def from_keyboard(cls, kb: Keyboard) -> "SpatialModel":
        cl = kb.cluster_layout
        idx = cl.non_space_indices
        return cls(
            posture=cl.posture,
            key_indices=idx,
            centers=tuple(cl.keys[i].center for i in idx),
            sigmas=tuple(max(cl.keys[i].sigma, MIN_SIGMA) for i in idx),
        )

    def params_for(self, key_index: int) -> tuple[float, float]:
        pos = self.key_indices.index(key_index)
        return self.centers[pos], self.sigmas[pos]


@dataclass(frozen=True)
class CandidateList:
    """Ranked (word, score) pairs plus the page size used for display."""

    entries: tuple[tuple[str, float], ...]
    page_size: int = DEFAULT_PAGE_SIZE

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(w for w, _ in self.entries)

    @property
    def n_pages(self) -> int:
        return (len(self.entries) + self.page_size - 1) // self.page_size


def page(candidates: CandidateList, page_index: int) -> tuple[tuple[str, float], ...]:
    """Stable display slice; past-the-end pages are empty."""
    if page_index < 0:
        raise ValueError("page_index must be >= 0")
    size = candidates.page_size
    return candidates.entries[page_index * size : (page_index + 1) * size]


def decode_exact(
    seq: Sequence[int],
    kb: Keyboard,
    lexicon: Lexicon,
    max_out: int | None = None,
    page_size: int = DEFAULT_PAGE_SIZE,
) -> CandidateList:
    """Words whose key signature equals `seq`, ordered by lexicon rank.

    Scores are the raw word frequencies (the rank order is the contract).
    """
    _check_key_sequence(seq, kb)
    table = kb.letter_key_table()
    target = tuple(seq)
    out: list[tuple[str, float]] = []
    for entry in lexicon:
        word = entry.word
        if len(word) != len(target):
            continue
        if all(table[ord(c) - 97] == t for c, t in zip(word, target)):
            out.append((word, entry.frequency))
            if max_out is not None and len(out) >= max_out:
                break
    return CandidateList(entries=tuple(out), page_size=page_size)


def decode_bayes(
    seq: Sequence[float],
    kb: Keyboard,
    spatial: SpatialModel,
    lexicon: Lexicon,
    max_out: int | None = None,
    page_size: int = DEFAULT_PAGE_SIZE,
) -> CandidateList:
    """Posterior-ranked words for a sequence of tapped positions.

    score(w) is proportional to freq(w) times the product over taps of the
    Gaussian density of the tapped position under w's key for that slot;
    scores are normalized over all length-matching words before truncation.
    """
    if len(seq) == 0:
        raise ValueError("empty tap sequence")
    for x in seq:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"tap position {x} outside [0, 1]")
    key_params = {
        idx: (c, s)
        for idx, c, s in zip(spatial.key_indices, spatial.centers, spatial.sigmas)
    }
    non_space = kb.cluster_layout.non_space_indices
    if set(spatial.key_indices) != set(non_space):
        raise ValueError("spatial model keys do not match the keyboard's letter keys")

    # per-slot log density of the tapped position under each key
    slot_logpdf: list[dict[int, float]] = []
    for x in seq:
        row = {}
        for idx, (center, sigma) in key_params.items():
            z = (x - center) / sigma
            row[idx] = -0.5 * z * z - math.log(sigma) - 0.5 * math.log(2 * math.pi)
        slot_logpdf.append(row)

    table = kb.letter_key_table()
    n = len(seq)
    scored: list[tuple[float, int, str]] = []  # (log score, rank, word)
    for rank, entry in enumerate(lexicon):
        word = entry.word
        if len(word) != n:
            continue
        log_score = math.log(entry.frequency)
        for pos, ch in enumerate(word):
            log_score += slot_logpdf[pos][table[ord(ch) - 97]]
        scored.append((log_score, rank, word))
    if not scored:
        return CandidateList(entries=(), page_size=page_size)

    # normalize in log space over the whole candidate set
    m = max(s for s, _, _ in scored)
    total = sum(math.exp(s - m) for s, _, _ in scored)
    scored.sort(key=lambda t: (-t[0], t[1]))
    entries = tuple(
        (word, math.exp(s - m) / total) for s, _, word in scored
    )
    if max_out is not None:
        entries = entries[:max_out]
    return CandidateList(entries=entries, page_size=page_size)


def _check_key_sequence(seq: Sequence[int], kb: Keyboard) -> None:
    if len(seq) == 0:
        raise ValueError("empty key sequence")
    non_space = set(kb.cluster_layout.non_space_indices)
    bad = [i for i in seq if i not in non_space]
    if bad:
        raise ValueError(f"key indices {bad} are not letter keys of this keyboard")


def save_spatial_model(sm: SpatialModel, target: str | Path | IO[str]) -> None:
    """Rows of `key_index<TAB>center<TAB>sigma` (posture on a comment line)."""
    lines = [f"# posture={sm.posture.value}"]
    lines += [
        f"{idx}\t{c!r}\t{s!r}"
        for idx, c, s in zip(sm.key_indices, sm.centers, sm.sigmas)
    ]
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)  # type: ignore[union-attr]
    else:
        Path(target).write_text(text, encoding="utf-8")


def load_spatial_model(source: str | Path | IO[str]) -> SpatialModel:
    if hasattr(source, "read"):
        lines = source.read().splitlines()  # type: ignore[union-attr]
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    posture = Posture.STANDING
    rows: list[tuple[int, float, float]] = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "posture=" in line:
                posture = Posture(line.split("posture=", 1)[1].strip())
            continue
        idx, center, sigma = line.split("\t")
        rows.append((int(idx), float(center), float(sigma)))
    rows.sort()
    return SpatialModel(
        posture=posture,
        key_indices=tuple(r[0] for r in rows),
        centers=tuple(r[1] for r in rows),
        sigmas=tuple(r[2] for r in rows),
    )
