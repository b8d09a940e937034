"""Frequency lexicon, letter-frequency table, and phrase set ingestion.

File formats are deliberately plain: the lexicon is `word<TAB>frequency`
rows, the letter table is 26 `letter<TAB>weight` rows, and phrase files
hold one phrase per line.  All text is lowercased on load; anything outside
a-z (plus spaces in phrases) is rejected with a line number.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

from .geometry import ALPHABET


class ParseError(ValueError):
    """A source file violated its expected format; carries the line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if line_no else message)


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    frequency: float


@dataclass(frozen=True)
class Lexicon:
    """Words ordered by frequency descending, ties broken by input order.

    Rank (position in `entries`) is the stable total order every scorer and
    decoder uses, so downstream results are deterministic.
    """

    entries: tuple[LexiconEntry, ...]

    def __post_init__(self) -> None:
        ranks = {e.word: i for i, e in enumerate(self.entries)}
        object.__setattr__(self, "_ranks", ranks)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(e.word for e in self.entries)

    def rank(self, word: str) -> int:
        return self._ranks[word]  # type: ignore[attr-defined]

    def __contains__(self, word: str) -> bool:
        return word in self._ranks  # type: ignore[attr-defined]

    def frequency(self, word: str) -> float:
        return self.entries[self.rank(word)].frequency

    def top(self, n: int) -> "Lexicon":
        """Truncated copy keeping the n highest-frequency entries."""
        return Lexicon(self.entries[:n])


@dataclass(frozen=True)
class LetterFrequencyTable:
    """Relative frequency of each letter; values sum to 1."""

    f: dict[str, float]

    def __post_init__(self) -> None:
        if sorted(self.f) != list(ALPHABET):
            raise ValueError("letter table must contain exactly the 26 letters a-z")
        if any(v < 0 for v in self.f.values()):
            raise ValueError("letter frequencies must be non-negative")
        total = sum(self.f.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"letter frequencies must sum to 1, got {total}")

    def __getitem__(self, letter: str) -> float:
        return self.f[letter]


@dataclass(frozen=True)
class PhraseSet:
    """Lowercase transcription phrases over a-z and single spaces."""

    phrases: tuple[str, ...]

    def __post_init__(self) -> None:
        for p in self.phrases:
            if not p or p != " ".join(p.split()) or any(c not in ALPHABET + " " for c in p):
                raise ValueError(f"invalid phrase: {p!r}")

    def __len__(self) -> int:
        return len(self.phrases)

    def __iter__(self):
        return iter(self.phrases)


def _open_lines(source: str | Path | IO[str] | Iterable[str]) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8").splitlines()
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        return source.read().splitlines()  # type: ignore[union-attr]
    return source


def load_lexicon(source: str | Path | IO[str] | Iterable[str]) -> Lexicon:
    """Parse `word<TAB>frequency` rows into a rank-ordered lexicon.

    Rows may be pre-sorted or not; the result is always sorted by frequency
    descending with file order breaking ties.  Duplicate words, words with
    characters outside a-z, and non-positive frequencies are errors.
    """
    rows: list[tuple[float, int, str]] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(_open_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'word<TAB>frequency', got {raw!r}", line_no)
        word = parts[0].lower()
        if not word or any(c not in ALPHABET for c in word):
            raise ParseError(f"word must be a-z only, got {parts[0]!r}", line_no)
        try:
            freq = float(parts[1])
        except ValueError:
            raise ParseError(f"frequency not a number: {parts[1]!r}", line_no) from None
        if freq <= 0:
            raise ParseError(f"frequency must be positive, got {freq}", line_no)
        if word in seen:
            raise ParseError(f"duplicate word: {word!r}", line_no)
        seen.add(word)
        rows.append((freq, line_no, word))
    rows.sort(key=lambda r: (-r[0], r[1]))
    return Lexicon(tuple(LexiconEntry(word=w, frequency=f) for f, _, w in rows))


def letter_frequencies(lex: Lexicon) -> LetterFrequencyTable:
    """Frequency-weighted letter distribution of the lexicon.

    Each word contributes its frequency once per occurrence of a letter;
    the totals are normalized to sum to 1.
    """
    if len(lex) == 0:
        raise ValueError("cannot derive letter frequencies from an empty lexicon")
    counts = dict.fromkeys(ALPHABET, 0.0)
    for entry in lex:
        for ch in entry.word:
            counts[ch] += entry.frequency
    total = sum(counts.values())
    return LetterFrequencyTable({c: v / total for c, v in counts.items()})


def load_letter_frequencies(source: str | Path | IO[str] | Iterable[str]) -> LetterFrequencyTable:
    """Parse a 26-row `letter<TAB>weight` table, renormalizing if needed."""
    values: dict[str, float] = {}
    for line_no, raw in enumerate(_open_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2 or len(parts[0]) != 1 or parts[0].lower() not in ALPHABET:
            raise ParseError(f"expected 'letter<TAB>weight', got {raw!r}", line_no)
        letter = parts[0].lower()
        if letter in values:
            raise ParseError(f"duplicate letter: {letter!r}", line_no)
        try:
            weight = float(parts[1])
        except ValueError:
            raise ParseError(f"weight not a number: {parts[1]!r}", line_no) from None
        if weight < 0:
            raise ParseError(f"weight must be non-negative, got {weight}", line_no)
        values[letter] = weight
    missing = set(ALPHABET) - set(values)
    if missing:
        raise ParseError(f"letters missing from table: {''.join(sorted(missing))}")
    total = sum(values.values())
    if total <= 0:
        raise ParseError("letter weights sum to zero")
    if abs(total - 1.0) > 1e-9:
        warnings.warn(f"letter weights sum to {total:.6g}; renormalizing", stacklevel=2)
        values = {c: v / total for c, v in values.items()}
    return LetterFrequencyTable(values)


def load_phrases(source: str | Path | IO[str] | Iterable[str]) -> PhraseSet:
    """Parse one phrase per line; lowercases and collapses runs of spaces.

    Characters other than letters and spaces are rejected (digits and
    punctuation are not normalizable).
    """
    phrases: list[str] = []
    for line_no, raw in enumerate(_open_lines(source), start=1):
        line = " ".join(raw.lower().split())
        if not line or line.startswith("#"):
            continue
        bad = sorted({c for c in line if c not in ALPHABET + " "})
        if bad:
            raise ParseError(f"invalid characters {bad} in phrase {raw!r}", line_no)
        phrases.append(line)
    return PhraseSet(tuple(phrases))
