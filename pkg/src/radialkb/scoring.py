"""Spatial matching scores and final keyboard selection.

For a (cluster layout, letter layout) pair, each letter earns the fraction
of its tap samples that land inside its assigned key, weighted by the
letter's corpus frequency; the pair's spatial score is the sum over letters.
Standing and sitting scores with the same key count are added, and the
combined total plus the layout's disambiguation score ranks the pair.
"""

from __future__ import annotations

import warnings
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

from .corpus import LetterFrequencyTable
from .clusters import TapSample
from .disambiguation import LayoutCandidate
from .geometry import (
    ALPHABET,
    ClusterLayout,
    Keyboard,
    LetterLayout,
    Posture,
)

SCORE_COLUMNS = ["k", "i", "j", "L", "S_stand", "S_sit", "S_joint", "F"]


@dataclass(frozen=True)
class ScoreRecord:
    """One scored (cluster layout, letter layout) pair.

    `i` identifies the cluster-layout pair by total key count (letters +
    space); `j` is the letter layout's enumeration index within its k.
    """

    k: int
    i: int
    j: int
    disambiguation: float  # L
    s_stand: float
    s_sit: float

    @property
    def s_joint(self) -> float:
        return self.s_stand + self.s_sit

    @property
    def final_score(self) -> float:
        return self.disambiguation + self.s_joint


@dataclass(frozen=True)
class KSummary:
    """Per-key-count trade-off point: means over the top 10 records by F."""

    k: int
    mean_final: float
    mean_disambiguation: float
    mean_s_joint: float


def spatial_match_score(
    cluster_layout: ClusterLayout,
    letter_layout: LetterLayout,
    taps: Sequence[TapSample],
    freqs: LetterFrequencyTable,
) -> tuple[dict[str, float], float]:
    """Per-letter scores and their sum for one cluster/letter pairing.

    Letter groups map onto the non-space keys left to right.  A letter's
    score is (taps inside its key / taps for the letter) x letter frequency;
    letters with no tap data contribute 0 and are reported once via a
    warning.
    """
    non_space = cluster_layout.non_space_indices
    if len(non_space) != letter_layout.k_letters:
        raise ValueError(
            f"{len(non_space)} letter keys cannot hold {letter_layout.k_letters} groups"
        )
    bounds = tuple(k.lo for k in cluster_layout.keys[1:])
    letter_key = [non_space[g] for g in letter_layout.letter_table()]

    inside = [0] * 26
    totals = [0] * 26
    for tap in taps:
        if tap.posture != cluster_layout.posture:
            raise ValueError(
                f"tap posture {tap.posture.value} does not match layout "
                f"posture {cluster_layout.posture.value}"
            )
        if tap.letter == " ":
            continue
        code = ord(tap.letter) - 97
        totals[code] += 1
        if bisect_right(bounds, tap.position) == letter_key[code]:
            inside[code] += 1

    missing = [ALPHABET[c] for c in range(26) if totals[c] == 0]
    if missing:
        warnings.warn(
            f"no tap samples for letters {''.join(missing)}; they contribute 0",
            stacklevel=2,
        )
    per_letter = {
        ALPHABET[c]: (inside[c] / totals[c]) * freqs[ALPHABET[c]] if totals[c] else 0.0
        for c in range(26)
    }
    return per_letter, sum(per_letter.values())


def joint_and_final_scores(
    cluster_pairs: dict[int, tuple[ClusterLayout, ClusterLayout]],
    candidates: dict[int, Sequence[LayoutCandidate]],
    taps_stand: Sequence[TapSample],
    taps_sit: Sequence[TapSample],
    freqs: LetterFrequencyTable,
    summary_top: int = 10,
) -> tuple[list[ScoreRecord], dict[int, KSummary]]:
    """Score every candidate pairing and summarize the per-k trade-off.

    `cluster_pairs[k]` holds the (standing, sitting) cluster layouts whose
    key count is k letters + space; `candidates[k]` the letter layouts to
    pair with them.  Records come out grouped by k in candidate order; each
    k's summary averages its top `summary_top` records by final score.
    """
    records: list[ScoreRecord] = []
    summaries: dict[int, KSummary] = {}
    for k in sorted(candidates):
        if k not in cluster_pairs:
            raise ValueError(f"no cluster layouts for k={k}")
        stand, sit = cluster_pairs[k]
        for cl, which in ((stand, Posture.STANDING), (sit, Posture.SITTING)):
            if cl.posture != which:
                raise ValueError(f"cluster pair for k={k} has postures swapped")
            if cl.n_keys != k + 1:
                raise ValueError(
                    f"cluster layout for k={k} must have {k + 1} keys, has {cl.n_keys}"
                )
        k_records = []
        for cand in candidates[k]:
            layout = cand.layout
            _, s_stand = spatial_match_score(stand, layout, taps_stand, freqs)
            _, s_sit = spatial_match_score(sit, layout, taps_sit, freqs)
            k_records.append(
                ScoreRecord(
                    k=k, i=k + 1, j=cand.index,
                    disambiguation=cand.score, s_stand=s_stand, s_sit=s_sit,
                )
            )
        records.extend(k_records)
        best = sorted(k_records, key=_record_order)[:summary_top]
        if best:
            summaries[k] = KSummary(
                k=k,
                mean_final=sum(r.final_score for r in best) / len(best),
                mean_disambiguation=sum(r.disambiguation for r in best) / len(best),
                mean_s_joint=sum(r.s_joint for r in best) / len(best),
            )
    return records, summaries


def _record_order(r: ScoreRecord) -> tuple[float, float, int]:
    """Best-first sort key: F desc, then L desc, then enumeration order."""
    return (-r.final_score, -r.disambiguation, r.j)


def knee_key_count(summaries: dict[int, KSummary]) -> int:
    """Letter-key count at the sharpest bend of the spatial-score curve.

    The curve falls as keys shrink; the knee is the point where the decline
    accelerates most, i.e. the interior k whose drop to the next k exceeds
    the drop from the previous one by the largest margin (maximum second
    difference of the falling curve).  Needs at least three key counts.
    """
    ks = sorted(summaries)
    if len(ks) < 3:
        raise ValueError("knee detection needs at least three key counts")
    s = [summaries[k].mean_s_joint for k in ks]
    best_k, best_bend = ks[1], float("-inf")
    for idx in range(1, len(ks) - 1):
        bend = (s[idx] - s[idx + 1]) - (s[idx - 1] - s[idx])
        if bend > best_bend:
            best_k, best_bend = ks[idx], bend
    return best_k


def select_keyboard(
    records: Sequence[ScoreRecord],
    cluster_pairs: dict[int, tuple[ClusterLayout, ClusterLayout]],
    n_keys: int | None = None,
) -> tuple[Keyboard, Keyboard, ScoreRecord]:
    """Pick the winning pair and build one keyboard per posture.

    `n_keys` counts letters plus the space key (one more than the record
    `k`); when omitted, the knee of the spatial-score curve decides.
    Within the chosen key count the best record wins (highest F, ties to
    higher L, then enumeration order).  Both postures share the chosen
    letter layout.
    """
    if not records:
        raise ValueError("no score records to select from")
    if n_keys is None:
        _, summaries = summarize_records(records)
        k = knee_key_count(summaries)
    else:
        k = n_keys - 1
    k_records = [r for r in records if r.k == k]
    if not k_records:
        raise ValueError(f"no records for k={k} ({k + 1} keys)")
    winner = min(k_records, key=_record_order)
    layout = LayoutCandidate(k=winner.k, index=winner.j, score=winner.disambiguation).layout
    stand, sit = cluster_pairs[k]
    return (
        Keyboard(cluster_layout=stand, letter_layout=layout),
        Keyboard(cluster_layout=sit, letter_layout=layout),
        winner,
    )


def summarize_records(
    records: Sequence[ScoreRecord], summary_top: int = 10
) -> tuple[dict[int, list[ScoreRecord]], dict[int, KSummary]]:
    by_k: dict[int, list[ScoreRecord]] = {}
    for r in records:
        by_k.setdefault(r.k, []).append(r)
    summaries = {}
    for k, rs in by_k.items():
        best = sorted(rs, key=_record_order)[:summary_top]
        summaries[k] = KSummary(
            k=k,
            mean_final=sum(r.final_score for r in best) / len(best),
            mean_disambiguation=sum(r.disambiguation for r in best) / len(best),
            mean_s_joint=sum(r.s_joint for r in best) / len(best),
        )
    return by_k, summaries


def write_score_records(
    records: Iterable[ScoreRecord], target: IO[str], header_lines: Sequence[str] = ()
) -> None:
    """Tab-separated score table with optional `# `-prefixed header lines."""
    for line in header_lines:
        target.write(f"# {line}\n")
    target.write("\t".join(SCORE_COLUMNS) + "\n")
    for r in records:
        target.write(
            f"{r.k}\t{r.i}\t{r.j}\t{r.disambiguation!r}\t{r.s_stand!r}\t"
            f"{r.s_sit!r}\t{r.s_joint!r}\t{r.final_score!r}\n"
        )


def read_score_records(source: str | Path | IO[str]) -> list[ScoreRecord]:
    if hasattr(source, "read"):
        lines = source.read().splitlines()  # type: ignore[union-attr]
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    records = []
    for line in lines:
        if not line or line.startswith("#") or line.startswith("k\t"):
            continue
        k, i, j, L, s_stand, s_sit, _s_joint, _f = line.split("\t")
        records.append(
            ScoreRecord(
                k=int(k), i=int(i), j=int(j),
                disambiguation=float(L), s_stand=float(s_stand), s_sit=float(s_sit),
            )
        )
    return records
