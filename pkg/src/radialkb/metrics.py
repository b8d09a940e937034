"""Text-entry performance metrics from session event logs.

Per phrase: entry rate in words per minute computed from the transcribed
length and the span between the first and last command gesture, and error
rates from the classic character classes - C correct, INF incorrect and
never fixed (via minimum string distance between presented and transcribed
text), IF incorrect but fixed (characters removed by delete gestures).
TER = (INF + IF) / (C + INF + IF) and NCER = INF / (C + INF + IF); session
values are unweighted means over the phrases that saw input.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gestures import GestureKind

_COMMAND_KINDS = {
    GestureKind.FOREFOOT_TAP.value,
    GestureKind.REARFOOT_TAP.value,
    GestureKind.FLAT_FORWARD.value,
    GestureKind.FLAT_BACKWARD.value,
}


@dataclass(frozen=True)
class PhraseMetrics:
    presented: str
    transcribed: str
    seconds: float
    wpm: float
    ter: float
    ncer: float
    correct: int
    incorrect_not_fixed: int
    incorrect_fixed: int
    fixes: int


@dataclass(frozen=True)
class MetricsReport:
    wpm: float
    ter: float
    ncer: float
    cheat_sheet_requests: int
    phrases: tuple[PhraseMetrics, ...]

    def to_dict(self) -> dict:
        return {
            "wpm": self.wpm,
            "ter": self.ter,
            "ncer": self.ncer,
            "cheat_sheet_requests": self.cheat_sheet_requests,
            "phrases": [
                {
                    "presented": p.presented,
                    "transcribed": p.transcribed,
                    "seconds": p.seconds,
                    "wpm": p.wpm,
                    "ter": p.ter,
                    "ncer": p.ncer,
                    "c": p.correct,
                    "inf": p.incorrect_not_fixed,
                    "if": p.incorrect_fixed,
                    "fixes": p.fixes,
                }
                for p in self.phrases
            ],
        }

    def summary_table(self) -> str:
        rows = [f"{'phrase':<40}{'wpm':>8}{'ter':>8}{'ncer':>8}"]
        for p in self.phrases:
            label = p.presented if len(p.presented) <= 38 else p.presented[:35] + "..."
            rows.append(f"{label:<40}{p.wpm:>8.2f}{p.ter:>8.2%}{p.ncer:>8.2%}")
        rows.append(f"{'mean':<40}{self.wpm:>8.2f}{self.ter:>8.2%}{self.ncer:>8.2%}")
        return "\n".join(rows)


def minimum_string_distance(a: str, b: str) -> int:
    """Levenshtein distance (unit costs) via the classic rolling-row DP."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _phrase_metrics(presented: str, transcribed: str, records: list[dict]) -> PhraseMetrics | None:
    command_ts = [r["t"] for r in records if r["kind"] in _COMMAND_KINDS]
    if not command_ts:
        return None  # phrase never received input; excluded from means

    fixed_chars = 0
    fixes = 0
    for r in records:
        for eff in r.get("payload", {}).get("effects", ()):
            if eff.get("effect") == "delete_key":
                fixed_chars += 1
                fixes += 1
            elif eff.get("effect") == "delete_word":
                fixed_chars += len(eff.get("word", "")) + 1  # word plus its space
                fixes += 1

    inf = minimum_string_distance(presented, transcribed)
    correct = max(len(presented), len(transcribed)) - inf
    denom = correct + inf + fixed_chars
    ter = (inf + fixed_chars) / denom if denom else 0.0
    ncer = inf / denom if denom else 0.0

    seconds = (command_ts[-1] - command_ts[0]) / 1000.0
    wpm = ((len(transcribed) - 1) / seconds) * 12.0 if seconds > 0 else 0.0
    return PhraseMetrics(
        presented=presented,
        transcribed=transcribed,
        seconds=seconds,
        wpm=wpm,
        ter=ter,
        ncer=ncer,
        correct=correct,
        incorrect_not_fixed=inf,
        incorrect_fixed=fixed_chars,
        fixes=fixes,
    )


def compute_metrics(log: list[dict], presented: "PhraseSetLike | None" = None) -> MetricsReport:
    """Aggregate a session event log into a metrics report.

    The log must contain phrase_start/phrase_end bracket records; the
    optional `presented` phrase set overrides the presented text recorded
    in the log (useful when replaying partial logs).
    """
    if not log:
        raise ValueError("empty event log")
    phrases: list[PhraseMetrics] = []
    cheat_requests = 0
    current: list[dict] | None = None
    presented_text = ""
    phrase_index = 0
    for record in log:
        kind = record["kind"]
        if kind == "phrase_start":
            current = []
            phrase_index = record["payload"]["phrase_index"]
            presented_text = record["payload"]["presented"]
            if presented is not None:
                presented_text = presented.phrases[phrase_index]
        elif kind == "phrase_end":
            if current is not None:
                pm = _phrase_metrics(
                    presented_text, record["payload"]["transcribed"], current
                )
                if pm is not None:
                    phrases.append(pm)
                current = None
        elif kind == "cheat_sheet":
            cheat_requests = max(cheat_requests, record["payload"]["requests"])
        elif current is not None:
            current.append(record)
    if not phrases:
        raise ValueError("log contains no completed phrases with input")
    n = len(phrases)
    return MetricsReport(
        wpm=sum(p.wpm for p in phrases) / n,
        ter=sum(p.ter for p in phrases) / n,
        ncer=sum(p.ncer for p in phrases) / n,
        cheat_sheet_requests=cheat_requests,
        phrases=tuple(phrases),
    )


# typing helper: anything with a `.phrases` sequence works
class PhraseSetLike:  # pragma: no cover - structural typing aid only
    phrases: tuple[str, ...]
