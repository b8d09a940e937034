"""Transcription-session engine: gesture events drive typing state.

The interface has two areas.  In the letter area, forefoot taps append the
key under the cursor to the pending key sequence and rearfoot taps delete
the last pending key.  A flat-forward gesture decodes the pending sequence
and enters the word area, where the cursor selects among the current
candidate page (with a paging selector zone on each side), a forefoot tap
commits the selected word plus an implicit space, a rearfoot tap deletes
the last committed word, and flat-backward returns to the letter area with
the pending keys intact.

Every applied gesture is appended to a line-oriented event log (timestamp,
kind, effects, state digest) that the metrics module consumes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import IO, Iterable

from .corpus import Lexicon, PhraseSet
from .decoder import (
    DEFAULT_PAGE_SIZE,
    CandidateList,
    SpatialModel,
    decode_bayes,
    decode_exact,
)
from .geometry import Keyboard, Posture, normalized_to_key
from .gestures import GestureEvent, GestureKind, StrategyConfig

DEFAULT_CHEAT_SHEET_MS = 10_000

COMMAND_KINDS = frozenset(
    {
        GestureKind.FOREFOOT_TAP,
        GestureKind.REARFOOT_TAP,
        GestureKind.FLAT_FORWARD,
        GestureKind.FLAT_BACKWARD,
    }
)


class ModeError(ValueError):
    """Operation not available in the session's feedback mode."""


class Mode(str, Enum):
    VISUAL = "visual"
    BLIND = "blind"


class Area(str, Enum):
    LETTER = "letter"
    WORD = "word"


@dataclass(frozen=True)
class SessionConfig:
    mode: Mode
    strategy: StrategyConfig
    posture: Posture
    keyboard: Keyboard
    phrases: PhraseSet
    lexicon: Lexicon
    page_size: int = DEFAULT_PAGE_SIZE
    cheat_sheet_duration_ms: int = DEFAULT_CHEAT_SHEET_MS
    decode_mode: str = "exact"  # "exact" | "bayes"
    spatial: SpatialModel | None = None

    def __post_init__(self) -> None:
        if self.decode_mode not in ("exact", "bayes"):
            raise ValueError(f"unknown decode mode {self.decode_mode!r}")
        if self.decode_mode == "bayes" and self.spatial is None:
            object.__setattr__(self, "spatial", SpatialModel.from_keyboard(self.keyboard))

    def decode(self, pending: tuple) -> CandidateList:
        if not pending:
            return CandidateList(entries=(), page_size=self.page_size)
        if self.decode_mode == "exact":
            return decode_exact(pending, self.keyboard, self.lexicon, page_size=self.page_size)
        return decode_bayes(
            pending, self.keyboard, self.spatial, self.lexicon, page_size=self.page_size
        )


@dataclass(frozen=True)
class TypingState:
    area: Area
    cursor: float
    pending: tuple
    candidates: tuple[tuple[str, float], ...]
    page: int
    committed: tuple[str, ...]
    phrase_index: int
    first_input_ms: int | None = None
    last_input_ms: int | None = None
    cheat_visible_until_ms: int | None = None
    cheat_requests: int = 0

    @property
    def transcribed(self) -> str:
        return " ".join(self.committed)

    def selection_zone(self, page_size: int) -> int:
        """Zone under the cursor in the word area: 0 = page-left selector,
        1..page_size = candidate slots, page_size+1 = page-right selector."""
        n_zones = page_size + 2
        return min(int(self.cursor * n_zones), n_zones - 1)


def initial_state(config: SessionConfig, phrase_index: int = 0) -> TypingState:
    cl = config.keyboard.cluster_layout
    return TypingState(
        area=Area.LETTER,
        cursor=cl.keys[cl.space_key_index].center,
        pending=(),
        candidates=(),
        page=0,
        committed=(),
        phrase_index=phrase_index,
    )


def state_to_dict(state: TypingState) -> dict:
    return {
        "area": state.area.value,
        "cursor": state.cursor,
        "pending": list(state.pending),
        "candidates": [[w, s] for w, s in state.candidates],
        "page": state.page,
        "committed": list(state.committed),
        "phrase_index": state.phrase_index,
        "first_input_ms": state.first_input_ms,
        "last_input_ms": state.last_input_ms,
        "cheat_visible_until_ms": state.cheat_visible_until_ms,
        "cheat_requests": state.cheat_requests,
    }


def state_digest(state: TypingState) -> str:
    blob = json.dumps(state_to_dict(state), sort_keys=True).encode()
    return hashlib.sha1(blob).hexdigest()[:12]


def apply_event(
    state: TypingState, ev: GestureEvent, config: SessionConfig
) -> tuple[TypingState, list[dict]]:
    """Pure state transition; returns the new state and effect records."""
    effects: list[dict] = []
    if ev.kind in COMMAND_KINDS:
        state = replace(
            state,
            first_input_ms=state.first_input_ms if state.first_input_ms is not None else ev.timestamp_ms,
            last_input_ms=ev.timestamp_ms,
        )

    if ev.kind == GestureKind.CURSOR_MOVE:
        state = replace(state, cursor=ev.position)
        effects.append({"effect": "cursor", "position": ev.position})
        return state, effects

    if state.area == Area.LETTER:
        return _apply_letter_area(state, ev, config, effects)
    return _apply_word_area(state, ev, config, effects)


def _apply_letter_area(
    state: TypingState, ev: GestureEvent, config: SessionConfig, effects: list[dict]
) -> tuple[TypingState, list[dict]]:
    kb = config.keyboard
    if ev.kind == GestureKind.FOREFOOT_TAP:
        key = normalized_to_key(kb, state.cursor)
        if key == kb.cluster_layout.space_key_index:
            effects.append({"effect": "reject", "reason": "space_key_in_letter_area"})
            return state, effects
        tap = state.cursor if config.decode_mode == "bayes" else key
        state = replace(state, pending=state.pending + (tap,))
        effects.append({"effect": "append_key", "key": key, "tap": tap})
    elif ev.kind == GestureKind.REARFOOT_TAP:
        if state.pending:
            state = replace(state, pending=state.pending[:-1])
            effects.append({"effect": "delete_key"})
        else:
            effects.append({"effect": "reject", "reason": "nothing_to_delete"})
    elif ev.kind == GestureKind.FLAT_FORWARD:
        candidates = config.decode(state.pending)
        state = replace(state, area=Area.WORD, candidates=candidates.entries, page=0)
        effects.append({"effect": "enter_word_area", "candidates": len(candidates.entries)})
    elif ev.kind == GestureKind.FLAT_BACKWARD:
        effects.append({"effect": "reject", "reason": "already_in_letter_area"})
    return state, effects


def _apply_word_area(
    state: TypingState, ev: GestureEvent, config: SessionConfig, effects: list[dict]
) -> tuple[TypingState, list[dict]]:
    size = config.page_size
    if ev.kind == GestureKind.FOREFOOT_TAP:
        zone = state.selection_zone(size)
        if zone == 0:
            if state.page > 0:
                state = replace(state, page=state.page - 1)
                effects.append({"effect": "page", "page": state.page})
            else:
                effects.append({"effect": "reject", "reason": "no_previous_page"})
        elif zone == size + 1:
            if (state.page + 1) * size < len(state.candidates):
                state = replace(state, page=state.page + 1)
                effects.append({"effect": "page", "page": state.page})
            else:
                effects.append({"effect": "reject", "reason": "no_next_page"})
        else:
            idx = state.page * size + (zone - 1)
            if idx < len(state.candidates):
                word = state.candidates[idx][0]
                state = replace(
                    state,
                    committed=state.committed + (word,),
                    pending=(),
                    candidates=(),
                    page=0,
                    area=Area.LETTER,
                )
                effects.append({"effect": "commit", "word": word})
            else:
                effects.append({"effect": "reject", "reason": "empty_candidate_slot"})
    elif ev.kind == GestureKind.REARFOOT_TAP:
        if state.committed:
            word = state.committed[-1]
            state = replace(state, committed=state.committed[:-1])
            effects.append({"effect": "delete_word", "word": word})
        else:
            effects.append({"effect": "reject", "reason": "nothing_to_delete"})
    elif ev.kind == GestureKind.FLAT_BACKWARD:
        state = replace(state, area=Area.LETTER, candidates=(), page=0)
        effects.append({"effect": "exit_word_area"})
    elif ev.kind == GestureKind.FLAT_FORWARD:
        effects.append({"effect": "reject", "reason": "already_in_word_area"})
    return state, effects


class Session:
    """Stateful wrapper tying config, typing state, and the event log."""

    def __init__(self, config: SessionConfig, session_id: str = "local"):
        if len(config.phrases) == 0:
            raise ValueError("session needs at least one phrase")
        self.config = config
        self.session_id = session_id
        self.state = initial_state(config)
        self.log: list[dict] = []
        self.finished = False
        self._log_phrase_start()

    # -- log helpers ---------------------------------------------------

    def _record(self, t: int, kind: str, payload: dict) -> None:
        self.log.append(
            {"t": t, "kind": kind, "payload": payload, "digest": state_digest(self.state)}
        )

    def _log_phrase_start(self) -> None:
        self._record(
            self.state.last_input_ms or 0,
            "phrase_start",
            {"phrase_index": self.state.phrase_index, "presented": self.presented},
        )

    @property
    def presented(self) -> str:
        return self.config.phrases.phrases[self.state.phrase_index]

    # -- operations ----------------------------------------------------

    def apply_event(self, ev: GestureEvent) -> list[dict]:
        if self.finished:
            raise ValueError("session already finished")
        self.state, effects = apply_event(self.state, ev, self.config)
        self._record(
            ev.timestamp_ms,
            ev.kind.value,
            {"foot": ev.foot.value, "position": ev.position, "effects": effects},
        )
        return effects

    def request_cheat_sheet(self, now_ms: int) -> None:
        if self.config.mode != Mode.BLIND:
            raise ModeError("cheat sheet is only available in blind mode")
        self.state = replace(
            self.state,
            cheat_visible_until_ms=now_ms + self.config.cheat_sheet_duration_ms,
            cheat_requests=self.state.cheat_requests + 1,
        )
        self._record(
            now_ms,
            "cheat_sheet",
            {"visible_until_ms": self.state.cheat_visible_until_ms,
             "requests": self.state.cheat_requests},
        )

    def advance_phrase(self, now_ms: int) -> bool:
        """Close out the current phrase; returns False when none remain."""
        self._record(now_ms, "phrase_end", {"transcribed": self.state.transcribed})
        next_index = self.state.phrase_index + 1
        if next_index >= len(self.config.phrases):
            self.finished = True
            return False
        cheat_requests = self.state.cheat_requests
        self.state = replace(
            initial_state(self.config, phrase_index=next_index),
            cheat_requests=cheat_requests,
        )
        self._log_phrase_start()
        return True

    def finish(self, now_ms: int) -> None:
        if not self.finished:
            self._record(now_ms, "phrase_end", {"transcribed": self.state.transcribed})
            self.finished = True


def write_event_log(records: Iterable[dict], target: str | Path | IO[str]) -> None:
    lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
    if hasattr(target, "write"):
        target.write(lines)  # type: ignore[union-attr]
    else:
        Path(target).write_text(lines, encoding="utf-8")


def read_event_log(source: str | Path | IO[str]) -> list[dict]:
    if hasattr(source, "read"):
        text = source.read()  # type: ignore[union-attr]
    else:
        text = Path(source).read_text(encoding="utf-8")
    return [
        json.loads(line)
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    ]
