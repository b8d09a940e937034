"""Gesture detection from per-foot sensor frames.

A frame carries the foot's yaw, forward displacement, and two sole-contact
booleans.  The state machine turns frame streams into cursor moves (from
the navigation foot's yaw) and command gestures (from the command foot's
contacts): short contact-and-release of the forefoot or rearfoot is a tap,
and sliding the flat foot past a displacement threshold is a forward or
backward flat gesture.  Detection is deterministic: the same frame stream
always yields the same event stream.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator

from .geometry import CalibrationProfile, Foot, angle_to_normalized

DEFAULT_TAP_MAX_MS = 500
DEFAULT_TAP_MIN_AIR_MS = 30
DEFAULT_SLIDE_THRESHOLD_M = 0.05
DEFAULT_SLIDE_WINDOW_MS = 600


class SequencingError(ValueError):
    """Frames for a foot arrived out of timestamp order."""


class StrategyConfigError(ValueError):
    """Foot assignment violates the chosen input strategy."""


class Strategy(str, Enum):
    UPSTAND = "upstand"
    BPSIT = "bpsit"
    BPSTAND = "bpstand"
    UPSIT = "upsit"


class GestureKind(str, Enum):
    FOREFOOT_TAP = "forefoot_tap"
    REARFOOT_TAP = "rearfoot_tap"
    FLAT_FORWARD = "flat_forward"
    FLAT_BACKWARD = "flat_backward"
    CURSOR_MOVE = "cursor_move"


@dataclass(frozen=True)
class SensorFrame:
    timestamp_ms: int
    foot: Foot
    yaw_deg: float
    forward_disp_m: float
    forefoot_contact: bool
    rearfoot_contact: bool


@dataclass(frozen=True)
class GestureEvent:
    kind: GestureKind
    foot: Foot
    timestamp_ms: int
    position: float | None = None  # cursor moves only

    def __post_init__(self) -> None:
        if (self.kind == GestureKind.CURSOR_MOVE) != (self.position is not None):
            raise ValueError("position is carried by cursor moves and only by them")


@dataclass(frozen=True)
class StrategyConfig:
    strategy: Strategy
    navigation_foot: Foot
    command_foot: Foot
    tap_max_ms: int = DEFAULT_TAP_MAX_MS
    tap_min_air_ms: int = DEFAULT_TAP_MIN_AIR_MS
    slide_threshold_m: float = DEFAULT_SLIDE_THRESHOLD_M
    slide_window_ms: int = DEFAULT_SLIDE_WINDOW_MS

    def __post_init__(self) -> None:
        unipedal = self.strategy in (Strategy.UPSTAND, Strategy.UPSIT)
        if unipedal and self.command_foot != self.navigation_foot:
            raise StrategyConfigError(
                f"{self.strategy.value} is unipedal; command and navigation "
                f"must share a foot"
            )
        if not unipedal and self.command_foot == self.navigation_foot:
            raise StrategyConfigError(
                f"{self.strategy.value} is bipedal; command and navigation "
                f"must use different feet"
            )

    @classmethod
    def upstand(cls, **overrides) -> "StrategyConfig":
        return cls(Strategy.UPSTAND, Foot.RIGHT, Foot.RIGHT, **overrides)

    @classmethod
    def bpsit(cls, **overrides) -> "StrategyConfig":
        return cls(Strategy.BPSIT, Foot.RIGHT, Foot.LEFT, **overrides)

    @classmethod
    def bpstand(cls, **overrides) -> "StrategyConfig":
        return cls(Strategy.BPSTAND, Foot.RIGHT, Foot.LEFT, **overrides)

    @classmethod
    def upsit(cls, **overrides) -> "StrategyConfig":
        return cls(Strategy.UPSIT, Foot.RIGHT, Foot.RIGHT, **overrides)

    @classmethod
    def named(cls, name: str, **overrides) -> "StrategyConfig":
        return {
            Strategy.UPSTAND: cls.upstand,
            Strategy.BPSIT: cls.bpsit,
            Strategy.BPSTAND: cls.bpstand,
            Strategy.UPSIT: cls.upsit,
        }[Strategy(name.lower())](**overrides)


class _TapTracker:
    """Contact episode tracking for one sensor (forefoot or rearfoot).

    An episode only arms on an observed off-to-on transition preceded by
    enough air time; reset() forgets everything so a contact already down
    cannot fire on its release.
    """

    def __init__(self) -> None:
        self.contact: bool | None = None  # None = unknown (fresh/reset)
        self.off_since: int | None = None
        self.on_since: int | None = None
        self.armed = False

    def update(self, ts: int, contact: bool, tap_max_ms: int, tap_min_air_ms: int) -> bool:
        """Returns True when this frame completes a tap."""
        fired = False
        if self.contact is None:
            if not contact:
                self.off_since = ts
        elif contact and not self.contact:
            air_ok = self.off_since is not None and ts - self.off_since >= tap_min_air_ms
            self.on_since = ts
            self.armed = air_ok
        elif self.contact and not contact:
            if self.armed and self.on_since is not None and ts - self.on_since <= tap_max_ms:
                fired = True
            self.off_since = ts
            self.on_since = None
            self.armed = False
        self.contact = contact
        return fired

    def suppress(self) -> None:
        self.armed = False


class GestureStateMachine:
    """Per-session detector; feed frames in timestamp order per foot."""

    def __init__(self, config: StrategyConfig, calibration: CalibrationProfile):
        self.config = config
        self.calibration = calibration
        self._last_ts: dict[Foot, int] = {}
        self._fore = _TapTracker()
        self._rear = _TapTracker()
        self._flat_window: deque[tuple[int, float]] = deque()
        self._flat_slid = False
        self._last_norm: float | None = None

    def reset(self) -> None:
        """Drop contact episodes and slide windows; cursor state re-emits."""
        self._fore = _TapTracker()
        self._rear = _TapTracker()
        self._flat_window.clear()
        self._flat_slid = False
        self._last_norm = None
        self._last_ts = {}

    def process_frame(self, frame: SensorFrame) -> list[GestureEvent]:
        ts = frame.timestamp_ms
        last = self._last_ts.get(frame.foot)
        if last is not None and ts < last:
            raise SequencingError(
                f"frame for {frame.foot.value} foot at {ts} ms after {last} ms"
            )
        self._last_ts[frame.foot] = ts

        events: list[GestureEvent] = []
        cfg = self.config

        if frame.foot == cfg.navigation_foot:
            norm = angle_to_normalized(self.calibration, frame.yaw_deg)
            if norm != self._last_norm:
                events.append(
                    GestureEvent(GestureKind.CURSOR_MOVE, frame.foot, ts, position=norm)
                )
                self._last_norm = norm

        if frame.foot == cfg.command_foot:
            events.extend(self._process_command(frame))
        return events

    def _process_command(self, frame: SensorFrame) -> list[GestureEvent]:
        cfg = self.config
        ts = frame.timestamp_ms
        events: list[GestureEvent] = []

        flat = frame.forefoot_contact and frame.rearfoot_contact
        if flat:
            self._flat_window.append((ts, frame.forward_disp_m))
            while self._flat_window and ts - self._flat_window[0][0] > cfg.slide_window_ms:
                self._flat_window.popleft()
            if not self._flat_slid:
                delta = frame.forward_disp_m - self._flat_window[0][1]
                if abs(delta) >= cfg.slide_threshold_m:
                    kind = (
                        GestureKind.FLAT_FORWARD if delta > 0 else GestureKind.FLAT_BACKWARD
                    )
                    events.append(GestureEvent(kind, frame.foot, ts))
                    self._flat_slid = True
                    # a slide consumes the ongoing contact episodes
                    self._fore.suppress()
                    self._rear.suppress()
        else:
            self._flat_window.clear()
            self._flat_slid = False

        if self._fore.update(ts, frame.forefoot_contact, cfg.tap_max_ms, cfg.tap_min_air_ms):
            events.append(GestureEvent(GestureKind.FOREFOOT_TAP, frame.foot, ts))
        if self._rear.update(ts, frame.rearfoot_contact, cfg.tap_max_ms, cfg.tap_min_air_ms):
            events.append(GestureEvent(GestureKind.REARFOOT_TAP, frame.foot, ts))
        return events


def frame_to_record(frame: SensorFrame) -> dict:
    return {
        "timestamp": frame.timestamp_ms,
        "foot": frame.foot.value,
        "yaw_deg": frame.yaw_deg,
        "forward_disp_m": frame.forward_disp_m,
        "ff": frame.forefoot_contact,
        "rf": frame.rearfoot_contact,
    }


def frame_from_record(rec: dict) -> SensorFrame:
    return SensorFrame(
        timestamp_ms=int(rec["timestamp"]),
        foot=Foot(rec["foot"]),
        yaw_deg=float(rec["yaw_deg"]),
        forward_disp_m=float(rec["forward_disp_m"]),
        forefoot_contact=bool(rec["ff"]),
        rearfoot_contact=bool(rec["rf"]),
    )


def write_frame_log(frames: Iterable[SensorFrame], target: str | Path | IO[str]) -> None:
    lines = "".join(json.dumps(frame_to_record(f), sort_keys=True) + "\n" for f in frames)
    if hasattr(target, "write"):
        target.write(lines)  # type: ignore[union-attr]
    else:
        Path(target).write_text(lines, encoding="utf-8")


def read_frame_log(source: str | Path | IO[str]) -> Iterator[SensorFrame]:
    if hasattr(source, "read"):
        text = source.read()  # type: ignore[union-attr]
    else:
        text = Path(source).read_text(encoding="utf-8")
    for line in text.splitlines():
        line = line.strip()
        if line:
            yield frame_from_record(json.loads(line))
