"""Radial keyboard geometry: ankle-yaw calibration, the normalized 1-D
keyboard axis, letter groupings, and the key intervals that tie them together.

The keyboard lives on a single normalized axis in [0, 1] (0 = far-left,
1 = far-right of the calibrated rotation span).  A :class:`CalibrationProfile`
maps raw yaw degrees onto that axis, a :class:`ClusterLayout` partitions the
axis into key intervals, and a :class:`Keyboard` assigns contiguous letter
groups to the non-space keys.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO

ALPHABET = "abcdefghijklmnopqrstuvwxyz"

KEYBOARD_FORMAT_VERSION = 1

# Key-count range used by the optimization pipeline (letters + space).
MIN_KEYS = 6
MAX_KEYS = 14
MIN_LETTER_KEYS = 5
MAX_LETTER_KEYS = 13


class CalibrationError(ValueError):
    """Calibration anchors are not strictly increasing left < rest < right."""


class Posture(str, Enum):
    STANDING = "standing"
    SITTING = "sitting"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class Foot(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class CalibrationProfile:
    """Per-user, per-posture comfort range of ankle yaw.

    The three anchors are recorded in degrees at the far-left, middle-rest,
    and far-right positions of the user's comfortable rotation span.
    """

    posture: Posture
    far_left_deg: float
    rest_deg: float
    far_right_deg: float

    def __post_init__(self) -> None:
        if not (self.far_left_deg < self.rest_deg < self.far_right_deg):
            raise CalibrationError(
                f"calibration anchors must satisfy far_left < rest < far_right, "
                f"got ({self.far_left_deg}, {self.rest_deg}, {self.far_right_deg})"
            )

    @property
    def left_proportion(self) -> float:
        """Fraction of the whole span that lies left of the rest position."""
        return (self.rest_deg - self.far_left_deg) / (self.far_right_deg - self.far_left_deg)


def angle_to_normalized(cal: CalibrationProfile, yaw_deg: float) -> float:
    """Map a yaw angle onto the normalized keyboard axis.

    Piecewise linear: [far_left, rest] maps onto [0, p] and [rest, far_right]
    onto [p, 1], where p is the calibrated left proportion.  Yaw outside the
    calibrated span clamps to the nearest end so live sensor overshoot keeps
    the cursor on the keyboard.
    """
    if yaw_deg <= cal.far_left_deg:
        return 0.0
    if yaw_deg >= cal.far_right_deg:
        return 1.0
    p = cal.left_proportion
    if yaw_deg <= cal.rest_deg:
        return p * (yaw_deg - cal.far_left_deg) / (cal.rest_deg - cal.far_left_deg)
    return p + (1.0 - p) * (yaw_deg - cal.rest_deg) / (cal.far_right_deg - cal.rest_deg)


@dataclass(frozen=True)
class LetterLayout:
    """An ordered partition of the alphabet into contiguous letter groups."""

    groups: tuple[str, ...]

    def __post_init__(self) -> None:
        if isinstance(self.groups, list):  # tolerate list input
            object.__setattr__(self, "groups", tuple(self.groups))
        if any(not g for g in self.groups):
            raise ValueError("letter groups must be non-empty")
        if "".join(self.groups) != ALPHABET:
            raise ValueError(
                f"groups must concatenate to the full alphabet in order, got {self.groups!r}"
            )
        # letter -> group index lookup, 26 entries
        table = bytearray(26)
        g = 0
        for group in self.groups:
            for ch in group:
                table[ord(ch) - 97] = g
            g += 1
        object.__setattr__(self, "_table", bytes(table))

    @property
    def k_letters(self) -> int:
        return len(self.groups)

    def group_index(self, letter: str) -> int:
        """Group holding `letter`; raises on non-alphabet input."""
        code = ord(letter) - 97 if len(letter) == 1 else -1
        if not 0 <= code < 26:
            raise ValueError(f"not a lowercase letter: {letter!r}")
        return self._table[code]  # type: ignore[attr-defined]

    def letter_table(self) -> bytes:
        """26-byte table mapping letter index (0..25) to group index."""
        return self._table  # type: ignore[attr-defined]


@dataclass(frozen=True)
class ClusterKey:
    """One key interval [lo, hi) on the normalized axis with its tap statistics."""

    lo: float
    hi: float
    center: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"empty key interval [{self.lo}, {self.hi})")
        if self.sigma <= 0:
            raise ValueError("key sigma must be positive")


@dataclass(frozen=True)
class ClusterLayout:
    """Posture-specific key geometry: ordered intervals covering [0, 1].

    Intervals are half-open [lo, hi) with the final interval closed at 1.0
    so every position belongs to exactly one key.
    """

    posture: Posture
    keys: tuple[ClusterKey, ...]
    space_key_index: int

    def __post_init__(self) -> None:
        if isinstance(self.keys, list):
            object.__setattr__(self, "keys", tuple(self.keys))
        keys = self.keys
        if len(keys) < 2:
            raise ValueError("a cluster layout needs at least two keys")
        if keys[0].lo != 0.0 or keys[-1].hi != 1.0:
            raise ValueError("key intervals must cover [0, 1]")
        for a, b in zip(keys, keys[1:]):
            if a.hi != b.lo:
                raise ValueError(f"key intervals must tile the axis, gap at {a.hi} != {b.lo}")
        if not 0 <= self.space_key_index < len(keys):
            raise ValueError(f"space_key_index {self.space_key_index} out of range")
        object.__setattr__(self, "_bounds", tuple(k.lo for k in keys[1:]))

    @property
    def n_keys(self) -> int:
        return len(self.keys)

    @property
    def non_space_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.keys)) if i != self.space_key_index)

    def key_at(self, pos: float) -> int:
        """Index of the key interval containing `pos` (1.0 -> last key)."""
        if not 0.0 <= pos <= 1.0:
            raise ValueError(f"position {pos} outside [0, 1]")
        return bisect_right(self._bounds, pos)  # type: ignore[attr-defined]


def uniform_cluster_layout(
    n_keys: int,
    posture: Posture = Posture.STANDING,
    space_key_index: int | None = None,
    sigma: float = 0.05,
) -> ClusterLayout:
    """Equal-width key intervals; space defaults to the middle key."""
    if n_keys < 2:
        raise ValueError("need at least two keys")
    if space_key_index is None:
        space_key_index = n_keys // 2
    width = 1.0 / n_keys
    keys = tuple(
        ClusterKey(lo=i * width, hi=(i + 1) * width if i < n_keys - 1 else 1.0,
                   center=(i + 0.5) * width, sigma=sigma)
        for i in range(n_keys)
    )
    return ClusterLayout(posture=posture, keys=keys, space_key_index=space_key_index)


@dataclass(frozen=True)
class Keyboard:
    """A cluster layout with letter groups assigned to its non-space keys.

    Groups map onto the non-space keys in left-to-right order; every letter
    sits on exactly one key.
    """

    cluster_layout: ClusterLayout
    letter_layout: LetterLayout

    def __post_init__(self) -> None:
        n_letter_keys = self.cluster_layout.n_keys - 1
        if n_letter_keys != self.letter_layout.k_letters:
            raise ValueError(
                f"{n_letter_keys} non-space keys cannot hold "
                f"{self.letter_layout.k_letters} letter groups"
            )
        non_space = self.cluster_layout.non_space_indices
        key_letters = dict(zip(non_space, self.letter_layout.groups))
        # letter index (0..25) -> cluster key index
        letter_keys = bytes(non_space[g] for g in self.letter_layout.letter_table())
        object.__setattr__(self, "_key_letters", key_letters)
        object.__setattr__(self, "_letter_keys", letter_keys)

    @property
    def key_letters(self) -> dict[int, str]:
        """Non-space key index -> its letter group."""
        return dict(self._key_letters)  # type: ignore[attr-defined]

    @property
    def posture(self) -> Posture:
        return self.cluster_layout.posture

    def letter_key_table(self) -> bytes:
        """26-byte table mapping letter index (0..25) to cluster key index."""
        return self._letter_keys  # type: ignore[attr-defined]


def normalized_to_key(kb: Keyboard, pos: float) -> int:
    """Key index under a normalized position (total on [0, 1])."""
    return kb.cluster_layout.key_at(pos)


def letter_to_key(kb: Keyboard, letter: str) -> int:
    """Cluster key index holding `letter`; raises on non-alphabet input."""
    code = ord(letter) - 97 if len(letter) == 1 else -1
    if not 0 <= code < 26:
        raise ValueError(f"not a lowercase letter: {letter!r}")
    return kb.letter_key_table()[code]


def word_key_signature(kb: Keyboard, word: str) -> tuple[int, ...]:
    """Sequence of key indices produced by typing `word` letter by letter."""
    table = kb.letter_key_table()
    try:
        return tuple(table[ord(ch) - 97] for ch in word)
    except IndexError:
        raise ValueError(f"word contains non-alphabet characters: {word!r}") from None


def keyboard_to_dict(kb: Keyboard) -> dict:
    cl = kb.cluster_layout
    return {
        "version": KEYBOARD_FORMAT_VERSION,
        "posture": cl.posture.value,
        "keys": [
            {"lo": k.lo, "hi": k.hi, "center": k.center, "sigma": k.sigma} for k in cl.keys
        ],
        "space_key_index": cl.space_key_index,
        "groups": list(kb.letter_layout.groups),
    }


def keyboard_from_dict(doc: dict) -> Keyboard:
    version = doc.get("version")
    if version != KEYBOARD_FORMAT_VERSION:
        raise ValueError(f"unsupported keyboard format version: {version!r}")
    keys = tuple(
        ClusterKey(lo=k["lo"], hi=k["hi"], center=k["center"], sigma=k["sigma"])
        for k in doc["keys"]
    )
    cluster = ClusterLayout(
        posture=Posture(doc["posture"]),
        keys=keys,
        space_key_index=doc["space_key_index"],
    )
    return Keyboard(cluster_layout=cluster, letter_layout=LetterLayout(tuple(doc["groups"])))


def save_keyboard(kb: Keyboard, target: str | Path | IO[str]) -> None:
    doc = keyboard_to_dict(kb)
    if hasattr(target, "write"):
        json.dump(doc, target, indent=2)  # type: ignore[arg-type]
        target.write("\n")  # type: ignore[union-attr]
    else:
        Path(target).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_keyboard(source: str | Path | IO[str]) -> Keyboard:
    if hasattr(source, "read"):
        doc = json.load(source)  # type: ignore[arg-type]
    else:
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    return keyboard_from_dict(doc)
