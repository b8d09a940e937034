"""From labeled tap samples to posture-specific key geometry.

Tap positions are clustered with a Gaussian mixture per posture; each
mixture becomes a :class:`ClusterLayout` whose key boundaries sit at the
posterior crossing points of adjacent components (falling back to mean
midpoints when the crossings are not usable).  The cluster that captured
the most samples becomes the space key.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .geometry import ALPHABET, ClusterKey, ClusterLayout, Posture
from .gmm import GmmModel, fit_gmm_1d

TAP_CSV_HEADER = ["participant", "posture", "letter", "normalized_position"]

# the probe keyboard that tap data is collected on: 26 letters + space
PROBE_KEY_COUNT = 27

MIN_SIGMA = 1e-4


class DegenerateLayoutError(ValueError):
    """A mixture component captured no samples; no usable key layout."""


@dataclass(frozen=True)
class TapSample:
    """One labeled eyes-free tap: who tapped, in which posture, at what."""

    participant: str
    posture: Posture
    letter: str
    position: float

    def __post_init__(self) -> None:
        if len(self.letter) != 1 or self.letter not in ALPHABET + " ":
            raise ValueError(f"tap letter must be a-z or space, got {self.letter!r}")
        if not 0.0 <= self.position <= 1.0:
            raise ValueError(f"tap position {self.position} outside [0, 1]")


def load_taps(source: str | Path | IO[str]) -> list[TapSample]:
    """Parse the tap CSV (`participant,posture,letter,normalized_position`)."""
    if hasattr(source, "read"):
        rows = list(csv.reader(source))  # type: ignore[arg-type]
    else:
        with open(source, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != TAP_CSV_HEADER:
        raise ValueError(f"tap CSV must start with header {','.join(TAP_CSV_HEADER)}")
    taps = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ValueError(f"line {line_no}: expected 4 columns, got {len(row)}")
        participant, posture, letter, pos = row
        try:
            taps.append(
                TapSample(
                    participant=participant.strip(),
                    posture=Posture(posture.strip().lower()),
                    letter=letter.strip().lower() or " ",
                    position=float(pos),
                )
            )
        except ValueError as exc:
            raise ValueError(f"line {line_no}: {exc}") from None
    return taps


def save_taps(taps: Iterable[TapSample], target: str | Path | IO[str]) -> None:
    def write(fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TAP_CSV_HEADER)
        for t in taps:
            w.writerow([t.participant, t.posture.value, t.letter, repr(t.position)])

    if hasattr(target, "write"):
        write(target)
    else:
        with open(target, "w", newline="", encoding="utf-8") as fh:
            write(fh)


def _posterior_crossing(
    w0: float, m0: float, v0: float, w1: float, m1: float, v1: float
) -> float:
    """Position between two mean-sorted components where their posteriors meet.

    Solves log(w0 N(x; m0, v0)) = log(w1 N(x; m1, v1)); quadratic unless the
    variances match.  Returns the root inside (m0, m1), or the mean midpoint
    when no root lands there.
    """
    midpoint = 0.5 * (m0 + m1)
    a = 0.5 / v1 - 0.5 / v0
    b = m0 / v0 - m1 / v1
    c = (m1 * m1) / (2 * v1) - (m0 * m0) / (2 * v0) - math.log(w1 / w0) - 0.5 * math.log(v0 / v1)
    roots: list[float] = []
    if abs(a) < 1e-12:
        if abs(b) > 1e-12:
            roots = [-c / b]
    else:
        disc = b * b - 4 * a * c
        if disc >= 0:
            sq = math.sqrt(disc)
            roots = [(-b - sq) / (2 * a), (-b + sq) / (2 * a)]
    inside = [r for r in roots if m0 < r < m1]
    return inside[0] if inside else midpoint


def cluster_layout_from_gmm(
    model: GmmModel, samples: Sequence[float], posture: Posture
) -> ClusterLayout:
    """Key intervals, tap centers, and the space key from a fitted mixture."""
    x = np.asarray(list(samples), dtype=float)
    n = model.n_components
    lj = (
        np.log(np.array(model.weights))[None, :]
        - 0.5 * np.log(2 * np.pi * np.array(model.variances))[None, :]
        - 0.5 * (x[:, None] - np.array(model.means)[None, :]) ** 2
        / np.array(model.variances)[None, :]
    )
    assign = np.argmax(lj, axis=1)
    counts = np.bincount(assign, minlength=n)
    if (counts == 0).any():
        empty = [i for i, c in enumerate(counts) if c == 0]
        raise DegenerateLayoutError(f"components {empty} captured no samples")

    boundaries = [
        _posterior_crossing(
            model.weights[i], model.means[i], model.variances[i],
            model.weights[i + 1], model.means[i + 1], model.variances[i + 1],
        )
        for i in range(n - 1)
    ]
    if any(b2 <= b1 for b1, b2 in zip(boundaries, boundaries[1:])):
        # crossings out of order: fall back to mean midpoints wholesale
        boundaries = [
            0.5 * (model.means[i] + model.means[i + 1]) for i in range(n - 1)
        ]
    los = [0.0, *boundaries]
    his = [*boundaries, 1.0]
    keys = tuple(
        ClusterKey(
            lo=lo,
            hi=hi,
            center=model.means[i],
            sigma=max(math.sqrt(model.variances[i]), MIN_SIGMA),
        )
        for i, (lo, hi) in enumerate(zip(los, his))
    )
    return ClusterLayout(
        posture=posture,
        keys=keys,
        space_key_index=int(np.argmax(counts)),
    )


CLUSTER_FORMAT_VERSION = 1


def cluster_layout_to_dict(layout: ClusterLayout) -> dict:
    return {
        "version": CLUSTER_FORMAT_VERSION,
        "posture": layout.posture.value,
        "keys": [
            {"lo": k.lo, "hi": k.hi, "center": k.center, "sigma": k.sigma}
            for k in layout.keys
        ],
        "space_key_index": layout.space_key_index,
    }


def cluster_layout_from_dict(doc: dict) -> ClusterLayout:
    if doc.get("version") != CLUSTER_FORMAT_VERSION:
        raise ValueError(f"unsupported cluster layout version: {doc.get('version')!r}")
    return ClusterLayout(
        posture=Posture(doc["posture"]),
        keys=tuple(
            ClusterKey(lo=k["lo"], hi=k["hi"], center=k["center"], sigma=k["sigma"])
            for k in doc["keys"]
        ),
        space_key_index=doc["space_key_index"],
    )


def save_cluster_layout(layout: ClusterLayout, path: str | Path, meta: dict | None = None) -> None:
    import json

    doc = cluster_layout_to_dict(layout)
    if meta:
        doc = {"meta": meta, **doc}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_cluster_layout(path: str | Path) -> ClusterLayout:
    import json

    return cluster_layout_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def fit_cluster_layouts(
    taps: Sequence[TapSample],
    posture: Posture,
    n_keys_range: tuple[int, int] = (6, 14),
    seed: int = 0,
    **fit_kwargs,
) -> dict[int, ClusterLayout]:
    """One cluster layout per key count in `n_keys_range` for one posture.

    The seed is offset per key count so fits stay independent but the whole
    family is reproducible from a single seed.
    """
    positions = [t.position for t in taps if t.posture == posture]
    if not positions:
        raise ValueError(f"no tap samples for posture {posture.value}")
    layouts: dict[int, ClusterLayout] = {}
    for n_keys in range(n_keys_range[0], n_keys_range[1] + 1):
        model = fit_gmm_1d(positions, n_keys, seed=seed + n_keys, **fit_kwargs)
        layouts[n_keys] = cluster_layout_from_gmm(model, positions, posture)
    return layouts
