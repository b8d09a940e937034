"""A synthetic typist: drives full sessions with noisy per-key Gaussian taps.

Each letter is tapped at a position drawn from the spatial model of its
intended key; the sequence then goes through the regular session engine,
candidate paging, and commit flow.  Everything is deterministic under the
typist's seed, which is what makes noise-sweep comparisons meaningful: the
same seed reuses the same underlying tap offsets at every noise level.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .corpus import Lexicon, PhraseSet
from .decoder import SpatialModel
from .geometry import Keyboard, letter_to_key, normalized_to_key
from .gestures import GestureEvent, GestureKind, StrategyConfig
from .metrics import MetricsReport, compute_metrics
from .session import Mode, Session, SessionConfig


@dataclass(frozen=True)
class TypistModel:
    """Noise, pacing, and correction behavior of the simulated typist."""

    spatial: SpatialModel
    inter_tap_ms: float = 300.0
    jitter_ms: float = 0.0
    correction_policy: str = "never"  # "never" | "always"
    max_retries: int = 2
    max_pages: int = 10  # how deep the typist searches the candidate list
    seed: int = 0

    def __post_init__(self) -> None:
        if self.correction_policy not in ("never", "always"):
            raise ValueError(f"unknown correction policy {self.correction_policy!r}")
        if self.inter_tap_ms <= 0:
            raise ValueError("inter_tap_ms must be positive")


@dataclass(frozen=True)
class SimulationResult:
    metrics: MetricsReport
    key_hits: dict[int, tuple[int, int]]  # intended key -> (hits, samples)
    forced_commits: tuple[dict, ...]  # intended word unreachable; what happened
    log: tuple[dict, ...]

    def hit_rate(self, key_index: int) -> float:
        hits, total = self.key_hits[key_index]
        return hits / total if total else 0.0


class _Typist:
    """One seeded run over a session's phrases."""

    def __init__(self, model: TypistModel, session: Session):
        self.model = model
        self.session = session
        self.rng = random.Random(model.seed)
        self.t = 0
        self.key_hits: dict[int, list[int]] = {}
        self.forced: list[dict] = []

    def _advance_clock(self) -> int:
        now = self.t
        step = self.model.inter_tap_ms
        if self.model.jitter_ms:
            step += self.model.jitter_ms * self.rng.uniform(-1.0, 1.0)
        self.t += max(1, round(step))
        return now

    def _send(self, kind: GestureKind, position: float | None = None) -> None:
        foot = (
            self.session.config.strategy.navigation_foot
            if kind == GestureKind.CURSOR_MOVE
            else self.session.config.strategy.command_foot
        )
        now = self.t if kind == GestureKind.CURSOR_MOVE else self._advance_clock()
        self.session.apply_event(
            GestureEvent(kind=kind, foot=foot, timestamp_ms=now, position=position)
        )

    def _tap_letter(self, ch: str) -> None:
        kb = self.session.config.keyboard
        key = letter_to_key(kb, ch)
        center, sigma = self.model.spatial.params_for(key)
        pos = center + sigma * self.rng.gauss(0.0, 1.0)
        pos = min(max(pos, 0.0), 1.0)
        stats = self.key_hits.setdefault(key, [0, 0])
        stats[1] += 1
        if normalized_to_key(kb, pos) == key:
            stats[0] += 1
        self._send(GestureKind.CURSOR_MOVE, pos)
        self._send(GestureKind.FOREFOOT_TAP)

    def _select_and_commit(self, word: str) -> str | None:
        """Returns the committed word, or None when nothing was committable."""
        config = self.session.config
        size = config.page_size
        n_zones = size + 2
        candidates = [w for w, _ in self.session.state.candidates]
        reachable = candidates[: self.model.max_pages * size]
        if word in reachable:
            idx = reachable.index(word)
        elif candidates:
            self.forced.append({"intended": word, "committed": candidates[0]})
            idx = 0
        else:
            self.forced.append({"intended": word, "committed": None})
            self._send(GestureKind.FLAT_BACKWARD)
            while self.session.state.pending:
                self._send(GestureKind.REARFOOT_TAP)
            return None
        for _ in range(idx // size):
            self._send(GestureKind.CURSOR_MOVE, (size + 1 + 0.5) / n_zones)
            self._send(GestureKind.FOREFOOT_TAP)
        slot = 1 + idx % size
        self._send(GestureKind.CURSOR_MOVE, (slot + 0.5) / n_zones)
        self._send(GestureKind.FOREFOOT_TAP)
        return self.session.state.committed[-1]

    def _delete_last_word(self) -> None:
        self._send(GestureKind.FLAT_FORWARD)
        self._send(GestureKind.REARFOOT_TAP)
        self._send(GestureKind.FLAT_BACKWARD)

    def type_word(self, word: str) -> None:
        attempts = 0
        while True:
            for ch in word:
                self._tap_letter(ch)
            self._send(GestureKind.FLAT_FORWARD)
            committed = self._select_and_commit(word)
            attempts += 1
            wrong = committed is not None and committed != word
            if (
                wrong
                and self.model.correction_policy == "always"
                and attempts <= self.model.max_retries
            ):
                self._delete_last_word()
                continue
            return

    def run(self) -> None:
        while True:
            for word in self.session.presented.split():
                self.type_word(word)
            if not self.session.advance_phrase(self.t):
                break


def simulate_session(typist: TypistModel, config: SessionConfig) -> SimulationResult:
    """Run the typist over every phrase of the session configuration."""
    session = Session(config)
    runner = _Typist(typist, session)
    runner.run()
    return SimulationResult(
        metrics=compute_metrics(session.log),
        key_hits={k: (h, n) for k, (h, n) in sorted(runner.key_hits.items())},
        forced_commits=tuple(runner.forced),
        log=tuple(session.log),
    )


def simulate_phrase(
    typist: TypistModel,
    keyboard: Keyboard,
    lexicon: Lexicon,
    phrase: str,
    decode_mode: str = "exact",
) -> list[dict]:
    """Event log of the typist transcribing a single phrase."""
    config = SessionConfig(
        mode=Mode.VISUAL,
        strategy=StrategyConfig.upstand(),
        posture=keyboard.posture,
        keyboard=keyboard,
        phrases=PhraseSet((phrase,)),
        lexicon=lexicon,
        decode_mode=decode_mode,
        spatial=typist.spatial if decode_mode == "bayes" else None,
    )
    return list(simulate_session(typist, config).log)


def key_hit_rate(
    keyboard: Keyboard, spatial: SpatialModel, key_index: int, n: int, seed: int = 0
) -> float:
    """Empirical P(tap sampled for a key lands inside it) over n draws."""
    center, sigma = spatial.params_for(key_index)
    rng = random.Random(seed)
    hits = 0
    for _ in range(n):
        pos = min(max(center + sigma * rng.gauss(0.0, 1.0), 0.0), 1.0)
        if normalized_to_key(keyboard, pos) == key_index:
            hits += 1
    return hits / n


@dataclass(frozen=True)
class ComparisonEntry:
    name: str
    runs: int
    mean_wpm: float
    mean_ter: float
    std_ter: float
    mean_ncer: float
    forced_commits: int


def monte_carlo_compare(
    keyboards: dict[str, Keyboard],
    lexicon: Lexicon,
    phrases: PhraseSet,
    seeds: list[int],
    sigma: float | None = None,
    inter_tap_ms: float = 300.0,
    jitter_ms: float = 0.0,
    correction_policy: str = "never",
    max_pages: int = 10,
    decode_mode: str = "exact",
) -> dict[str, ComparisonEntry]:
    """Per-keyboard metrics over repeated seeded runs on a shared phrase set.

    Noise is matched across keyboards: the per-key sigma is either the
    given scalar or each keyboard's own cluster dispersion.  Keyboards are
    processed in dict order and seeds in list order, so the report is
    deterministic.
    """
    if len(phrases) == 0:
        raise ValueError("empty phrase set")
    if not seeds:
        raise ValueError("need at least one seed")
    out: dict[str, ComparisonEntry] = {}
    for name, kb in keyboards.items():
        spatial = SpatialModel.from_keyboard(kb)
        if sigma is not None:
            spatial = replace(spatial, sigmas=(sigma,) * len(spatial.sigmas))
        ters, wpms, ncers, forced = [], [], [], 0
        for seed in seeds:
            typist = TypistModel(
                spatial=spatial,
                inter_tap_ms=inter_tap_ms,
                jitter_ms=jitter_ms,
                correction_policy=correction_policy,
                max_pages=max_pages,
                seed=seed,
            )
            config = SessionConfig(
                mode=Mode.VISUAL,
                strategy=StrategyConfig.upstand(),
                posture=kb.posture,
                keyboard=kb,
                phrases=phrases,
                lexicon=lexicon,
                decode_mode=decode_mode,
                spatial=spatial if decode_mode == "bayes" else None,
            )
            result = simulate_session(typist, config)
            ters.append(result.metrics.ter)
            wpms.append(result.metrics.wpm)
            ncers.append(result.metrics.ncer)
            forced += len(result.forced_commits)
        n = len(seeds)
        mean_ter = sum(ters) / n
        var = sum((t - mean_ter) ** 2 for t in ters) / n
        out[name] = ComparisonEntry(
            name=name,
            runs=n,
            mean_wpm=sum(wpms) / n,
            mean_ter=mean_ter,
            std_ter=var**0.5,
            mean_ncer=sum(ncers) / n,
            forced_commits=forced,
        )
    return out
