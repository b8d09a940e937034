import math
from dataclasses import replace

import pytest

from radialkb.corpus import PhraseSet, load_lexicon
from radialkb.decoder import SpatialModel
from radialkb.geometry import (
    ALPHABET,
    Keyboard,
    LetterLayout,
    Posture,
    uniform_cluster_layout,
)
from radialkb.gestures import StrategyConfig
from radialkb.session import Mode, SessionConfig
from radialkb.simulator import (
    TypistModel,
    key_hit_rate,
    monte_carlo_compare,
    simulate_phrase,
    simulate_session,
)


def even_groups(k):
    base, extra = divmod(26, k)
    out, pos = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        out.append(ALPHABET[pos : pos + size])
        pos += size
    return tuple(out)


def nine_key_keyboard(groups=None):
    return Keyboard(
        cluster_layout=uniform_cluster_layout(9),
        letter_layout=LetterLayout(tuple(groups) if groups else even_groups(8)),
    )


def spatial_with_sigma(kb, sigma):
    base = SpatialModel.from_keyboard(kb)
    return replace(base, sigmas=(sigma,) * len(base.sigmas))


def session_config(kb, lexicon, phrases):
    return SessionConfig(
        mode=Mode.VISUAL,
        strategy=StrategyConfig.upstand(),
        posture=Posture.STANDING,
        keyboard=kb,
        phrases=PhraseSet(tuple(phrases)),
        lexicon=lexicon,
    )


@pytest.fixture(scope="module")
def sim_lexicon(request):
    # pull the shared demo lexicon through the session-scoped fixture
    return request.getfixturevalue("demo_lexicon")


class TestNoiselessTypist:
    def test_zero_sigma_transcribes_perfectly(self, demo_lexicon):
        kb = nine_key_keyboard()
        typist = TypistModel(spatial=spatial_with_sigma(kb, 1e-4), seed=1)
        phrases = ["the cat ran over the dog", "we can see the world"]
        result = simulate_session(typist, session_config(kb, demo_lexicon, phrases))
        assert result.metrics.ter == 0.0
        assert result.metrics.ncer == 0.0
        assert [p.transcribed for p in result.metrics.phrases] == phrases
        assert result.forced_commits == ()

    def test_analytic_wpm_for_fixed_timing(self, demo_lexicon):
        kb = nine_key_keyboard()
        typist = TypistModel(spatial=spatial_with_sigma(kb, 1e-4), inter_tap_ms=250.0, seed=1)
        phrase = "the cat"
        result = simulate_session(typist, session_config(kb, demo_lexicon, [phrase]))
        # commands: 3 taps + flat + select, twice -> 10 commands, 9 gaps
        commands = 2 * (3 + 1 + 1)
        expected_seconds = (commands - 1) * 0.250
        expected_wpm = (len(phrase) - 1) / expected_seconds * 12
        assert result.metrics.wpm == pytest.approx(expected_wpm, rel=1e-6)


class TestHitRate:
    def test_centered_key_matches_gaussian_mass(self):
        kb = nine_key_keyboard()
        sigma = 0.07
        spatial = spatial_with_sigma(kb, sigma)
        width = 1.0 / 9.0
        expected = math.erf((width / 2) / (sigma * math.sqrt(2)))
        assert expected == pytest.approx(0.572, abs=1e-3)
        rate = key_hit_rate(kb, spatial, key_index=2, n=10_000, seed=7)
        assert rate == pytest.approx(expected, abs=0.02)

    def test_simulation_collects_per_key_hits(self, demo_lexicon):
        kb = nine_key_keyboard()
        typist = TypistModel(spatial=spatial_with_sigma(kb, 0.05), seed=3)
        result = simulate_session(
            typist, session_config(kb, demo_lexicon, ["the cat ran"])
        )
        assert result.key_hits
        for hits, total in result.key_hits.values():
            assert 0 <= hits <= total


class TestDeterminism:
    def test_same_seed_identical_logs(self, demo_lexicon):
        kb = nine_key_keyboard()
        typist = TypistModel(spatial=spatial_with_sigma(kb, 0.06), seed=9)
        a = simulate_session(typist, session_config(kb, demo_lexicon, ["the cat"]))
        b = simulate_session(typist, session_config(kb, demo_lexicon, ["the cat"]))
        assert a.log == b.log
        assert a.metrics == b.metrics

    def test_different_seeds_differ(self, demo_lexicon):
        kb = nine_key_keyboard()
        base = spatial_with_sigma(kb, 0.06)
        a = simulate_session(
            TypistModel(spatial=base, seed=1),
            session_config(kb, demo_lexicon, ["the cat ran over the dog"]),
        )
        b = simulate_session(
            TypistModel(spatial=base, seed=2),
            session_config(kb, demo_lexicon, ["the cat ran over the dog"]),
        )
        assert a.log != b.log


class TestNoiseMonotonicity:
    def test_ter_rises_with_sigma_on_fixed_seeds(self, demo_lexicon):
        kb = nine_key_keyboard()
        phrases = [
            "the cat ran over the dog",
            "we can see the world",
            "all work and no play",
            "time to go shopping",
            "a problem with the engine",
        ]
        grid = [0.02, 0.05, 0.08, 0.12]
        ters = []
        for sigma in grid:
            typist = TypistModel(spatial=spatial_with_sigma(kb, sigma), seed=42)
            result = simulate_session(typist, session_config(kb, demo_lexicon, phrases))
            ters.append(result.metrics.ter)
        assert all(a <= b for a, b in zip(ters, ters[1:]))
        assert ters[-1] > ters[0]

    def test_doubled_sigma_strictly_increases_ter(self, demo_lexicon):
        kb = nine_key_keyboard()
        phrases = ["the cat ran over the dog", "we can see the world"]
        low = simulate_session(
            TypistModel(spatial=spatial_with_sigma(kb, 0.05), seed=5),
            session_config(kb, demo_lexicon, phrases),
        )
        high = simulate_session(
            TypistModel(spatial=spatial_with_sigma(kb, 0.10), seed=5),
            session_config(kb, demo_lexicon, phrases),
        )
        assert high.metrics.ter > low.metrics.ter


class TestForcedCommits:
    def test_word_missing_from_lexicon_is_logged(self):
        kb = nine_key_keyboard()
        lex = load_lexicon(["the\t100", "cat\t50"])
        typist = TypistModel(spatial=spatial_with_sigma(kb, 1e-4), seed=1)
        log = simulate_phrase(typist, kb, lex, "the fox")
        assert any(r["kind"] == "phrase_end" for r in log)
        result = simulate_session(typist, session_config(kb, lex, ["the fox"]))
        assert len(result.forced_commits) == 1
        assert result.forced_commits[0]["intended"] == "fox"

    def test_better_disambiguation_means_fewer_forced_commits(self):
        # same lexicon, two keyboards: one separates a/b/c, the other lumps
        # them onto a single key so low-frequency words fall off the page
        words = ["aa", "ab", "ba", "bb", "ac", "ca", "bc", "cb", "cc"]
        lex = load_lexicon(f"{w}\t{100 - i}" for i, w in enumerate(words))
        separated = nine_key_keyboard(
            ("a", "b", "c", "d", "e", "f", "g", "hijklmnopqrstuvwxyz")
        )
        lumped = nine_key_keyboard(
            ("abc", "d", "e", "f", "g", "h", "i", "jklmnopqrstuvwxyz")
        )
        phrases = PhraseSet(("bc cb cc",))  # ranks 7-9 within the lumped group
        report = monte_carlo_compare(
            {"separated": separated, "lumped": lumped},
            lex,
            phrases,
            seeds=[1, 2, 3],
            sigma=1e-4,
            max_pages=1,
        )
        assert report["separated"].forced_commits == 0
        assert report["lumped"].forced_commits > 0
        assert report["separated"].mean_ter < report["lumped"].mean_ter


class TestCorrectionPolicy:
    def test_always_policy_fixes_visible_errors(self, demo_lexicon):
        kb = nine_key_keyboard()
        phrases = ["the cat ran over the dog", "we can see the world"]
        never = simulate_session(
            TypistModel(spatial=spatial_with_sigma(kb, 0.08), seed=11),
            session_config(kb, demo_lexicon, phrases),
        )
        always = simulate_session(
            TypistModel(
                spatial=spatial_with_sigma(kb, 0.08), seed=11, correction_policy="always"
            ),
            session_config(kb, demo_lexicon, phrases),
        )
        assert always.metrics.ncer <= never.metrics.ncer
        total_fixes = sum(p.fixes for p in always.metrics.phrases)
        assert total_fixes > 0


class TestMonteCarloCompare:
    def test_identical_keyboards_identical_metrics(self, demo_lexicon):
        kb = nine_key_keyboard()
        report = monte_carlo_compare(
            {"a": kb, "b": kb},
            demo_lexicon,
            PhraseSet(("the cat", "we can go")),
            seeds=[1, 2],
            sigma=0.05,
        )
        assert report["a"].mean_ter == report["b"].mean_ter
        assert report["a"].mean_wpm == report["b"].mean_wpm

    def test_empty_inputs_rejected(self, demo_lexicon):
        kb = nine_key_keyboard()
        with pytest.raises(ValueError):
            monte_carlo_compare({"a": kb}, demo_lexicon, PhraseSet(("the cat",)), seeds=[])
