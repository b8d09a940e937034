import json
import random

import pytest

from radialkb.geometry import (
    ALPHABET,
    CalibrationError,
    CalibrationProfile,
    Keyboard,
    LetterLayout,
    Posture,
    angle_to_normalized,
    keyboard_from_dict,
    keyboard_to_dict,
    letter_to_key,
    load_keyboard,
    normalized_to_key,
    save_keyboard,
    uniform_cluster_layout,
    word_key_signature,
)


def cal(left, rest, right, posture=Posture.STANDING):
    return CalibrationProfile(posture, left, rest, right)


class TestAngleToNormalized:
    def test_left_endpoint(self):
        assert angle_to_normalized(cal(-30.0, 0.0, 50.0), -30.0) == 0.0

    def test_rest_maps_to_left_proportion(self):
        # p = 30 / 80
        assert angle_to_normalized(cal(-30.0, 0.0, 50.0), 0.0) == pytest.approx(0.375)

    def test_measured_mean_standing_ranges(self):
        # left range 33.66, right range 50.77 -> p = 33.66 / 84.43
        c = cal(-33.66, 0.0, 50.77)
        assert angle_to_normalized(c, 0.0) == pytest.approx(0.399, abs=5e-4)

    def test_clamps_outside_span(self):
        c = cal(-30.0, 0.0, 50.0)
        assert angle_to_normalized(c, -90.0) == 0.0
        assert angle_to_normalized(c, 90.0) == 1.0

    def test_rest_exactly_left_proportion(self):
        for left, rest, right in [(-30, 0, 50), (-12.5, 3.25, 41.0), (-80, -10, 5)]:
            c = cal(left, rest, right)
            assert angle_to_normalized(c, rest) == c.left_proportion

    def test_monotone_over_random_calibrations(self):
        rng = random.Random(1234)
        for _ in range(200):
            left = rng.uniform(-90, -1)
            rest = rng.uniform(left + 0.5, 40)
            right = rng.uniform(rest + 0.5, 90)
            c = cal(left, rest, right)
            yaws = sorted(rng.uniform(left - 20, right + 20) for _ in range(40))
            outs = [angle_to_normalized(c, y) for y in yaws]
            assert all(a <= b for a, b in zip(outs, outs[1:]))
            assert all(0.0 <= v <= 1.0 for v in outs)

    def test_invalid_calibration_rejected(self):
        with pytest.raises(CalibrationError):
            cal(10.0, 0.0, 50.0)
        with pytest.raises(CalibrationError):
            cal(-30.0, -30.0, 50.0)


class TestLetterLayout:
    def test_valid_partition(self):
        ll = LetterLayout(("abc", "defghijklm", "nopqrstuvwxyz"))
        assert ll.k_letters == 3
        assert ll.group_index("a") == 0
        assert ll.group_index("m") == 1
        assert ll.group_index("z") == 2

    def test_rejects_gaps_and_reorderings(self):
        with pytest.raises(ValueError):
            LetterLayout(("abc", "xyz"))
        with pytest.raises(ValueError):
            LetterLayout(("ba", "cdefghijklmnopqrstuvwxyz"))
        with pytest.raises(ValueError):
            LetterLayout(("", ALPHABET))

    def test_non_letter_lookup_rejected(self):
        ll = LetterLayout((ALPHABET,))
        with pytest.raises(ValueError):
            ll.group_index("3")


def uniform_keyboard(n_letter_groups, groups=None):
    """n_letter_groups+1 uniform keys with the space in the middle."""
    cl = uniform_cluster_layout(n_letter_groups + 1)
    if groups is None:
        # split alphabet into n contiguous groups as evenly as possible
        base, extra = divmod(26, n_letter_groups)
        out, pos = [], 0
        for i in range(n_letter_groups):
            size = base + (1 if i < extra else 0)
            out.append(ALPHABET[pos : pos + size])
            pos += size
        groups = tuple(out)
    return Keyboard(cluster_layout=cl, letter_layout=LetterLayout(tuple(groups)))


class TestKeyLookup:
    def test_uniform_boundaries(self):
        kb = uniform_keyboard(8)  # 9 keys total
        assert normalized_to_key(kb, 0.0) == 0
        assert normalized_to_key(kb, 0.5) == 4
        assert normalized_to_key(kb, 1.0) == 8

    def test_interval_membership_roundtrip(self):
        kb = uniform_keyboard(8)
        rng = random.Random(7)
        for _ in range(500):
            pos = rng.random()
            key = normalized_to_key(kb, pos)
            interval = kb.cluster_layout.keys[key]
            assert interval.lo <= pos and (pos < interval.hi or interval.hi == 1.0)

    def test_letter_to_key(self):
        kb = uniform_keyboard(6, groups=("abcde", "fghij", "klmno", "pqrst", "uvw", "xyz"))
        # space is key 3 of 7; letter groups occupy 0,1,2,4,5,6
        assert letter_to_key(kb, "a") == 0
        assert letter_to_key(kb, "h") == 1
        assert letter_to_key(kb, "z") == 6

    def test_letter_to_key_skips_space(self):
        kb = uniform_keyboard(8)
        space = kb.cluster_layout.space_key_index
        assert all(letter_to_key(kb, ch) != space for ch in ALPHABET)

    def test_non_alphabet_rejected(self):
        kb = uniform_keyboard(8)
        with pytest.raises(ValueError):
            letter_to_key(kb, "!")

    def test_signature(self):
        kb = uniform_keyboard(2, groups=("abcdefghijklm", "nopqrstuvwxyz"))
        non_space = kb.cluster_layout.non_space_indices
        assert word_key_signature(kb, "the") == (non_space[1], non_space[0], non_space[0])

    def test_group_count_mismatch_rejected(self):
        cl = uniform_cluster_layout(9)
        with pytest.raises(ValueError):
            Keyboard(cluster_layout=cl, letter_layout=LetterLayout((ALPHABET,)))


class TestKeyboardSerialization:
    def test_roundtrip_exact(self, tmp_path):
        kb = uniform_keyboard(8)
        path = tmp_path / "kb.json"
        save_keyboard(kb, path)
        back = load_keyboard(path)
        for a, b in zip(kb.cluster_layout.keys, back.cluster_layout.keys):
            assert abs(a.lo - b.lo) <= 1e-12
            assert abs(a.hi - b.hi) <= 1e-12
            assert abs(a.center - b.center) <= 1e-12
            assert abs(a.sigma - b.sigma) <= 1e-12
        assert back.letter_layout == kb.letter_layout
        assert back.cluster_layout.space_key_index == kb.cluster_layout.space_key_index

    def test_versioned_document(self):
        doc = keyboard_to_dict(uniform_keyboard(8))
        assert doc["version"] == 1
        assert set(doc) == {"version", "posture", "keys", "space_key_index", "groups"}
        doc["version"] = 99
        with pytest.raises(ValueError):
            keyboard_from_dict(doc)

    def test_json_is_plain_text(self, tmp_path):
        path = tmp_path / "kb.json"
        save_keyboard(uniform_keyboard(8), path)
        doc = json.loads(path.read_text())
        assert doc["posture"] == "standing"
