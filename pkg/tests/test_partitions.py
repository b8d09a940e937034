import random

import pytest

from radialkb.geometry import ALPHABET
from radialkb.partitions import (
    cuts_at,
    cuts_to_groups,
    enumerate_letter_layouts,
    group_table,
    iter_cuts,
    layout_at,
    layout_count,
    total_layout_count,
)


class TestCounts:
    def test_two_groups(self):
        assert layout_count(2) == 25

    def test_thirteen_groups(self):
        assert layout_count(13) == 5_200_300

    def test_pipeline_range_total(self):
        assert total_layout_count(5, 13) == 16_774_590

    def test_count_matches_exhaustive_generation_small_k(self):
        for k in range(2, 7):
            assert sum(1 for _ in iter_cuts(k)) == layout_count(k)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            layout_count(0)
        with pytest.raises(ValueError):
            layout_count(27)


class TestEnumeration:
    def test_layouts_are_distinct_and_valid(self):
        seen = set()
        for index, layout in enumerate_letter_layouts(4):
            assert "".join(layout.groups) == ALPHABET
            assert layout.groups not in seen
            seen.add(layout.groups)
        assert len(seen) == layout_count(4)

    def test_deterministic_order(self):
        first = [l.groups for _, l in enumerate_letter_layouts(3)]
        second = [l.groups for _, l in enumerate_letter_layouts(3)]
        assert first == second

    def test_range_splitting_covers_everything(self):
        k = 5
        total = layout_count(k)
        cut_points = [0, total // 3, 2 * total // 3, total]
        stitched = []
        for a, b in zip(cut_points, cut_points[1:]):
            stitched.extend((i, l.groups) for i, l in enumerate_letter_layouts(k, a, b))
        full = [(i, l.groups) for i, l in enumerate_letter_layouts(k)]
        assert stitched == full

    def test_unranking_agrees_with_iteration(self):
        for k in (2, 4, 9):
            total = layout_count(k)
            rng = random.Random(k)
            probe = sorted(rng.sample(range(total), min(50, total)))
            by_iteration = {}
            for index, cuts in enumerate(iter_cuts(k)):
                if index in set(probe):
                    by_iteration[index] = cuts
            for index in probe:
                assert cuts_at(k, index) == by_iteration[index]

    def test_unranking_rejects_out_of_range(self):
        with pytest.raises(IndexError):
            cuts_at(5, layout_count(5))

    def test_layout_at_matches_groups(self):
        layout = layout_at(2, 0)
        assert layout.groups == ("a", "bcdefghijklmnopqrstuvwxyz")


class TestGroupTable:
    def test_table_matches_group_membership(self):
        rng = random.Random(5)
        for _ in range(50):
            k = rng.randint(1, 13)
            cuts = tuple(sorted(rng.sample(range(1, 26), k - 1)))
            table = group_table(cuts)
            groups = cuts_to_groups(cuts)
            for g, group in enumerate(groups):
                for ch in group:
                    assert table[ord(ch) - 97] == g

    def test_signature_via_translate(self):
        cuts = (13,)  # a-m | n-z
        table = group_table(cuts)
        word = bytes(ord(c) - 97 for c in "the")
        assert word.translate(table) == bytes([1, 0, 0])
