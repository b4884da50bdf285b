import random

import pytest
from hypothesis import given, strategies as st

from phrasepivot import (
    PhraseTable,
    ValidationError,
    oov_report,
    percentage_one_decimal,
    size_report,
)
from phrasepivot.analysis import size_report_from_counts
from helpers import mk_entry, mk_table


class TestOovReport:
    def test_full_coverage(self):
        table = mk_table(mk_entry("a", "z"), mk_entry("b", "z"))
        report = oov_report(table, [["a", "b"], ["b"]])
        assert report.oov_tokens == 0
        assert report.oov_types == 0
        assert report.oov_type_list == ()

    def test_partial_coverage(self):
        table = mk_table(mk_entry("a", "z"))
        report = oov_report(table, [["a", "b", "b"]])
        assert report.total_tokens == 3
        assert report.oov_tokens == 2
        assert report.total_types == 2
        assert report.oov_types == 1
        assert report.oov_type_list == ("b",)

    def test_multiword_source_does_not_cover(self):
        table = mk_table(mk_entry("a b", "z"))
        report = oov_report(table, [["a"]])
        assert report.oov_tokens == 1

    def test_empty_test_set(self):
        report = oov_report(mk_table(mk_entry("a", "z")), [])
        assert report.total_tokens == 0
        assert report.oov_tokens == 0
        assert report.total_types == 0

    def test_type_list_sorted(self):
        report = oov_report(mk_table(), [["c", "a", "b"]])
        assert report.oov_type_list == ("a", "b", "c")

    def test_lines(self):
        report = oov_report(mk_table(mk_entry("a", "z")), [["a", "b"]])
        assert report.lines() == [
            "total_tokens=2",
            "oov_tokens=1",
            "total_types=2",
            "oov_types=1",
        ]


def make_table(size, prefix="s"):
    return PhraseTable(tuple(mk_entry(f"{prefix}{i}", "z") for i in range(size)))


class TestSizeReport:
    def test_million_scale_ratios(self):
        assert size_report_from_counts(2763000, 8851000).percentage == 31.2
        assert size_report_from_counts(5343000, 8851000).percentage == 60.4

    def test_small_tables_same_ratio(self):
        report = size_report(make_table(2763), make_table(8851))
        assert report.percentage == 31.2
        assert report.lines() == ["entries=2763", "baseline_entries=8851", "percentage=31.2"]

    def test_self_ratio(self):
        table = make_table(10)
        assert size_report(table, table).percentage == 100.0

    def test_no_baseline(self):
        report = size_report(make_table(3))
        assert report.baseline_entries is None
        assert report.lines() == ["entries=3"]

    def test_empty_baseline(self):
        with pytest.raises(ValidationError, match="empty baseline"):
            size_report(make_table(3), mk_table())


class TestRounding:
    def test_half_up(self):
        assert percentage_one_decimal(15, 10000) == 0.2  # 0.15 -> up, not to even
        assert percentage_one_decimal(25, 10000) == 0.3
        assert percentage_one_decimal(1, 800) == 0.1  # 0.125 -> 0.1
        assert percentage_one_decimal(0, 5) == 0.0
        assert percentage_one_decimal(5, 5) == 100.0

    @given(st.integers(min_value=0, max_value=10**7), st.integers(min_value=1, max_value=10**7))
    def test_matches_exact_rational(self, part, whole):
        from fractions import Fraction

        got = percentage_one_decimal(part, whole)
        exact = Fraction(100 * part, whole)
        assert abs(Fraction(got).limit_denominator(10) - exact) <= Fraction(1, 20)


def test_oov_monotone_under_entry_growth():
    rng = random.Random(5)
    vocab = [f"w{i}" for i in range(12)]
    base_entries = tuple(
        mk_entry(rng.choice(vocab) + str(i), "z") for i in range(8)
    )
    smaller = PhraseTable(base_entries[:4])
    larger = PhraseTable(base_entries)
    tests = [[rng.choice(vocab) + str(rng.randint(0, 9)) for _ in range(6)] for _ in range(5)]
    small_report = oov_report(smaller, tests)
    large_report = oov_report(larger, tests)
    assert large_report.oov_tokens <= small_report.oov_tokens
    assert large_report.oov_types <= small_report.oov_types
