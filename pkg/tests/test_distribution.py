import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from codeshift.distribution import (
    DEFAULT_COMPLEXITY_RANGES,
    ComplexityRange,
    complexity_members,
    default_complexity_scenarios,
    element_coverage,
    suggest_syntax_scenarios,
)
from codeshift.elements import ALL_KINDS, ElementKind
from codeshift.errors import ValidationError

from conftest import build_corpus
from oracles.java_parser import count_elements


def target_of_size(k: int) -> str:
    return "x " * (k - 1) + ";"


def sized_corpus(sizes, test_sizes=(5,), order=None):
    ids = list(range(len(sizes)))
    if order is not None:
        ids = order
    records = [(f"t{ids[i]:04d}", "train", "", target_of_size(s)) for i, s in enumerate(sizes)]
    records += [(f"e{i:04d}", "test", "", target_of_size(s)) for i, s in enumerate(test_sizes)]
    return build_corpus(records)


class TestComplexityMembers:
    def test_bottom_three_percent(self):
        corpus = sized_corpus(list(range(1, 101)))
        sel = complexity_members(corpus, ComplexityRange(0, 3))
        assert sel.members["train"] == {"t0000", "t0001", "t0002"}
        assert sel.size_interval == (1, 3)

    def test_full_range(self):
        corpus = sized_corpus(list(range(1, 101)))
        sel = complexity_members(corpus, ComplexityRange(0, 100))
        assert len(sel.members["train"]) == 100

    def test_five_default_ranges_each_three_percent_and_disjoint(self):
        sizes = list(range(1, 101))
        random.Random(3).shuffle(sizes)
        corpus = sized_corpus(sizes)
        seen = set()
        for crange in DEFAULT_COMPLEXITY_RANGES:
            members = complexity_members(corpus, crange).members["train"]
            assert len(members) == 3
            assert not (members & seen)
            seen |= members

    def test_value_projection_onto_test(self):
        corpus = sized_corpus(list(range(1, 101)), test_sizes=(1, 2, 50, 99))
        sel = complexity_members(corpus, ComplexityRange(0, 3))
        assert sel.members["test"] == {"e0000", "e0001"}

    def test_empty_selection_advises(self):
        corpus = sized_corpus([10, 20, 30])
        with pytest.raises(ValidationError, match="widen the range"):
            complexity_members(corpus, ComplexityRange(0, 3))

    def test_tie_break_by_file_order(self):
        corpus = sized_corpus([7, 7, 7, 7])
        sel = complexity_members(corpus, ComplexityRange(0, 50))
        assert sel.members["train"] == {"t0000", "t0001"}

    def test_permutation_stability_distinct_sizes(self):
        sizes = list(range(10, 60))
        corpus_a = sized_corpus(sizes)
        shuffled = sizes[:]
        random.Random(9).shuffle(shuffled)
        # keep ids attached to their sizes while permuting file order
        order = sorted(range(len(sizes)), key=lambda i: sizes.index(shuffled[i]))
        corpus_b = sized_corpus(shuffled, order=[sizes.index(s) for s in shuffled])
        sel_a = complexity_members(corpus_a, ComplexityRange(20, 60))
        sel_b = complexity_members(corpus_b, ComplexityRange(20, 60))
        assert sel_a.members["train"] == sel_b.members["train"]

    def test_external_sizes_hook(self):
        corpus = sized_corpus([10, 20, 30, 40])
        external = {"t0000": 1000}
        sel = complexity_members(corpus, ComplexityRange(50, 100), external=external)
        assert "t0000" in sel.members["train"]

    def test_invalid_range_rejected(self):
        with pytest.raises(ValidationError):
            ComplexityRange(50, 40)
        with pytest.raises(ValidationError):
            ComplexityRange(-1, 10)


@settings(deadline=None, max_examples=40)
@given(
    n=st.integers(min_value=4, max_value=300),
    lo=st.integers(min_value=0, max_value=99),
    span=st.integers(min_value=1, max_value=100),
)
def test_cardinality_formula(n, lo, span):
    hi = min(lo + span, 100)
    sizes = list(range(1, n + 1))
    corpus = sized_corpus(sizes)
    # exact rational floor; naive float arithmetic is off by one for cases
    # like n=100, lo=58 (58/100*100 floors to 57)
    expected = math.floor(Fraction(hi) * n / 100) - math.floor(Fraction(lo) * n / 100)
    if expected == 0:
        with pytest.raises(ValidationError):
            complexity_members(corpus, ComplexityRange(lo, hi))
    else:
        sel = complexity_members(corpus, ComplexityRange(lo, hi))
        assert len(sel.members["train"]) == expected


class TestDefaults:
    def test_five_ranges(self):
        ranges = default_complexity_scenarios()
        assert [(r.lo_pct, r.hi_pct) for r in ranges] == [
            (0, 3), (24, 27), (48, 51), (72, 75), (97, 100)]

    def test_tail_labels_extrapolation(self):
        ranges = default_complexity_scenarios()
        assert ranges[0].label == "extrapolation"
        assert ranges[-1].label == "extrapolation"

    def test_middle_labels_interpolation(self):
        for r in default_complexity_scenarios()[1:-1]:
            assert r.label == "interpolation"


class TestElementCoverage:
    def test_counting(self):
        records = [(f"t{i:03d}", "train", "", "break;" if i < 3 else "int x;")
                   for i in range(100)]
        records.append(("e0", "test", "", "int x;"))
        coverage = element_coverage(build_corpus(records))
        assert coverage.sample_fraction[ElementKind.BREAK] == pytest.approx(0.03)

    def test_absent_kind_is_zero(self):
        records = [("t0", "train", "", "int x;"), ("e0", "test", "", "int x;")]
        coverage = element_coverage(build_corpus(records))
        assert coverage.sample_fraction[ElementKind.FOR] == 0.0
        assert coverage.occurrence_fraction[ElementKind.FOR] == 0.0

    def test_against_reference_annotations(self, fixture_corpus, fixture_records):
        coverage = element_coverage(fixture_corpus)
        train = [r for r in fixture_records if r["partition"] == "train"]
        for kind in ALL_KINDS:
            expected = sum(
                1 for r in train if count_elements(r["target"])[kind.value] > 0
            ) / len(train)
            assert coverage.sample_fraction[kind] == pytest.approx(expected), kind

    def test_occurrence_fractions_sum_to_one(self, fixture_corpus):
        coverage = element_coverage(fixture_corpus)
        assert sum(coverage.occurrence_fraction.values()) == pytest.approx(1.0)


class TestSuggest:
    def make_coverage_corpus(self):
        # 1000 train samples: 31 with break, 400 with for, 25 with long
        records = []
        for i in range(1000):
            if i < 31:
                target = "break;"
            elif i < 431:
                target = "for (;;) { }"
            elif i < 456:
                target = "long v;"
            else:
                target = "int x;"
            records.append((f"t{i:04d}", "train", "", target))
        records.append(("e0", "test", "", "int x;"))
        return build_corpus(records)

    def test_filter_and_rank(self):
        corpus = self.make_coverage_corpus()
        assert suggest_syntax_scenarios(corpus) == [ElementKind.BREAK, ElementKind.LONG]

    def test_zero_tolerance_no_exact_match(self):
        corpus = self.make_coverage_corpus()
        assert suggest_syntax_scenarios(corpus, tol=0.0) == []

    def test_matches_brute_force_filter(self, fixture_corpus):
        coverage = element_coverage(fixture_corpus)
        target, tol = 0.05, 0.03
        expected = sorted(
            (k for k in ALL_KINDS
             if target - tol <= coverage.sample_fraction[k] <= target + tol),
            key=lambda k: (abs(coverage.sample_fraction[k] - target),
                           list(ALL_KINDS).index(k)),
        )
        assert suggest_syntax_scenarios(fixture_corpus, target=target, tol=tol) == expected
