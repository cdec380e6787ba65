"""Property distributions over the corpus: token-size percentiles and element
coverage, plus scenario suggestion against a coverage target.

Percentile regions are rank-based on the train partition: sorting train
samples by (token size, file order) and slicing ranks guarantees that a
[0,3] range selects exactly 3% of train. Membership for valid/test samples
is by value instead -- a non-train sample belongs to the region iff its token
size falls inside the size interval the train slice spans -- because test
sizes need not align with train ranks.

Rank boundaries use exact rational arithmetic (Fraction), so floor(N*pct/100)
never wobbles across platforms for decimal percentages.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .corpus import Corpus, basis_text
from .elements import ALL_KINDS, ElementKind, extract_elements
from .errors import LexError, ValidationError
from .lexer import tokenize


@dataclass(frozen=True)
class ComplexityRange:
    """Percentile-rank range [lo_pct, hi_pct] over train token sizes."""

    lo_pct: float
    hi_pct: float

    def __post_init__(self):
        if not (0 <= self.lo_pct < self.hi_pct <= 100):
            raise ValidationError(
                f"invalid complexity range [{self.lo_pct}, {self.hi_pct}]: "
                "need 0 <= lo < hi <= 100"
            )

    @property
    def label(self) -> str:
        """Tail regions are extrapolation, interior regions interpolation."""
        return "extrapolation" if self.lo_pct == 0 or self.hi_pct == 100 else "interpolation"

    def __str__(self) -> str:
        def fmt(x):
            return str(int(x)) if float(x).is_integer() else str(x)

        return f"{fmt(self.lo_pct)}:{fmt(self.hi_pct)}"


#: The five stock percentile regions; the two tails are extrapolation.
DEFAULT_COMPLEXITY_RANGES = (
    ComplexityRange(0, 3),
    ComplexityRange(24, 27),
    ComplexityRange(48, 51),
    ComplexityRange(72, 75),
    ComplexityRange(97, 100),
)


def default_complexity_scenarios() -> list[ComplexityRange]:
    return list(DEFAULT_COMPLEXITY_RANGES)


def _resolve_basis(corpus: Corpus, override: str | None) -> str:
    if override is not None:
        return override
    return "target" if corpus.task.value == "text2code" else "input"


def corpus_token_sizes(corpus: Corpus, override: str | None = None):
    """(sizes, failures): token size per id, and lex-failure messages per id.

    Cached on the corpus; samples are immutable so the cache never goes stale.
    """
    basis = _resolve_basis(corpus, override)
    key = ("sizes", basis)
    if key not in corpus._caches:
        sizes: dict[str, int] = {}
        failures: dict[str, str] = {}
        for s in corpus.samples:
            text = basis_text(s, corpus.task, basis)
            try:
                sizes[s.id] = len(tokenize(text))
            except LexError as e:
                failures[s.id] = str(e)
        corpus._caches[key] = (sizes, failures)
    return corpus._caches[key]


def corpus_element_histograms(corpus: Corpus, override: str | None = None):
    """(histograms, failures) per id over the basis texts; cached."""
    basis = _resolve_basis(corpus, override)
    key = ("elements", basis)
    if key not in corpus._caches:
        hists = {}
        failures: dict[str, str] = {}
        for s in corpus.samples:
            text = basis_text(s, corpus.task, basis)
            try:
                hists[s.id] = extract_elements(tokenize(text))
            except LexError as e:
                failures[s.id] = str(e)
        corpus._caches[key] = (hists, failures)
    return corpus._caches[key]


def train_token_sizes(
    corpus: Corpus, override: str | None = None, external: dict[str, int] | None = None
) -> dict[str, int]:
    """Token sizes for the train partition; external sizes (e.g. from a model
    tokenizer) take precedence over lexical counts. Raises on lex failure."""
    sizes, failures = corpus_token_sizes(corpus, override)
    out = {}
    for sid in corpus.partition_ids("train"):
        if external is not None and sid in external:
            out[sid] = external[sid]
        elif sid in failures:
            raise ValidationError(f"sample {sid!r} does not lex: {failures[sid]}")
        else:
            out[sid] = sizes[sid]
    return out


def _rank_index(n: int, pct: float) -> int:
    """floor(n * pct / 100) with exact rational arithmetic."""
    return int(Fraction(n) * Fraction(str(pct)) / 100)


@dataclass
class ComplexitySelection:
    """Region membership per partition plus the projected size interval."""

    crange: ComplexityRange
    members: dict[str, set[str]]  # partition -> ids
    size_interval: tuple[int, int]


def complexity_members(
    corpus: Corpus,
    crange: ComplexityRange,
    override: str | None = None,
    external: dict[str, int] | None = None,
) -> ComplexitySelection:
    """Resolve a percentile range into concrete membership.

    Train: ranks floor(lo/100*N) .. floor(hi/100*N)-1 after sorting by
    (token size, file order). Valid/test: size within the train slice's
    [min, max] interval. Lex failures raise; supply `external` sizes to
    bypass lexing for specific ids.
    """
    sizes, failures = corpus_token_sizes(corpus, override)

    def size_of(sid: str) -> int:
        if external is not None and sid in external:
            return external[sid]
        if sid in failures:
            raise ValidationError(f"sample {sid!r} does not lex: {failures[sid]}")
        return sizes[sid]

    train_ids = corpus.partition_ids("train")
    n = len(train_ids)
    order = sorted(range(n), key=lambda i: (size_of(train_ids[i]), i))
    lo_idx = _rank_index(n, crange.lo_pct)
    hi_idx = _rank_index(n, crange.hi_pct)
    selected = [train_ids[i] for i in order[lo_idx:hi_idx]]
    if not selected:
        raise ValidationError(
            f"complexity range [{crange.lo_pct}, {crange.hi_pct}] selects no train "
            f"samples for N={n}; widen the range"
        )
    sel_sizes = [size_of(sid) for sid in selected]
    s_min, s_max = min(sel_sizes), max(sel_sizes)

    members = {"train": set(selected)}
    for partition in ("valid", "test"):
        members[partition] = {
            sid
            for sid in corpus.partition_ids(partition)
            if s_min <= size_of(sid) <= s_max
        }
    return ComplexitySelection(crange=crange, members=members, size_interval=(s_min, s_max))


@dataclass
class ElementCoverage:
    """Per-kind train coverage in both flavors.

    sample_fraction: fraction of train samples containing the kind at least
    once (the default masking-relevant flavor, since masking removes whole
    samples). occurrence_fraction: the kind's share of all detected element
    occurrences.
    """

    sample_fraction: dict[ElementKind, float]
    occurrence_fraction: dict[ElementKind, float]
    n_train: int


def element_coverage(corpus: Corpus, override: str | None = None) -> ElementCoverage:
    hists, failures = corpus_element_histograms(corpus, override)
    train_ids = corpus.partition_ids("train")
    if not train_ids:
        raise ValidationError("corpus has no train samples")
    bad = [sid for sid in train_ids if sid in failures]
    if bad:
        raise ValidationError(
            f"{len(bad)} train sample(s) do not lex (first: {bad[0]!r}: {failures[bad[0]]})"
        )
    n = len(train_ids)
    containing = {kind: 0 for kind in ALL_KINDS}
    occurrences = {kind: 0 for kind in ALL_KINDS}
    for sid in train_ids:
        hist = hists[sid]
        for kind in ALL_KINDS:
            c = hist[kind]
            if c:
                containing[kind] += 1
                occurrences[kind] += c
    total_occ = sum(occurrences.values())
    return ElementCoverage(
        sample_fraction={k: containing[k] / n for k in ALL_KINDS},
        occurrence_fraction={
            k: (occurrences[k] / total_occ if total_occ else 0.0) for k in ALL_KINDS
        },
        n_train=n,
    )


def suggest_syntax_scenarios(
    corpus: Corpus,
    target: float = 0.03,
    tol: float = 0.01,
    override: str | None = None,
) -> list[ElementKind]:
    """Kinds whose train sample coverage is within `tol` of `target`,
    closest first; ties broken by taxonomy order. Empty result is a valid
    answer (the corpus just has no kind near the target)."""
    coverage = element_coverage(corpus, override)
    taxonomy_pos = {k: i for i, k in enumerate(ALL_KINDS)}
    hits = [
        kind
        for kind in ALL_KINDS
        if target - tol <= coverage.sample_fraction[kind] <= target + tol
    ]
    hits.sort(key=lambda k: (abs(coverage.sample_fraction[k] - target), taxonomy_pos[k]))
    return hits
