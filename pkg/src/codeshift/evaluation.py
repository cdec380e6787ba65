"""Scoring of model prediction files against a split manifest.

Metrics: token-level exact match, pooled corpus BLEU-4 (add-one smoothing on
the n >= 2 precisions, exponential brevity penalty), exact match relative to
a full-data baseline, per-element generation frequency against ground truth,
and length-normalized negative-log-likelihood histograms.

Predictions that fail to lex never crash a run: they score 0 on exact match
and contribute no n-grams or element occurrences, and the report counts them
under diagnostics.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Corpus, basis_text
from .elements import ALL_KINDS, ElementKind, extract_elements
from .errors import LexError, ValidationError
from .lexer import tokenize
from .splitter import SplitManifest

REPORT_FORMAT_VERSION = 1

BLEU_MAX_ORDER = 4
RARE_COVERAGE_THRESHOLD = 0.02  # brackets the ~1.5% convention


@dataclass
class Prediction:
    id: str
    prediction: str
    token_logprobs: list[float] | None = None


@dataclass
class PredictionSet:
    by_id: dict[str, Prediction]

    def __len__(self) -> int:
        return len(self.by_id)

    def __contains__(self, sample_id: str) -> bool:
        return sample_id in self.by_id

    def __getitem__(self, sample_id: str) -> Prediction:
        return self.by_id[sample_id]


def load_predictions(path: str | Path) -> PredictionSet:
    """Read line-delimited {"id", "prediction", "token_logprobs"?} records."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"predictions file not found: {path}")
    by_id: dict[str, Prediction] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValidationError(f"{path}:{lineno}: JSON parse error: {e.msg}") from e
            if "id" not in record or "prediction" not in record:
                raise ValidationError(f"{path}:{lineno}: record needs 'id' and 'prediction'")
            sid = record["id"]
            if sid in by_id:
                raise ValidationError(f"{path}:{lineno}: duplicate id {sid!r}")
            logprobs = record.get("token_logprobs")
            if logprobs is not None:
                if not logprobs:
                    raise ValidationError(f"{path}:{lineno}: empty token_logprobs for {sid!r}")
                if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in logprobs):
                    raise ValidationError(
                        f"{path}:{lineno}: non-finite token_logprobs for {sid!r}"
                    )
                if any(v > 0 for v in logprobs):
                    raise ValidationError(
                        f"{path}:{lineno}: positive log-probability for {sid!r}"
                    )
            by_id[sid] = Prediction(id=sid, prediction=record["prediction"],
                                    token_logprobs=logprobs)
    return PredictionSet(by_id=by_id)


def _token_texts(code: str) -> list[str] | None:
    """Token texts, or None when the code does not lex."""
    try:
        return [t.text for t in tokenize(code)]
    except LexError:
        return None


def _histogram_or_none(code: str):
    try:
        return extract_elements(tokenize(code))
    except LexError:
        return None


def exact_match(prediction: str, target: str) -> int:
    """1 iff both sides lex and their token text sequences are equal.

    Whitespace- and comment-insensitive by construction; an unlexable side
    can never match.
    """
    a = _token_texts(prediction)
    b = _token_texts(target)
    if a is None or b is None:
        return 0
    return int(a == b)


def _ngram_counts(tokens: list[str], order: int) -> Counter:
    return Counter(tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1))


def corpus_bleu(predictions: list[str], references: list[str]) -> float:
    """Pooled corpus BLEU-4 over lexer tokens.

    Modified n-gram precisions are pooled over the whole corpus; orders 2..4
    get add-one smoothing on numerator and denominator; the geometric mean is
    scaled by the brevity penalty min(1, e^(1 - r/c)). Unlexable predictions
    contribute an empty token sequence.
    """
    if not predictions:
        raise ValidationError("corpus_bleu needs at least one prediction")
    if len(predictions) != len(references):
        raise ValidationError(
            f"prediction/reference count mismatch: {len(predictions)} vs {len(references)}"
        )
    matched = [0] * BLEU_MAX_ORDER
    total = [0] * BLEU_MAX_ORDER
    cand_len = 0
    ref_len = 0
    for pred, ref in zip(predictions, references):
        pred_tokens = _token_texts(pred) or []
        ref_tokens = _token_texts(ref) or []
        cand_len += len(pred_tokens)
        ref_len += len(ref_tokens)
        for n in range(1, BLEU_MAX_ORDER + 1):
            pred_ngrams = _ngram_counts(pred_tokens, n)
            if not pred_ngrams:
                continue
            ref_ngrams = _ngram_counts(ref_tokens, n)
            total[n - 1] += sum(pred_ngrams.values())
            matched[n - 1] += sum(
                min(count, ref_ngrams[gram]) for gram, count in pred_ngrams.items()
            )

    precisions = []
    for n in range(1, BLEU_MAX_ORDER + 1):
        if n == 1:
            if total[0] == 0:
                return 0.0
            p = matched[0] / total[0]
        else:
            p = (matched[n - 1] + 1) / (total[n - 1] + 1)
        precisions.append(p)
    if precisions[0] == 0.0:
        return 0.0
    log_mean = sum(math.log(p) for p in precisions) / BLEU_MAX_ORDER
    bp = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return bp * math.exp(log_mean)


def relative_em(scenario_em: float, baseline_em: float) -> float | None:
    """Scenario EM over full-data-baseline EM; None when the baseline is 0."""
    if baseline_em == 0:
        return None
    return scenario_em / baseline_em


def element_generation_frequency(
    predictions: list[str],
    references: list[str],
    kinds: set[ElementKind] | list[ElementKind],
    train_texts: list[str],
    rare_threshold: float = RARE_COVERAGE_THRESHOLD,
    per_sample: bool = False,
) -> dict[ElementKind, dict]:
    """How often each kind is generated, relative to the ground truth.

    Counts pool occurrences across all predictions/references (per_sample
    counts each text at most once instead). Rarity comes from the training
    texts actually seen by the model: unseen = zero coverage, rare = coverage
    at or below `rare_threshold`.
    """
    if not kinds:
        raise ValidationError("element_generation_frequency needs at least one kind")

    def count(texts: list[str], kind: ElementKind) -> int:
        c = 0
        for text in texts:
            hist = _histogram_or_none(text)
            if hist is None:
                continue
            occurrences = hist[kind]
            c += min(occurrences, 1) if per_sample else occurrences
        return c

    n_train = len(train_texts)
    containing = {kind: 0 for kind in kinds}
    for text in train_texts:
        hist = _histogram_or_none(text)
        if hist is None:
            continue
        for kind in kinds:
            if hist[kind]:
                containing[kind] += 1

    out: dict[ElementKind, dict] = {}
    for kind in kinds:
        gen = count(predictions, kind)
        gt = count(references, kind)
        coverage = containing[kind] / n_train if n_train else 0.0
        if coverage == 0:
            rarity = "unseen"
        elif coverage <= rare_threshold:
            rarity = "rare"
        else:
            rarity = "common"
        out[kind] = {
            "gen_count": gen,
            "gt_count": gt,
            "ratio": (gen / gt) if gt else None,
            "rarity": rarity,
            "train_coverage": coverage,
        }
    return out


def sample_nll(token_logprobs: list[float], normalize: bool = True) -> float:
    """Negative log-likelihood of one sample; length-normalized by default."""
    total = -sum(token_logprobs)
    return total / len(token_logprobs) if normalize else total


def nll_histogram(
    groups: dict[str, PredictionSet],
    bins: int = 30,
    normalize: bool = True,
) -> dict:
    """Density histograms of per-sample NLL, shared bin edges across groups.

    Each group's densities integrate to 1 so differently-sized groups can be
    overlaid. Samples without logprobs are skipped and counted per group; a
    group with nothing left is omitted from "groups" (a zero-mass histogram
    would break the unit-mass contract), and everything reducing to nothing
    is an error.
    """
    if bins < 1:
        raise ValidationError(f"bins must be >= 1, got {bins}")
    values: dict[str, list[float]] = {}
    skipped: dict[str, int] = {}
    for label, preds in groups.items():
        vals = []
        skip = 0
        for p in preds.by_id.values():
            if p.token_logprobs:
                vals.append(sample_nll(p.token_logprobs, normalize=normalize))
            else:
                skip += 1
        values[label] = vals
        skipped[label] = skip
    if all(not v for v in values.values()):
        raise ValidationError("no samples with token_logprobs in any group")

    pooled = [v for vals in values.values() for v in vals]
    lo, hi = min(pooled), max(pooled)
    if lo == hi:  # degenerate: all NLLs identical
        lo, hi = lo - 0.5, hi + 0.5
    width = (hi - lo) / bins
    edges = [lo + i * width for i in range(bins + 1)]

    out_groups = {}
    for label, vals in values.items():
        if not vals:
            continue
        counts = [0] * bins
        for v in vals:
            idx = min(int((v - lo) / width), bins - 1)
            counts[idx] += 1
        n = len(vals)
        densities = [c / (n * width) for c in counts]
        out_groups[label] = {
            "counts": counts,
            "densities": densities,
            "n": n,
            "skipped_missing_logprobs": skipped[label],
        }
    return {
        "bin_edges": edges,
        "groups": out_groups,
        "skipped": skipped,
        "normalized": normalize,
    }


@dataclass
class EvalReport:
    scenario_name: str
    dimension: str
    n_evaluated: int
    em: float
    bleu: float
    relative_em: float | None
    per_element_frequency: dict[ElementKind, dict]
    nll: dict | None
    diagnostics: dict = field(default_factory=dict)
    label: str | None = None  # interpolation/extrapolation for complexity

    def to_dict(self) -> dict:
        return {
            "format_version": REPORT_FORMAT_VERSION,
            "scenario": self.scenario_name,
            "dimension": self.dimension,
            "label": self.label,
            "n_evaluated": self.n_evaluated,
            "em": self.em,
            "bleu": self.bleu,
            "relative_em": self.relative_em,
            "per_element_frequency": {
                k.value: v for k, v in self.per_element_frequency.items()
            },
            "nll": self.nll,
            "diagnostics": self.diagnostics,
        }

    def metric_rows(self) -> list[tuple[str, str, str, float | None]]:
        """Flat (scenario, dimension, metric, value) rows for CSV export."""
        rows = [
            (self.scenario_name, self.dimension, "em", self.em),
            (self.scenario_name, self.dimension, "bleu", self.bleu),
            (self.scenario_name, self.dimension, "relative_em", self.relative_em),
        ]
        for kind, info in self.per_element_frequency.items():
            rows.append(
                (self.scenario_name, self.dimension, f"element_ratio:{kind.value}",
                 info["ratio"])
            )
        return rows


def evaluate_scenario(
    manifest: SplitManifest,
    corpus: Corpus,
    predictions: PredictionSet,
    baseline_predictions: PredictionSet | None = None,
    bins: int = 30,
    normalize_nll: bool = True,
    kinds: set[ElementKind] | None = None,
    per_sample_elements: bool = False,
) -> EvalReport:
    """Score predictions over the manifest's shifted test set.

    Predictions must cover every shifted test id (extra ids are ignored but
    counted). relative_em appears iff baseline predictions -- the same model
    trained on the full data -- are supplied. Element frequency defaults to
    the scenario's masked kinds for syntax scenarios and the full taxonomy
    otherwise; rarity reflects the masked training set.
    """
    ood_ids = manifest.ood_test_ids
    missing = [sid for sid in ood_ids if sid not in predictions]
    if missing:
        head = ", ".join(repr(m) for m in missing[:10])
        more = f" (+{len(missing) - 10} more)" if len(missing) > 10 else ""
        raise ValidationError(f"predictions missing for shifted test ids: {head}{more}")

    pred_texts = [predictions[sid].prediction for sid in ood_ids]
    ref_texts = [corpus[sid].target for sid in ood_ids]

    matches = sum(exact_match(p, r) for p, r in zip(pred_texts, ref_texts))
    em = matches / len(ood_ids)
    bleu = corpus_bleu(pred_texts, ref_texts)

    rel = None
    baseline_em_value = None
    if baseline_predictions is not None:
        base_missing = [sid for sid in ood_ids if sid not in baseline_predictions]
        if base_missing:
            head = ", ".join(repr(m) for m in base_missing[:10])
            raise ValidationError(f"baseline predictions missing for ids: {head}")
        base_matches = sum(
            exact_match(baseline_predictions[sid].prediction, corpus[sid].target)
            for sid in ood_ids
        )
        baseline_em_value = base_matches / len(ood_ids)
        rel = relative_em(em, baseline_em_value)

    if kinds is None:
        if manifest.scenario.dimension == "syntax":
            kinds = set(manifest.scenario.params)
        else:
            kinds = set(ALL_KINDS)
    train_kept = set(manifest.train_ids)
    train_texts = [
        basis_text(s, corpus.task, manifest.scenario.basis)
        for s in corpus.samples
        if s.partition == "train" and s.id in train_kept
    ]
    freq = element_generation_frequency(
        pred_texts, ref_texts, kinds, train_texts, per_sample=per_sample_elements
    )

    unlexable = sum(1 for p in pred_texts if _token_texts(p) is None)
    ood_set = set(ood_ids)
    extra_ids = sum(1 for sid in predictions.by_id if sid not in ood_set)

    groups = {"scenario": PredictionSet({sid: predictions[sid] for sid in ood_ids})}
    if baseline_predictions is not None:
        groups["baseline"] = PredictionSet(
            {sid: baseline_predictions[sid] for sid in ood_ids}
        )
    any_logprobs = any(
        p.token_logprobs for g in groups.values() for p in g.by_id.values()
    )
    nll = (
        nll_histogram(groups, bins=bins, normalize=normalize_nll)
        if any_logprobs
        else None
    )

    diagnostics = {
        "unlexable_predictions": unlexable,
        "extra_prediction_ids": extra_ids,
    }
    if baseline_em_value is not None:
        diagnostics["baseline_em"] = baseline_em_value
        if rel is None:
            diagnostics["relative_em_undefined"] = "baseline em is 0"
    if nll is None:
        diagnostics["nll_skipped"] = "no token_logprobs in predictions"

    return EvalReport(
        scenario_name=manifest.scenario.name,
        dimension=manifest.scenario.dimension,
        n_evaluated=len(ood_ids),
        em=em,
        bleu=bleu,
        relative_em=rel,
        per_element_frequency=freq,
        nll=nll,
        diagnostics=diagnostics,
        label=manifest.stats.get("label"),
    )


def aggregate_reports(reports: list[dict]) -> dict:
    """Cross-scenario means, grouped the way results are usually plotted:
    syntax and semantics pooled per dimension, complexity split into
    interpolation and extrapolation by the scenario label."""

    def bucket(report: dict) -> str:
        if report["dimension"] == "complexity":
            label = report.get("label") or "unlabeled"
            return f"complexity/{label}"
        return report["dimension"]

    grouped: dict[str, list[dict]] = {}
    for r in reports:
        grouped.setdefault(bucket(r), []).append(r)

    def mean(xs):
        xs = [x for x in xs if x is not None]
        return sum(xs) / len(xs) if xs else None

    out = {}
    for key, rs in sorted(grouped.items()):
        out[key] = {
            "n_scenarios": len(rs),
            "mean_em": mean([r["em"] for r in rs]),
            "mean_bleu": mean([r["bleu"] for r in rs]),
            "mean_relative_em": mean([r["relative_em"] for r in rs]),
        }
    return out
