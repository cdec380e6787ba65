"""Property-masked split construction.

A scenario names a property region along one dimension; splitting a corpus
against it is exhaustive deterministic filtering: every train sample whose
basis text has the property is a masking candidate, every test sample with
the property becomes the shifted test set. With a mask fraction below 1 only
part of the candidate pool is removed, chosen by a seeded shuffle so reruns
and other machines produce the same split. The accept decision per sample is
the hard step function: accept iff the property predicate is false.

Samples whose basis text does not lex are counted, reported in the manifest
stats, and treated as predicate-false (kept in train, excluded from the
shifted test set); strict mode turns them into an error instead. Data is
never silently dropped.

Mask-count rounding is round-half-up on the candidate count, computed with
exact rational arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .corpus import Corpus, sample_to_json
from .distribution import (
    ComplexityRange,
    ComplexitySelection,
    complexity_members,
    corpus_element_histograms,
    corpus_token_sizes,
)
from .elements import ElementKind
from .errors import ValidationError
from .rng import SplitMix64
from .semantics import ClusterModel

MANIFEST_FORMAT_VERSION = 1

DIMENSIONS = ("complexity", "syntax", "semantics")


@dataclass
class ScenarioSpec:
    """One property region to mask.

    params must match the dimension: a ComplexityRange, a set of
    ElementKind, or a set of cluster indices. basis overrides the task
    default of which text side carries the property. mask_fraction 1.0 is
    the full mask-out; 0.5 is the half-reveal convention; any value in
    (0, 1] is accepted.
    """

    dimension: str
    params: ComplexityRange | set[ElementKind] | set[int]
    mask_fraction: float = 1.0
    seed: int = 0
    name: str = ""
    basis: str | None = None

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValidationError(
                f"unknown dimension {self.dimension!r}; expected one of {DIMENSIONS}"
            )
        if not (0 < self.mask_fraction <= 1):
            raise ValidationError(f"mask_fraction must be in (0, 1], got {self.mask_fraction}")
        if self.dimension == "complexity" and not isinstance(self.params, ComplexityRange):
            raise ValidationError("complexity scenario needs a ComplexityRange")
        if self.dimension == "syntax":
            if not isinstance(self.params, (set, frozenset)) or not all(
                isinstance(k, ElementKind) for k in self.params
            ):
                raise ValidationError("syntax scenario needs a set of ElementKind")
        if self.dimension == "semantics":
            if not isinstance(self.params, (set, frozenset)) or not all(
                isinstance(c, int) for c in self.params
            ):
                raise ValidationError("semantics scenario needs a set of cluster indices")
        if not self.name:
            self.name = f"{self.dimension}-{self._param_str()}"

    def _param_str(self) -> str:
        if self.dimension == "complexity":
            return str(self.params)
        if self.dimension == "syntax":
            return "+".join(k.value for k in sorted(self.params, key=lambda k: k.value))
        return "c" + "+".join(str(c) for c in sorted(self.params))

    def params_json(self):
        if self.dimension == "complexity":
            return {"lo_pct": self.params.lo_pct, "hi_pct": self.params.hi_pct,
                    "label": self.params.label}
        if self.dimension == "syntax":
            return sorted(k.value for k in self.params)
        return sorted(self.params)


@dataclass
class PredicateResult:
    """P(x) membership evaluated over the whole corpus."""

    matches: set[str]  # ids whose basis text has the property
    lex_failures: dict[str, str]  # id -> message, treated as non-matching
    detail: dict = field(default_factory=dict)  # e.g. projected size interval

    def __call__(self, sample_id: str) -> bool:
        return sample_id in self.matches


def property_predicate(
    spec: ScenarioSpec,
    corpus: Corpus,
    cluster_model: ClusterModel | None = None,
    strict: bool = False,
    external_sizes: dict[str, int] | None = None,
) -> PredicateResult:
    """Evaluate the property test for every sample.

    The accept function of the rejection step is the negation of this
    predicate: a sample is accepted into training iff it does not match.
    """
    if spec.dimension == "semantics":
        if cluster_model is None:
            raise ValidationError("semantics scenario requires a cluster model")
        bad = [c for c in spec.params if not (0 <= c < cluster_model.k)]
        if bad:
            raise ValidationError(
                f"cluster ids out of range [0, {cluster_model.k}): {sorted(bad)}"
            )
        missing = [s.id for s in corpus.samples
                   if s.partition in ("train", "test") and s.id not in cluster_model.assignments]
        if missing:
            raise ValidationError(
                f"cluster model lacks assignments for {len(missing)} sample(s), "
                f"first: {missing[0]!r}"
            )
        matches = {
            sid for sid, c in cluster_model.assignments.items()
            if c in spec.params and sid in corpus.index
        }
        return PredicateResult(matches=matches, lex_failures={})

    if spec.dimension == "complexity":
        selection: ComplexitySelection = complexity_members(
            corpus, spec.params, override=spec.basis, external=external_sizes
        )
        s_min, s_max = selection.size_interval
        sizes, failures = corpus_token_sizes(corpus, spec.basis)
        if strict and failures:
            first = next(iter(failures))
            raise ValidationError(
                f"{len(failures)} sample(s) do not lex (strict mode), "
                f"first: {first!r}: {failures[first]}"
            )
        matches = set()
        for s in corpus.samples:
            if external_sizes is not None and s.id in external_sizes:
                size = external_sizes[s.id]
            elif s.id in failures:
                continue
            else:
                size = sizes[s.id]
            if s_min <= size <= s_max:
                matches.add(s.id)
        return PredicateResult(
            matches=matches,
            lex_failures=failures,
            detail={"size_interval": [s_min, s_max], "label": spec.params.label},
        )

    # syntax
    hists, failures = corpus_element_histograms(corpus, spec.basis)
    if strict and failures:
        first = next(iter(failures))
        raise ValidationError(
            f"{len(failures)} sample(s) do not lex (strict mode), "
            f"first: {first!r}: {failures[first]}"
        )
    matches = {
        sid for sid, hist in hists.items() if any(hist[k] >= 1 for k in spec.params)
    }
    return PredicateResult(matches=matches, lex_failures=failures)


def _mask_count(n_candidates: int, fraction: float) -> int:
    """round-half-up(fraction * n) in exact arithmetic."""
    return int(Fraction(str(fraction)) * n_candidates + Fraction(1, 2))


@dataclass
class SplitManifest:
    scenario: ScenarioSpec
    train_ids: list[str]  # accepted train, file order
    masked_train_ids: list[str]  # removed candidates, ascending
    kept_property_train_ids: list[str]  # unmasked candidates, ascending
    ood_test_ids: list[str]  # property-matching test, file order
    stats: dict

    def to_json(self, config: dict | None = None) -> str:
        payload = {
            "format_version": MANIFEST_FORMAT_VERSION,
            "scenario": {
                "name": self.scenario.name,
                "dimension": self.scenario.dimension,
                "params": self.scenario.params_json(),
                "basis": self.scenario.basis,
                "mask_fraction": self.scenario.mask_fraction,
                "seed": self.scenario.seed,
            },
            "stats": self.stats,
            "train_ids": self.train_ids,
            "masked_train_ids": self.masked_train_ids,
            "kept_property_train_ids": self.kept_property_train_ids,
            "ood_test_ids": self.ood_test_ids,
        }
        if config is not None:
            payload["config"] = config
        return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SplitManifest":
        payload = json.loads(text)
        sc = payload["scenario"]
        params: ComplexityRange | set
        if sc["dimension"] == "complexity":
            params = ComplexityRange(sc["params"]["lo_pct"], sc["params"]["hi_pct"])
        elif sc["dimension"] == "syntax":
            params = {ElementKind(v) for v in sc["params"]}
        else:
            params = set(sc["params"])
        spec = ScenarioSpec(
            dimension=sc["dimension"],
            params=params,
            mask_fraction=sc["mask_fraction"],
            seed=sc["seed"],
            name=sc["name"],
            basis=sc.get("basis"),
        )
        return cls(
            scenario=spec,
            train_ids=payload["train_ids"],
            masked_train_ids=payload["masked_train_ids"],
            kept_property_train_ids=payload["kept_property_train_ids"],
            ood_test_ids=payload["ood_test_ids"],
            stats=payload["stats"],
        )


def build_split(
    corpus: Corpus,
    spec: ScenarioSpec,
    cluster_model: ClusterModel | None = None,
    strict: bool = False,
    external_sizes: dict[str, int] | None = None,
) -> SplitManifest:
    """Apply the rejection step to the corpus.

    Train candidates are all property-matching train samples; the masked
    subset is a seeded shuffle prefix of the ascending-sorted candidate ids,
    of size round-half-up(mask_fraction * candidates). The shifted test set
    is every property-matching test sample. Zero test matches is an error
    (nothing to evaluate); zero train matches only warns in stats (the
    scenario masks nothing).
    """
    predicate = property_predicate(
        spec, corpus, cluster_model=cluster_model, strict=strict, external_sizes=external_sizes
    )

    train_ids = corpus.partition_ids("train")
    test_ids = corpus.partition_ids("test")
    candidates = [sid for sid in train_ids if predicate(sid)]
    ood_test = [sid for sid in test_ids if predicate(sid)]

    if not ood_test:
        raise ValidationError(
            f"scenario {spec.name!r} matches no test samples; nothing to evaluate"
        )

    n_masked = _mask_count(len(candidates), spec.mask_fraction)
    pool = sorted(candidates)
    rng = SplitMix64(spec.seed)
    rng.shuffle(pool)
    masked = sorted(pool[:n_masked])
    masked_set = set(masked)
    kept_property = sorted(sid for sid in candidates if sid not in masked_set)
    accepted = [sid for sid in train_ids if sid not in masked_set]

    n_train = len(train_ids)
    train_lex_failures = sum(1 for sid in train_ids if sid in predicate.lex_failures)
    stats = {
        "n_train": n_train,
        "n_test": len(test_ids),
        "n_candidates": len(candidates),
        "n_masked": len(masked),
        "n_ood_test": len(ood_test),
        "rejected_train_fraction": len(candidates) / n_train if n_train else 0.0,
        "masked_train_fraction": len(masked) / n_train if n_train else 0.0,
        "lex_failures": {
            "train": train_lex_failures,
            "total": len(predicate.lex_failures),
        },
        "vacuous": not candidates,
    }
    stats.update(predicate.detail)

    return SplitManifest(
        scenario=spec,
        train_ids=accepted,
        masked_train_ids=masked,
        kept_property_train_ids=kept_property,
        ood_test_ids=ood_test,
        stats=stats,
    )


def emit_training_files(
    manifest: SplitManifest,
    corpus: Corpus,
    out_dir: str | Path,
    config: dict | None = None,
    filter_valid: bool = False,
    cluster_model: ClusterModel | None = None,
    external_sizes: dict[str, int] | None = None,
) -> dict[str, Path]:
    """Write the filtered train file, the shifted test file, the untouched
    (or optionally filtered) valid file, and the manifest JSON.

    Data files keep the corpus line format and original line order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_keep = set(manifest.train_ids)
    test_keep = set(manifest.ood_test_ids)

    valid_drop: set[str] = set()
    if filter_valid:
        predicate = property_predicate(manifest.scenario, corpus,
                                       cluster_model=cluster_model,
                                       external_sizes=external_sizes)
        valid_drop = {sid for sid in corpus.partition_ids("valid") if predicate(sid)}

    paths = {
        "train": out_dir / "train.jsonl",
        "test": out_dir / "test_ood.jsonl",
        "manifest": out_dir / "manifest.json",
    }
    with paths["train"].open("w", encoding="utf-8") as fh:
        for s in corpus.samples:
            if s.partition == "train" and s.id in train_keep:
                fh.write(sample_to_json(s) + "\n")
    with paths["test"].open("w", encoding="utf-8") as fh:
        for s in corpus.samples:
            if s.partition == "test" and s.id in test_keep:
                fh.write(sample_to_json(s) + "\n")
    if corpus.partition_ids("valid"):
        paths["valid"] = out_dir / "valid.jsonl"
        with paths["valid"].open("w", encoding="utf-8") as fh:
            for s in corpus.samples:
                if s.partition == "valid" and s.id not in valid_drop:
                    fh.write(sample_to_json(s) + "\n")
    paths["manifest"].write_text(manifest.to_json(config=config), encoding="utf-8")
    return paths
