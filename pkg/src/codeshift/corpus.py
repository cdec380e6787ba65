"""Paired code datasets: loading, validation, indexing.

Corpus files are line-delimited JSON, one record per line with exactly the
fields id / partition / input / target; unknown extra fields are preserved on
the sample and re-emitted on save, but nothing in the toolkit reads them.
Text must be valid UTF-8 -- a bad byte is a load error, never a silent
replacement, because splits have to reproduce bit-for-bit.

The `valid` partition is accepted and carried through but never used by the
splitters; only train defines property distributions and only test is scored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import ValidationError


class TaskKind(str, Enum):
    TEXT2CODE = "text2code"
    REFINEMENT = "refinement"
    TRANSLATION = "translation"


PARTITIONS = ("train", "valid", "test")

_CORE_FIELDS = ("id", "partition", "input", "target")


@dataclass(frozen=True)
class CodeSample:
    id: str
    partition: str
    input: str
    target: str
    extra: dict = field(default_factory=dict, compare=False)


@dataclass
class Corpus:
    task: TaskKind
    samples: list[CodeSample]
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {s.id: i for i, s in enumerate(self.samples)}
        # lazy per-basis property caches (token sizes, element histograms)
        self._caches: dict = {}

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, sample_id: str) -> CodeSample:
        return self.samples[self.index[sample_id]]

    def partition_samples(self, partition: str) -> list[CodeSample]:
        return [s for s in self.samples if s.partition == partition]

    def partition_ids(self, partition: str) -> list[str]:
        return [s.id for s in self.samples if s.partition == partition]


def basis_text(sample: CodeSample, task: TaskKind, override: str | None = None) -> str:
    """The text whose properties drive masking.

    Generation from natural language masks on the target (the code side);
    the other tasks mask on the input. An explicit override wins.
    """
    if override is not None:
        if override not in ("input", "target"):
            raise ValidationError(f"basis override must be 'input' or 'target', got {override!r}")
        return sample.target if override == "target" else sample.input
    return sample.target if task is TaskKind.TEXT2CODE else sample.input


def load_corpus(path: str | Path, task: TaskKind | str) -> Corpus:
    """Load and validate a line-delimited JSON corpus.

    Rejects: unparseable lines, non-object records, missing fields, duplicate
    ids, empty ids or targets, unknown partition labels, invalid UTF-8. Error
    messages carry 1-based line numbers.
    """
    task = TaskKind(task)
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"corpus file not found: {path}")
    try:
        raw = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise ValidationError(f"{path}: not valid UTF-8 at byte {e.start}: {e.reason}") from e

    samples: list[CodeSample] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path}:{lineno}: JSON parse error: {e.msg}") from e
        if not isinstance(record, dict):
            raise ValidationError(f"{path}:{lineno}: record is not an object")
        for key in _CORE_FIELDS:
            if key not in record:
                raise ValidationError(f"{path}:{lineno}: missing field {key!r}")
            if not isinstance(record[key], str):
                raise ValidationError(f"{path}:{lineno}: field {key!r} must be a string")
        sample_id = record["id"]
        if not sample_id:
            raise ValidationError(f"{path}:{lineno}: empty id")
        if sample_id in seen:
            raise ValidationError(
                f"{path}:{lineno}: duplicate id {sample_id!r} (first seen on line {seen[sample_id]})"
            )
        seen[sample_id] = lineno
        if record["partition"] not in PARTITIONS:
            raise ValidationError(
                f"{path}:{lineno}: unknown partition {record['partition']!r} "
                f"(expected one of {', '.join(PARTITIONS)})"
            )
        if not record["target"]:
            raise ValidationError(f"{path}:{lineno}: empty target for id {sample_id!r}")
        extra = {k: v for k, v in record.items() if k not in _CORE_FIELDS}
        samples.append(
            CodeSample(
                id=sample_id,
                partition=record["partition"],
                input=record["input"],
                target=record["target"],
                extra=extra,
            )
        )

    corpus = Corpus(task=task, samples=samples)
    if not corpus.partition_ids("train"):
        raise ValidationError(f"{path}: corpus has no train samples")
    if not corpus.partition_ids("test"):
        raise ValidationError(f"{path}: corpus has no test samples")
    return corpus


def sample_to_json(sample: CodeSample) -> str:
    """Canonical one-line serialization (core fields first, extras sorted)."""
    record = {
        "id": sample.id,
        "partition": sample.partition,
        "input": sample.input,
        "target": sample.target,
    }
    for key in sorted(sample.extra):
        record[key] = sample.extra[key]
    return json.dumps(record, ensure_ascii=False)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(
        "".join(sample_to_json(s) + "\n" for s in corpus.samples), encoding="utf-8"
    )


def corpus_stats(corpus: Corpus, override: str | None = None) -> dict:
    """Deterministic summary: partition counts, token-size quantiles over the
    train basis texts (lower-rank quantile rule: sorted[floor(p*(n-1))]), and
    per-kind element coverage."""
    from .distribution import element_coverage, train_token_sizes

    counts = {p: len(corpus.partition_ids(p)) for p in PARTITIONS if corpus.partition_ids(p)}
    sizes = sorted(train_token_sizes(corpus, override=override).values())

    def quantile(p: float) -> int:
        return sizes[int(p * (len(sizes) - 1))]

    coverage = element_coverage(corpus, override=override)
    return {
        "counts": counts,
        "token_size_quantiles": {
            "min": sizes[0],
            "p25": quantile(0.25),
            "median": quantile(0.5),
            "p75": quantile(0.75),
            "max": sizes[-1],
            "n": len(sizes),
        },
        "element_coverage": {
            kind.value: {
                "sample_fraction": coverage.sample_fraction[kind],
                "occurrence_fraction": coverage.occurrence_fraction[kind],
            }
            for kind in coverage.sample_fraction
        },
    }
