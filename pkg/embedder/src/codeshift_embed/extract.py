"""Encoder inference and mean pooling.

The corpus comes in as the line-delimited JSON interchange format
({"id", "partition", "input", "target"} per line) and goes out as the
embeddings format ({"id", "vec"} per line), one vector per sample in corpus
order. This package talks to the split-construction toolkit only through
those two file formats.

Pooling averages the encoder's last hidden states over non-padding token
positions: padding carries no program content, so it is excluded from the
mean. Inference runs in eval mode under no_grad, which makes repeated runs
bit-stable on the same install.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import AutoModel, AutoTokenizer

PARTITIONS = ("train", "valid", "test")
DEFAULT_ENCODER = "Salesforce/codet5-base"


class InputError(ValueError):
    """Bad corpus file or parameters; the CLI maps this to exit code 2."""


@dataclass
class EmbedConfig:
    corpus: str | Path
    out: str | Path
    encoder: str = DEFAULT_ENCODER
    max_length: int = 512
    batch_size: int = 16
    task: str = "text2code"
    basis: str | None = None
    device: str = "cpu"


def read_corpus(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"corpus file not found: {path}")
    records = []
    seen = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}:{lineno}: JSON parse error: {e.msg}") from e
        for key in ("id", "partition", "input", "target"):
            if key not in record:
                raise InputError(f"{path}:{lineno}: missing field {key!r}")
        if record["partition"] not in PARTITIONS:
            raise InputError(f"{path}:{lineno}: unknown partition {record['partition']!r}")
        if record["id"] in seen:
            raise InputError(f"{path}:{lineno}: duplicate id {record['id']!r}")
        seen.add(record["id"])
        records.append(record)
    if not records:
        raise InputError(f"{path}: empty corpus")
    return records


def basis_text(record: dict, task: str, basis: str | None) -> str:
    """Which side carries the properties: target for generation-from-text,
    input otherwise; an explicit basis wins."""
    side = basis or ("target" if task == "text2code" else "input")
    if side not in ("input", "target"):
        raise InputError(f"basis must be 'input' or 'target', got {side!r}")
    return record[side]


def load_encoder(name_or_path: str, device: str = "cpu"):
    """Tokenizer plus the encoder stack (the encoder half of seq2seq models)."""
    tokenizer = AutoTokenizer.from_pretrained(name_or_path)
    model = AutoModel.from_pretrained(name_or_path)
    if model.config.is_encoder_decoder:
        model = model.get_encoder()
    model.eval()
    model.to(device)
    return tokenizer, model


def mean_pool(hidden: torch.Tensor, attention_mask: torch.Tensor) -> torch.Tensor:
    """Average hidden states over positions the mask marks as real tokens."""
    mask = attention_mask.unsqueeze(-1).to(hidden.dtype)
    summed = (hidden * mask).sum(dim=1)
    counts = mask.sum(dim=1).clamp(min=1.0)
    return summed / counts


def embed_corpus(config: EmbedConfig) -> dict:
    """Write one {"id", "vec"} line per sample; returns run statistics."""
    records = read_corpus(config.corpus)
    if config.max_length < 1:
        raise InputError(f"max_length must be >= 1, got {config.max_length}")
    if config.batch_size < 1:
        raise InputError(f"batch_size must be >= 1, got {config.batch_size}")
    try:
        tokenizer, model = load_encoder(config.encoder, config.device)
    except Exception as e:
        raise InputError(f"cannot load encoder {config.encoder!r}: {e}") from e

    texts = [basis_text(r, config.task, config.basis) for r in records]
    truncated = 0
    hidden_size = int(model.config.hidden_size)
    out_path = Path(config.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)

    with out_path.open("w", encoding="utf-8") as fh, torch.no_grad():
        for start in range(0, len(records), config.batch_size):
            batch_records = records[start:start + config.batch_size]
            batch_texts = texts[start:start + config.batch_size]
            full = tokenizer(batch_texts, truncation=False)["input_ids"]
            truncated += sum(1 for ids in full if len(ids) > config.max_length)
            enc = tokenizer(
                batch_texts,
                truncation=True,
                max_length=config.max_length,
                padding=True,
                return_tensors="pt",
            ).to(config.device)
            out = model(input_ids=enc["input_ids"], attention_mask=enc["attention_mask"])
            pooled = mean_pool(out.last_hidden_state, enc["attention_mask"]).cpu()
            for record, vec in zip(batch_records, pooled):
                fh.write(json.dumps(
                    {"id": record["id"], "vec": [float(x) for x in vec]}
                ) + "\n")

    return {
        "n_embedded": len(records),
        "hidden_size": hidden_size,
        "truncated": truncated,
        "out": str(out_path),
    }
