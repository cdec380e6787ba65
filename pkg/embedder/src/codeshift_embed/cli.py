"""codeshift-embed: corpus file in, embeddings file out."""

from __future__ import annotations

import argparse
import sys
import traceback

from .extract import DEFAULT_ENCODER, EmbedConfig, InputError, embed_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codeshift-embed",
        description="Mean-pooled encoder embeddings for a code corpus",
    )
    parser.add_argument("--corpus", required=True, help="line-delimited JSON corpus")
    parser.add_argument("--model", default=DEFAULT_ENCODER,
                        help=f"encoder name or path (default {DEFAULT_ENCODER})")
    parser.add_argument("--out", required=True, help="embeddings output path")
    parser.add_argument("--max-len", type=int, default=512,
                        help="token truncation length (default 512)")
    parser.add_argument("--batch", type=int, default=16, help="batch size (default 16)")
    parser.add_argument("--task", default="text2code",
                        choices=["text2code", "refinement", "translation"])
    parser.add_argument("--basis", choices=["input", "target"],
                        help="override which text side is embedded")
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = EmbedConfig(
        corpus=args.corpus,
        out=args.out,
        encoder=args.model,
        max_length=args.max_len,
        batch_size=args.batch,
        task=args.task,
        basis=args.basis,
        device=args.device,
    )
    try:
        stats = embed_corpus(config)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1
    print(f"{stats['out']}: {stats['n_embedded']} vectors of dim "
          f"{stats['hidden_size']}, {stats['truncated']} truncated")
    return 0


if __name__ == "__main__":
    sys.exit(main())
