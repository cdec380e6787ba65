#!/usr/bin/env python3
"""Generate the 50-pair BLEU fixture and print the oracle score to freeze.

Pairs are code-like prediction/reference strings with realistic mistakes:
identifier renames, dropped or duplicated statements, literal drift, and a
handful of exact matches and empty predictions.
"""

import json
import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "tests"))
sys.path.insert(0, str(REPO / "src"))

from oracles.bleu_reference import reference_corpus_bleu  # noqa: E402
from codeshift.lexer import tokenize  # noqa: E402

STATEMENTS = [
    "int {a} = {n};",
    "{a} += {b};",
    "if ({a} > {b}) {{ {a} = {b}; }}",
    "for (int i = 0; i < {n}; i++) {{ {a} = {a} + i; }}",
    "System.out.println({a});",
    "return {a};",
    "{a} = call({b}, {n});",
    "String s = \"{w}\";",
    "while ({a} < {n}) {{ {a}++; }}",
]
WORDS = ["alpha", "beta", "gamma", "delta", "omega", "count", "total", "value"]


def make_pair(rnd: random.Random):
    names = rnd.sample(WORDS, 3)
    n_stmts = rnd.randint(2, 6)
    stmts = [
        rnd.choice(STATEMENTS).format(
            a=names[0], b=names[1], n=rnd.randint(0, 99), w=rnd.choice(WORDS)
        )
        for _ in range(n_stmts)
    ]
    reference = "void fn() { " + " ".join(stmts) + " }"

    roll = rnd.random()
    if roll < 0.15:
        prediction = reference  # exact
    elif roll < 0.25:
        prediction = ""  # model produced nothing
    else:
        mutated = list(stmts)
        for _ in range(rnd.randint(1, 3)):
            kind = rnd.randrange(3)
            if kind == 0 and len(mutated) > 1:
                mutated.pop(rnd.randrange(len(mutated)))
            elif kind == 1:
                mutated.insert(rnd.randrange(len(mutated) + 1),
                               rnd.choice(STATEMENTS).format(
                                   a=names[2], b=names[0], n=rnd.randint(0, 9),
                                   w=rnd.choice(WORDS)))
            else:
                i = rnd.randrange(len(mutated))
                mutated[i] = mutated[i].replace(names[0], names[2])
        prediction = "void fn() { " + " ".join(mutated) + " }"
    return prediction, reference


def main():
    rnd = random.Random(6021023)
    pairs = [make_pair(rnd) for _ in range(50)]
    out = REPO / "tests" / "data" / "bleu_pairs.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        for i, (pred, ref) in enumerate(pairs):
            fh.write(json.dumps({"id": f"p{i:02d}", "prediction": pred,
                                 "reference": ref}, ensure_ascii=False) + "\n")

    cand_tokens = [[t.text for t in tokenize(p)] for p, _ in pairs]
    ref_tokens = [[t.text for t in tokenize(r)] for _, r in pairs]
    score = reference_corpus_bleu(cand_tokens, ref_tokens)
    print(f"wrote {len(pairs)} pairs to {out}")
    print(f"oracle corpus BLEU-4 = {score!r}")


if __name__ == "__main__":
    main()
