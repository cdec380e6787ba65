import json
import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
DATA_DIR = TESTS_DIR / "data"
REPO_DIR = TESTS_DIR.parent

sys.path.insert(0, str(TESTS_DIR))  # for oracles.*

from codeshift.corpus import CodeSample, Corpus, TaskKind  # noqa: E402


def build_corpus(records, task="text2code"):
    """In-memory corpus from (id, partition, input, target) tuples or dicts."""
    samples = []
    for r in records:
        if isinstance(r, dict):
            samples.append(CodeSample(id=r["id"], partition=r["partition"],
                                      input=r.get("input", ""), target=r["target"]))
        else:
            sid, partition, inp, target = r
            samples.append(CodeSample(id=sid, partition=partition, input=inp, target=target))
    return Corpus(task=TaskKind(task), samples=samples)


def write_jsonl(path: Path, records) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")
    return path


@pytest.fixture(scope="session")
def fixture_records():
    path = DATA_DIR / "fixture_functions.jsonl"
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


@pytest.fixture(scope="session")
def fixture_corpus(fixture_records):
    return build_corpus(fixture_records)


@pytest.fixture(scope="session")
def bleu_pairs():
    path = DATA_DIR / "bleu_pairs.jsonl"
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


@pytest.fixture(scope="session")
def mini_paths():
    return {
        "corpus": REPO_DIR / "data" / "mini" / "corpus.jsonl",
        "embeddings": REPO_DIR / "data" / "mini" / "embeddings.jsonl",
    }
