import json

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizerFast, T5Config, T5Model

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "int", "return", "while", "if", "else", "true", "false", "for", "break",
    "x", "y", "n", "a", "b", "data", "value", "count",
    "=", ";", "(", ")", "{", "}", "[", "]", "+", "-", "<", ">", ",", "0",
    "1", "2", "3", "4", "5",
]


@pytest.fixture(scope="session")
def tiny_bert_dir(tmp_path_factory):
    """Encoder-only model with hidden size 32, saved locally."""
    out = tmp_path_factory.mktemp("tiny-bert")
    (out / "vocab.txt").write_text("\n".join(VOCAB))
    config = BertConfig(
        vocab_size=len(VOCAB), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=4, intermediate_size=64, max_position_embeddings=128,
    )
    torch.manual_seed(1234)
    BertModel(config).save_pretrained(out)
    BertTokenizerFast(vocab_file=str(out / "vocab.txt")).save_pretrained(out)
    return out


@pytest.fixture(scope="session")
def tiny_t5_dir(tmp_path_factory):
    """Encoder-decoder model; only its encoder half should run."""
    from tokenizers import Tokenizer
    from tokenizers.models import WordLevel
    from tokenizers.pre_tokenizers import Whitespace
    from transformers import PreTrainedTokenizerFast

    out = tmp_path_factory.mktemp("tiny-t5")
    words = ["<pad>", "</s>", "<unk>"] + VOCAB[5:]
    tok = Tokenizer(WordLevel({w: i for i, w in enumerate(words)}, unk_token="<unk>"))
    tok.pre_tokenizer = Whitespace()
    fast = PreTrainedTokenizerFast(tokenizer_object=tok, pad_token="<pad>",
                                   eos_token="</s>", unk_token="<unk>")
    config = T5Config(vocab_size=len(words), d_model=24, d_kv=6, d_ff=48,
                      num_layers=2, num_heads=4, decoder_start_token_id=0)
    torch.manual_seed(99)
    T5Model(config).save_pretrained(out)
    fast.save_pretrained(out)
    return out


@pytest.fixture()
def ten_sample_corpus(tmp_path):
    bodies = [
        "int x = 0 ;",
        "return x + 1 ;",
        "while ( x < 5 ) { x = x + 1 ; }",
        "if ( a < b ) { return a ; } else { return b ; }",
        "for ( n = 0 ; n < 3 ; n = n + 1 ) { count = count + n ; }",
        "value = data [ 0 ] ;",
        "a = true ;",
        "b = false ;",
        "break ;",
        "y = x - 2 ;",
    ]
    path = tmp_path / "corpus.jsonl"
    with path.open("w") as fh:
        for i, body in enumerate(bodies):
            partition = "train" if i < 8 else "test"
            fh.write(json.dumps({"id": f"s{i}", "partition": partition,
                                 "input": f"sample {i}", "target": body}) + "\n")
    return path
