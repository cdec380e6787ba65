"""Embedding extraction for codeshift corpora.

Runs a pretrained code encoder over every sample's basis text and writes
mean-pooled vectors in the line format the codeshift semantics stage loads.
"""

__version__ = "0.1.0"

from .extract import EmbedConfig, embed_corpus

__all__ = ["EmbedConfig", "embed_corpus", "__version__"]
