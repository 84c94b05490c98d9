"""Tiny randomly-initialized backbones for smoke tests and CPU-only runs.

Production runs point the trainer at a pre-trained hub identifier or local
model directory. These factories build self-contained miniature models whose
vocabulary comes from the corpus at hand, so the full pipeline can run
offline in seconds.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable

import torch
from tokenizers import Tokenizer
from tokenizers.models import WordLevel, WordPiece
from tokenizers.normalizers import BertNormalizer, Lowercase
from tokenizers.pre_tokenizers import Whitespace, WhitespaceSplit
from tokenizers.processors import TemplateProcessing
from transformers import (
    BartConfig,
    BartForConditionalGeneration,
    BertConfig,
    BertForSequenceClassification,
    BertTokenizerFast,
    PreTrainedTokenizerFast,
)
from transformers.utils import logging as hf_logging

hf_logging.disable_progress_bar()

_WORD_RE = re.compile(r"\w+|[^\w\s]+")


def _word_vocab(texts: Iterable[str]) -> list[str]:
    words = set()
    for t in texts:
        words.update(_WORD_RE.findall(t.lower()))
    return sorted(words)


def create_tiny_classifier(path: str | Path, texts: Iterable[str], *,
                           hidden_size: int = 32, num_layers: int = 2,
                           num_heads: int = 2, seed: int = 0) -> str:
    """Write a miniature BERT-style classifier backbone under `path`."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    specials = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab = {w: i for i, w in enumerate(specials + _word_vocab(texts))}

    backend = Tokenizer(WordPiece(vocab, unk_token="[UNK]"))
    backend.normalizer = BertNormalizer(lowercase=True)
    backend.pre_tokenizer = Whitespace()
    backend.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    BertTokenizerFast(tokenizer_object=backend).save_pretrained(path)

    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=hidden_size,
        num_hidden_layers=num_layers,
        num_attention_heads=num_heads,
        intermediate_size=hidden_size * 2,
        max_position_embeddings=512,
        num_labels=2,
    )
    BertForSequenceClassification(config).save_pretrained(path)
    return str(path)


def create_tiny_seq2seq(path: str | Path, texts: Iterable[str], *,
                        hidden_size: int = 32, num_layers: int = 2,
                        num_heads: int = 2, seed: int = 0) -> str:
    """Write a miniature BART-style denoising backbone under `path`.

    Word-level vocabulary; ``<mask>`` is a first-class token so masked inputs
    round-trip through the tokenizer.
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    specials = ["<pad>", "<s>", "</s>", "<unk>", "<mask>"]
    vocab = {w: i for i, w in enumerate(specials + _word_vocab(texts))}

    backend = Tokenizer(WordLevel(vocab, unk_token="<unk>"))
    backend.normalizer = Lowercase()
    backend.pre_tokenizer = WhitespaceSplit()
    backend.post_processor = TemplateProcessing(
        single="<s> $A </s>",
        pair="<s> $A </s> <s> $B </s>",
        special_tokens=[("<s>", vocab["<s>"]), ("</s>", vocab["</s>"])],
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=backend,
        bos_token="<s>", eos_token="</s>", unk_token="<unk>",
        pad_token="<pad>", mask_token="<mask>",
    )
    tokenizer.save_pretrained(path)

    torch.manual_seed(seed)
    config = BartConfig(
        vocab_size=len(vocab),
        d_model=hidden_size,
        encoder_layers=num_layers,
        decoder_layers=num_layers,
        encoder_attention_heads=num_heads,
        decoder_attention_heads=num_heads,
        encoder_ffn_dim=hidden_size * 2,
        decoder_ffn_dim=hidden_size * 2,
        max_position_embeddings=512,
        pad_token_id=vocab["<pad>"],
        bos_token_id=vocab["<s>"],
        eos_token_id=vocab["</s>"],
        decoder_start_token_id=vocab["</s>"],
        forced_eos_token_id=None,
    )
    BartForConditionalGeneration(config).save_pretrained(path)
    return str(path)
