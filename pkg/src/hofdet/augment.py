"""Denoising seq2seq data augmentation.

A pre-trained encoder-decoder is fine-tuned to reconstruct texts from inputs
with 40% of their tokens masked, then emits one synthetic example per training
example. Synthetic examples inherit the source example's labels and language.
"""

from __future__ import annotations

import logging
import random
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
from transformers.utils import logging as hf_logging

from ._validation import check_texts
from .corpus import Dataset, LabeledExample
from .exceptions import BackboneError, DataError

hf_logging.disable_progress_bar()

logger = logging.getLogger(__name__)

DEFAULT_MASK_RATIO = 0.40
DEFAULT_MASK_TOKEN = "<mask>"  # native mask token of the BART family
SYNTHETIC_ID_SUFFIX = "-syn"


@dataclass(frozen=True)
class AugmentConfig:
    mask_ratio: float = DEFAULT_MASK_RATIO
    seq2seq_backbone: str = "facebook/bart-base"
    generation_max_length: int = 64
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.mask_ratio < 1:
            raise ValueError(f"mask_ratio must be in (0, 1), got {self.mask_ratio}")
        if self.generation_max_length < 1:
            raise ValueError("generation_max_length must be positive")


def mask_tokens(text: str, ratio: float, seed: int,
                mask_token: str = DEFAULT_MASK_TOKEN) -> str:
    """Replace round(ratio*n) of the n whitespace tokens with the mask token.

    Positions are drawn uniformly without replacement; token order is kept.
    """
    tokens = text.split()
    if not tokens:
        raise DataError("cannot mask an empty text")
    k = round(ratio * len(tokens))
    for i in random.Random(seed).sample(range(len(tokens)), k):
        tokens[i] = mask_token
    return " ".join(tokens)


def _example_seed(seed: int, key: str) -> int:
    # stable across processes, unlike hash()
    return zlib.crc32(f"{seed}:{key}".encode("utf-8"))


class DenoisingAugmenter(BaseEstimator):
    """Seq2seq reconstruction model: fit on masked/original pairs, then generate.

    The training regime mirrors the classifiers (3 epochs, AdamW at 2e-5,
    batch size 32) unless overridden. Masking is deterministic per example:
    its seed derives from (seed, example key).
    """

    def __init__(self, backbone: str = "facebook/bart-base",
                 mask_ratio: float = DEFAULT_MASK_RATIO,
                 generation_max_length: int = 64, seed: int = 0,
                 epochs: int = 3, learning_rate: float = 2e-5,
                 batch_size: int = 32, max_seq_len: int = 64):
        self.backbone = backbone
        self.mask_ratio = mask_ratio
        self.generation_max_length = generation_max_length
        self.seed = seed
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.max_seq_len = max_seq_len

    def _masked(self, texts: list[str], keys: Sequence[str]) -> list[str]:
        return [
            mask_tokens(t, self.mask_ratio, _example_seed(self.seed, str(k)),
                        self.tokenizer_.mask_token or DEFAULT_MASK_TOKEN)
            for t, k in zip(texts, keys)
        ]

    def fit(self, X, y=None, keys: Sequence[str] | None = None):
        texts = check_texts(X)
        if not texts:
            raise DataError("cannot fit the denoiser on an empty dataset")
        if keys is None:
            keys = [str(i) for i in range(len(texts))]

        torch.manual_seed(self.seed)
        try:
            self.tokenizer_ = AutoTokenizer.from_pretrained(self.backbone)
            model = AutoModelForSeq2SeqLM.from_pretrained(self.backbone)
        except (OSError, EnvironmentError, ValueError) as err:
            raise BackboneError(f"cannot resolve backbone {self.backbone!r}: {err}") from err

        masked = self._masked(texts, keys)
        enc_in = self.tokenizer_(masked, truncation=True, max_length=self.max_seq_len,
                                 padding="max_length", return_tensors="pt")
        enc_out = self.tokenizer_(texts, truncation=True, max_length=self.max_seq_len,
                                  padding="max_length", return_tensors="pt")
        targets = enc_out["input_ids"].clone()
        targets[targets == self.tokenizer_.pad_token_id] = -100

        optimizer = torch.optim.AdamW(model.parameters(), lr=self.learning_rate)
        generator = torch.Generator().manual_seed(self.seed)
        model.train()
        self.epoch_losses_ = []
        for epoch in range(self.epochs):
            order = torch.randperm(len(texts), generator=generator)
            total, batches = 0.0, 0
            for start in range(0, len(texts), self.batch_size):
                idx = order[start:start + self.batch_size]
                out = model(input_ids=enc_in["input_ids"][idx],
                            attention_mask=enc_in["attention_mask"][idx],
                            labels=targets[idx])
                out.loss.backward()
                optimizer.step()
                optimizer.zero_grad()
                total += out.loss.item()
                batches += 1
            self.epoch_losses_.append(total / batches)
            logger.info("denoiser epoch %d/%d loss %.6f", epoch + 1, self.epochs,
                        self.epoch_losses_[-1])
        model.eval()
        self.model_ = model
        return self

    @torch.no_grad()
    def reconstruct(self, X, keys: Sequence[str] | None = None,
                    max_length: int | None = None) -> list[str | None]:
        """Mask each text and greedily decode a reconstruction.

        Returns one string per input; a failed generation yields None and a
        logged warning instead of aborting the batch.
        """
        if not hasattr(self, "model_"):
            raise NotFittedError("this augmenter has not been fitted yet")
        texts = check_texts(X)
        if keys is None:
            keys = [str(i) for i in range(len(texts))]
        max_length = max_length or self.generation_max_length

        masked = self._masked(texts, keys)
        outputs: list[str | None] = []
        for start in range(0, len(masked), self.batch_size):
            chunk = masked[start:start + self.batch_size]
            chunk_keys = keys[start:start + self.batch_size]
            try:
                outputs.extend(self._generate(chunk, max_length))
            except Exception:
                # retry one by one so a single bad example cannot sink the batch
                for text, key in zip(chunk, chunk_keys):
                    try:
                        outputs.extend(self._generate([text], max_length))
                    except Exception as err:
                        logger.warning("generation failed for %r: %s", key, err)
                        outputs.append(None)
        return outputs

    def _generate(self, masked: list[str], max_length: int) -> list[str]:
        enc = self.tokenizer_(masked, truncation=True, max_length=self.max_seq_len,
                              padding=True, return_tensors="pt")
        generated = self.model_.generate(
            input_ids=enc["input_ids"],
            attention_mask=enc["attention_mask"],
            max_length=max_length,
            num_beams=1,
            do_sample=False,
        )
        return [self.tokenizer_.decode(g, skip_special_tokens=True) for g in generated]


def fit_denoiser(train: Dataset, cfg: AugmentConfig) -> DenoisingAugmenter:
    """Fine-tune the reconstruction model on a dataset's texts."""
    if len(train) == 0:
        raise DataError("cannot fit the denoiser on an empty dataset")
    augmenter = DenoisingAugmenter(
        backbone=cfg.seq2seq_backbone, mask_ratio=cfg.mask_ratio,
        generation_max_length=cfg.generation_max_length, seed=cfg.seed,
    )
    return augmenter.fit(train.texts(), keys=train.ids())


def generate_synthetic(train: Dataset, model: DenoisingAugmenter,
                       cfg: AugmentConfig) -> Dataset:
    """One synthetic example per input example, labels and language copied.

    Failed or empty generations are skipped and counted; ids carry the
    ``-syn`` suffix so synthetic rows pair back to their sources.
    """
    outputs = model.reconstruct(train.texts(), keys=train.ids(),
                                max_length=cfg.generation_max_length)
    examples = []
    failures = 0
    for ex, text in zip(train, outputs):
        if text is None or not text.strip():
            failures += 1
            continue
        examples.append(LabeledExample(
            id=ex.id + SYNTHETIC_ID_SUFFIX, text=text, lang=ex.lang,
            label_binary=ex.label_binary, label_fine=ex.label_fine,
        ))
    if failures:
        logger.warning("augmentation skipped %d of %d examples", failures, len(train))
    return Dataset(tuple(examples), source="synthetic", split_tag=train.split_tag,
                   check_ids=False)
