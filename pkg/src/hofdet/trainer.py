"""Transformer fine-tuning for binary/pairwise text classification.

Fixed regime: AdamW, constant learning rate, no warmup or early stopping; the
checkpoint is whatever the last epoch leaves behind. Defaults are 3 epochs at
2e-5, batch size 32, maximum sequence length 64.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError
from transformers import AutoModelForSequenceClassification, AutoTokenizer
from transformers.utils import logging as hf_logging

from ._validation import check_texts, check_texts_labels
from .corpus import BINARY_LABELS, Dataset
from .exceptions import BackboneError, CheckpointError, ConfigError, DataError

hf_logging.disable_progress_bar()

logger = logging.getLogger(__name__)

OPTIMIZER = "adamw"  # decoupled weight decay; coefficient left at the torch default


@dataclass(frozen=True)
class TrainConfig:
    """Fine-tuning hyperparameters. Defaults are the fixed experiment regime."""

    backbone: str
    num_labels: int = 2
    epochs: int = 3
    learning_rate: float = 2e-5
    batch_size: int = 32
    max_seq_len: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.num_labels < 2:
            raise ConfigError("num_labels must be at least 2")
        if self.epochs < 1 or self.batch_size < 1 or self.max_seq_len < 1:
            raise ConfigError("epochs, batch_size, and max_seq_len must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")


@dataclass(frozen=True)
class ProbVector:
    """Per-class probability distribution for one text."""

    probs: tuple[float, ...]
    class_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if len(self.probs) != len(self.class_names):
            raise ValueError(
                f"{len(self.probs)} probabilities for {len(self.class_names)} classes"
            )
        if any(p < -1e-9 or p > 1 + 1e-9 for p in self.probs):
            raise ValueError(f"probabilities outside [0, 1]: {self.probs}")
        if abs(sum(self.probs) - 1.0) > 1e-6:
            raise ValueError(f"probabilities sum to {sum(self.probs)!r}, expected 1")

    @property
    def argmax_label(self) -> str:
        """Highest-probability class; ties go to the earlier scheme position."""
        return self.class_names[int(np.argmax(self.probs))]


def _load_backbone(backbone: str, num_labels: int):
    try:
        tokenizer = AutoTokenizer.from_pretrained(backbone)
        model = AutoModelForSequenceClassification.from_pretrained(
            backbone, num_labels=num_labels
        )
    except (OSError, EnvironmentError, ValueError) as err:
        raise BackboneError(f"cannot resolve backbone {backbone!r}: {err}") from err
    return tokenizer, model


class TransformerTextClassifier(BaseEstimator, ClassifierMixin):
    """Fine-tuned transformer classifier over raw texts.

    ``classes`` is the ordered label scheme; its order fixes the probability
    columns and the argmax tie-break. Runs are deterministic on CPU for a
    fixed seed (up to backend/thread-count nondeterminism of the BLAS kernels).
    """

    def __init__(self, backbone: str, classes: Sequence[str] = BINARY_LABELS,
                 epochs: int = 3, learning_rate: float = 2e-5, batch_size: int = 32,
                 max_seq_len: int = 64, seed: int = 0):
        self.backbone = backbone
        self.classes = classes
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.max_seq_len = max_seq_len
        self.seed = seed

    def _encode(self, texts: list[str]):
        return self.tokenizer_(
            texts,
            truncation=True,
            max_length=self.max_seq_len,
            padding="max_length",
            return_tensors="pt",
        )

    def fit(self, X, y, sample_ids: Sequence[str] | None = None):
        classes = tuple(self.classes)
        if len(set(classes)) != len(classes) or len(classes) < 2:
            raise ConfigError(f"label scheme must hold at least 2 distinct labels: {classes}")
        texts, labels = check_texts_labels(X, y, classes, ids=sample_ids)
        if not texts:
            raise DataError("cannot train on an empty dataset")

        torch.manual_seed(self.seed)
        self.tokenizer_, model = _load_backbone(self.backbone, len(classes))
        index = {c: i for i, c in enumerate(classes)}
        targets = torch.tensor([index[lab] for lab in labels])
        enc = self._encode(texts)

        optimizer = torch.optim.AdamW(model.parameters(), lr=self.learning_rate)
        weight_decay = optimizer.defaults["weight_decay"]
        logger.info("fit %s: n=%d classes=%s optimizer=%s lr=%g weight_decay=%g",
                    self.backbone, len(texts), classes, OPTIMIZER,
                    self.learning_rate, weight_decay)

        generator = torch.Generator().manual_seed(self.seed)
        model.train()
        self.epoch_losses_ = []
        for epoch in range(self.epochs):
            order = torch.randperm(len(texts), generator=generator)
            total, batches = 0.0, 0
            for start in range(0, len(texts), self.batch_size):
                idx = order[start:start + self.batch_size]
                out = model(
                    input_ids=enc["input_ids"][idx],
                    attention_mask=enc["attention_mask"][idx],
                    labels=targets[idx],
                )
                out.loss.backward()
                optimizer.step()
                optimizer.zero_grad()
                total += out.loss.item()
                batches += 1
            self.epoch_losses_.append(total / batches)
            logger.info("epoch %d/%d loss %.6f", epoch + 1, self.epochs,
                        self.epoch_losses_[-1])

        model.eval()
        self.model_ = model
        self.classes_ = classes
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("this classifier has not been fitted yet")

    @torch.no_grad()
    def predict_proba(self, X) -> np.ndarray:
        """Probability matrix of shape (n_texts, n_classes); rows sum to 1."""
        self._check_fitted()
        texts = check_texts(X)
        if not texts:
            return np.zeros((0, len(self.classes_)))
        rows = []
        for start in range(0, len(texts), self.batch_size):
            enc = self._encode(texts[start:start + self.batch_size])
            logits = self.model_(input_ids=enc["input_ids"],
                                 attention_mask=enc["attention_mask"]).logits
            rows.append(torch.softmax(logits, dim=-1).numpy())
        return np.concatenate(rows, axis=0)

    def predict_vectors(self, X) -> list[ProbVector]:
        """One :class:`ProbVector` per text, columns in scheme order."""
        return [ProbVector(tuple(row), self.classes_) for row in self.predict_proba(X)]

    def predict(self, X) -> list[str]:
        probs = self.predict_proba(X)
        return [self.classes_[i] for i in probs.argmax(axis=1)]

    def save(self, path: str | Path) -> None:
        """Checkpoint layout: config, labels, log, and a weights/ directory."""
        self._check_fitted()
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        config = {k: v for k, v in self.get_params().items() if k != "classes"}
        config["num_labels"] = len(self.classes_)
        config["optimizer"] = OPTIMIZER
        (path / "config").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
        (path / "labels").write_text("\n".join(self.classes_) + "\n")
        (path / "log").write_text(
            "".join(f"epoch {i + 1} loss {loss!r}\n"
                    for i, loss in enumerate(self.epoch_losses_))
        )
        self.model_.save_pretrained(path / "weights")
        self.tokenizer_.save_pretrained(path / "weights")

    @classmethod
    def load(cls, path: str | Path) -> "TransformerTextClassifier":
        path = Path(path)
        try:
            config = json.loads((path / "config").read_text())
            classes = tuple((path / "labels").read_text().splitlines())
            log_lines = (path / "log").read_text().splitlines()
            config.pop("num_labels", None)
            config.pop("optimizer", None)
            clf = cls(classes=classes, **config)
            clf.tokenizer_ = AutoTokenizer.from_pretrained(path / "weights")
            clf.model_ = AutoModelForSequenceClassification.from_pretrained(
                path / "weights", num_labels=len(classes)
            )
        except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as err:
            raise CheckpointError(f"cannot load checkpoint from {path}: {err}") from err
        clf.model_.eval()
        clf.classes_ = classes
        clf.epoch_losses_ = [float(line.split()[-1]) for line in log_lines if line]
        return clf


def train_classifier(train: Dataset, cfg: TrainConfig,
                     label_scheme: Sequence[str]) -> TransformerTextClassifier:
    """Fine-tune one classifier on a dataset under the given label scheme."""
    scheme = tuple(label_scheme)
    if len(scheme) != cfg.num_labels:
        raise ConfigError(f"scheme {scheme} has {len(scheme)} labels, "
                          f"config says num_labels={cfg.num_labels}")
    if len(train) == 0:
        raise DataError("cannot train on an empty dataset")
    binary_scheme = set(scheme) <= set(BINARY_LABELS)
    labels = [ex.label_binary if binary_scheme else ex.label_fine for ex in train]
    clf = TransformerTextClassifier(
        backbone=cfg.backbone, classes=scheme, epochs=cfg.epochs,
        learning_rate=cfg.learning_rate, batch_size=cfg.batch_size,
        max_seq_len=cfg.max_seq_len, seed=cfg.seed,
    )
    return clf.fit(train.texts(), labels, sample_ids=train.ids())


def save_checkpoint(model: TransformerTextClassifier, path: str | Path) -> None:
    model.save(path)


def load_checkpoint(path: str | Path) -> TransformerTextClassifier:
    return TransformerTextClassifier.load(path)
