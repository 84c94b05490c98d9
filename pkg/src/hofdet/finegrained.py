"""Fine-grained label resolution: binary gate, three pairwise models, voting.

A post gated as NOT resolves to NONE immediately. Otherwise three binary
models vote — hate-vs-profane, hate-vs-offensive, offensive-vs-profane — and
the label with the unique maximum tally (always two votes) wins. The only
non-unique tally over three votes is 1-1-1; it resolves to the most common
fine-grained class of the training set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Dataset
from .exceptions import DataError
from .trainer import TrainConfig, TransformerTextClassifier

logger = logging.getLogger(__name__)

HOF_CLASSES = ("HATE", "OFFN", "PRFN")
PAIR_HP = ("HATE", "PRFN")
PAIR_HO = ("HATE", "OFFN")
PAIR_OP = ("OFFN", "PRFN")
PAIRS = (PAIR_HP, PAIR_HO, PAIR_OP)


@dataclass(frozen=True)
class FineDecision:
    """Gate outcome, the three pairwise outcomes, and the resolved label."""

    gate: str
    pair_hp: str | None
    pair_ho: str | None
    pair_op: str | None
    resolved: str
    tie_broken: bool = False

    def __post_init__(self):
        if self.gate == "NOT":
            if self.resolved != "NONE" or any((self.pair_hp, self.pair_ho, self.pair_op)):
                raise ValueError("a NOT gate must resolve to NONE with no pairwise votes")
        elif self.gate == "HOF":
            if None in (self.pair_hp, self.pair_ho, self.pair_op):
                raise ValueError("a HOF gate requires all three pairwise outcomes")
            if self.resolved not in HOF_CLASSES:
                raise ValueError(f"a HOF gate cannot resolve to {self.resolved!r}")
        else:
            raise ValueError(f"unknown gate outcome {self.gate!r}")


@dataclass(frozen=True)
class ClassPriors:
    """Fine-grained training frequencies, used only to break 1-1-1 ties."""

    counts: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))
        if set(self.counts) != set(HOF_CLASSES):
            raise ValueError(f"priors must cover exactly {HOF_CLASSES}, got {set(self.counts)}")
        if any(c <= 0 for c in self.counts.values()):
            raise ValueError(f"prior counts must be positive: {self.counts}")

    @classmethod
    def from_dataset(cls, d: Dataset) -> "ClassPriors":
        counts = {c: 0 for c in HOF_CLASSES}
        for ex in d:
            if ex.label_fine in counts:
                counts[ex.label_fine] += 1
        return cls(counts)

    def most_common(self) -> str:
        """Highest-count class; ties go to HATE < OFFN < PRFN order."""
        return max(HOF_CLASSES, key=lambda c: self.counts[c])


def resolve_label(gate: str, pair_hp: str | None, pair_ho: str | None,
                  pair_op: str | None, priors: ClassPriors) -> FineDecision:
    """Turn the gate and pairwise outcomes into one fine-grained label."""
    if gate == "NOT":
        return FineDecision("NOT", None, None, None, "NONE")
    if gate != "HOF":
        raise ValueError(f"unknown gate outcome {gate!r}")
    for value, pair, name in ((pair_hp, PAIR_HP, "hate-vs-profane"),
                              (pair_ho, PAIR_HO, "hate-vs-offensive"),
                              (pair_op, PAIR_OP, "offensive-vs-profane")):
        if value is None:
            raise ValueError(f"missing {name} outcome for a HOF-gated example")
        if value not in pair:
            raise ValueError(f"{name} outcome must be one of {pair}, got {value!r}")

    votes = {c: 0 for c in HOF_CLASSES}
    for value in (pair_hp, pair_ho, pair_op):
        votes[value] += 1
    top = max(votes.values())
    winners = [c for c in HOF_CLASSES if votes[c] == top]
    if len(winners) == 1:
        return FineDecision("HOF", pair_hp, pair_ho, pair_op, winners[0])
    # three votes over three classes: any non-unique tally is 1-1-1
    return FineDecision("HOF", pair_hp, pair_ho, pair_op, priors.most_common(),
                        tie_broken=True)


def pairwise_subsets(train: Dataset, extra: Dataset | None = None
                     ) -> dict[tuple[str, str], list]:
    """Rows feeding each pairwise model: fine-labeled rows whose label is in
    the pair, with extra-corpus rows joining only the pairs they belong to."""
    subsets: dict[tuple[str, str], list] = {pair: [] for pair in PAIRS}
    for part in (train, extra):
        if part is None:
            continue
        for ex in part:
            for pair in PAIRS:
                if ex.label_fine in pair:
                    subsets[pair].append(ex)
    return subsets


def train_pairwise(train: Dataset, extra: Dataset | None, cfg: TrainConfig
                   ) -> tuple[TransformerTextClassifier, ...]:
    """Fine-tune the three pairwise models; returns (hp, ho, op)."""
    subsets = pairwise_subsets(train, extra)
    models = []
    for pair in PAIRS:
        rows = subsets[pair]
        present = {ex.label_fine for ex in rows}
        if len(present) < 2:
            raise DataError(
                f"pair {pair[0]}-vs-{pair[1]} has fewer than 2 distinct labels present"
            )
        logger.info("pair %s-vs-%s: %d training rows", pair[0], pair[1], len(rows))
        clf = TransformerTextClassifier(
            backbone=cfg.backbone, classes=pair, epochs=cfg.epochs,
            learning_rate=cfg.learning_rate, batch_size=cfg.batch_size,
            max_seq_len=cfg.max_seq_len, seed=cfg.seed,
        )
        clf.fit([ex.text for ex in rows], [ex.label_fine for ex in rows],
                sample_ids=[ex.id for ex in rows])
        models.append(clf)
    return tuple(models)


def predict_fine(gate_models, pair_models: Sequence, priors: ClassPriors,
                 texts: Sequence[str]) -> list[FineDecision]:
    """Gate every text, then query the pairwise models only for HOF texts.

    ``gate_models`` is any predictor with a ``predict`` method (typically the
    binary soft-voting ensemble); ``pair_models`` are the (hp, ho, op) models.
    """
    texts = list(texts)
    if len(pair_models) != 3:
        raise ValueError(f"expected 3 pairwise models, got {len(pair_models)}")
    gate_labels = list(gate_models.predict(texts))
    bad = [lab for lab in gate_labels if lab not in ("NOT", "HOF")]
    if bad:
        raise ValueError(f"gate produced labels outside NOT/HOF: {sorted(set(bad))[:5]}")

    hof_positions = [i for i, lab in enumerate(gate_labels) if lab == "HOF"]
    pair_outcomes: dict[int, tuple[str, str, str]] = {}
    if hof_positions:
        hof_texts = [texts[i] for i in hof_positions]
        hp, ho, op = (list(m.predict(hof_texts)) for m in pair_models)
        for j, i in enumerate(hof_positions):
            pair_outcomes[i] = (hp[j], ho[j], op[j])

    decisions = []
    for i, gate in enumerate(gate_labels):
        if gate == "NOT":
            decisions.append(resolve_label("NOT", None, None, None, priors))
        else:
            decisions.append(resolve_label("HOF", *pair_outcomes[i], priors))
    return decisions
