"""Random oversampling so both binary classes appear equally often in training."""

from __future__ import annotations

import logging
import random

from .corpus import Dataset, class_counts
from .exceptions import DataError

logger = logging.getLogger(__name__)


def oversample_balanced(d: Dataset, seed: int) -> Dataset:
    """Duplicate minority-class examples until the two binary classes match.

    Duplicates are drawn uniformly with replacement from the minority class,
    so every output example is an exact copy of an input example (ids
    included). The result is shuffled with the given seed.
    """
    counts = class_counts(d, "binary")
    if min(counts.values()) == 0:
        raise DataError(f"oversampling needs both binary classes, got counts {counts}")

    minority = min(counts, key=counts.get)
    deficit = max(counts.values()) - counts[minority]
    pool = [ex for ex in d if ex.label_binary == minority]

    rng = random.Random(seed)
    combined = list(d.examples) + rng.choices(pool, k=deficit)
    rng.shuffle(combined)
    if deficit:
        logger.info("oversampled %s by %d copies (%d -> %d per class)",
                    minority, deficit, counts[minority], max(counts.values()))
    return Dataset(tuple(combined), source=d.source, split_tag=d.split_tag, check_ids=False)
