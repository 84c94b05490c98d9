"""Input validation helpers for the estimator classes."""

from __future__ import annotations

from typing import Sequence

from .exceptions import LabelError


def check_texts(X) -> list[str]:
    """Coerce X to a list of strings, rejecting non-string entries."""
    if isinstance(X, str):
        raise TypeError("expected a sequence of texts, got a single string")
    texts = list(X)
    for i, t in enumerate(texts):
        if not isinstance(t, str):
            raise TypeError(f"text at position {i} is {type(t).__name__}, expected str")
    return texts


def check_texts_labels(X, y, classes: Sequence[str], ids: Sequence[str] | None = None):
    """Validate a (texts, labels) pair against an ordered label scheme.

    `ids` are used in error messages when given; positions otherwise.
    """
    texts = check_texts(X)
    labels = list(y)
    if len(texts) != len(labels):
        raise ValueError(f"got {len(texts)} texts but {len(labels)} labels")
    allowed = set(classes)
    bad = [i for i, lab in enumerate(labels) if lab not in allowed]
    if bad:
        names = [str(ids[i]) if ids is not None else str(i) for i in bad[:10]]
        raise LabelError(
            f"{len(bad)} label(s) outside scheme {tuple(classes)}; "
            f"offending rows: {', '.join(names)}"
        )
    return texts, labels
