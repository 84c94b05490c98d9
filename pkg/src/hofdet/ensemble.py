"""Soft voting over independently fine-tuned classifiers."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .exceptions import CheckpointError
from .trainer import ProbVector, TransformerTextClassifier

MANIFEST_NAME = "ensemble.json"


def soft_vote(votes: Sequence[ProbVector]) -> ProbVector:
    """Element-wise arithmetic mean of member distributions.

    fsum keeps the result exactly independent of member order.
    """
    if not votes:
        raise ValueError("soft_vote requires at least one member vote")
    names = votes[0].class_names
    for v in votes[1:]:
        if v.class_names != names:
            raise ValueError(f"mismatched class names: {v.class_names} vs {names}")
    mean = tuple(math.fsum(v.probs[i] for v in votes) / len(votes)
                 for i in range(len(names)))
    return ProbVector(mean, names)


class SoftVotingEnsemble(BaseEstimator, ClassifierMixin):
    """Prediction-time wrapper over already-fitted members."""

    def __init__(self, members: Sequence):
        self.members = list(members)
        if not self.members:
            raise ValueError("ensemble requires at least one member")
        schemes = {tuple(m.classes_) for m in self.members}
        if len(schemes) != 1:
            raise ValueError(f"members disagree on the label scheme: {schemes}")
        self.classes_ = schemes.pop()

    def predict_vectors(self, X) -> list[ProbVector]:
        member_votes = [m.predict_vectors(X) for m in self.members]
        return [soft_vote(per_text) for per_text in zip(*member_votes)]

    def predict_proba(self, X) -> np.ndarray:
        vectors = self.predict_vectors(X)
        if not vectors:
            return np.zeros((0, len(self.classes_)))
        return np.array([v.probs for v in vectors])

    def predict(self, X) -> list[str]:
        return [v.argmax_label for v in self.predict_vectors(X)]


def ensemble_predict(models: Sequence, texts) -> tuple[list[str], list[ProbVector]]:
    """Soft-voted labels and distributions; argmax ties go to scheme order."""
    ensemble = SoftVotingEnsemble(models)
    vectors = ensemble.predict_vectors(texts)
    return [v.argmax_label for v in vectors], vectors


def write_manifest(member_paths: Sequence[str | Path], classes: Sequence[str],
                   path: str | Path) -> None:
    """Record member checkpoint locations (stored relative to the manifest)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    members = []
    for p in member_paths:
        p = Path(p)
        try:
            members.append(str(p.relative_to(path.parent)))
        except ValueError:
            members.append(str(p))
    payload = {"classes": list(classes), "members": members}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_ensemble(manifest_path: str | Path) -> SoftVotingEnsemble:
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise CheckpointError(f"ensemble manifest not found: {manifest_path}")
    payload = json.loads(manifest_path.read_text())
    members = []
    for rel in payload["members"]:
        member_path = Path(rel)
        if not member_path.is_absolute():
            member_path = manifest_path.parent / member_path
        members.append(TransformerTextClassifier.load(member_path))
    ensemble = SoftVotingEnsemble(members)
    if tuple(payload.get("classes", ensemble.classes_)) != tuple(ensemble.classes_):
        raise CheckpointError(f"manifest classes disagree with checkpoints in {manifest_path}")
    return ensemble
