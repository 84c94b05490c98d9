"""Corpus loading, label harmonization, merging, and train/validation splitting.

Every corpus is normalized to one schema: an example has an opaque id, a text,
a language tag, a binary label (NOT/HOF), and optionally a fine-grained label
(NONE/HATE/OFFN/PRFN). Files are comma-separated with a header; the unified
layout written by this package is ``id,text,label_task1,label_task2,lang``,
and each external corpus has an adapter that knows its column names and raw
label vocabulary.
"""

from __future__ import annotations

import csv
import logging
import math
import random
from dataclasses import InitVar, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .exceptions import ConfigError, DataError, LabelError, SchemaError

logger = logging.getLogger(__name__)

BINARY_LABELS = ("NOT", "HOF")
FINE_LABELS = ("NONE", "HATE", "OFFN", "PRFN")
LANGS = ("en", "hi", "mr")
SOURCES = ("hasoc2021", "hasoc2020", "hatebase", "hateval", "olid", "merged", "synthetic")
EXTERNAL_SOURCES = ("hasoc2020", "hatebase", "hateval", "olid")
SPLIT_TAGS = ("train", "val", "test", "none")


@dataclass(frozen=True)
class LabeledExample:
    """One post with its harmonized labels."""

    id: str
    text: str
    lang: str
    label_binary: str | None = None
    label_fine: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("example id must be non-empty")
        if self.lang not in LANGS:
            raise ValueError(f"example {self.id!r} has unknown language {self.lang!r}")
        if self.label_binary is not None and self.label_binary not in BINARY_LABELS:
            raise ValueError(f"example {self.id!r} has unknown binary label {self.label_binary!r}")
        if self.label_fine is not None and self.label_fine not in FINE_LABELS:
            raise ValueError(f"example {self.id!r} has unknown fine label {self.label_fine!r}")
        if self.label_binary is not None and self.label_fine is not None:
            # NONE pairs with NOT; HATE/OFFN/PRFN pair with HOF.
            if (self.label_fine == "NONE") != (self.label_binary == "NOT"):
                raise ValueError(
                    f"example {self.id!r} has inconsistent labels "
                    f"({self.label_binary!r} vs {self.label_fine!r})"
                )


@dataclass(frozen=True)
class Dataset:
    """Immutable ordered collection of examples with provenance metadata.

    Ids are unique by default; pass ``check_ids=False`` for datasets that
    legitimately repeat examples (random oversampling output).
    """

    examples: tuple[LabeledExample, ...]
    source: str
    split_tag: str = "none"
    check_ids: InitVar[bool] = True

    def __post_init__(self, check_ids: bool):
        object.__setattr__(self, "examples", tuple(self.examples))
        if self.source not in SOURCES:
            raise ValueError(f"unknown dataset source {self.source!r}")
        if self.split_tag not in SPLIT_TAGS:
            raise ValueError(f"unknown split tag {self.split_tag!r}")
        if check_ids:
            seen = set()
            for ex in self.examples:
                if ex.id in seen:
                    raise DataError(f"duplicate id {ex.id!r} in {self.source} dataset")
                seen.add(ex.id)

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i: int) -> LabeledExample:
        return self.examples[i]

    def texts(self) -> list[str]:
        return [ex.text for ex in self.examples]

    def ids(self) -> list[str]:
        return [ex.id for ex in self.examples]


@dataclass(frozen=True)
class CorpusSpec:
    """Where an external corpus lives and how its raw labels harmonize.

    ``label_map`` maps each raw label string of the source to a
    ``(binary, fine_or_None)`` pair; ``None`` picks the source default.
    """

    source: str
    path: str | Path
    lang: str = "en"
    label_map: Mapping[str, tuple[str, str | None]] | None = None


# Fixed harmonization rules for the four external corpora. Hatebase has no
# profanity class, so no raw label maps to PRFN.
DEFAULT_LABEL_MAPS: dict[str, dict[str, tuple[str, str | None]]] = {
    "hasoc2020": {"HOF": ("HOF", None), "NOT": ("NOT", None)},
    "hatebase": {
        "hate-speech": ("HOF", "HATE"),
        "offensive": ("HOF", "OFFN"),
        "neither": ("NOT", None),
    },
    "hateval": {"1": ("HOF", None), "0": ("NOT", None)},
    "olid": {"OFF": ("HOF", None), "NOT": ("NOT", None)},
}

# Per-source column candidates, in lookup order. Official release headers
# first, the unified header as fallback.
_ADAPTER_COLUMNS: dict[str, dict[str, list[str]]] = {
    "hasoc2021": {
        "id": ["id", "_id", "tweet_id"],
        "text": ["text", "tweet"],
        "label": ["label_task1", "task_1", "task1"],
        "fine": ["label_task2", "task_2", "task2"],
    },
    "hasoc2020": {
        "id": ["tweet_id", "id", "_id"],
        "text": ["text", "tweet"],
        "label": ["task1", "task_1", "label_task1"],
    },
    "hatebase": {
        "id": ["id", "_id", "index", ""],
        "text": ["tweet", "text"],
        "label": ["class", "label"],
    },
    "hateval": {
        "id": ["id", "_id"],
        "text": ["text", "tweet"],
        "label": ["HS", "hs", "label"],
    },
    "olid": {
        "id": ["id", "_id"],
        "text": ["tweet", "text"],
        "label": ["subtask_a", "label"],
    },
}

# Hatebase distributes the majority-annotation label as a numeric code.
_HATEBASE_CLASS_CODES = {"0": "hate-speech", "1": "offensive", "2": "neither"}


def _open_rows(path: str | Path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"corpus file not found: {path}")
    handle = path.open(newline="", encoding="utf-8")
    reader = csv.DictReader(handle)
    if reader.fieldnames is None:
        handle.close()
        raise SchemaError(f"{path}: empty file, expected a header row")
    return handle, reader


def _pick_column(fieldnames: Sequence[str], candidates: Sequence[str], canonical: str,
                 path, required: bool = True) -> str | None:
    lower = {f.lower(): f for f in fieldnames}
    for cand in candidates:
        if cand in fieldnames:
            return cand
        if cand.lower() in lower:
            return lower[cand.lower()]
    if required:
        raise SchemaError(f"{path}: missing required column {canonical!r}")
    return None


def _harmonize(raw: str, label_map, row_id: str, source: str) -> tuple[str, str | None]:
    raw = raw.strip()
    if source == "hatebase":
        raw = _HATEBASE_CLASS_CODES.get(raw, raw)
    if raw not in label_map:
        raise LabelError(f"unknown {source} label {raw!r} for row id {row_id!r}")
    return label_map[raw]


def _read_unified(path: str | Path, lang: str, source: str,
                  require_binary: bool = True, check_ids: bool = True,
                  split_tag: str = "none") -> Dataset:
    """Read a file in the unified (or official HASOC) layout."""
    if lang not in LANGS:
        raise ConfigError(f"unknown language {lang!r}")
    cols = _ADAPTER_COLUMNS["hasoc2021"]
    handle, reader = _open_rows(path)
    try:
        fields = reader.fieldnames
        id_col = _pick_column(fields, cols["id"], "id", path)
        text_col = _pick_column(fields, cols["text"], "text", path)
        label_col = _pick_column(fields, cols["label"], "label_task1", path,
                                 required=require_binary)
        fine_col = _pick_column(fields, cols["fine"], "label_task2", path, required=False)
        lang_col = _pick_column(fields, ["lang", "language"], "lang", path, required=False)

        examples = []
        for row in reader:
            row_id = (row[id_col] or "").strip()
            binary = fine = None
            if label_col is not None and (row[label_col] or "").strip():
                binary = (row[label_col] or "").strip()
                if binary not in BINARY_LABELS:
                    raise LabelError(f"unknown task-1 label {binary!r} for row id {row_id!r}")
            if fine_col is not None and (row[fine_col] or "").strip():
                fine = (row[fine_col] or "").strip()
                if fine not in FINE_LABELS:
                    raise LabelError(f"unknown task-2 label {fine!r} for row id {row_id!r}")
            row_lang = (row[lang_col] or "").strip() if lang_col is not None else ""
            text = row[text_col] or ""
            if not text:
                raise DataError(f"{path}: empty text for row id {row_id!r}")
            try:
                examples.append(LabeledExample(
                    id=row_id,
                    text=text,
                    lang=row_lang or lang,
                    label_binary=binary,
                    label_fine=fine,
                ))
            except ValueError as err:
                raise DataError(f"{path}: {err}") from err
    finally:
        handle.close()
    return Dataset(tuple(examples), source=source, split_tag=split_tag, check_ids=check_ids)


def load_hasoc2021(path: str | Path, lang: str) -> Dataset:
    """Load a HASOC 2021 training/test file (official or unified header)."""
    return _read_unified(path, lang=lang, source="hasoc2021")


def load_external(spec: CorpusSpec) -> Dataset:
    """Load one of the external corpora and harmonize its labels."""
    if spec.source not in EXTERNAL_SOURCES:
        raise ConfigError(
            f"load_external expects one of {EXTERNAL_SOURCES}, got {spec.source!r}"
        )
    label_map = spec.label_map if spec.label_map is not None else DEFAULT_LABEL_MAPS[spec.source]
    cols = _ADAPTER_COLUMNS[spec.source]
    handle, reader = _open_rows(spec.path)
    try:
        fields = reader.fieldnames
        id_col = _pick_column(fields, cols["id"], "id", spec.path, required=False)
        text_col = _pick_column(fields, cols["text"], "text", spec.path)
        label_col = _pick_column(fields, cols["label"], cols["label"][0], spec.path)

        examples = []
        for i, row in enumerate(reader):
            # some releases ship without an id column; fall back to row order
            row_id = (row[id_col] or "").strip() if id_col is not None else str(i + 1)
            binary, fine = _harmonize(row[label_col] or "", label_map, row_id, spec.source)
            text = row[text_col] or ""
            if not text:
                raise DataError(f"{spec.path}: empty text for row id {row_id!r}")
            try:
                examples.append(LabeledExample(
                    id=row_id, text=text, lang=spec.lang,
                    label_binary=binary, label_fine=fine,
                ))
            except ValueError as err:
                raise DataError(f"{spec.path}: {err}") from err
    finally:
        handle.close()
    return Dataset(tuple(examples), source=spec.source)


def merge(parts: Sequence[Dataset]) -> Dataset:
    """Concatenate datasets in input order under the ``merged`` source tag.

    Ids are kept as-is when already unique across parts; colliding ids are
    disambiguated by prefixing the owning part's source name (plus the part's
    position if two same-source parts still collide).
    """
    if not parts:
        raise DataError("merge requires at least one dataset")
    seen: dict[str, int] = {}
    for part in parts:
        for ex in part:
            seen[ex.id] = seen.get(ex.id, 0) + 1
    collisions = {i for i, c in seen.items() if c > 1}

    examples = []
    used = set()
    for pos, part in enumerate(parts):
        for ex in part:
            new_id = ex.id
            if new_id in collisions:
                new_id = f"{part.source}:{ex.id}"
            if new_id in used:
                new_id = f"{part.source}{pos}:{ex.id}"
            used.add(new_id)
            examples.append(ex if new_id == ex.id else replace(ex, id=new_id))
    tags = {p.split_tag for p in parts}
    tag = tags.pop() if len(tags) == 1 else "none"
    return Dataset(tuple(examples), source="merged", split_tag=tag)


def split_train_val(d: Dataset, ratio: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic random split into train (floor(ratio*n)) and validation."""
    if not 0 < ratio < 1:
        raise ValueError(f"split ratio must be in (0, 1), got {ratio}")
    if len(d) == 0:
        raise DataError("cannot split an empty dataset")
    order = list(range(len(d)))
    random.Random(seed).shuffle(order)
    cut = math.floor(ratio * len(d))
    train = tuple(d[i] for i in order[:cut])
    val = tuple(d[i] for i in order[cut:])
    return (
        Dataset(train, source=d.source, split_tag="train", check_ids=False),
        Dataset(val, source=d.source, split_tag="val", check_ids=False),
    )


def class_counts(d: Dataset, scheme: str) -> dict[str, int]:
    """Label histogram over ``binary`` or ``fine`` labels; zero-filled."""
    if scheme == "binary":
        labels, getter = BINARY_LABELS, lambda ex: ex.label_binary
    elif scheme == "fine":
        labels, getter = FINE_LABELS, lambda ex: ex.label_fine
    else:
        raise ValueError(f"unknown label scheme {scheme!r}")
    missing = [ex.id for ex in d if getter(ex) is None]
    if missing:
        shown = ", ".join(missing[:10])
        more = "" if len(missing) <= 10 else f" (+{len(missing) - 10} more)"
        raise LabelError(f"{len(missing)} example(s) lack a {scheme} label: {shown}{more}")
    counts = {label: 0 for label in labels}
    for ex in d:
        counts[getter(ex)] += 1
    return counts


def format_counts(counts: Mapping[str, int]) -> str:
    """Two-column text report of a label histogram."""
    width = max(len(k) for k in counts) if counts else 5
    lines = [f"{k:<{width}}  {v}" for k, v in counts.items()]
    lines.append(f"{'total':<{width}}  {sum(counts.values())}")
    return "\n".join(lines)


def write_unified(d: Dataset, path: str | Path) -> None:
    """Write a dataset in the unified layout (label cells empty when absent)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["id", "text", "label_task1", "label_task2", "lang"])
        for ex in d:
            writer.writerow([ex.id, ex.text, ex.label_binary or "", ex.label_fine or "", ex.lang])


def load_unified(path: str | Path, lang: str = "en", source: str = "merged",
                 require_binary: bool = False, check_ids: bool = False,
                 split_tag: str = "none") -> Dataset:
    """Read back a file written by :func:`write_unified` (labels optional)."""
    return _read_unified(path, lang=lang, source=source, require_binary=require_binary,
                         check_ids=check_ids, split_tag=split_tag)


def write_predictions(ids: Iterable[str], labels: Iterable[str], path: str | Path) -> None:
    """Write an ``id,label`` prediction file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["id", "label"])
        for i, lab in zip(ids, labels):
            writer.writerow([i, lab])


def read_predictions(path: str | Path) -> dict[str, str]:
    """Read an ``id,label`` prediction file into an id -> label mapping."""
    handle, reader = _open_rows(path)
    try:
        id_col = _pick_column(reader.fieldnames, ["id"], "id", path)
        label_col = _pick_column(reader.fieldnames, ["label"], "label", path)
        return {row[id_col]: (row[label_col] or "").strip() for row in reader}
    finally:
        handle.close()
