"""Tweet cleaning: URL removal and user-mention replacement.

Exactly two rules, both optional. Marathi input is configured with both rules
off and passes through byte-identical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_texts
from .corpus import Dataset

# A URL starts with http://, https://, or www. and runs to the next whitespace.
URL_PATTERN = re.compile(r"(?:https?://|www\.)\S+")
# A mention is @ followed by word characters.
MENTION_PATTERN = re.compile(r"@\w+")

DEFAULT_PLACEHOLDER = "$MENTION$"


@dataclass(frozen=True)
class PreprocessPolicy:
    remove_urls: bool = True
    replace_mentions: bool = True
    mention_placeholder: str = DEFAULT_PLACEHOLDER

    def __post_init__(self):
        if self.replace_mentions and not self.mention_placeholder:
            raise ValueError("mention_placeholder must be non-empty when replace_mentions is on")


def clean(text: str, policy: PreprocessPolicy) -> str:
    """Apply the enabled rules to one text.

    With both rules off this is the identity. Otherwise whitespace runs left
    behind by deletions are collapsed to single spaces and the result is
    trimmed; the placeholder matches neither pattern, so the function is
    idempotent.
    """
    if not (policy.remove_urls or policy.replace_mentions):
        return text
    if policy.remove_urls:
        text = URL_PATTERN.sub("", text)
    if policy.replace_mentions:
        text = MENTION_PATTERN.sub(policy.mention_placeholder, text)
    return re.sub(r"\s+", " ", text).strip()


def clean_dataset(d: Dataset, policy: PreprocessPolicy) -> Dataset:
    """Clean every text; ids, labels, language, and order are untouched."""
    cleaned = tuple(
        ex if (new := clean(ex.text, policy)) == ex.text else replace(ex, text=new)
        for ex in d
    )
    return Dataset(cleaned, source=d.source, split_tag=d.split_tag, check_ids=False)


class TweetCleaner(BaseEstimator, TransformerMixin):
    """Stateless sklearn transformer over lists of texts."""

    def __init__(self, remove_urls: bool = True, replace_mentions: bool = True,
                 mention_placeholder: str = DEFAULT_PLACEHOLDER):
        self.remove_urls = remove_urls
        self.replace_mentions = replace_mentions
        self.mention_placeholder = mention_placeholder

    def _policy(self) -> PreprocessPolicy:
        return PreprocessPolicy(self.remove_urls, self.replace_mentions,
                                self.mention_placeholder)

    def fit(self, X=None, y=None):
        self._policy()  # validate parameters
        return self

    def transform(self, X) -> list[str]:
        policy = self._policy()
        return [clean(t, policy) for t in check_texts(X)]
