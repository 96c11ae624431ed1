"""Bilingual query pipeline: tokenization, stop-word filtering, suffix
stemming, and set-cosine proximity scoring against taxonomy nodes.

The stop lists and stemmer rule tables ship as data files under
``glanoir/data`` (one entry per line, UTF-8; rule lines are
``suffix TAB replacement TAB min_stem_len``). Both can be overridden by
pointing a :class:`Pipeline` at a directory with the same file names.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

LANGUAGES = ("fr", "en")

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def check_lang(lang: str) -> str:
    if lang not in LANGUAGES:
        raise ValueError(f"unsupported language {lang!r}, expected one of {LANGUAGES}")
    return lang


@dataclass(frozen=True)
class StemRule:
    suffix: str
    replacement: str
    min_stem_len: int


@dataclass(frozen=True)
class Pipeline:
    """Stop lists plus stemmer rule tables for both languages.

    Stemming applies the longest matching suffix rule whose remaining stem
    is long enough, and repeats until the word no longer changes, so every
    output is a fixed point of the stemmer.
    """

    stopwords: Mapping[str, frozenset[str]]
    rules: Mapping[str, tuple[StemRule, ...]]

    @classmethod
    def bundled(cls) -> "Pipeline":
        return _bundled_pipeline()

    @classmethod
    def from_dir(cls, path: str | Path) -> "Pipeline":
        base = Path(path)
        return cls(
            stopwords={
                lang: _parse_stoplist((base / f"stopwords_{lang}.txt").read_text("utf-8"))
                for lang in LANGUAGES
            },
            rules={
                lang: _parse_rules((base / f"stem_rules_{lang}.txt").read_text("utf-8"))
                for lang in LANGUAGES
            },
        )

    def stem(self, word: str, lang: str) -> str:
        rules = self.rules[check_lang(lang)]
        current = word
        while True:
            changed = _stem_once(current, rules)
            if changed == current:
                return current
            current = changed


def _parse_stoplist(text: str) -> frozenset[str]:
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def _parse_rules(text: str) -> tuple[StemRule, ...]:
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"bad stemmer rule on line {lineno}: {line!r}")
        rules.append(StemRule(parts[0], parts[1], int(parts[2])))
    # longest suffix wins; file order breaks ties
    rules.sort(key=lambda r: -len(r.suffix))
    return tuple(rules)


def _stem_once(word: str, rules: tuple[StemRule, ...]) -> str:
    for rule in rules:
        if word.endswith(rule.suffix) and len(word) - len(rule.suffix) >= rule.min_stem_len:
            return word[: len(word) - len(rule.suffix)] + rule.replacement
    return word


@lru_cache(maxsize=1)
def _bundled_pipeline() -> Pipeline:
    data = resources.files("glanoir") / "data"
    return Pipeline(
        stopwords={
            lang: _parse_stoplist((data / f"stopwords_{lang}.txt").read_text("utf-8"))
            for lang in LANGUAGES
        },
        rules={
            lang: _parse_rules((data / f"stem_rules_{lang}.txt").read_text("utf-8"))
            for lang in LANGUAGES
        },
    )


@dataclass
class LemmaBag:
    """Multiset of stemmer-fixed, stop-filtered lemmas in one language."""

    lemmas: Counter
    lang: str

    def distinct(self) -> frozenset[str]:
        return frozenset(self.lemmas)

    def __bool__(self) -> bool:
        return bool(self.lemmas)


@dataclass(frozen=True)
class NodeMatch:
    node: str
    score: float


def tokenize(text: str, lang: str) -> list[str]:
    """Split on non-letter/non-digit boundaries and lowercase.

    Accents are preserved; the split is Unicode-aware, so apostrophes and
    punctuation act as boundaries ("d'Informations" -> ["d", "informations"]).
    """
    check_lang(lang)
    return [token.lower() for token in _TOKEN_RE.findall(text)]


def filter_stopwords(tokens: Iterable[str], lang: str, pipeline: Pipeline | None = None) -> list[str]:
    """Drop exact matches against the stop list for ``lang``, keeping order."""
    pipe = pipeline or Pipeline.bundled()
    stop = pipe.stopwords[check_lang(lang)]
    return [token for token in tokens if token not in stop]


def lemmatize(tokens: Iterable[str], lang: str, pipeline: Pipeline | None = None) -> LemmaBag:
    """Stem stop-filtered tokens into a LemmaBag.

    Stems that land on a stop word (e.g. "cans" -> "can") are dropped so the
    bag never contains stop-list members.
    """
    pipe = pipeline or Pipeline.bundled()
    check_lang(lang)
    stop = pipe.stopwords[lang]
    lemmas = Counter()
    for token in tokens:
        lemma = pipe.stem(token, lang)
        if lemma and lemma not in stop:
            lemmas[lemma] += 1
    return LemmaBag(lemmas=lemmas, lang=lang)


def text_to_lemmas(text: str, lang: str, pipeline: Pipeline | None = None) -> LemmaBag:
    """Full pipeline: tokenize, stop-filter, lemmatize."""
    return lemmatize(filter_stopwords(tokenize(text, lang), lang, pipeline), lang, pipeline)


def proximity(query: LemmaBag, node_terms: Iterable[str] | Mapping[str, int]) -> float:
    """Binary cosine over distinct lemma sets; 0.0 when either side is empty."""
    q = query.distinct()
    n = frozenset(node_terms)
    if not q or not n:
        return 0.0
    return len(q & n) / math.sqrt(len(q) * len(n))


def match_query(
    text: str,
    lang: str,
    graph,
    k: int = 3,
    threshold: float = 0.1,
    pipeline: Pipeline | None = None,
) -> list[NodeMatch]:
    """Score every taxonomy node against the query, keep the top ``k``.

    Returns up to ``k`` matches with score >= ``threshold``, sorted by
    (score desc, node id asc). Degenerate input yields an empty list rather
    than an error.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scored = rank_nodes(text, lang, graph, pipeline)
    return [m for m in scored if m.score >= threshold][:k]


def rank_nodes(text: str, lang: str, graph, pipeline: Pipeline | None = None) -> list[NodeMatch]:
    """All nodes with a nonzero proximity to the query, best first."""
    from . import taxonomy

    bag = text_to_lemmas(text, lang, pipeline)
    if not bag:
        return []
    bags = taxonomy.subtree_term_bags(graph, lang, pipeline)
    scored = [
        NodeMatch(node=node_id, score=score)
        for node_id, terms in bags.items()
        if (score := proximity(bag, terms)) > 0.0
    ]
    scored.sort(key=lambda m: (-m.score, m.node))
    return scored
