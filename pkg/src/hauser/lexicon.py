"""Bundled word lists backing the rule-based tagger and the stub classifiers.

All tables are plain data files under ``hauser/data`` so they can be audited
and swapped without touching code. Loading is cached; the returned
containers must be treated as read-only.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


def _read_text(name: str) -> str:
    return resources.files("hauser.data").joinpath(name).read_text(encoding="utf-8")


def _read_wordlist(name: str) -> frozenset[str]:
    words = set()
    for line in _read_text(name).splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


@lru_cache(maxsize=None)
def pos_rules() -> dict[str, frozenset[str]]:
    """Closed-class word table used by the extraction heuristics."""
    raw = json.loads(_read_text("pos_rules.json"))
    return {key: frozenset(words) for key, words in raw.items()}


@lru_cache(maxsize=None)
def verb_lemmas() -> frozenset[str]:
    """Base-form verb lexicon (open class, curated)."""
    return _read_wordlist("verbs.txt")


@lru_cache(maxsize=None)
def irregular_verb_map() -> dict[str, str]:
    """Inflected irregular form -> lemma."""
    table = {}
    for line in _read_text("irregular_verbs.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        form, lemma = line.split("\t")
        table[form] = lemma
    return table


@lru_cache(maxsize=None)
def positive_words() -> frozenset[str]:
    return _read_wordlist("positive_words.txt")


@lru_cache(maxsize=None)
def negative_words() -> frozenset[str]:
    return _read_wordlist("negative_words.txt")


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    return _read_wordlist("stopwords.txt")


@lru_cache(maxsize=None)
def antonym_map() -> dict[str, frozenset[str]]:
    """Symmetric antonym table for the stub NLI backend."""
    pairs: dict[str, set[str]] = {}
    for line in _read_text("antonyms.tsv").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        left, right = line.split("\t")
        pairs.setdefault(left, set()).add(right)
        pairs.setdefault(right, set()).add(left)
    return {word: frozenset(opps) for word, opps in pairs.items()}
