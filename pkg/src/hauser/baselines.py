"""Surface n-gram baselines the learned criteria are compared against.

BLEU here is the classic corpus formulation restricted to one candidate:
clipped modified precisions, geometric mean, brevity penalty, and no
smoothing, so a missing n-gram order sends the score straight to 0. That
cliff is intentional; it is exactly the weakness the comparison is meant
to expose. ROUGE-n is recall, ROUGE-L is the LCS F1, Distinct-n is pooled
over a set of texts, and Self-BLEU scores each text against its siblings.

Tokenization everywhere: lowercase, punctuation split into its own tokens,
then whitespace.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from typing import Sequence

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def gram_tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_n(candidate: str, references: Sequence[str], n: int = 4) -> float:
    """BLEU with orders 1..n. Zero when any order has no match."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not references:
        raise ValueError("need at least one reference")
    cand = gram_tokenize(candidate)
    refs = [gram_tokenize(r) for r in references]
    if not cand:
        return 0.0
    log_sum = 0.0
    for order in range(1, n + 1):
        cand_grams = _ngrams(cand, order)
        total = sum(cand_grams.values())
        if total == 0:
            return 0.0
        clipped = 0
        for gram, count in cand_grams.items():
            best = max(_ngrams(ref, order).get(gram, 0) for ref in refs)
            clipped += min(count, best)
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total)
    c = len(cand)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    brevity = 1.0 if c > r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_sum / n)


def rouge_n(candidate: str, references: Sequence[str], n: int = 2) -> float:
    """N-gram recall; with several references the best one counts."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not references:
        raise ValueError("need at least one reference")
    cand_grams = _ngrams(gram_tokenize(candidate), n)
    best = 0.0
    for reference in references:
        ref_grams = _ngrams(gram_tokenize(reference), n)
        total = sum(ref_grams.values())
        if total == 0:
            continue
        matched = sum(min(count, cand_grams.get(gram, 0)) for gram, count in ref_grams.items())
        best = max(best, matched / total)
    return best


def rouge_l(candidate: str, references: Sequence[str]) -> float:
    """Longest-common-subsequence F1; with several references the best one
    counts."""
    if not references:
        raise ValueError("need at least one reference")
    cand = gram_tokenize(candidate)
    best = 0.0
    for reference in references:
        ref = gram_tokenize(reference)
        if not cand or not ref:
            continue
        lcs = _lcs_length(cand, ref)
        if lcs == 0:
            continue
        precision = lcs / len(cand)
        recall = lcs / len(ref)
        best = max(best, 2.0 * precision * recall / (precision + recall))
    return best


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    # single-row dynamic program; len(b) + 1 cells
    row = [0] * (len(b) + 1)
    for x in a:
        prev_diag = 0
        for j, y in enumerate(b, start=1):
            prev_row = row[j]
            row[j] = prev_diag + 1 if x == y else max(row[j], row[j - 1])
            prev_diag = prev_row
    return row[len(b)]


def distinct_n(texts: Sequence[str], n: int = 1) -> float:
    """Share of unique n-grams in the pool of all texts' n-grams."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not texts:
        raise ValueError("need at least one text")
    pool: Counter = Counter()
    for text in texts:
        pool.update(_ngrams(gram_tokenize(text), n))
    total = sum(pool.values())
    if total == 0:
        return 0.0
    return len(pool) / total


def self_bleu(texts: Sequence[str], n: int = 4) -> list[float]:
    """Per-text BLEU against the remaining texts. High means redundant."""
    if len(texts) < 2:
        raise ValueError("self-BLEU needs at least two texts")
    scores = []
    for i, text in enumerate(texts):
        others = [t for j, t in enumerate(texts) if j != i]
        scores.append(bleu_n(text, others, n))
    return scores
