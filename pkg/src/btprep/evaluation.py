"""Metrics and meta-evaluation statistics.

Corpus BLEU-4 is an internal reimplementation of the usual corpus metric:
13a-style tokenization, clipped n-gram counts summed over the corpus,
exponential smoothing of zero match counts, brevity penalty. Orders with
no n-grams at all (hypotheses shorter than n) are excluded from the
geometric mean, so identical corpora always score 100 regardless of
sentence length. Bit-exact parity with external scorers is out of scope;
the smoothing and tokenization rules here are frozen.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import t as t_dist

from .corpus import tokenize_words
from .errors import (
    ConfigError,
    DegenerateInput,
    EmptyCorpus,
    LengthMismatch,
    SetTooLarge,
    TooFewScores,
)
from .tags import strip_leading_tag  # noqa: F401  (part of this module's API)
from .translit import CandidateGenerator

MAX_ORDER = 4
SXS_SIGNIFICANCE_THRESHOLD = 0.1


def tokenize_13a(line: str) -> list[str]:
    """Minimal punctuation-splitting tokenization for BLEU.

    Mirrors the common mteval rules: unescape a few XML entities, then
    split punctuation and symbols into their own tokens, keeping periods
    and commas attached inside numbers.
    """
    norm = line.replace("<skipped>", "")
    norm = norm.replace("-\n", "").replace("\n", " ")
    if "&" in norm:
        norm = (
            norm.replace("&quot;", '"')
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">")
        )
    norm = f" {norm} "
    norm = re.sub(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])", r" \1 ", norm)
    norm = re.sub(r"([^0-9])([\.,])", r"\1 \2 ", norm)
    norm = re.sub(r"([\.,])([^0-9])", r" \1 \2", norm)
    norm = re.sub(r"([0-9])(-)", r"\1 \2 ", norm)
    return norm.split()


@dataclass(frozen=True)
class BleuScore:
    value: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_len: int
    ref_len: int


@dataclass(frozen=True)
class SentenceStats:
    """Sufficient statistics of one hypothesis/reference line for BLEU."""

    correct: tuple[int, int, int, int]
    total: tuple[int, int, int, int]
    hyp_len: int
    ref_len: int


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_stats(hypothesis: str, reference: str) -> SentenceStats:
    hyp = tokenize_13a(hypothesis)
    ref = tokenize_13a(reference)
    correct = []
    total = []
    for n in range(1, MAX_ORDER + 1):
        hyp_ngrams = _ngrams(hyp, n)
        ref_ngrams = _ngrams(ref, n)
        total.append(max(len(hyp) - n + 1, 0))
        correct.append(sum(min(c, ref_ngrams[g]) for g, c in hyp_ngrams.items()))
    return SentenceStats(tuple(correct), tuple(total), len(hyp), len(ref))


def bleu_from_stats(stats: Iterable[SentenceStats]) -> BleuScore:
    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    hyp_len = ref_len = 0
    n_sentences = 0
    for s in stats:
        n_sentences += 1
        hyp_len += s.hyp_len
        ref_len += s.ref_len
        for i in range(MAX_ORDER):
            correct[i] += s.correct[i]
            total[i] += s.total[i]
    if n_sentences == 0:
        raise EmptyCorpus("no sentences to score")
    if hyp_len == 0:
        return BleuScore(0.0, (0.0,) * MAX_ORDER, 1.0, hyp_len, ref_len)

    precisions = [0.0] * MAX_ORDER
    log_sum = 0.0
    effective_order = 0
    smooth = 1.0
    for i in range(MAX_ORDER):
        if total[i] == 0:
            continue
        if correct[i] == 0:
            smooth *= 2.0
            precisions[i] = 1.0 / (smooth * total[i])
        else:
            precisions[i] = correct[i] / total[i]
        log_sum += math.log(precisions[i])
        effective_order += 1
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    value = bp * math.exp(log_sum / effective_order) * 100.0
    return BleuScore(value, tuple(precisions), bp, hyp_len, ref_len)


def corpus_bleu(hypotheses: Sequence[str], references: Sequence[str]) -> BleuScore:
    """Corpus-level smoothed BLEU-4; inputs are line-aligned raw strings."""
    if len(hypotheses) != len(references):
        raise LengthMismatch(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not hypotheses:
        raise EmptyCorpus("no sentences to score")
    return bleu_from_stats(sentence_stats(h, r) for h, r in zip(hypotheses, references))


@dataclass(frozen=True)
class F1Report:
    """Word-level scores for the Transliterate class (the positive class)."""

    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def word_level_translit_f1(
    sources: Sequence[str],
    hypotheses: Sequence[str],
    references: Sequence[str],
    gen: CandidateGenerator,
) -> F1Report:
    """Score per-source-word transliteration decisions against the reference.

    A source word is gold-positive when one of its candidates occurs in
    the reference; predicted-positive when one occurs in the hypothesis.
    With no gold and no predicted positives at all, P = R = F1 = 1.
    """
    if not (len(sources) == len(hypotheses) == len(references)):
        raise LengthMismatch(
            f"got {len(sources)} sources, {len(hypotheses)} hypotheses, "
            f"{len(references)} references"
        )
    tp = fp = fn = 0
    for source, hyp, ref in zip(sources, hypotheses, references):
        hyp_words = {w.lower() for w in tokenize_words(hyp)}
        ref_words = {w.lower() for w in tokenize_words(ref)}
        for word in tokenize_words(source):
            cands = [c.lower() for c in gen.candidates(word)]
            gold = any(c in ref_words for c in cands)
            pred = any(c in hyp_words for c in cands)
            if gold and pred:
                tp += 1
            elif pred:
                fp += 1
            elif gold:
                fn += 1
    if tp + fp + fn == 0:
        return F1Report(1.0, 1.0, 1.0, 0, 0, 0)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return F1Report(precision, recall, f1, tp, fp, fn)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation; both inputs need nonzero variance."""
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} xs vs {len(ys)} ys")
    if len(xs) < 2:
        raise DegenerateInput("correlation needs at least 2 points")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx)) * math.sqrt(float(dy @ dy))
    if denom == 0.0:
        raise DegenerateInput("zero variance input")
    return float(np.clip((dx @ dy) / denom, -1.0, 1.0))


def _mean_ranks(values: Sequence[float]) -> list[float]:
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of average ranks; ties get their mean rank."""
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} xs vs {len(ys)} ys")
    if len(xs) < 2:
        raise DegenerateInput("correlation needs at least 2 points")
    return pearson(_mean_ranks(xs), _mean_ranks(ys))


@dataclass(frozen=True)
class HumanScoreSummary:
    mean: float
    ci_halfwidth: float
    n: int


def mean_ci(scores: Sequence[float]) -> HumanScoreSummary:
    """Mean with a 95% normal-approximation CI half-width,
    1.96 * sample stddev / sqrt(n)."""
    n = len(scores)
    if n < 2:
        raise TooFewScores(f"need at least 2 scores, got {n}")
    x = np.asarray(scores, dtype=np.float64)
    sd = float(x.std(ddof=1))
    return HumanScoreSummary(float(x.mean()), 1.96 * sd / math.sqrt(n), n)


@dataclass(frozen=True)
class SxsReport:
    delta: float
    significant: bool
    n: int


def sxs_delta(scores_base: Sequence[float], scores_test: Sequence[float]) -> SxsReport:
    """Mean paired-rating difference (test minus base); deltas of at
    least 0.1 in magnitude are flagged significant."""
    if len(scores_base) != len(scores_test):
        raise LengthMismatch(f"{len(scores_base)} base vs {len(scores_test)} test scores")
    if not scores_base:
        raise TooFewScores("need at least 1 paired rating")
    delta = float(np.mean(scores_test) - np.mean(scores_base))
    return SxsReport(delta, abs(delta) >= SXS_SIGNIFICANCE_THRESHOLD, len(scores_base))


@dataclass(frozen=True)
class SignificanceReport:
    n_sets: int
    set_size: int
    bleu_a: list[float]
    bleu_b: list[float]
    t_statistic: float
    p_value: float
    seed: int


def bootstrap_significance(
    hyp_a: Sequence[str],
    hyp_b: Sequence[str],
    refs: Sequence[str],
    n_sets: int = 1000,
    set_size: int = 500,
    seed: int = 0,
) -> SignificanceReport:
    """Compare two systems by BLEU over many sampled test sets.

    Each set is `set_size` sentence indices drawn without replacement
    (sets are independent of each other); both systems are scored on the
    same sets. The t-test is the equal-variance two-sample statistic over
    the two per-set BLEU samples with 2*n_sets - 2 degrees of freedom.
    Identical systems give t = 0 and p = 1 exactly.
    """
    if not (len(hyp_a) == len(hyp_b) == len(refs)):
        raise LengthMismatch(
            f"got {len(hyp_a)} and {len(hyp_b)} hypotheses, {len(refs)} references"
        )
    n = len(refs)
    if set_size > n:
        raise SetTooLarge(f"set size {set_size} exceeds corpus size {n}")
    if set_size < 1:
        raise ConfigError(f"set size must be >= 1, got {set_size}")
    if n_sets < 2:
        raise ConfigError(f"need at least 2 sets for a t-test, got {n_sets}")

    stats_a = [sentence_stats(h, r) for h, r in zip(hyp_a, refs)]
    stats_b = [sentence_stats(h, r) for h, r in zip(hyp_b, refs)]
    rng = np.random.default_rng(seed)
    bleu_a = []
    bleu_b = []
    for _ in range(n_sets):
        idx = rng.choice(n, size=set_size, replace=False)
        bleu_a.append(bleu_from_stats(stats_a[int(i)] for i in idx).value)
        bleu_b.append(bleu_from_stats(stats_b[int(i)] for i in idx).value)

    a = np.asarray(bleu_a)
    b = np.asarray(bleu_b)
    pooled_var = (float(a.var(ddof=1)) + float(b.var(ddof=1))) / 2.0
    diff = float(a.mean() - b.mean())
    if pooled_var == 0.0:
        t_stat = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    else:
        t_stat = diff / math.sqrt(pooled_var * 2.0 / n_sets)
    df = 2 * n_sets - 2
    p_value = 2.0 * float(t_dist.sf(abs(t_stat), df))
    return SignificanceReport(n_sets, set_size, bleu_a, bleu_b, t_stat, p_value, seed)
