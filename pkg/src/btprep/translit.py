"""Translate-vs-transliterate pair classification.

A pair is labeled Both when some source word's transliteration candidate
appears as a whole word in the target (case-insensitive, punctuation
stripped), else Txn. Candidates come from a pluggable generator: a
file-backed table, or a rule romanizer for Devanagari, Gujarati, and
Tamil driven by per-script mapping data files.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Protocol

from .corpus import SentencePair, tokenize_words
from .errors import (
    DuplicateId,
    DuplicateSourceWord,
    MalformedLine,
    MissingFile,
    UnsupportedLanguage,
)

TXN = "Txn"
BOTH = "Both"

DEFAULT_NUM_CANDIDATES = 10

LANGUAGE_TABLES = {
    "hi": "deva_latin.tsv",
    "gu": "gujr_latin.tsv",
    "ta": "taml_latin.tsv",
}


class CandidateGenerator(Protocol):
    num_candidates: int

    def candidates(self, word: str) -> list[str]: ...


def load_candidate_table(path) -> dict[str, list[str]]:
    """Load a `word<TAB>cand1,cand2,...` table; candidates are deduplicated
    preserving order, lookup keys keep their case."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    table: dict[str, list[str]] = {}
    with open(path, encoding="utf-8", newline="\n") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedLine(
                    path, line_no, f"expected 2 tab-separated fields, got {len(fields)}"
                )
            word = fields[0]
            if not word:
                raise MalformedLine(path, line_no, "empty source word")
            if word in table:
                raise DuplicateSourceWord(f"{path}:{line_no}: duplicate word {word!r}")
            cands = []
            for cand in fields[1].split(","):
                if not cand:
                    raise MalformedLine(path, line_no, "empty candidate")
                if cand not in cands:
                    cands.append(cand)
            if not cands:
                raise MalformedLine(path, line_no, "no candidates")
            table[word] = cands
    return table


class TableGenerator:
    """Candidate generator backed by a fixed word -> candidates table."""

    def __init__(self, table: Mapping[str, list[str]], num_candidates: int = DEFAULT_NUM_CANDIDATES):
        if num_candidates < 1:
            raise ValueError(f"num_candidates must be >= 1, got {num_candidates}")
        self.table = dict(table)
        self.num_candidates = num_candidates

    @classmethod
    def from_file(cls, path, num_candidates: int = DEFAULT_NUM_CANDIDATES) -> "TableGenerator":
        return cls(load_candidate_table(path), num_candidates)

    def candidates(self, word: str) -> list[str]:
        return self.table.get(word, [])[: self.num_candidates]


# Codepoint classes that drive the romanizer state machine. Names come
# from the Unicode character database, shared across the three scripts.
_CLS_CONSONANT = "consonant"
_CLS_VOWEL = "vowel"
_CLS_MATRA = "matra"
_CLS_VIRAMA = "virama"
_CLS_SKIP = "skip"
_CLS_OTHER = "other"

_VOWEL_NAMES = {
    "A", "AA", "I", "II", "U", "UU", "E", "EE", "AI", "O", "OO", "AU",
    "CANDRA E", "CANDRA O", "SHORT E", "SHORT O",
    "VOCALIC R", "VOCALIC RR", "VOCALIC L", "VOCALIC LL",
}

_CLASS_CACHE: dict[str, str] = {}


def _classify(ch: str) -> str:
    cls = _CLASS_CACHE.get(ch)
    if cls is None:
        cls = _classify_uncached(ch)
        _CLASS_CACHE[ch] = cls
    return cls


def _classify_uncached(ch: str) -> str:
    if unicodedata.category(ch) == "Cf":
        return _CLS_SKIP
    name = unicodedata.name(ch, "")
    if "VOWEL SIGN" in name:
        return _CLS_MATRA
    if "SIGN VIRAMA" in name:
        return _CLS_VIRAMA
    if "SIGN NUKTA" in name:
        return _CLS_SKIP
    if " LETTER " in f" {name} ":
        base = name.split(" LETTER ", 1)[1]
        return _CLS_VOWEL if base in _VOWEL_NAMES else _CLS_CONSONANT
    return _CLS_OTHER


def _load_mapping(filename: str) -> dict[str, list[str]]:
    text = (resources.files("btprep") / "data" / filename).read_text(encoding="utf-8")
    mapping: dict[str, list[str]] = {}
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise MalformedLine(filename, line_no, "expected `chars<TAB>latin1|latin2`")
        mapping[fields[0]] = fields[1].split("|")
    return mapping


class RuleRomanizer:
    """Deterministic romanizer for Indic scripts with bounded variants.

    Consonants carry an inherent short vowel that a following vowel sign
    replaces and a virama suppresses. A trailing inherent vowel yields
    both spellings (dropped form first); long vowels yield long/short
    Latin spellings. The variant frontier is capped at num_candidates at
    every step, so a smaller cap always produces a prefix of a larger
    cap's output. Words containing any unmapped codepoint fall back to
    the word itself, lowercased; this covers embedded Latin tokens.
    """

    def __init__(self, language: str, num_candidates: int = DEFAULT_NUM_CANDIDATES):
        if language not in LANGUAGE_TABLES:
            raise UnsupportedLanguage(language)
        if num_candidates < 1:
            raise ValueError(f"num_candidates must be >= 1, got {num_candidates}")
        self.language = language
        self.num_candidates = num_candidates
        self.mapping = _load_mapping(LANGUAGE_TABLES[language])
        self._max_key = max(len(k) for k in self.mapping)
        self._cache: dict[str, list[str]] = {}

    def candidates(self, word: str) -> list[str]:
        hit = self._cache.get(word)
        if hit is None:
            hit = self._romanize(word)
            self._cache[word] = hit
        return hit

    def _romanize(self, word: str) -> list[str]:
        cap = self.num_candidates
        frontier = [""]
        pending: list[str] | None = None
        pending_inherent = False
        i = 0
        while i < len(word):
            key = None
            for width in range(min(self._max_key, len(word) - i), 0, -1):
                if word[i : i + width] in self.mapping:
                    key = word[i : i + width]
                    break
            if key is not None:
                cls = _classify(key[0])
                alts = self.mapping[key]
                if cls == _CLS_MATRA:
                    pending, pending_inherent = alts, False
                else:
                    if pending is not None:
                        frontier = [f + a for f in frontier for a in pending][:cap]
                    frontier = [f + a for f in frontier for a in alts][:cap]
                    if cls == _CLS_CONSONANT:
                        pending, pending_inherent = ["a"], True
                    else:
                        pending, pending_inherent = None, False
                i += len(key)
                continue
            cls = _classify(word[i])
            if cls == _CLS_VIRAMA:
                pending, pending_inherent = None, False
            elif cls != _CLS_SKIP:
                return [word.lower()]
            i += 1
        if pending is not None:
            if pending_inherent:
                frontier = [v for f in frontier for v in (f, f + "a")][:cap]
            else:
                frontier = [f + a for f in frontier for a in pending][:cap]
        out = []
        for cand in frontier:
            if cand and cand not in out:
                out.append(cand)
        if not out:
            return [word.lower()]
        return out[:cap]


def romanize(word: str, language: str, n: int = DEFAULT_NUM_CANDIDATES) -> list[str]:
    """Convenience wrapper: romanization candidates for one word."""
    return RuleRomanizer(language, n).candidates(word)


def classify_pair(pair: SentencePair, gen: CandidateGenerator) -> str:
    """Label a pair BOTH iff any candidate of any source word occurs as a
    whole word in the target, case-insensitively; else TXN."""
    target_words = {w.lower() for w in tokenize_words(pair.target)}
    if target_words:
        for word in tokenize_words(pair.source):
            for cand in gen.candidates(word):
                if cand.lower() in target_words:
                    return BOTH
    return TXN


@dataclass(frozen=True)
class TranslitStats:
    n: int
    txn_count: int
    both_count: int

    @property
    def txn_fraction(self) -> float:
        return self.txn_count / self.n if self.n else 0.0

    @property
    def both_fraction(self) -> float:
        return self.both_count / self.n if self.n else 0.0


def label_corpus(corpus: Iterable[SentencePair], gen: CandidateGenerator) -> dict[int, str]:
    """Classify every pair; returns id -> label in corpus order."""
    return {pair.id: classify_pair(pair, gen) for pair in corpus}


def corpus_translit_stats(corpus: Iterable[SentencePair], gen: CandidateGenerator) -> TranslitStats:
    labels = label_corpus(corpus, gen)
    both = sum(1 for v in labels.values() if v == BOTH)
    return TranslitStats(n=len(labels), txn_count=len(labels) - both, both_count=both)


def read_labels(path) -> dict[int, str]:
    """Load a label sidecar: one `id<TAB>Txn|Both` line per pair."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    labels: dict[int, str] = {}
    with open(path, encoding="utf-8", newline="\n") as fh:
        for line_no, line in enumerate(fh, 1):
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise MalformedLine(
                    path, line_no, f"expected 2 tab-separated fields, got {len(fields)}"
                )
            try:
                pair_id = int(fields[0])
            except ValueError:
                raise MalformedLine(path, line_no, f"bad id {fields[0]!r}") from None
            if pair_id in labels:
                raise DuplicateId(f"{path}:{line_no}: duplicate id {pair_id}")
            if fields[1] not in (TXN, BOTH):
                raise MalformedLine(path, line_no, f"bad label {fields[1]!r}")
            labels[pair_id] = fields[1]
    return labels


def write_labels(labels: Mapping[int, str], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pair_id in sorted(labels):
            fh.write(f"{pair_id}\t{labels[pair_id]}\n")
