"""Parallel-corpus ingestion, validation, and text primitives.

The canonical on-disk format is UTF-8 TSV, one pair per line, exactly one
TAB between source and target. Ids are 0-based record indices within a
file. Reading keeps field bytes verbatim (only the record separator is
consumed), so write -> read is an exact round trip for any valid pair.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateId,
    IoFailure,
    MalformedLine,
    MissingFile,
)

log = logging.getLogger(__name__)


class Origin(Enum):
    BITEXT = "bitext"
    BT = "bt"


@dataclass(frozen=True)
class SentencePair:
    """One parallel example: 0-based id, source text, target text, origin."""

    id: int
    source: str
    target: str
    origin: Origin


def field_problem(text: str) -> str | None:
    """Return a reason string if a source/target field is invalid, else None.

    Fields must be non-empty after trimming and must not contain TAB,
    newline, or any other control character (reserved as delimiters).
    """
    if not text.strip():
        return "empty field"
    for ch in text:
        if ch == "\t" or unicodedata.category(ch) == "Cc":
            return "embedded control char"
    return None


def pair_problem(pair: SentencePair) -> str | None:
    for side, text in (("source", pair.source), ("target", pair.target)):
        reason = field_problem(text)
        if reason is not None:
            return f"{reason} in {side}"
    return None


class Corpus:
    """Streaming view of one TSV corpus file.

    Iterating re-opens the file, validates each record, and yields
    SentencePair in on-disk order with id = line index. Malformed lines
    raise MalformedLine unless skip_malformed is set, in which case they
    are counted (`skipped`) and logged, never silently dropped. A single
    iterator should have one consumer; distinct iterations are independent.
    """

    def __init__(self, path, origin: Origin, skip_malformed: bool = False):
        self.path = Path(path)
        self.origin = origin
        self.skip_malformed = skip_malformed
        self.skipped = 0
        if not self.path.exists():
            raise MissingFile(self.path)

    def __iter__(self) -> Iterator[SentencePair]:
        with open(self.path, encoding="utf-8", newline="\n") as fh:
            for idx, line in enumerate(fh):
                line = line[:-1] if line.endswith("\n") else line
                try:
                    yield self._parse_line(idx, line)
                except MalformedLine as err:
                    if not self.skip_malformed:
                        raise
                    self.skipped += 1
                    log.warning("skipping malformed line: %s", err)

    def _parse_line(self, idx: int, line: str) -> SentencePair:
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedLine(
                self.path, idx + 1, f"expected 2 tab-separated fields, got {len(fields)}"
            )
        source, target = fields
        for side, text in (("source", source), ("target", target)):
            reason = field_problem(text)
            if reason is not None:
                raise MalformedLine(self.path, idx + 1, f"{reason} in {side}")
        return SentencePair(id=idx, source=source, target=target, origin=self.origin)

    def pairs(self) -> list[SentencePair]:
        """Materialize the whole corpus as a list."""
        return list(self)

    def count(self) -> int:
        return sum(1 for _ in self)


def read_pairs(path, origin: Origin, skip_malformed: bool = False) -> Corpus:
    """Open a TSV parallel corpus for streaming iteration."""
    return Corpus(path, origin, skip_malformed=skip_malformed)


def write_pairs(pairs: Iterable[SentencePair], path) -> int:
    """Write pairs as TSV, validating each; returns the record count.

    Output is byte-deterministic: `source TAB target LF` per record in
    iteration order.
    """
    path = Path(path)
    written = 0
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for pair in pairs:
                reason = pair_problem(pair)
                if reason is not None:
                    raise MalformedLine(path, written + 1, reason)
                fh.write(f"{pair.source}\t{pair.target}\n")
                written += 1
    except OSError as err:
        raise IoFailure(f"cannot write {path}: {err}") from err
    return written


_PUNCT_CACHE: dict[str, bool] = {}


def _is_punct(ch: str) -> bool:
    hit = _PUNCT_CACHE.get(ch)
    if hit is None:
        hit = unicodedata.category(ch).startswith("P")
        _PUNCT_CACHE[ch] = hit
    return hit


def tokenize_words(text: str) -> list[str]:
    """Split on Unicode whitespace and strip outer punctuation per token.

    Internal punctuation is kept ("a--b" stays one token); tokens that
    are entirely punctuation vanish. Order is preserved.
    """
    tokens = []
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        if end > start:
            tokens.append(raw[start:end])
    return tokens


_WS_RUN = re.compile(r"\s+")


def char_trigrams(text: str) -> set[str]:
    """Set of contiguous 3-codepoint substrings after normalization.

    Normalization lowercases and collapses each whitespace run to a single
    space. A non-empty normalized text shorter than 3 codepoints yields
    the singleton set of itself; empty text yields the empty set.
    """
    norm = _WS_RUN.sub(" ", text.lower())
    if not norm:
        return set()
    if len(norm) < 3:
        return {norm}
    return {norm[i : i + 3] for i in range(len(norm) - 2)}


def read_embeddings(path) -> dict[int, np.ndarray]:
    """Load an embedding sidecar: one `id<TAB>v1,v2,...,vd` line per vector.

    All vectors must share one dimension; ids must be unique; every value
    must be finite.
    """
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    vectors: dict[int, np.ndarray] = {}
    dim: int | None = None
    with open(path, encoding="utf-8", newline="\n") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedLine(
                    path, line_no, f"expected 2 tab-separated fields, got {len(fields)}"
                )
            try:
                vec_id = int(fields[0])
            except ValueError:
                raise MalformedLine(path, line_no, f"bad id {fields[0]!r}") from None
            if vec_id in vectors:
                raise DuplicateId(f"{path}:{line_no}: duplicate id {vec_id}")
            try:
                values = np.array([float(v) for v in fields[1].split(",")], dtype=np.float64)
            except ValueError:
                raise MalformedLine(path, line_no, "unparseable vector component") from None
            if values.size == 0:
                raise MalformedLine(path, line_no, "empty vector")
            if not np.all(np.isfinite(values)):
                raise MalformedLine(path, line_no, "non-finite vector component")
            if dim is None:
                dim = values.size
            elif values.size != dim:
                raise DimensionMismatch(
                    f"{path}:{line_no}: vector of dim {values.size}, expected {dim}"
                )
            vectors[vec_id] = values
    return vectors
