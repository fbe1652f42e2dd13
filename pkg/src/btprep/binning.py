"""Score binning: equal-volume, equal-width, and random assignment.

Bins are numbered 1..k from lowest to highest quality. Each method
returns a Binning carrying the per-id assignment plus the k-1 score
cutpoints that separate the bins, so a second corpus (e.g. clean bitext)
can be mapped onto the same scale with apply_boundaries.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DuplicateId,
    EmptyInput,
    MalformedLine,
    MissingFile,
    TooFewPairs,
)

DEFAULT_BINS = 4


@dataclass(frozen=True)
class Binning:
    method: str
    k: int
    assignment: dict[int, int]
    boundaries: tuple[float, ...]

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for b in self.assignment.values():
            counts[b - 1] += 1
        return counts


def _check_k(k: int) -> None:
    if k < 1:
        raise ConfigError(f"bin count must be >= 1, got {k}")


def equal_volume(scores: Mapping[int, float], k: int = DEFAULT_BINS) -> Binning:
    """Rank-based bins of near-equal size.

    Ids are sorted by (score, id) so ties break deterministically; the
    item at rank r (0-based, n items) lands in bin floor(r*k/n) + 1.
    Remainders go to the lowest bins: n=5, k=4 gives sizes 2,1,1,1.
    """
    _check_k(k)
    n = len(scores)
    if n < k:
        raise TooFewPairs(f"equal-volume needs at least {k} scored pairs, got {n}")
    ranked = sorted(scores, key=lambda pair_id: (scores[pair_id], pair_id))
    assignment = {pair_id: (r * k) // n + 1 for r, pair_id in enumerate(ranked)}
    boundaries = []
    for b in range(2, k + 1):
        first = next(pair_id for pair_id in ranked if assignment[pair_id] == b)
        boundaries.append(scores[first])
    return Binning("equal_volume", k, assignment, tuple(boundaries))


def equal_width(scores: Mapping[int, float], k: int = DEFAULT_BINS) -> Binning:
    """Bins of equal score width spanning [min, max].

    bin(s) = min(k, floor((s - lo) / (hi - lo) * k) + 1); if all scores
    are identical the range is degenerate and everything lands in bin 1.
    """
    _check_k(k)
    if not scores:
        raise EmptyInput("no scores to bin")
    values = np.fromiter(scores.values(), dtype=np.float64, count=len(scores))
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return Binning("equal_width", k, {pair_id: 1 for pair_id in scores}, ())
    width = (hi - lo) / k
    assignment = {
        pair_id: min(k, int((s - lo) / (hi - lo) * k) + 1) for pair_id, s in scores.items()
    }
    boundaries = tuple(lo + i * width for i in range(1, k))
    return Binning("equal_width", k, assignment, boundaries)


def random_bins(ids: Sequence[int], k: int, seed: int) -> Binning:
    """Uniform random bin per id, deterministic in (ids, k, seed).

    Ids are processed in ascending order so the draw sequence does not
    depend on input ordering.
    """
    _check_k(k)
    if not ids:
        raise EmptyInput("no ids to bin")
    ordered = sorted(ids)
    rng = np.random.default_rng(seed)
    draws = rng.integers(1, k + 1, size=len(ordered))
    return Binning("random", k, {i: int(b) for i, b in zip(ordered, draws)}, ())


def apply_boundaries(score: float, boundaries: Sequence[float], k: int) -> int:
    """Map a score onto an existing bin scale: 1 + #(cutpoints <= score), clamped.

    Scores outside the original range clamp to bin 1 or bin k, so bitext
    mapped through back-translation cutpoints always gets a valid bin.
    """
    return min(k, 1 + bisect_right(list(boundaries), score))


def read_assignments(path) -> dict[int, int]:
    """Load a bin sidecar: one `id<TAB>bin` line per pair, bins >= 1."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    assignment: dict[int, int] = {}
    with open(path, encoding="utf-8", newline="\n") as fh:
        for line_no, line in enumerate(fh, 1):
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise MalformedLine(
                    path, line_no, f"expected 2 tab-separated fields, got {len(fields)}"
                )
            try:
                pair_id = int(fields[0])
                b = int(fields[1])
            except ValueError:
                raise MalformedLine(path, line_no, "bad id or bin") from None
            if pair_id in assignment:
                raise DuplicateId(f"{path}:{line_no}: duplicate id {pair_id}")
            if b < 1:
                raise MalformedLine(path, line_no, f"bin must be >= 1, got {b}")
            assignment[pair_id] = b
    return assignment


def write_assignments(assignment: Mapping[int, int], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pair_id in sorted(assignment):
            fh.write(f"{pair_id}\t{assignment[pair_id]}\n")
