"""Tag vocabulary and grammar for tagged training sentences.

A tagged sentence is `tag + single space + text`. A side carries at most
one quality/BT tag and at most one translit tag, in that surface order:

    (<binJ> | <BT>)? (<Txn> | <Both>)? text

Quality and BT tags are mutually exclusive on a pair (quality tags
subsume the single BT marker). strip_leading_tag peels one tag per call,
so at most two calls recover the bare text of any well-formed side.
"""

from __future__ import annotations

import re

from .errors import AlreadyTagged, BinOutOfRange, NotBTOrigin
from .corpus import Origin, SentencePair

BT_TAG = "<BT>"
TXN_TAG = "<Txn>"
BOTH_TAG = "<Both>"

_ORIGIN_RE = re.compile(r"^(<bin[1-9][0-9]*>|<BT>) ")
_TRANSLIT_RE = re.compile(r"^(<Txn>|<Both>) ")
_ANY_TAG_RE = re.compile(r"^(<bin[1-9][0-9]*>|<BT>|<Txn>|<Both>) ")


def quality_tag(b: int) -> str:
    return f"<bin{b}>"


def strip_leading_tag(text: str) -> tuple[str | None, str]:
    """Peel one leading tag: (tag, rest) if present, else (None, text)."""
    m = _ANY_TAG_RE.match(text)
    if m:
        return m.group(1), text[m.end() :]
    return None, text


def strip_all_tags(text: str) -> tuple[list[str], str]:
    """Peel every leading tag; returns (tags in order, bare text)."""
    tags = []
    tag, rest = strip_leading_tag(text)
    while tag is not None:
        tags.append(tag)
        tag, rest = strip_leading_tag(rest)
    return tags, rest


def is_well_formed(text: str) -> bool:
    """True iff leading tags follow the grammar: one origin tag at most,
    then one translit tag at most, then tag-free text."""
    m = _ORIGIN_RE.match(text)
    if m:
        text = text[m.end() :]
    m = _TRANSLIT_RE.match(text)
    if m:
        text = text[m.end() :]
    return not _ANY_TAG_RE.match(text)


def apply_quality_tag(pair: SentencePair, b: int, k: int) -> SentencePair:
    """Prepend `<binJ>` to the source; the pair must not already carry a
    quality or BT tag."""
    if not 1 <= b <= k:
        raise BinOutOfRange(f"bin {b} outside 1..{k}")
    if _ORIGIN_RE.match(pair.source):
        raise AlreadyTagged(f"source already carries a quality/BT tag: {pair.source!r}")
    return SentencePair(pair.id, f"{quality_tag(b)} {pair.source}", pair.target, pair.origin)


def apply_bt_tag(pair: SentencePair) -> SentencePair:
    """Prepend `<BT>` to the source of a back-translated pair."""
    if pair.origin is not Origin.BT:
        raise NotBTOrigin(f"pair {pair.id} has origin {pair.origin.value}")
    if _ORIGIN_RE.match(pair.source):
        raise AlreadyTagged(f"source already carries a quality/BT tag: {pair.source!r}")
    return SentencePair(pair.id, f"{BT_TAG} {pair.source}", pair.target, pair.origin)


def apply_translit_tag(pair: SentencePair, label: str, side: str = "target") -> SentencePair:
    """Prepend `<Txn>` or `<Both>` to the chosen side.

    If the source already starts with a quality/BT tag, the translit tag
    is inserted after it so the surface order stays grammatical.
    """
    if label not in (TXN_TAG, BOTH_TAG):
        raise ValueError(f"not a translit tag: {label!r}")
    if side == "target":
        if _TRANSLIT_RE.match(pair.target):
            raise AlreadyTagged(f"target already carries a translit tag: {pair.target!r}")
        return SentencePair(pair.id, pair.source, f"{label} {pair.target}", pair.origin)
    if side == "source":
        m = _ORIGIN_RE.match(pair.source)
        head, rest = (pair.source[: m.end()], pair.source[m.end() :]) if m else ("", pair.source)
        if _TRANSLIT_RE.match(rest):
            raise AlreadyTagged(f"source already carries a translit tag: {pair.source!r}")
        return SentencePair(pair.id, f"{head}{label} {rest}", pair.target, pair.origin)
    raise ValueError(f"side must be 'source' or 'target', got {side!r}")


def strip_pair(pair: SentencePair) -> SentencePair:
    """Remove all leading tags from both sides."""
    _, source = strip_all_tags(pair.source)
    _, target = strip_all_tags(pair.target)
    return SentencePair(pair.id, source, target, pair.origin)
