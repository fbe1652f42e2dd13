"""Flat `key = value` text files: manifests, pipeline state, run configs.

One entry per line, UTF-8, LF, insertion order preserved. Blank lines and
`#` comments are ignored on read. Values are stored verbatim; typed
access is the caller's concern.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

from .errors import MalformedLine, MissingFile


def read_kv(path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise MissingFile(path)
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="\n") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise MalformedLine(path, line_no, "expected `key = value`")
            entries[key.strip()] = value.strip()
    return entries


def write_kv(entries: Mapping[str, str], path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in entries.items():
            fh.write(f"{key} = {value}\n")
