"""Synonym tables for the categorical scene fields.

The tables live in ``data/synonyms.json`` so the accepted spellings can be
extended without touching code.  Lookups are case-insensitive and ignore
surrounding whitespace and a trailing period ("Int." == "int").
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

_KINDS = ("scene_type", "scene_time")


@lru_cache(maxsize=1)
def _tables() -> dict[str, dict[str, str]]:
    raw = json.loads(
        resources.files("scripteval").joinpath("data/synonyms.json").read_text("utf-8")
    )
    tables: dict[str, dict[str, str]] = {}
    for kind in _KINDS:
        lookup: dict[str, str] = {}
        for group in raw.get(kind, []):
            head = group[0]
            for spelling in group:
                lookup[spelling.casefold()] = head
        tables[kind] = lookup
    return tables


def _fold(value: str) -> str:
    value = value.strip().casefold()
    if value.endswith("."):
        value = value[:-1]
    return value


def canonical(kind: str, value: str) -> str:
    """Group head for a known spelling, else the folded value itself."""
    folded = _fold(value)
    return _tables()[kind].get(folded, folded)


def categorical_match(kind: str, a: str, b: str) -> float:
    """1.0 when both values fall in the same synonym group (or are equal up
    to folding), else 0.0."""
    return 1.0 if canonical(kind, a) == canonical(kind, b) else 0.0
