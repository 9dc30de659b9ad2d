"""Small shared helpers: canonical JSON, tokenization, stable hashing."""

from __future__ import annotations

import json
import math
import re
from typing import Any

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")

# FNV-1a, 64-bit. Fixed constants so embeddings are reproducible across
# runs, platforms, and implementations.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_FNV_MASK = 0xFFFFFFFFFFFFFFFF


def canonical_json(obj: Any) -> str:
    """Serialize with sorted keys and compact separators.

    Used for cache keys and for any output that must be byte-reproducible
    (CLI reports and HTTP bodies must match exactly).
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens of *text*, in order."""
    return [t.lower() for t in _TOKEN_RE.findall(text)]


def fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _FNV_MASK
    return h


def value_to_label(value: object) -> str:
    """String form of a cell value for headers and group keys.

    Integral floats print without the trailing '.0' so numeric group labels
    read like the original data ("48", not "48.0").
    """
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isfinite(value) and value == int(value):
            return str(int(value))
        return repr(value)
    return str(value)
