"""Canonical JSON encoding and content fingerprints.

Every durable artifact (session checkpoints, JSON reports, API payloads
that must be byte-reproducible) goes through `dumps` here: keys sorted
lexicographically, no insignificant whitespace, UTF-8, floats rendered
with Python's shortest round-trip repr (at most 17 significant digits).
NaN/Infinity are rejected; undefined metric values are carried as null.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any


def _normalize(obj: Any) -> Any:
    """Coerce numpy scalars/arrays and tuples into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        # numpy scalar
        return _normalize(obj.item())
    if hasattr(obj, "tolist") and not isinstance(obj, (str, bytes)):
        return _normalize(obj.tolist())
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            raise ValueError("non-finite float is not representable in canonical JSON")
        return obj
    return obj


def dumps(obj: Any) -> str:
    """Serialize to the canonical JSON string."""
    return json.dumps(
        _normalize(obj),
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    )


def dump_bytes(obj: Any) -> bytes:
    return dumps(obj).encode("utf-8")


def fingerprint(data: bytes | str) -> str:
    """Hex SHA-256 of raw bytes (datasets, uploaded files)."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def fingerprint_json(obj: Any) -> str:
    """Hex SHA-256 of the canonical JSON form of a structure."""
    return fingerprint(dump_bytes(obj))
