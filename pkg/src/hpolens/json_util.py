"""Canonical JSON serialization and stable content hashing.

Every byte-compared artifact (cache payloads, run ids, CLI exports) goes
through :func:`canonical_dumps` so equality of content implies equality of
bytes.
"""
from __future__ import annotations

import hashlib
import json
import math
from typing import Any

import numpy as np


def _plain(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and replace non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        # collapse integral floats produced by numpy math, keep 0.5 etc.
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, compact separators, UTF-8 friendly."""
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def stable_hash(obj: Any, length: int = 16) -> str:
    """Hex digest of the canonical JSON form, truncated to `length` chars."""
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()[:length]
