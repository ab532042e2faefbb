"""Values exchanged between the grid and the workspace.

A matrix is a read-only 2-D float64 ndarray with only finite entries. Text
travels as a :class:`StringList`. Both have a canonical text form used for
hashing, so digests are stable across platforms.
"""

from __future__ import annotations

import hashlib
import json
from typing import Union

import numpy as np


class NonFiniteError(ValueError):
    """Raised instead of ever storing NaN or Inf."""


class StringList(tuple):
    """Immutable list of strings in row-major order."""

    def __new__(cls, items=()):
        items = tuple(items)
        for item in items:
            if not isinstance(item, str):
                raise TypeError(f"StringList holds str, got {type(item).__name__}")
        return super().__new__(cls, items)

    def __repr__(self) -> str:
        return f"StringList({list(self)!r})"


Value = Union[np.ndarray, StringList]


def as_matrix(data) -> np.ndarray:
    """Copy ``data`` into a frozen finite 2-D float array.

    Scalars become 1x1 and 1-D input becomes a row vector.
    """
    m = np.array(data, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(1, -1)
    elif m.ndim != 2:
        raise ValueError(f"matrices are 2-D, got {m.ndim}-D")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("matrix contains NaN or Inf")
    m.flags.writeable = False
    return m


def is_matrix(value) -> bool:
    return isinstance(value, np.ndarray)


def canonical(value: Value) -> dict:
    """JSON-ready canonical form. Floats use Python's shortest round-trip repr."""
    if isinstance(value, StringList):
        return {"type": "strings", "items": list(value)}
    m = np.asarray(value, dtype=float)
    return {
        "type": "matrix",
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [float(x) for x in m.ravel(order="C")],
    }


def from_canonical(obj: dict) -> Value:
    if obj["type"] == "strings":
        return StringList(obj["items"])
    if obj["type"] == "matrix":
        return as_matrix(np.array(obj["data"], dtype=float).reshape(obj["rows"], obj["cols"]))
    raise ValueError(f"unknown value type {obj['type']!r}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def value_digest(value) -> str:
    """sha256 of the canonical form; ``None`` hashes as JSON null."""
    if value is None:
        payload = "null"
    elif isinstance(value, dict):
        payload = dumps({k: canonical(v) for k, v in value.items()})
    else:
        payload = dumps(canonical(value))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
