"""Canonical JSON helpers.

Every persisted document and API response is serialized through
`canonical_dumps` so identical content is always byte-identical:
sorted keys, two-space indent, UTF-8, full-precision floats.
Scores are rounded half-even to six decimals only where they are
*displayed* (CLI tables, CSV dumps); stored and transported values
keep full precision so recomputation checks hold at 1e-9.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParseError


def canonical_dumps(obj: object) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def loads_document(text: str, source: str = "<document>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
        ) from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: expected a JSON object, got {type(doc).__name__}")
    return doc


def read_document(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads_document(text, source=str(path))


def write_document(path: str | Path, doc: dict) -> None:
    """Atomic write: replace via a temp file in the same directory."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(canonical_dumps(doc), encoding="utf-8")
    tmp.replace(path)


def round6(value: float) -> float:
    """Half-even rounding to six decimals, for display-facing exports."""
    return round(value, 6)


def fmt6(value: float) -> str:
    return f"{value:.6f}"
