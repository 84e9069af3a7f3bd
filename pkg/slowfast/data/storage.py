"""Output directory owning every file a run writes."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import orjson

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


class OutputStore:
    """Writes reports, tables and metadata below one directory."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        return self.root / name

    def write_text(self, name: str, text: str) -> Path:
        target = self.path(name)
        target.write_text(text, encoding="utf-8", newline="\n")
        self.written.append(target)
        return target

    def write_json(self, name: str, payload: Any) -> Path:
        target = self.path(name)
        target.write_bytes(orjson.dumps(payload, option=JSON_OPTIONS, default=_fallback) + b"\n")
        self.written.append(target)
        return target

    def read_json(self, name: str) -> Any:
        return orjson.loads(self.path(name).read_bytes())

    def __enter__(self) -> OutputStore:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.written.clear()


def _fallback(value: Any) -> Any:
    if isinstance(value, tuple | set | frozenset):
        return list(value)
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")
