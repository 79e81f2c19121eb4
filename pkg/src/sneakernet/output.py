"""Locale-independent tables, JSON documents and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__


def fmt(value: Any) -> str:
    """Render numbers with ``repr``-style precision and no locale influence."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.6g}"
    return str(value)


def _clean(obj: Any) -> Any:
    if isinstance(obj, float) and not math.isfinite(obj):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _clean(obj.item())
    return obj


def to_json(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def to_text(rows: Sequence[dict], columns: Sequence[str]) -> str:
    cells = [list(columns)] + [[fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(columns))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(line, widths)).rstrip() for line in cells]
    return "\n".join(lines) + "\n"


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    config: dict
    seed: int | None
    version: str = __version__
    outputs: dict[str, str] = field(default_factory=dict)  # file name -> sha256

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "argv": self.argv,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "outputs": self.outputs,
        }


class OutputDir:
    """Writes artifacts and tracks their digests for the manifest."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.written: dict[str, str] = {}

    def write(self, name: str, text: str) -> Path:
        self.path.mkdir(parents=True, exist_ok=True)
        target = self.path / name
        target.write_text(text, encoding="utf-8", newline="")
        self.written[name] = sha256(text)
        return target

    def finish(self, manifest: RunManifest) -> Path:
        manifest.outputs = dict(sorted(self.written.items()))
        return self.write(f"{manifest.command}.manifest.json", to_json(manifest.to_dict()))
