"""Platform catalog files: CSV with columns name, pitch_m, gate_time_s, error_rate."""

from __future__ import annotations

import csv
import io
from importlib import resources
from pathlib import Path

from .codemodel import PlatformSpec
from .errors import DomainError

COLUMNS = ("name", "pitch_m", "gate_time_s", "error_rate")


class CatalogError(DomainError):
    pass


def parse_catalog(text: str, source: str = "<catalog>") -> list[PlatformSpec]:
    reader = csv.reader(io.StringIO(text))
    rows = [(n, r) for n, r in enumerate(reader, start=1) if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise CatalogError(f"{source}: catalog is empty")
    lineno, header = rows[0]
    header = [h.strip() for h in header]
    if tuple(header) != COLUMNS:
        raise CatalogError(f"{source}:{lineno}: expected header {','.join(COLUMNS)}, got {','.join(header)}")
    out = []
    for lineno, row in rows[1:]:
        if len(row) != len(COLUMNS):
            raise CatalogError(f"{source}:{lineno}: expected {len(COLUMNS)} fields, got {len(row)}")
        name = row[0].strip()
        try:
            values = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise CatalogError(f"{source}:{lineno}: {exc}") from None
        try:
            out.append(PlatformSpec(name, *values))
        except DomainError as exc:
            raise CatalogError(f"{source}:{lineno}: {exc}") from None
    if not out:
        raise CatalogError(f"{source}: catalog has no platforms")
    return out


def load_catalog(path: str | Path | None = None) -> list[PlatformSpec]:
    """Read a catalog file, or the bundled six-platform default when ``path`` is None."""
    if path is None:
        text = resources.files("sneakernet").joinpath("data/platforms.csv").read_text()
        return parse_catalog(text, "platforms.csv")
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CatalogError(f"{path}: {exc.strerror}") from None
    return parse_catalog(text, str(path))


def default_catalog() -> list[PlatformSpec]:
    return load_catalog(None)
