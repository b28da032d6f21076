"""CSV and manifest serialization.

Every run artifact is a plain CSV with a fixed header; floats carry 17
significant digits so a written value reparses to the identical double.
The run manifest is a flat key = value file with # comment lines for
metadata that must not participate in reload (tool version, wall time).
"""

from __future__ import annotations

import csv
import enum
from pathlib import Path
from typing import Iterable, Sequence

__all__ = ["format_value", "write_csv", "read_csv", "write_manifest", "read_manifest"]


def format_value(v) -> str:
    """One CSV cell: 17-significant-digit floats, true/false, empty for None."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Header and raw string cells; callers own the type conversions."""
    path = Path(path)
    with path.open("r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        rows = [row for row in reader if row]
    return header, rows


def write_manifest(path, entries: dict[str, object], meta: dict[str, object] | None = None) -> None:
    """Flat key = value manifest; meta goes into # comment lines only."""
    path = Path(path)
    lines = []
    for key, val in (meta or {}).items():
        lines.append(f"# {key}: {format_value(val)}")
    for key in sorted(entries):
        lines.append(f"{key} = {format_value(entries[key])}")
    path.write_text("\n".join(lines) + "\n")


def read_manifest(path) -> dict[str, str]:
    """Parse a manifest back to raw string values, skipping comments."""
    path = Path(path)
    out: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, val = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ValueError(f"{path}:{lineno}: empty key")
        if key in out:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = val.strip()
    return out
