"""CSV report writing and comparison.

Every CSV starts with a ``# schema=1`` comment, one ``# generated=...``
timestamp comment (the only non-deterministic line, excluded from
byte-comparison), the header row, data rows, and optional deterministic
``#`` footer comments carrying summary values.  Floats are rendered with
%.12g so identical runs produce identical bytes.
"""

from __future__ import annotations

import datetime
from pathlib import Path

SCHEMA_COMMENT = "# schema=1"
TIMESTAMP_PREFIX = "# generated="


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def write_csv(path: str | Path, header, rows, footer_comments=()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    lines = [SCHEMA_COMMENT, TIMESTAMP_PREFIX + stamp, ",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    for comment in footer_comments:
        lines.append(f"# {comment}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Header and data rows of a report CSV, comments skipped."""
    header: list[str] = []
    rows: list[list[str]] = []
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        if not header:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return header, rows


def comparable_bytes(path: str | Path) -> bytes:
    """File content with the timestamp comment removed, for determinism checks."""
    lines = [
        line
        for line in Path(path).read_text().splitlines()
        if not line.startswith(TIMESTAMP_PREFIX)
    ]
    return ("\n".join(lines) + "\n").encode()


def csv_equal(a: str | Path, b: str | Path) -> bool:
    return comparable_bytes(a) == comparable_bytes(b)


def write_run_meta(out_dir: str | Path, config) -> Path:
    """Record the fully resolved configuration of a run."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    lines = [SCHEMA_COMMENT, TIMESTAMP_PREFIX + stamp]
    lines += [f"{k} = {v}" for k, v in config.resolved_items()]
    path = out_dir / "run.meta"
    path.write_text("\n".join(lines) + "\n")
    return path
