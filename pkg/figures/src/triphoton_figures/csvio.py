"""Reader for the versioned sweep CSV format.

Layout: first line is the schema marker ``# triphoton-csv v1``, second line
the comma-separated column names, then one data row per line.  Values are
kept as the original strings; numeric access parses on demand, so a
dump-values pass can show exactly what was plotted.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_LINE = "# triphoton-csv v1"


class SchemaError(ValueError):
    """File is not a readable schema-v1 sweep table."""


@dataclass
class Table:
    path: str
    columns: list
    rows: list  # list of list[str], one inner list per data row

    def __post_init__(self):
        seen = set()
        for c in self.columns:
            if c in seen:
                raise SchemaError(f"{self.path}: duplicate column {c!r}")
            seen.add(c)

    @property
    def stem(self):
        return Path(self.path).stem

    def require(self, *names):
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise SchemaError(f"{self.path}: missing columns {missing}")

    def raw(self, name):
        """Column as the original strings."""
        if name not in self.columns:
            raise SchemaError(f"{self.path}: missing column {name!r}")
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def column(self, name):
        """Column parsed to floats."""
        try:
            return np.array([float(v) for v in self.raw(name)])
        except ValueError as exc:
            raise SchemaError(f"{self.path}: non-numeric {name}: {exc}") \
                from None

    def first(self, name):
        return self.raw(name)[0]


def read_table(path) -> Table:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    lines = text.splitlines()
    if not lines or lines[0].strip() != SCHEMA_LINE:
        raise SchemaError(f"{path}: missing schema line {SCHEMA_LINE!r}")
    if len(lines) < 2:
        raise SchemaError(f"{path}: no column header")
    columns = lines[1].split(",")
    rows = []
    for ln, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(columns):
            raise SchemaError(f"{path}:{ln}: expected {len(columns)} cells, "
                              f"got {len(cells)}")
        rows.append(cells)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return Table(path=str(path), columns=columns, rows=rows)
