"""Deterministic tabular export for sweep and report data.

A SweepTable is a rectangular block of finite floats with named columns and
a string-to-string metadata block.  Serialization is reproducible down to
the byte: floats are written with ``repr`` (shortest round-trip form), JSON
keys are sorted, and nothing time- or locale-dependent is emitted.  Parsing
either format recovers an equal table exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SweepTable"]


def _check_name(name: str) -> str:
    if not isinstance(name, str) or not name:
        raise ValueError(f"column names must be non-empty strings, got {name!r}")
    if any(ch in name for ch in ",\n\r"):
        raise ValueError(f"column name may not contain commas or newlines: {name!r}")
    return name


def _check_meta(key: str, value: str) -> None:
    if not isinstance(key, str) or not key:
        raise ValueError(f"metadata keys must be non-empty strings, got {key!r}")
    if not isinstance(value, str):
        raise ValueError(f"metadata values must be strings, got {key}={value!r}")
    if any(ch in key for ch in ":\n\r"):
        raise ValueError(f"metadata key may not contain ':' or newlines: {key!r}")
    if "\n" in value or "\r" in value:
        raise ValueError(f"metadata value may not contain newlines: {key}={value!r}")


@dataclass(frozen=True)
class SweepTable:
    """Immutable named-column table with exact text round-trips."""

    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        columns = tuple(_check_name(c) for c in self.columns)
        if len(set(columns)) != len(columns):
            raise ValueError(f"duplicate column names in {columns!r}")
        if not columns:
            raise ValueError("a table needs at least one column")
        rows = []
        for i, row in enumerate(self.rows):
            vals = tuple(float(v) for v in row)
            if len(vals) != len(columns):
                raise ValueError(
                    f"row {i} has {len(vals)} entries for {len(columns)} columns"
                )
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"row {i} contains a non-finite value: {vals!r}")
            rows.append(vals)
        for key, value in self.metadata.items():
            _check_meta(key, value)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "metadata", dict(self.metadata))

    @classmethod
    def from_arrays(
        cls,
        columns: tuple[str, ...] | list[str],
        arrays,
        metadata: dict[str, str] | None = None,
    ) -> "SweepTable":
        """Build from per-column 1-D arrays of equal length."""
        cols = [np.asarray(a, dtype=float) for a in arrays]
        if len(cols) != len(columns):
            raise ValueError(f"{len(columns)} names for {len(cols)} arrays")
        if cols and any(c.shape != cols[0].shape or c.ndim != 1 for c in cols):
            raise ValueError("column arrays must be 1-D and equally long")
        rows = tuple(zip(*(c.tolist() for c in cols))) if cols else ()
        return cls(columns=tuple(columns), rows=rows, metadata=dict(metadata or {}))

    def column(self, name: str) -> np.ndarray:
        try:
            i = self.columns.index(name)
        except ValueError:
            raise KeyError(f"no column {name!r}; have {self.columns!r}") from None
        return np.array([row[i] for row in self.rows])

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    # -- CSV ----------------------------------------------------------------
    # '#'-prefixed metadata lines, then a header row, then repr() floats.

    def to_csv(self) -> str:
        lines = [f"# {k}: {v}" for k, v in sorted(self.metadata.items())]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(repr(v) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        metadata: dict[str, str] = {}
        header: tuple[str, ...] | None = None
        rows: list[tuple[float, ...]] = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, sep, value = body.partition(": ")
                if not sep:
                    raise ValueError(f"malformed metadata line: {raw!r}")
                metadata[key] = value
            elif header is None:
                header = tuple(line.split(","))
            else:
                rows.append(tuple(float(tok) for tok in line.split(",")))
        if header is None:
            raise ValueError("CSV text has no header row")
        return cls(columns=header, rows=tuple(rows), metadata=metadata)

    # -- JSON ---------------------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "columns": list(self.columns),
            "metadata": self.metadata,
            "rows": [list(row) for row in self.rows],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SweepTable":
        doc = json.loads(text)
        return cls(
            columns=tuple(doc["columns"]),
            rows=tuple(tuple(row) for row in doc["rows"]),
            metadata=dict(doc["metadata"]),
        )

    def dumps(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown table format {fmt!r} (expected 'csv' or 'json')")
