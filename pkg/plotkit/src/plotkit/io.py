"""CSV loading with explicit schema checks.

Every reader validates the header before touching the data and fails with
the missing column's name, so malformed upstream files are diagnosed rather
than silently mis-plotted.
"""

from __future__ import annotations

import csv

import numpy as np

__all__ = ["SchemaError", "Table", "read_table"]


class SchemaError(ValueError):
    """An input CSV does not conform to the documented schema."""


class Table:
    """Column-oriented view of one CSV file."""

    def __init__(self, path: str, header: list, columns: dict):
        self.path = path
        self.header = header
        self.columns = columns

    def __len__(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def text(self, name: str) -> list:
        return self.columns[name]

    def floats(self, name: str) -> np.ndarray:
        try:
            return np.array([float(x) for x in self.columns[name]])
        except ValueError as err:
            raise SchemaError(
                f"column {name!r} in {self.path} is not numeric: {err}"
            ) from None


def read_table(path: str, required: tuple) -> Table:
    """Load a CSV file, requiring the named columns and at least one data
    row.  Raises SchemaError naming the first missing column, or for an
    empty file."""
    try:
        with open(path, newline="") as f:
            reader = csv.reader(f)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path} is empty (no header)") from None
            rows = [row for row in reader if row]
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err}") from None
    for name in required:
        if name not in header:
            raise SchemaError(f"missing column {name!r} in {path} "
                              f"(found {header})")
    if not rows:
        raise SchemaError(f"{path} has no data rows")
    index = {name: header.index(name) for name in header}
    columns = {name: [row[index[name]] for row in rows] for name in header}
    return Table(path, header, columns)
