"""Columnar numeric datasets with CSV load/save.

A Dataset is a mapping of column names to equal-length float64 vectors.
CSV loading drops any row with a missing value in the requested columns
and reports the count; a non-numeric token that is not a missing-value
marker is an error naming the column and line.
"""

from __future__ import annotations

import csv
import logging

import numpy as np

from .exceptions import DataValidationError

logger = logging.getLogger(__name__)

_MISSING = {"", "na", "nan", "null"}


class Dataset:
    """Named numeric columns of equal length."""

    def __init__(self, columns: dict[str, np.ndarray]):
        if not columns:
            raise DataValidationError("dataset needs at least one column")
        cols: dict[str, np.ndarray] = {}
        n = None
        for name, values in columns.items():
            arr = np.asarray(values, dtype=np.float64).reshape(-1)
            if n is None:
                n = arr.shape[0]
            elif arr.shape[0] != n:
                raise DataValidationError(
                    f"column {name!r} has length {arr.shape[0]}, expected {n}"
                )
            cols[name] = arr
        self.columns = cols
        self.n = int(n)
        self.n_dropped = 0  # rows removed at load time

    def __len__(self) -> int:
        return self.n

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DataValidationError(f"column {name!r} not found in dataset")
        return self.columns[name]

    def names(self) -> list[str]:
        return list(self.columns)

    def require(self, names) -> None:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise DataValidationError(
                f"dataset is missing required column(s): {', '.join(missing)}"
            )

    def take(self, mask: np.ndarray) -> "Dataset":
        return Dataset({name: col[mask] for name, col in self.columns.items()})

    @classmethod
    def from_csv(cls, path, columns=None) -> "Dataset":
        """Load a header-ed CSV, keeping `columns` (default: all).

        Rows with missing values in the kept columns are dropped and the
        count logged and stored in ``n_dropped``.
        """
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataValidationError(f"{path}: empty file, expected a CSV header")
            header = [h.strip() for h in header]
            if columns is None:
                keep = header
            else:
                keep = list(columns)
                missing = [c for c in keep if c not in header]
                if missing:
                    raise DataValidationError(
                        f"{path}: missing required column(s): {', '.join(missing)}"
                    )
            positions = [header.index(c) for c in keep]

            rows: list[list[float]] = []
            n_dropped = 0
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != len(header):
                    raise DataValidationError(
                        f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                    )
                parsed = []
                ok = True
                for col, pos in zip(keep, positions):
                    cell = row[pos].strip()
                    if cell.lower() in _MISSING:
                        ok = False
                        break
                    try:
                        parsed.append(float(cell))
                    except ValueError:
                        raise DataValidationError(
                            f"{path}:{lineno}: non-numeric value {cell!r} in column {col!r}"
                        )
                if ok:
                    rows.append(parsed)
                else:
                    n_dropped += 1

        if n_dropped:
            logger.warning("%s: dropped %d row(s) with missing values", path, n_dropped)
        data = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, len(keep)))
        ds = cls({name: data[:, j] for j, name in enumerate(keep)})
        ds.n_dropped = n_dropped
        return ds

    def to_csv(self, path) -> None:
        """Write columns as CSV; floats use repr so values round-trip exactly."""
        names = self.names()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(names)
            cols = [self.columns[n] for n in names]
            for i in range(self.n):
                writer.writerow([repr(float(col[i])) for col in cols])


def write_csv(path, header: list[str], columns: list) -> None:
    """Write columns under the given header; floats use repr, strings pass through."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        n = len(columns[0]) if columns else 0
        for i in range(n):
            writer.writerow(
                [col[i] if isinstance(col[i], str) else repr(float(col[i])) for col in columns]
            )
