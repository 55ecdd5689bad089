"""Claim-amount samples and delimited-file ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .params import DomainError

__all__ = ["ClaimSample", "ParseError", "ingest"]


class ParseError(ValueError):
    """A data file could not be parsed; the message carries the line number."""


@dataclass(frozen=True)
class ClaimSample:
    """An ordered collection of strictly positive loss amounts.

    ``source`` records the originating file path or a synthetic tag;
    ``deductible_subtracted`` is carried as metadata only.  ``rejected_rows``
    lists the 1-based line numbers of non-positive input rows that were
    filtered during ingestion.
    """

    values: np.ndarray
    source: str = "synthetic"
    deductible_subtracted: bool = False
    rejected_rows: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1:
            raise DomainError("claim values must form a one-dimensional sequence")
        if values.size and (np.any(~np.isfinite(values)) or np.any(values <= 0.0)):
            raise DomainError("claim values must be strictly positive and finite")

    def __len__(self) -> int:
        return int(self.values.size)

    def summary(self) -> dict[str, float]:
        v = self.values
        return {
            "n": float(v.size),
            "mean": float(v.mean()) if v.size else math.nan,
            "sd": float(v.std(ddof=1)) if v.size > 1 else math.nan,
            "max": float(v.max()) if v.size else math.nan,
        }


def ingest(
    path: str | Path,
    column: str | int = 0,
    delimiter: str | None = None,
    deductible_subtracted: bool = False,
) -> ClaimSample:
    """Read one claim per row from a delimited text file.

    ``column`` selects by header name or zero-based index.  The first row is
    treated as a header when the selected cell is not numeric.  Rows with
    non-positive amounts are filtered out and their line numbers recorded on
    the returned sample; rows that fail to parse raise ``ParseError`` with
    their line number.
    """
    path = Path(path)
    delim = delimiter if delimiter is not None else _sniff_delimiter(path)
    values: list[float] = []
    rejected: list[int] = []
    with path.open(newline="") as handle:
        reader = csv.reader(handle, delimiter=delim)
        col_index: int | None = column if isinstance(column, int) else None
        for line_no, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if col_index is None:
                try:
                    col_index = [c.strip() for c in row].index(str(column))
                    continue
                except ValueError as exc:
                    raise ParseError(f"line 1: no column named {column!r} in header {row}") from exc
            if col_index >= len(row):
                raise ParseError(f"line {line_no}: expected at least {col_index + 1} fields")
            cell = row[col_index].strip()
            try:
                value = float(cell)
            except ValueError:
                if line_no == 1 and isinstance(column, int):
                    continue  # header row
                raise ParseError(f"line {line_no}: cannot parse {cell!r} as a loss amount") from None
            if not math.isfinite(value) or value <= 0.0:
                rejected.append(line_no)
                continue
            values.append(value)
    if not values:
        raise ParseError(f"{path}: no positive loss amounts remain after filtering")
    return ClaimSample(
        np.asarray(values),
        source=str(path),
        deductible_subtracted=deductible_subtracted,
        rejected_rows=tuple(rejected),
    )


def _sniff_delimiter(path: Path) -> str:
    head = path.open().readline()
    for candidate in (",", ";", "\t", "|"):
        if candidate in head:
            return candidate
    return ","
