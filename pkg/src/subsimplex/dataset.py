"""Tabular compositional datasets and their CSV round trip.

A dataset is an n x (d+1) matrix of compositions plus part labels and
optional per-row metadata columns (cluster labels, depths, ...).  Rows
whose raw sum deviates from 1 by at most ``ROW_SUM_TOL`` are renormalized
on construction; larger deviations are rejected with the offending row
named.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyDataset,
    NegativeEntry,
    ParseError,
    RowSumOutOfTolerance,
)
from .geometry import Composition

#: Admissible deviation of a raw row sum from 1 before rejection.
ROW_SUM_TOL = 1e-6

#: Environment variable naming the default number of significant digits
#: used when writing floats.
PRECISION_ENV_VAR = "SUBSIMPLEX_PRECISION"

#: Significant digits that round-trip IEEE doubles exactly.
DEFAULT_PRECISION = 17


def default_precision() -> int:
    """Output precision from the environment, else 17 significant digits."""
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        value = int(raw)
    except ValueError as exc:
        raise ParseError(f"{PRECISION_ENV_VAR} must be an integer, got {raw!r}") from exc
    if not 1 <= value <= 17:
        raise ParseError(f"{PRECISION_ENV_VAR} must be in 1..17, got {value}")
    return value


def format_float(x: float, precision: int = DEFAULT_PRECISION) -> str:
    return format(float(x), f".{precision}g")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Compositional data rows with part labels and row metadata."""

    values: np.ndarray
    column_labels: tuple[str, ...]
    row_metadata: dict[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.size == 0:
            raise EmptyDataset("dataset has no rows")
        if values.ndim != 2:
            raise DimensionMismatch("dataset values must form a 2-d matrix")
        labels = tuple(str(c) for c in self.column_labels)
        if len(labels) != values.shape[1]:
            raise DimensionMismatch(
                f"{len(labels)} column labels for {values.shape[1]} columns"
            )
        neg = np.argwhere(values < 0.0)
        if len(neg):
            r, c = neg[0]
            raise NegativeEntry(
                f"negative entry {values[r, c]!r} at row {r}, column {labels[c]!r}"
            )
        sums = values.sum(axis=1)
        bad = np.where(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        if len(bad):
            raise RowSumOutOfTolerance(
                f"row {bad[0]} sums to {float(sums[bad[0]])!r}, "
                f"outside 1 +/- {ROW_SUM_TOL}"
            )
        values = values / sums[:, np.newaxis]
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_labels", labels)
        metadata = {}
        for name, column in dict(self.row_metadata).items():
            column = tuple(column)
            if len(column) != len(values):
                raise DimensionMismatch(
                    f"metadata column {name!r} has {len(column)} entries "
                    f"for {len(values)} rows"
                )
            metadata[name] = column
        object.__setattr__(self, "row_metadata", metadata)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_parts(self) -> int:
        return self.values.shape[1]

    @property
    def dimension(self) -> int:
        """Simplex dimension d (one less than the number of parts)."""
        return self.n_parts - 1

    def composition(self, i: int) -> Composition:
        return Composition(self.values[i])


def as_matrix(data) -> np.ndarray:
    """Dataset or array-like -> validated composition matrix."""
    if isinstance(data, Dataset):
        return data.values
    values = np.asarray(data, dtype=float)
    labels = tuple(f"x{k + 1}" for k in range(np.atleast_2d(values).shape[1]))
    return Dataset(values, labels).values


def ingest_csv(path, meta: tuple[str, ...] = ()) -> Dataset:
    """Read a delimited file of compositions.

    The first row is the header.  Columns named in ``meta`` are kept as
    row metadata; every other column must parse as a float.  Rows are
    renormalized to unit sum when the raw sum is within ``ROW_SUM_TOL``
    of 1 and rejected otherwise.
    """
    meta = tuple(meta)
    try:
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in rows if row]
    if not rows:
        raise ParseError(f"{path} is empty")
    header = [name.strip() for name in rows[0]]
    missing = [name for name in meta if name not in header]
    if missing:
        raise ParseError(f"metadata column {missing[0]!r} not found in {path}")
    part_idx = [k for k, name in enumerate(header) if name not in meta]
    if not part_idx:
        raise ParseError(f"{path} has no numeric part columns")
    values = np.empty((len(rows) - 1, len(part_idx)))
    metadata: dict[str, list] = {name: [] for name in meta}
    for r, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise ParseError(
                f"row {r} of {path} has {len(row)} cells, header has {len(header)}"
            )
        for out_c, c in enumerate(part_idx):
            cell = row[c].strip()
            try:
                values[r, out_c] = float(cell)
            except ValueError as exc:
                raise ParseError(
                    f"cannot parse cell {cell!r} at row {r}, column {header[c]!r}"
                ) from exc
        for name in meta:
            metadata[name].append(row[header.index(name)].strip())
    labels = tuple(header[c] for c in part_idx)
    return Dataset(values, labels, {k: tuple(v) for k, v in metadata.items()})


def atomic_write_text(path, text: str) -> None:
    """Write text through a temp file in the same directory, then rename."""
    directory = os.path.dirname(os.fspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix_csv(path, matrix: np.ndarray, header: list[str],
                     precision: int = DEFAULT_PRECISION,
                     text_columns: dict[str, list] | None = None) -> None:
    """Write a numeric matrix as CSV, optionally with leading text columns."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    text_columns = text_columns or {}
    lines = [",".join(list(text_columns) + list(header))]
    for r in range(matrix.shape[0]):
        cells = [str(col[r]) for col in text_columns.values()]
        cells += [format_float(v, precision) for v in matrix[r]]
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_dataset(dataset: Dataset, path, precision: int = DEFAULT_PRECISION) -> None:
    """Write a dataset with its metadata columns leading the part columns."""
    text_columns = {name: list(col) for name, col in dataset.row_metadata.items()}
    write_matrix_csv(path, dataset.values, list(dataset.column_labels),
                     precision, text_columns)
