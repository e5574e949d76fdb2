"""Plain CSV storage for dense matrices and vectors.

One matrix row per line, no header, ``.`` as the decimal separator. Values
are written with ``repr`` so a write/read cycle is lossless.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


class MatrixFormatError(ValueError):
    """Malformed matrix file: ragged rows, bad numbers or no data."""


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            try:
                values = [float(cell) for cell in record]
            except ValueError as exc:
                raise MatrixFormatError(f"{path}:{lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in values):
                raise MatrixFormatError(f"{path}:{lineno}: non-finite entry")
            if rows and len(values) != len(rows[0]):
                raise MatrixFormatError(
                    f"{path}:{lineno}: ragged row ({len(values)} columns, expected {len(rows[0])})")
            rows.append(values)
    if not rows:
        raise MatrixFormatError(f"{path}: no data")
    return np.array(rows, dtype=float)


def read_vector_csv(path) -> np.ndarray:
    """Read a vector stored either as one row or as one column."""
    a = read_matrix_csv(path)
    if a.shape[0] != 1 and a.shape[1] != 1:
        raise MatrixFormatError(f"{path}: expected a single row or column, got {a.shape}")
    return a.ravel()


def write_matrix_csv(path, a) -> None:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in a:
            writer.writerow(repr(float(v)) for v in row)


def write_vector_csv(path, v) -> None:
    """Write a vector as a single column."""
    write_matrix_csv(path, np.asarray(v, dtype=float).reshape(-1, 1))
