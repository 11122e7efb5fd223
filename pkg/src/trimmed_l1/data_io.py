"""CSV ingestion and round-trip output for data matrices."""

import csv

import numpy as np

from .core import DataError


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def ingest_csv(path):
    """Read a rectangular numeric CSV into an ``(n, p)`` float array.

    A first row containing any non-numeric cell is taken as a header. Row
    numbers in error messages count file lines from 1.
    """
    with open(path, newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"empty file: {path}")
    header = None
    if not all(_is_number(c) for c in rows[0][1]):
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise DataError(f"no numeric rows in {path}")

    width = len(header) if header is not None else len(rows[0][1])
    values = []
    for lineno, row in rows:
        if len(row) != width:
            raise DataError(f"ragged row {lineno}: expected {width} fields, got {len(row)}")
        parsed = []
        for j, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"non-numeric cell at row {lineno}, column {j}: {cell!r}") from None
            if not np.isfinite(v):
                raise DataError(f"non-finite cell at row {lineno}, column {j}")
            parsed.append(v)
        values.append(parsed)
    return np.array(values, dtype=float)


def write_csv(X, path, header=None):
    """Write ``X`` with ``repr`` floats so :func:`ingest_csv` reads it back exactly."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header is not None:
            writer.writerow(header)
        for row in X:
            writer.writerow([repr(float(v)) for v in row])
