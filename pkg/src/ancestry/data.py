"""CSV reading and writing for multivariate time series."""

import csv
import math

import numpy as np

from .errors import InsufficientData, MissingData, ParseError
from .svar import TimeSeries


def ingest_csv(path):
    """Read a rectangular CSV with a header of series names.

    Rows are time points in file order. Blank cells raise
    :class:`MissingData`, unparsable ones :class:`ParseError`; both report
    the 1-based file row and the column name.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    while rows and not any(c.strip() for c in rows[-1]):
        rows.pop()
    if not rows:
        raise InsufficientData(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise InsufficientData(f"need at least two columns, found {len(header)}")
    body = rows[1:]
    if not body:
        raise InsufficientData(f"{path} has a header but no observations")
    data = np.empty((len(body), len(header)))
    for i, row in enumerate(body):
        lineno = i + 2
        if len(row) != len(header):
            raise ParseError(lineno, "<row>", f"{len(row)} fields, expected {len(header)}")
        for k, cell in enumerate(row):
            cell = cell.strip()
            if cell == "" or cell.upper() in ("NA", "NAN"):
                raise MissingData(lineno, header[k])
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(lineno, header[k], cell) from None
            if not math.isfinite(value):
                raise MissingData(lineno, header[k])
            data[i, k] = value
    return TimeSeries(data, tuple(header))


def write_csv(series, path):
    """Write with 17 significant digits so that reading back is exact."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(series.names)
        for row in series.data:
            w.writerow([f"{v:.17g}" for v in row])


def shift_column(series, name):
    """Pair each row with the next value of column ``name``; drops the last row."""
    if name not in series.names:
        raise KeyError(f"no column named {name!r}; have {list(series.names)}")
    k = series.names.index(name)
    data = series.data[:-1].copy()
    data[:, k] = series.data[1:, k]
    return TimeSeries(data, series.names)
