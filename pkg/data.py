"""
data.py — Reading scalar traces f(x_1), f(x_2), ... from CSV
One value per line; an optional header is detected when the first token
is not a number.
"""

import logging

import numpy as np
import pandas as pd

from errors import TraceFormatError

logger = logging.getLogger("data")


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except (TypeError, ValueError):
        return False


def read_trace(source) -> np.ndarray:
    """Load a single-column trace from a path or open text stream."""
    try:
        df = pd.read_csv(source, header=None, dtype=str, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise TraceFormatError("trace file is empty")
    except pd.errors.ParserError as e:
        raise TraceFormatError(f"trace is not a single column: {e}")
    except UnicodeDecodeError as e:
        raise TraceFormatError(f"trace is not valid UTF-8 text: {e.reason} at byte {e.start}")

    if df.shape[1] != 1:
        raise TraceFormatError(f"trace must have exactly one column, found {df.shape[1]}")

    col = df.iloc[:, 0].str.strip()
    if len(col) and not _is_number(col.iloc[0]):
        logger.debug(f"Header detected: {col.iloc[0]!r}")
        col = col.iloc[1:]
    if col.empty:
        raise TraceFormatError("trace has no values")

    values = pd.to_numeric(col, errors="coerce")
    bad = values.isna()
    if bad.any():
        first = col[bad].iloc[0]
        raise TraceFormatError(f"non-numeric trace value {first!r}")

    series = values.to_numpy(dtype=np.float64)
    logger.info(f"Trace loaded: {series.size} values")
    return series
