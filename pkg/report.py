"""report.py — Rendering analysis results as text, CSV or JSON"""

import io
import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

import config

logger = logging.getLogger("report")

SIG_FMT = f"%.{config.TEXT_SIG_DIGITS}g"


@dataclass
class Table:
    frame       : pd.DataFrame
    float_format: str = SIG_FMT
    show_index  : bool = False


@dataclass
class Report:
    """A titled block of scalar results plus zero or more tables."""
    title  : str
    summary: dict = field(default_factory=dict)
    tables : dict = field(default_factory=dict)   # name -> Table

    def add_table(self, name: str, frame: pd.DataFrame, float_format: str = SIG_FMT,
                  show_index: bool = False):
        self.tables[name] = Table(frame, float_format, show_index)

    def to_dict(self) -> dict:
        return {
            "title"  : self.title,
            "summary": {k: jsonable(v) for k, v in self.summary.items()},
            "tables" : {name: frame_to_dict(t.frame, t.show_index)
                        for name, t in self.tables.items()},
        }

    def render(self, fmt: str = "text") -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2)
        if fmt == "csv":
            return _render_csv(self)
        if fmt == "text":
            return _render_text(self)
        raise ValueError(f"unknown output format {fmt!r}")


# ══════════════════════════════════════════════════════
# 🔢  VALUES
# ══════════════════════════════════════════════════════

def jsonable(v):
    """Plain Python scalar for JSON; NA and non-finite floats become None."""
    if v is None or v is pd.NA:
        return None
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [jsonable(x) for x in v]
    return str(v)


def fmt_value(v) -> str:
    if v is None or v is pd.NA:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return "yes" if v else "no"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "NA" if math.isnan(v) else SIG_FMT % v
    return str(v)


def frame_to_dict(df: pd.DataFrame, show_index: bool = False) -> dict:
    out = {
        "columns": [jsonable(c) for c in df.columns],
        "data"   : [[jsonable(v) for v in row] for row in df.astype(object).itertuples(index=False)],
    }
    if show_index:
        out["index_name"] = df.index.name
        out["index"] = [jsonable(i) for i in df.index]
    return out


# ══════════════════════════════════════════════════════
# 🖨️  TEXT / CSV
# ══════════════════════════════════════════════════════

def _format_frame(df: pd.DataFrame, float_format: str) -> pd.DataFrame:
    """Stringify cells: floats with `float_format`, nullable ints plain, NA as 'NA'."""
    def cell(v):
        if v is None or v is pd.NA or (isinstance(v, float) and math.isnan(v)):
            return "NA"
        if isinstance(v, (float, np.floating)):
            return float_format % v
        return fmt_value(v)

    out = df.astype(object).apply(lambda col: col.map(cell))
    out.columns = [fmt_value(c) for c in df.columns]
    out.index = [fmt_value(i) for i in df.index]
    out.index.name = df.index.name
    out.columns.name = df.columns.name
    return out


def _render_text(report: Report) -> str:
    lines = ["═" * 56, f"  {report.title}", "═" * 56]
    if report.summary:
        width = max(len(k) for k in report.summary)
        for k, v in report.summary.items():
            lines.append(f"  {k:<{width}} : {fmt_value(v)}")
    for name, t in report.tables.items():
        lines += ["", f"── {name} " + "─" * max(0, 50 - len(name))]
        lines.append(_format_frame(t.frame, t.float_format).to_string(index=t.show_index))
    return "\n".join(lines) + "\n"


def _render_csv(report: Report) -> str:
    buf = io.StringIO()
    if report.summary:
        pd.DataFrame({"key": list(report.summary),
                      "value": [fmt_value(v) for v in report.summary.values()]}
                     ).to_csv(buf, index=False, lineterminator="\n")
    for name, t in report.tables.items():
        if buf.tell():
            buf.write("\n")
        buf.write(f"# {name}\n")
        _format_frame(t.frame, t.float_format).to_csv(
            buf, index=t.show_index, lineterminator="\n")
    return buf.getvalue()


def write_output(text: str, out: str | None = None):
    """Write to `out` if given, else stdout."""
    if out:
        folder = os.path.dirname(out)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(out, "w", newline="") as f:
            f.write(text)
        logger.info(f"Report written: {out}")
    else:
        print(text, end="")
