"""Table rendering: markdown, CSV, and a JSON envelope shared with the service."""

from __future__ import annotations

import json
from fractions import Fraction
from io import StringIO

from mpmath import mp, mpf


def truncate_decimal(value, places: int = 4, ellipsis: bool = False) -> str:
    """Decimal string truncated (not rounded) to `places` digits.

    Matches the survey-table style "1.9374..."; the ellipsis marks the
    truncation in human-readable output and is dropped in machine formats.
    """
    if isinstance(value, Fraction):
        scaled = value * 10 ** places
        whole = scaled.numerator // scaled.denominator  # floor
        if value < 0 and scaled != whole:
            whole += 1  # truncate toward zero
        digits = abs(whole)
        body = f"{'-' if value < 0 else ''}{digits // 10**places}.{digits % 10**places:0{places}d}"
    else:
        v = mp.mpf(value)
        sign = "-" if v < 0 else ""
        scaled = int(mp.floor(abs(v) * 10 ** places))
        body = f"{sign}{scaled // 10**places}.{scaled % 10**places:0{places}d}"
    return body + "..." if ellipsis else body


def sci_str(value, significant: int = 5) -> str:
    """Deterministic scientific-notation string for very large magnitudes."""
    return mp.nstr(mp.mpf(value), significant)


class TableOutput:
    """One renderable table: caption, column names, rows of plain values."""

    def __init__(self, caption: str, columns: list[str], rows: list[list],
                 meta: dict | None = None):
        self.caption = caption
        self.columns = columns
        self.rows = rows
        self.meta = meta or {}

    def to_payload(self) -> dict:
        return {
            "caption": self.caption,
            "columns": self.columns,
            "rows": [[_plain(v) for v in row] for row in self.rows],
            "meta": {k: _plain(v) for k, v in self.meta.items()},
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "TableOutput":
        return cls(payload["caption"], list(payload["columns"]),
                   [list(r) for r in payload["rows"]], dict(payload.get("meta", {})))

    def render(self, fmt: str, command: str = "") -> str:
        if fmt == "json":
            doc = {"command": command, **self.to_payload()}
            return json.dumps(doc, indent=2, sort_keys=False)
        if fmt == "csv":
            out = StringIO()
            out.write(",".join(self.columns) + "\n")
            for row in self.rows:
                out.write(",".join(_csv_cell(v) for v in row) + "\n")
            return out.getvalue().rstrip("\n")
        if fmt == "md":
            widths = [len(c) for c in self.columns]
            cells = [[_md_cell(v) for v in row] for row in self.rows]
            for row in cells:
                for i, cell in enumerate(row):
                    widths[i] = max(widths[i], len(cell))
            lines = []
            if self.caption:
                lines.append(f"**{self.caption}**")
                lines.append("")
            lines.append("| " + " | ".join(c.ljust(widths[i]) for i, c in enumerate(self.columns)) + " |")
            lines.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
            for row in cells:
                lines.append("| " + " | ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) + " |")
            return "\n".join(lines)
        raise ValueError(f"unknown format {fmt!r}")


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (mpf,)):
        return mp.nstr(v, 17)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _md_cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _csv_cell(v) -> str:
    s = _md_cell(v)
    if "," in s or '"' in s:
        s = '"' + s.replace('"', '""') + '"'
    return s
