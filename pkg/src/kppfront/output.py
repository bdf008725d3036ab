"""Deterministic CSV / record formatting."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

from . import __version__


def fmt(value) -> str:
    """17 significant digits for floats (integral floats keep a trailing '.0')."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    s = "%.17g" % v
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def header_lines(command: str, cfg) -> list:
    lines = [f"# kppfront {__version__}", f"# command: {command}"]
    for section, body in cfg.items():
        for key, value in body.items():
            lines.append(f"# [{section}] {key} = {fmt(value)}")
    return lines


def write_csv(path, header: Sequence[str], columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def record(kind: str, pairs) -> str:
    return " ".join([kind] + [f"{k}={fmt(v)}" for k, v in pairs])
