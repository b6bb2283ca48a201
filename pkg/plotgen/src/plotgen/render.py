"""Render a delimited sweep file as an SVG line chart.

The renderer never recomputes metrics: it reads exactly one CSV, groups rows
by an optional series column (one line per distinct value, in first-appearance
order, points in file order), and writes deterministic vector output — a fixed
hash salt and no timestamp metadata, with path simplification disabled so
every data point appears as a path vertex.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotgen"
matplotlib.rcParams["path.simplify"] = False

import matplotlib.pyplot as plt


class MissingColumnError(KeyError):
    """A requested column is not in the CSV header."""


class EmptyDataError(ValueError):
    """The CSV has a header but no data rows."""


@dataclass(frozen=True)
class PlotRequest:
    input_path: str
    x: str
    y: tuple[str, ...]
    output_path: str
    series: str | None = None
    title: str | None = None
    logx: bool = False


def _read_rows(path: str) -> tuple[list[str], list[dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        rows = list(reader)
    return header, rows


def render(request: PlotRequest) -> None:
    """Draw the chart described by `request` and write it to output_path."""
    header, rows = _read_rows(request.input_path)
    wanted = [request.x, *request.y] + ([request.series] if request.series else [])
    for column in wanted:
        if column not in header:
            raise MissingColumnError(
                f"column {column!r} not in {request.input_path} (header: {', '.join(header)})"
            )
    if not rows:
        raise EmptyDataError(f"{request.input_path} contains no data rows")
    if request.series and len(request.y) != 1:
        raise ValueError("use either a series column or multiple y columns, not both")

    fig, axes = plt.subplots(figsize=(8.0, 4.5))
    try:
        if request.series:
            ycol = request.y[0]
            groups: dict[str, list[dict]] = {}
            for row in rows:
                groups.setdefault(row[request.series], []).append(row)
            for value, members in groups.items():
                xs = [float(r[request.x]) for r in members]
                ys = [float(r[ycol]) for r in members]
                marker = "o" if len(xs) == 1 else None
                axes.plot(xs, ys, marker=marker, label=f"{request.series}={value}")
            axes.set_ylabel(ycol)
        else:
            xs = [float(r[request.x]) for r in rows]
            for ycol in request.y:
                ys = [float(r[ycol]) for r in rows]
                marker = "o" if len(xs) == 1 else None
                axes.plot(xs, ys, marker=marker, label=ycol)
            axes.set_ylabel(", ".join(request.y))
        axes.set_xlabel(request.x)
        if request.logx:
            axes.set_xscale("log")
        if request.title:
            axes.set_title(request.title)
        axes.legend(loc="best")
        fig.savefig(request.output_path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
