"""Matplotlib figures for the three CSV table shapes the simulator emits.

Every function here reads a table, checks its header, and draws exactly
the numbers found in the file. Schema problems fail up front with the
offending column named, instead of a KeyError halfway through a plot.

Output is deterministic: the same CSV yields the same image bytes, so
figures can be diffed and cached. SVG and PDF outputs have their
timestamp fields stripped; PNG carries none to begin with.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure

TRACE_COLUMNS = ("scenario", "realization", "round", "sum_rate_bps")
CDF_COLUMNS = ("nodes", "rounds", "cdf")
COMPARISON_COLUMNS = ("realization", "slot", "r_prop_bps", "r_max_bps", "eta")

KINDS = {
    "trace": TRACE_COLUMNS,
    "cdf": CDF_COLUMNS,
    "comparison": COMPARISON_COLUMNS,
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSV path(s), view kind, output image path.

    Axis labels and the title are optional; each kind supplies sensible
    defaults with units when they are left as None.
    """

    source: str | Path | Sequence[str | Path]
    kind: str
    output: str | Path
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of {sorted(KINDS)}"
            )


def read_table(path: str | Path, columns: Sequence[str]) -> list[dict[str, str]]:
    """Load CSV rows after verifying every required column is present."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames
        if header is None:
            raise ValueError(
                f"{path}: empty file, expected header {','.join(columns)}"
            )
        for column in columns:
            if column not in header:
                raise ValueError(f"{path}: missing column {column!r}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def _sources(source: str | Path | Sequence[str | Path]) -> list[Path]:
    if isinstance(source, (str, Path)):
        return [Path(source)]
    paths = [Path(p) for p in source]
    if not paths:
        raise ValueError("no input CSV given")
    return paths


def _load(
    source: str | Path | Sequence[str | Path], columns: Sequence[str]
) -> list[tuple[str, dict[str, str]]]:
    """Read one or several CSVs; rows are tagged with the file stem only
    when more than one file is overlaid, so single-file labels stay clean."""
    paths = _sources(source)
    tagged = len(paths) > 1
    rows: list[tuple[str, dict[str, str]]] = []
    for path in paths:
        tag = f"{path.stem}: " if tagged else ""
        rows.extend((tag, row) for row in read_table(path, columns))
    return rows


def _new_axes(xlabel: str, ylabel: str, title: str | None):
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot()
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig: Figure, output: str | Path | None) -> Figure:
    fig.tight_layout()
    if output is not None:
        output = Path(output)
        if output.parent != Path(""):
            output.parent.mkdir(parents=True, exist_ok=True)
        fmt = output.suffix.lower().lstrip(".")
        # Matplotlib stamps SVG and PDF with the wall clock unless told
        # not to; PNG has no date field, so nothing to strip there.
        if fmt == "svg":
            metadata = {"Date": None}
        elif fmt == "pdf":
            metadata = {"CreationDate": None}
        else:
            metadata = None
        fig.savefig(output, dpi=120, metadata=metadata)
    return fig


def plot_trace(
    source: str | Path | Sequence[str | Path],
    output: str | Path | None = None,
    *,
    xlabel: str | None = None,
    ylabel: str | None = None,
    title: str | None = None,
) -> Figure:
    """Sum rate against auction round, one line per realization.

    Expects the convergence trace schema: scenario, realization, round,
    sum_rate_bps. Lines are keyed by (scenario, realization) so several
    scenarios in one file come out as separate curves.
    """
    series: dict[str, tuple[list[int], list[float]]] = {}
    for tag, row in _load(source, TRACE_COLUMNS):
        label = f"{tag}{row['scenario']} r{row['realization']}"
        xs, ys = series.setdefault(label, ([], []))
        xs.append(int(row["round"]))
        ys.append(float(row["sum_rate_bps"]))
    fig, ax = _new_axes(
        xlabel or "auction round", ylabel or "sum rate (bit/s)", title
    )
    for label, (xs, ys) in series.items():
        ax.plot(xs, ys, marker="o", markersize=2.5, linewidth=1.2, label=label)
    if len(series) <= 12:
        ax.legend(fontsize=8)
    return _save(fig, output)


def plot_cdf(
    source: str | Path | Sequence[str | Path],
    output: str | Path | None = None,
    *,
    xlabel: str | None = None,
    ylabel: str | None = None,
    title: str | None = None,
) -> Figure:
    """Empirical CDF of rounds to convergence, one step curve per node count.

    Expects the convergence CDF schema: nodes, rounds, cdf. Points within
    a group are drawn in round order regardless of row order in the file.
    """
    groups: dict[str, list[tuple[int, float]]] = {}
    for tag, row in _load(source, CDF_COLUMNS):
        label = f"{tag}{row['nodes']} nodes"
        groups.setdefault(label, []).append(
            (int(row["rounds"]), float(row["cdf"]))
        )
    fig, ax = _new_axes(
        xlabel or "rounds to convergence", ylabel or "empirical CDF", title
    )
    for label, points in groups.items():
        points.sort(key=lambda point: point[0])
        xs = [rounds for rounds, _ in points]
        ys = [cdf for _, cdf in points]
        ax.step(xs, ys, where="post", marker=".", markersize=4, label=label)
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=8)
    return _save(fig, output)


def plot_comparison(
    source: str | Path | Sequence[str | Path],
    output: str | Path | None = None,
    *,
    xlabel: str | None = None,
    ylabel: str | None = None,
    title: str | None = None,
) -> Figure:
    """Auction rate and exhaustive-search rate against time slot.

    Expects the comparison schema: realization, slot, r_prop_bps,
    r_max_bps, eta. When the file carries aggregate rows (realization
    "mean") only those are drawn; otherwise every realization gets its
    own pair of curves. The mean of the plotted rows' eta column is
    written onto the figure, skipping non-finite entries.
    """
    rows = _load(source, COMPARISON_COLUMNS)
    mean_rows = [(tag, row) for tag, row in rows if row["realization"] == "mean"]
    chosen = mean_rows or rows
    series: dict[str, tuple[list[int], list[float]]] = {}
    etas: list[float] = []
    for tag, row in chosen:
        who = "" if row["realization"] == "mean" else f" r{row['realization']}"
        slot = int(row["slot"])
        for column, name in (("r_prop_bps", "auction"), ("r_max_bps", "optimum")):
            xs, ys = series.setdefault(f"{tag}{name}{who}", ([], []))
            xs.append(slot)
            ys.append(float(row[column]))
        eta = float(row["eta"])
        if math.isfinite(eta):
            etas.append(eta)
    fig, ax = _new_axes(
        xlabel or "time slot", ylabel or "sum rate (bit/s)", title
    )
    for label, (xs, ys) in series.items():
        style = "--" if "optimum" in label else "-"
        ax.plot(xs, ys, style, marker="o", markersize=3, label=label)
    note = (
        f"mean \N{GREEK SMALL LETTER ETA} = {sum(etas) / len(etas):.4f}"
        if etas
        else "mean \N{GREEK SMALL LETTER ETA} undefined"
    )
    ax.text(
        0.02, 0.02, note, transform=ax.transAxes, fontsize=9,
        verticalalignment="bottom",
    )
    if len(series) <= 12:
        ax.legend(fontsize=8)
    return _save(fig, output)


def render(spec: FigureSpec) -> Path:
    """Draw the figure a spec describes and write it to spec.output."""
    plot = {
        "trace": plot_trace,
        "cdf": plot_cdf,
        "comparison": plot_comparison,
    }[spec.kind]
    plot(
        spec.source,
        spec.output,
        xlabel=spec.xlabel,
        ylabel=spec.ylabel,
        title=spec.title,
    )
    return Path(spec.output)
