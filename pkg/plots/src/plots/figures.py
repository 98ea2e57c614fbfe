"""Figure kinds, CSV header contracts, row filtering, and rendering.

Each kind names the CSV columns it needs; a spec whose input is missing
any of them fails before a figure is opened, naming the missing columns.
The optional top-N filter keeps the N heaviest groups (explicit rank for
the distribution table), and every drawing routine returns the number of
data rows it plotted so callers can check marker/bar counts against the
filtered input.

matplotlib is used through the object-oriented API only — no pyplot, no
global state — so one process per figure needs no backend ceremony.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Callable

from matplotlib import colormaps
from matplotlib.figure import Figure

Row = dict[str, str]


class FigureSpecError(ValueError):
    """Spec invalid before any I/O: unknown kind, bad top value."""


class HeaderMismatchError(ValueError):
    """Input CSV does not carry the columns the kind requires."""

    def __init__(self, kind: str, missing: list[str]):
        self.kind = kind
        self.missing = missing
        cols = ", ".join(missing)
        super().__init__(f"header mismatch for kind {kind}: missing columns: {cols}")


@dataclass(frozen=True)
class KindSpec:
    required: frozenset[str]
    filter: Callable[[list[Row], int], list[Row]]
    draw: Callable[[Figure, list[Row]], int]


@dataclass(frozen=True)
class RenderResult:
    kind: str
    rows: int
    paths: tuple[str, ...]


def _top_groups(
    rows: list[Row], top: int, group_col: str, weight: Callable[[Row], float]
) -> list[Row]:
    """Keep rows of the `top` groups with the largest summed weight;
    ties break toward the lexically smaller group key."""
    totals: dict[str, float] = {}
    for row in rows:
        key = row[group_col]
        totals[key] = totals.get(key, 0.0) + weight(row)
    keep = {
        key
        for key, _ in sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
    }
    return [row for row in rows if row[group_col] in keep]


# ---------------------------------------------------------------- filters


def _filter_adoption(rows: list[Row], top: int) -> list[Row]:
    return _top_groups(rows, top, "country", lambda r: float(r["cohort_size"]))


def _filter_early_usage(rows: list[Row], top: int) -> list[Row]:
    # cohort_size repeats on every row of a country; max() tolerates dirt.
    totals: dict[str, float] = {}
    for row in rows:
        c = row["country"]
        totals[c] = max(totals.get(c, 0.0), float(row["cohort_size"]))
    keep = {
        key
        for key, _ in sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
    }
    return [row for row in rows if row["country"] in keep]


def _filter_crossref_only(rows: list[Row], top: int) -> list[Row]:
    return _top_groups(rows, top, "country", lambda r: float(r["with_crossref"]))


def _filter_journal_support(rows: list[Row], top: int) -> list[Row]:
    return _top_groups(rows, top, "publisher_id", lambda r: float(r["journals_total"]))


def _filter_distribution(rows: list[Row], top: int) -> list[Row]:
    # The table carries an explicit per-year rank; trust it.
    return [row for row in rows if int(row["rank"]) <= top]


# ---------------------------------------------------------------- drawing


def _draw_adoption_scatter(fig: Figure, rows: list[Row]) -> int:
    ax = fig.subplots()
    ax.set_xlabel("Adoption (%)")
    ax.set_ylabel("Engagement (%)")
    ax.set_title("ORCID adoption vs engagement by country")
    if rows:
        xs = [float(r["adoption_pct"]) for r in rows]
        ys = [float(r["engagement_pct"]) for r in rows]
        cohorts = [float(r["cohort_size"]) for r in rows]
        biggest = max(cohorts) or 1.0
        # Marker area encodes cohort size: the population behind each point.
        sizes = [30.0 + 270.0 * c / biggest for c in cohorts]
        ax.scatter(xs, ys, s=sizes, alpha=0.6, edgecolors="black", linewidths=0.5)
        for r, x, y in zip(rows, xs, ys):
            ax.annotate(r["country"], (x, y), fontsize=7,
                        textcoords="offset points", xytext=(4, 4))
    return len(rows)


def _draw_early_usage_bars(fig: Figure, rows: list[Row]) -> int:
    ax = fig.subplots()
    ax.set_ylabel("Share of cohort (%)")
    ax.set_title("ORCID record creation year by country")
    if not rows:
        return 0
    sizes = {r["country"]: float(r["cohort_size"]) for r in rows}
    countries = sorted(sizes, key=lambda c: (-sizes[c], c))
    x_of = {c: i for i, c in enumerate(countries)}
    years = sorted({int(r["creation_year"]) for r in rows})
    palette = colormaps["viridis"]
    color_of = {
        y: palette(i / max(len(years) - 1, 1)) for i, y in enumerate(years)
    }
    bottoms = {c: 0.0 for c in countries}
    seen_years: set[int] = set()
    # One bar segment per CSV row, stacked bottom-up in year order.
    for row in sorted(rows, key=lambda r: (x_of[r["country"]], int(r["creation_year"]))):
        country, year = row["country"], int(row["creation_year"])
        height = float(row["pct"])
        label = str(year) if year not in seen_years else None
        seen_years.add(year)
        ax.bar(x_of[country], height, bottom=bottoms[country], width=0.8,
               color=color_of[year], label=label)
        bottoms[country] += height
    ax.set_xticks(range(len(countries)), countries, rotation=90, fontsize=7)
    ax.legend(title="Created", fontsize=6, ncols=2)
    return len(rows)


def _line_points(
    fig: Figure, rows: list[Row], group_col: str, x_col: str,
    y_of: Callable[[Row], float], ylabel: str, title: str,
) -> int:
    ax = fig.subplots()
    ax.set_xlabel("Year")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    groups: dict[str, list[Row]] = {}
    for row in rows:
        groups.setdefault(row[group_col], []).append(row)
    for key in sorted(groups):
        series = sorted(groups[key], key=lambda r: int(r[x_col]))
        ax.plot([int(r[x_col]) for r in series], [y_of(r) for r in series],
                marker="o", markersize=3, linewidth=1, label=key)
    if groups:
        ax.legend(fontsize=6, ncols=2)
    return len(rows)


def _draw_crossref_only_lines(fig: Figure, rows: list[Row]) -> int:
    return _line_points(
        fig, rows, "country", "year", lambda r: float(r["pct"]),
        "Crossref-only researchers (%)",
        "Researchers with Crossref assertions absent from their ORCID record",
    )


def _draw_journal_support(fig: Figure, rows: list[Row]) -> int:
    def pct(row: Row) -> float:
        total = float(row["journals_total"])
        return 100.0 * float(row["journals_supporting"]) / total if total else 0.0

    return _line_points(
        fig, rows, "publisher_id", "year", pct,
        "Journals depositing ORCID iDs (%)",
        "Journal-level ORCID support by publisher",
    )


def _draw_distribution_bars(fig: Figure, rows: list[Row]) -> int:
    ax = fig.subplots()
    ax.set_ylabel("Share of papers")
    ax.set_title("Papers by ORCID count, top publishers by assertion volume")
    if not rows:
        return 0
    ordered = sorted(rows, key=lambda r: (int(r["rank"]), r["publisher_id"]))
    xs = range(len(ordered))
    shares = [
        ("share_0", "0 ORCIDs", "#d0d0d0"),
        ("share_1", "1 ORCID", "#7fb2d9"),
        ("share_2plus", "2+ ORCIDs", "#2a6496"),
    ]
    bottoms = [0.0] * len(ordered)
    for col, label, color in shares:
        heights = [float(r[col]) for r in ordered]
        ax.bar(xs, heights, bottom=bottoms, width=0.8, color=color, label=label)
        bottoms = [b + h for b, h in zip(bottoms, heights)]
    ax.set_xticks(
        list(xs), [r["publisher_id"] for r in ordered], rotation=90, fontsize=7
    )
    ax.legend(fontsize=7)
    return len(ordered)


KINDS: dict[str, KindSpec] = {
    "adoption_scatter": KindSpec(
        frozenset({"country", "cohort_size", "adopted", "adoption_pct",
                   "completeness_num", "completeness_den", "engagement_pct"}),
        _filter_adoption, _draw_adoption_scatter,
    ),
    "early_usage_bars": KindSpec(
        frozenset({"country", "creation_year", "used", "cohort_size", "pct"}),
        _filter_early_usage, _draw_early_usage_bars,
    ),
    "crossref_only_lines": KindSpec(
        frozenset({"country", "year", "crossref_only", "with_crossref", "pct"}),
        _filter_crossref_only, _draw_crossref_only_lines,
    ),
    "journal_support": KindSpec(
        frozenset({"publisher_id", "year", "journals_supporting", "journals_total"}),
        _filter_journal_support, _draw_journal_support,
    ),
    "orcid_distribution": KindSpec(
        frozenset({"publisher_id", "year", "rank", "assertion_volume", "papers",
                   "share_0", "share_1", "share_2plus"}),
        _filter_distribution, _draw_distribution_bars,
    ),
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: str
    output_image: str
    top: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            known = ", ".join(sorted(KINDS))
            raise FigureSpecError(f"unknown figure kind {self.kind!r}; one of: {known}")
        if self.top is not None and self.top < 1:
            raise FigureSpecError(f"top must be >= 1, got {self.top}")


def load_rows(spec: FigureSpec) -> list[Row]:
    """Read the CSV and enforce the kind's header contract."""
    required = KINDS[spec.kind].required
    with open(spec.input_csv, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = set(reader.fieldnames or [])
        missing = sorted(required - header)
        if missing:
            raise HeaderMismatchError(spec.kind, missing)
        return list(reader)


def filter_rows(spec: FigureSpec, rows: list[Row]) -> list[Row]:
    if spec.top is None:
        return rows
    return KINDS[spec.kind].filter(rows, spec.top)


VECTOR_SUFFIXES = {".svg", ".pdf"}


def output_paths(output_image: str) -> tuple[str, str]:
    """The requested path plus its companion in the other encoding."""
    root, ext = os.path.splitext(output_image)
    if ext.lower() in VECTOR_SUFFIXES:
        return output_image, root + ".png"
    return output_image, root + ".svg"


def build_figure(kind: str, rows: list[Row]) -> tuple[Figure, int]:
    fig = Figure(figsize=(8.0, 5.0), dpi=100)
    count = KINDS[kind].draw(fig, rows)
    try:
        fig.tight_layout()
    except ValueError:
        pass  # degenerate layouts (e.g. huge legends) still save fine
    return fig, count


def render(spec: FigureSpec) -> RenderResult:
    """Load, validate, filter, draw, save in both encodings."""
    rows = filter_rows(spec, load_rows(spec))
    fig, count = build_figure(spec.kind, rows)
    paths = output_paths(spec.output_image)
    parent = os.path.dirname(os.path.abspath(spec.output_image))
    os.makedirs(parent, exist_ok=True)
    for path in paths:
        fig.savefig(path)
    return RenderResult(kind=spec.kind, rows=count, paths=paths)
