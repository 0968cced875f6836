"""Dataset statistics: class frequencies per split and region footprint.

One row per zone class: how many instances each split holds, the total,
and the mean/median region area as percent of page area. Area is that of
the isothetic box, not the source polygon, consistent with the rectangle
regime used everywhere else in this package, so curvy zones read slightly
large. For an even number of areas the median takes the lower middle
element.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .alto import Page
from .errors import LayoutKitWarning


@dataclass(frozen=True)
class ClassSplitStats:
    """One output row: a class with its per-split counts and area stats."""

    label: str
    counts: dict[str, int]
    total: int
    mean_area_pct: float
    median_area_pct: float


def split_stats(pages_by_split: Mapping[str, Sequence[Page]]) -> list[ClassSplitStats]:
    """Aggregate over splits; rows come back sorted by total count, descending.

    Pages reporting a non-positive pixel area are skipped with a warning
    rather than poisoning the percentages.
    """
    split_names = list(pages_by_split)
    counts: dict[str, dict[str, int]] = {}
    areas: dict[str, list[float]] = {}
    for split in split_names:
        for page in pages_by_split[split]:
            page_area = float(page.width) * float(page.height)
            if page_area <= 0.0:
                warnings.warn(f"page {page.image_path!r} has no area; skipped",
                              LayoutKitWarning, stacklevel=2)
                continue
            for region in page.regions:
                per_split = counts.setdefault(region.label, {s: 0 for s in split_names})
                per_split[split] += 1
                areas.setdefault(region.label, []).append(region.box.area / page_area * 100.0)

    rows = []
    for label, per_split in counts.items():
        values = sorted(areas[label])
        total = sum(per_split.values())
        rows.append(ClassSplitStats(
            label=label,
            counts=dict(per_split),
            total=total,
            mean_area_pct=sum(values) / len(values),
            median_area_pct=values[(len(values) - 1) // 2],
        ))
    rows.sort(key=lambda row: (-row.total, row.label))
    return rows


def format_stats_table(rows: Sequence[ClassSplitStats],
                       splits: Sequence[str] | None = None) -> str:
    """Aligned text table; area percentages with 2 decimals."""
    splits = _split_order(rows, splits)
    header = ["class", *splits, "total", "avg%", "median%"]
    table = [header]
    for row in rows:
        table.append([row.label,
                      *(str(row.counts.get(s, 0)) for s in splits),
                      str(row.total),
                      f"{row.mean_area_pct:.2f}",
                      f"{row.median_area_pct:.2f}"])
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = []
    for r in table:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    lines.insert(1, "-" * max(len(line) for line in lines))
    return "\n".join(lines) + "\n"


def format_stats_delimited(rows: Sequence[ClassSplitStats],
                           splits: Sequence[str] | None = None,
                           delimiter: str = ",") -> str:
    """Same content as the table, one header row, delimiter-separated."""
    splits = _split_order(rows, splits)
    out = [delimiter.join(["class", *splits, "total", "avg_area_pct", "median_area_pct"])]
    for row in rows:
        out.append(delimiter.join([row.label,
                                   *(str(row.counts.get(s, 0)) for s in splits),
                                   str(row.total),
                                   f"{row.mean_area_pct:.2f}",
                                   f"{row.median_area_pct:.2f}"]))
    return "\n".join(out) + "\n"


def _split_order(rows: Sequence[ClassSplitStats],
                 splits: Sequence[str] | None) -> list[str]:
    if splits is not None:
        return list(splits)
    if rows:
        return list(rows[0].counts)
    return []
