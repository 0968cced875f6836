"""Placing detected regions onto a line-segmented page.

Each line is assigned by one rule: its baseline midpoint must lie inside
the region (the region's polygon when it has one, its box otherwise).
When several regions contain the midpoint the smallest one by box area
wins, with earlier input order breaking exact ties, so the most specific
zone absorbs the line. Lines whose midpoint falls in no region keep
``region_id=None`` and survive serialization via the fallback block.
"""

from __future__ import annotations

import warnings
from dataclasses import replace
from typing import Sequence

from .alto import Line, Page, Region
from .errors import DegenerateBaselineError, DispatchWarning
from .geometry import Point, baseline_midpoint, point_in_box, point_in_polygon


def assign_lines(lines: Sequence[Line], regions: Sequence[Region]) -> list[Line]:
    """Return the lines with region_id recomputed from scratch.

    A zero-length baseline cannot have a midpoint; its first point is used
    instead and a warning is emitted, never a failure.
    """
    assigned = []
    for line in lines:
        try:
            anchor = baseline_midpoint(line.baseline)
        except DegenerateBaselineError:
            anchor = line.baseline.points[0]
            warnings.warn(
                f"line {line.id!r}: zero-length baseline; using its first point",
                DispatchWarning, stacklevel=2,
            )
        assigned.append(replace(line, region_id=_owner(anchor, regions)))
    return assigned


def _owner(anchor: Point, regions: Sequence[Region]) -> str | None:
    best_id: str | None = None
    best_area = float("inf")
    for region in regions:
        if region.polygon is not None:
            hit = point_in_polygon(anchor, region.polygon)
        else:
            hit = point_in_box(anchor, region.box)
        if hit and region.box.area < best_area:
            best_id = region.id
            best_area = region.box.area
    return best_id


def inject(page: Page, detections: Sequence[Region], *,
           keep_existing: bool = False) -> Page:
    """Rebuild the page around the detections and re-assign every line.

    Detections replace whatever regions the page had; with keep_existing
    the originals stay (listed first, so they take part in tie-breaking as
    the earlier entries) and colliding detection ids are suffixed to keep
    region ids unique. Line count is conserved either way.
    """
    if keep_existing:
        regions = list(page.regions)
        taken = {r.id for r in regions}
        for det in detections:
            det_id = det.id
            suffix = 1
            while det_id in taken:
                det_id = f"{det.id}_{suffix}"
                suffix += 1
            taken.add(det_id)
            regions.append(replace(det, id=det_id) if det_id != det.id else det)
    else:
        regions = list(detections)

    lines = assign_lines(page.lines, regions)
    return Page(image_path=page.image_path, width=page.width, height=page.height,
                regions=tuple(regions), lines=tuple(lines))
