"""Random-input generators and small builders shared across test modules."""

from __future__ import annotations

import random

from layoutkit import Baseline, Box, Line, Page, Point, Polygon, Region


def rand_box(rng: random.Random, width: float, height: float,
             min_side: float = 1.0) -> tuple[float, float, float, float]:
    w = rng.uniform(min_side, max(min_side, width / 2))
    h = rng.uniform(min_side, max(min_side, height / 2))
    x0 = rng.uniform(0.0, width - w)
    y0 = rng.uniform(0.0, height - h)
    return (x0, y0, x0 + w, y0 + h)


def rand_int_box(rng: random.Random, width: int, height: int,
                 min_side: int = 2) -> tuple[int, int, int, int]:
    w = rng.randint(min_side, max(min_side, width // 2))
    h = rng.randint(min_side, max(min_side, height // 2))
    x0 = rng.randint(0, width - w)
    y0 = rng.randint(0, height - h)
    return (x0, y0, x0 + w, y0 + h)


def rand_polyline(rng: random.Random, n_points: int, width: float,
                  height: float) -> list[tuple[float, float]]:
    while True:
        pts = [(rng.uniform(0, width), rng.uniform(0, height)) for _ in range(n_points)]
        if any(a != b for a, b in zip(pts, pts[1:])):
            return pts


def convex_hull(points):
    """Monotone chain; returns hull vertices in counter-clockwise order."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def rand_convex_polygon(rng: random.Random, n_candidates: int, width: float,
                        height: float) -> list[tuple[float, float]]:
    while True:
        pts = [(rng.uniform(0, width), rng.uniform(0, height))
               for _ in range(n_candidates)]
        hull = convex_hull(pts)
        if len(hull) >= 3:
            return hull


def region_from_bounds(region_id: str, label: str, bounds,
                       confidence: float | None = None,
                       with_polygon: bool = True) -> Region:
    box = Box(*bounds)
    polygon = box.to_polygon() if with_polygon and box.area > 0 else None
    return Region(id=region_id, label=label, box=box, polygon=polygon,
                  confidence=confidence)


def line_from_points(line_id: str, points,
                     region_id: str | None = None) -> Line:
    return Line(id=line_id, baseline=Baseline(tuple(Point(x, y) for x, y in points)),
                region_id=region_id)


def make_page(image_path: str, width: int, height: int, regions=(), lines=()) -> Page:
    return Page(image_path=image_path, width=width, height=height,
                regions=tuple(regions), lines=tuple(lines))


def make_alto(width: int, height: int, blocks, image_name: str | None = None) -> str:
    """Assemble a small ALTO document.

    blocks: sequence of (block_id, label, polygon_points, baselines) where
    polygon_points is a list of (x, y) and baselines a list of point lists.
    """
    labels: dict[str, str] = {}
    for _bid, label, _pts, _bls in blocks:
        labels.setdefault(label, f"BT{len(labels) + 1}")
    tag_lines = "".join(f'    <OtherTag ID="{tid}" LABEL="{label}"/>\n'
                        for label, tid in labels.items())
    body = []
    line_counter = 0
    for bid, label, pts, baselines in blocks:
        xs = [x for x, _ in pts]
        ys = [y for _, y in pts]
        points_attr = " ".join(f"{x:g} {y:g}" for x, y in pts)
        body.append(
            f'        <TextBlock ID="{bid}" TAGREFS="{labels[label]}" '
            f'HPOS="{min(xs):g}" VPOS="{min(ys):g}" '
            f'WIDTH="{max(xs) - min(xs):g}" HEIGHT="{max(ys) - min(ys):g}">\n'
            f'          <Shape><Polygon POINTS="{points_attr}"/></Shape>\n'
        )
        for baseline in baselines:
            line_counter += 1
            bl_attr = " ".join(f"{x:g} {y:g}" for x, y in baseline)
            body.append(f'          <TextLine ID="ln_{line_counter}" BASELINE="{bl_attr}"/>\n')
        body.append("        </TextBlock>\n")
    file_name = ""
    if image_name:
        file_name = ("    <sourceImageInformation>"
                     f"<fileName>{image_name}</fileName></sourceImageInformation>\n")
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<alto xmlns="http://www.loc.gov/standards/alto/ns-v4#">\n'
        "  <Description>\n"
        "    <MeasurementUnit>pixel</MeasurementUnit>\n"
        f"{file_name}"
        "  </Description>\n"
        "  <Tags>\n"
        f"{tag_lines}"
        "  </Tags>\n"
        "  <Layout>\n"
        f'    <Page ID="P1" WIDTH="{width}" HEIGHT="{height}">\n'
        f'      <PrintSpace HPOS="0" VPOS="0" WIDTH="{width}" HEIGHT="{height}">\n'
        + "".join(body) +
        "      </PrintSpace>\n"
        "    </Page>\n"
        "  </Layout>\n"
        "</alto>\n"
    )
