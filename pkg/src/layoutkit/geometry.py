"""Planar primitives for page layout work.

All coordinates are real-valued pixels with the origin at the top-left
corner and y growing downward. Rounding to integers happens only at
serialization boundaries, never here. Every type is immutable, so values
can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateBaselineError, MalformedGeometryError


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise MalformedGeometryError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class Polygon:
    """An implicitly closed polygon (the last vertex connects to the first).

    Consecutive duplicate vertices, including an explicit closing vertex,
    are dropped on construction; at least 3 distinct vertices must remain.
    """

    points: tuple[Point, ...]

    def __post_init__(self):
        raw = tuple(self.points)
        if len(raw) < 3:
            raise MalformedGeometryError(f"polygon needs at least 3 vertices, got {len(raw)}")
        kept = [raw[0]]
        for pt in raw[1:]:
            if pt != kept[-1]:
                kept.append(pt)
        if len(kept) > 1 and kept[-1] == kept[0]:
            kept.pop()
        if len(kept) < 3:
            raise MalformedGeometryError("polygon collapsed to fewer than 3 distinct vertices")
        object.__setattr__(self, "points", tuple(kept))


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle. Degenerate (zero-area) boxes are allowed."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for v in (self.x_min, self.y_min, self.x_max, self.y_max):
            if not math.isfinite(v):
                raise MalformedGeometryError(f"non-finite box coordinate in {self}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise MalformedGeometryError(
                f"inverted box ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def to_polygon(self) -> Polygon:
        """The box as a 4-vertex polygon; raises if the box is degenerate."""
        return Polygon((
            Point(self.x_min, self.y_min),
            Point(self.x_max, self.y_min),
            Point(self.x_max, self.y_max),
            Point(self.x_min, self.y_max),
        ))


@dataclass(frozen=True)
class Baseline:
    """The polyline a text line sits on; at least two points."""

    points: tuple[Point, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        if len(pts) < 2:
            raise MalformedGeometryError(f"baseline needs at least 2 points, got {len(pts)}")
        object.__setattr__(self, "points", pts)

    @property
    def length(self) -> float:
        return sum(math.dist((a.x, a.y), (b.x, b.y)) for a, b in zip(self.points, self.points[1:]))

    @property
    def is_degenerate(self) -> bool:
        return self.length == 0.0


def bbox_of_polygon(polygon: Polygon) -> Box:
    """Tightest axis-aligned rectangle containing every vertex."""
    xs = [p.x for p in polygon.points]
    ys = [p.y for p in polygon.points]
    return Box(min(xs), min(ys), max(xs), max(ys))


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes; 0.0 when the union has no area."""
    inter_w = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    inter_h = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    inter = max(0.0, inter_w) * max(0.0, inter_h)
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def baseline_midpoint(baseline: Baseline) -> Point:
    """The point halfway along the baseline's arc length.

    Linear interpolation inside the segment containing half the total
    length; a zero-length baseline raises DegenerateBaselineError.
    """
    pts = baseline.points
    seg_lengths = [math.dist((a.x, a.y), (b.x, b.y)) for a, b in zip(pts, pts[1:])]
    total = sum(seg_lengths)
    if total == 0.0:
        raise DegenerateBaselineError("baseline has zero length")
    half = total / 2.0
    walked = 0.0
    for a, b, d in zip(pts, pts[1:], seg_lengths):
        if d > 0.0 and walked + d >= half:
            t = (half - walked) / d
            return Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
        walked += d
    # unreachable except for floating-point residue; half is then ~the end
    return pts[-1]


def point_in_polygon(point: Point, polygon: Polygon) -> bool:
    """Even-odd (ray casting) containment; points exactly on an edge count as inside."""
    pts = polygon.points
    n = len(pts)
    inside = False
    for i in range(n):
        a = pts[i]
        b = pts[(i + 1) % n]
        if _on_segment(point, a, b):
            return True
        if (a.y > point.y) != (b.y > point.y):
            x_cross = a.x + (point.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if point.x < x_cross:
                inside = not inside
    return inside


def point_in_box(point: Point, box: Box) -> bool:
    """Closed-interval containment on both axes."""
    return box.x_min <= point.x <= box.x_max and box.y_min <= point.y <= box.y_max


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
    if cross != 0.0:
        return False
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)
