"""ALTO XML reading and writing for layout pages.

Accepted subset (namespace-agnostic, so ALTO v2 through v4 files parse):

* ``Layout/Page`` with positive integer ``WIDTH``/``HEIGHT`` (required)
* ``Description/sourceImageInformation/fileName`` as the page image path
* ``Tags``: any child element carrying both ``ID`` and ``LABEL``
* blocks ``TextBlock``, ``Illustration`` and ``GraphicalElement`` anywhere
  below ``Page`` (including inside ``ComposedBlock``); block geometry from
  ``Shape/Polygon@POINTS`` and/or ``HPOS``/``VPOS``/``WIDTH``/``HEIGHT``
* ``TextLine`` children with a ``BASELINE`` point list, an optional
  ``Shape/Polygon`` boundary and optional ``String@CONTENT`` text, which is
  carried through untouched

Point lists accept both ``x1 y1 x2 y2`` and ``x1,y1 x2,y2`` syntax; files
are written back in the former dialect, under the ALTO v4 namespace, with
coordinates rounded to whole pixels. Geometry outside the page is clamped
onto it (with a warning); blocks whose tag reference does not resolve get
the label "UnknownZone". Lines without a region end up in a dedicated
"UnknownZone" block on write, so no line is ever dropped.
"""

from __future__ import annotations

import re
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import (
    AltoParseError,
    AltoSchemaError,
    AltoWarning,
    MalformedGeometryError,
    PageIntegrityError,
    UnknownClassError,
)
from .geometry import Baseline, Box, Point, Polygon, bbox_of_polygon

ALTO_NS = "http://www.loc.gov/standards/alto/ns-v4#"
UNKNOWN_LABEL = "UnknownZone"

_REGION_TAGS = frozenset({"TextBlock", "Illustration", "GraphicalElement"})
_POINT_SPLIT = re.compile(r"[\s,]+")


@dataclass(frozen=True)
class Region:
    """A labeled layout zone with a box and, usually, the source polygon."""

    id: str
    label: str
    box: Box
    polygon: Polygon | None = None
    confidence: float | None = None

    def __post_init__(self):
        if not self.label:
            raise ValueError(f"region {self.id!r} has an empty label")
        if self.polygon is not None and bbox_of_polygon(self.polygon) != self.box:
            raise MalformedGeometryError(
                f"region {self.id!r}: box is not the bounding box of its polygon"
            )
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"region {self.id!r}: confidence {self.confidence} not in [0, 1]")

    @classmethod
    def from_polygon(cls, id: str, label: str, polygon: Polygon,
                     confidence: float | None = None) -> "Region":
        return cls(id=id, label=label, box=bbox_of_polygon(polygon),
                   polygon=polygon, confidence=confidence)


@dataclass(frozen=True)
class Line:
    """A text line: a baseline, an optional boundary, and its region slot."""

    id: str
    baseline: Baseline
    boundary: Polygon | None = None
    region_id: str | None = None
    text: str | None = None


@dataclass(frozen=True)
class Page:
    """One page image with its regions and lines."""

    image_path: str
    width: int
    height: int
    regions: tuple[Region, ...] = ()
    lines: tuple[Line, ...] = ()

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"page dimensions must be positive, got {self.width}x{self.height}")
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "lines", tuple(self.lines))


class LabelMap:
    """Ordered bidirectional mapping between zone labels and class indices."""

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels in label map")
        if any(not lab for lab in labels):
            raise ValueError("empty label in label map")
        self._labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownClassError(f"label {label!r} not in label map {list(self._labels)}") from None

    def label(self, index: int) -> str:
        if not 0 <= index < len(self._labels):
            raise UnknownClassError(f"class index {index} out of range (map has {len(self._labels)} labels)")
        return self._labels[index]

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self._labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LabelMap) and self._labels == other._labels

    def __repr__(self) -> str:
        return f"LabelMap({list(self._labels)!r})"

    def save(self, path) -> None:
        Path(path).write_text("".join(f"{lab}\n" for lab in self._labels), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "LabelMap":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(line.strip() for line in lines if line.strip())


def collect_label_map(pages: Iterable[Page]) -> LabelMap:
    """Labels in first-occurrence order across the page sequence."""
    seen: dict[str, None] = {}
    for page in pages:
        for region in page.regions:
            seen.setdefault(region.label, None)
    return LabelMap(seen)


# ---------------------------------------------------------------------------
# parsing

def parse_alto(source: str | bytes) -> Page:
    """Parse one ALTO document into a Page.

    Irregularities that can be repaired (out-of-page geometry, too-short
    baselines, unresolvable tag references) are reported as AltoWarning
    and repaired; structural problems raise AltoParseError/AltoSchemaError.
    """
    data = source.encode("utf-8") if isinstance(source, str) else source
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise AltoParseError(f"not well-formed XML: {exc.msg if hasattr(exc, 'msg') else exc}",
                             line=line, column=column) from exc

    tag_labels: dict[str, str] = {}
    for tags_el in _iter_local(root, "Tags"):
        for child in tags_el:
            tid, label = child.get("ID"), child.get("LABEL")
            if tid and label:
                tag_labels[tid] = label

    page_elements = list(_iter_local(root, "Page"))
    if not page_elements:
        raise AltoSchemaError("no Page element found")
    if len(page_elements) > 1:
        _warn(f"document has {len(page_elements)} Page elements; only the first is read")
    page_el = page_elements[0]

    width = _required_dimension(page_el, "WIDTH")
    height = _required_dimension(page_el, "HEIGHT")

    file_name_el = next(_iter_local(root, "fileName"), None)
    image_path = (file_name_el.text or "").strip() if file_name_el is not None else ""

    regions: list[Region] = []
    lines: list[Line] = []
    used_ids: set[str] = set()

    for block_el in page_el.iter():
        if _local(block_el.tag) not in _REGION_TAGS:
            continue
        block_id = _unique_id(block_el.get("ID"), "block", len(regions) + 1, used_ids)
        region = _parse_block(block_el, block_id, tag_labels, width, height)
        if region is not None:
            regions.append(region)
        line_region_id = region.id if region is not None else None
        for line_el in block_el:
            if _local(line_el.tag) != "TextLine":
                continue
            line_id = _unique_id(line_el.get("ID"), "line", len(lines) + 1, used_ids)
            line = _parse_line(line_el, line_id, line_region_id, width, height)
            if line is not None:
                lines.append(line)

    return Page(image_path=image_path, width=width, height=height,
                regions=tuple(regions), lines=tuple(lines))


def read_alto(path) -> Page:
    """Parse an ALTO file; the file stem stands in for a missing image path."""
    path = Path(path)
    page = parse_alto(path.read_bytes())
    if not page.image_path:
        page = Page(image_path=path.stem, width=page.width, height=page.height,
                    regions=page.regions, lines=page.lines)
    return page


def _parse_block(block_el, block_id: str, tag_labels: dict[str, str],
                 width: int, height: int) -> Region | None:
    label = _resolve_label(block_el, block_id, tag_labels)

    polygon = None
    raw_points = _shape_points(block_el, block_id)
    if raw_points is not None:
        clamped, changed = _clamp_points(raw_points, width, height)
        if changed:
            _warn(f"block {block_id!r}: polygon clamped to page bounds")
        try:
            polygon = Polygon(tuple(clamped))
        except MalformedGeometryError:
            _warn(f"block {block_id!r}: polygon degenerate after clamping; keeping box only")
            xs = [p.x for p in clamped]
            ys = [p.y for p in clamped]
            return Region(id=block_id, label=label,
                          box=Box(min(xs), min(ys), max(xs), max(ys)))

    if polygon is not None:
        return Region.from_polygon(block_id, label, polygon)

    rect = _rect_attributes(block_el)
    if rect is not None:
        box, changed = _clamp_box(rect, width, height)
        if changed:
            _warn(f"block {block_id!r}: box clamped to page bounds")
        return Region(id=block_id, label=label, box=box)

    _warn(f"block {block_id!r}: no usable geometry; block skipped")
    return None


def _parse_line(line_el, line_id: str, region_id: str | None,
                width: int, height: int) -> Line | None:
    baseline_attr = line_el.get("BASELINE", "")
    try:
        baseline_points = _parse_points(baseline_attr) if baseline_attr.strip() else []
    except ValueError:
        baseline_points = []
    if len(baseline_points) < 2:
        _warn(f"line {line_id!r}: baseline has fewer than 2 points; line skipped")
        return None
    clamped, changed = _clamp_points(baseline_points, width, height)
    if changed:
        _warn(f"line {line_id!r}: baseline clamped to page bounds")
    baseline = Baseline(tuple(clamped))

    boundary = None
    raw_boundary = _shape_points(line_el, line_id)
    if raw_boundary is not None:
        boundary_points, changed = _clamp_points(raw_boundary, width, height)
        if changed:
            _warn(f"line {line_id!r}: boundary clamped to page bounds")
        try:
            boundary = Polygon(tuple(boundary_points))
        except MalformedGeometryError:
            _warn(f"line {line_id!r}: boundary degenerate; dropped")

    contents = [el.get("CONTENT", "") for el in line_el if _local(el.tag) == "String"]
    text = " ".join(c for c in contents if c) if contents else None

    return Line(id=line_id, baseline=baseline, boundary=boundary,
                region_id=region_id, text=text or None)


def _resolve_label(block_el, block_id: str, tag_labels: dict[str, str]) -> str:
    refs = (block_el.get("TAGREFS") or "").split()
    if not refs:
        _warn(f"block {block_id!r}: no tag reference; labeled {UNKNOWN_LABEL!r}")
        return UNKNOWN_LABEL
    for ref in refs:
        if ref in tag_labels:
            return tag_labels[ref]
    _warn(f"block {block_id!r}: tag reference {refs!r} not found; labeled {UNKNOWN_LABEL!r}")
    return UNKNOWN_LABEL


def _shape_points(element, owner_id: str) -> list[Point] | None:
    for child in element:
        if _local(child.tag) != "Shape":
            continue
        for poly_el in child:
            if _local(poly_el.tag) == "Polygon":
                try:
                    return _parse_points(poly_el.get("POINTS", ""))
                except ValueError as exc:
                    _warn(f"{owner_id!r}: unreadable POINTS ({exc}); shape ignored")
                    return None
    return None


def _rect_attributes(element) -> Box | None:
    values = [element.get(name) for name in ("HPOS", "VPOS", "WIDTH", "HEIGHT")]
    if any(v is None for v in values):
        return None
    try:
        h, v, w, ht = (float(x) for x in values)
    except ValueError:
        return None
    if w < 0 or ht < 0:
        return None
    return Box(h, v, h + w, v + ht)


def _parse_points(text: str) -> list[Point]:
    tokens = [t for t in _POINT_SPLIT.split(text.strip()) if t]
    if len(tokens) % 2 != 0:
        raise ValueError(f"odd number of coordinates ({len(tokens)})")
    values = [float(t) for t in tokens]
    return [Point(x, y) for x, y in zip(values[::2], values[1::2])]


def _required_dimension(page_el, name: str) -> int:
    raw = page_el.get(name)
    if raw is None:
        raise AltoSchemaError(f"Page element is missing {name}")
    try:
        value = int(round(float(raw)))
    except ValueError:
        raise AltoSchemaError(f"Page {name}={raw!r} is not a number") from None
    if value <= 0:
        raise AltoSchemaError(f"Page {name}={raw!r} must be positive")
    return value


def _clamp_points(points: list[Point], width: int, height: int) -> tuple[list[Point], bool]:
    clamped = [Point(min(max(p.x, 0.0), float(width)), min(max(p.y, 0.0), float(height)))
               for p in points]
    return clamped, clamped != points


def _clamp_box(box: Box, width: int, height: int) -> tuple[Box, bool]:
    clamped = Box(
        min(max(box.x_min, 0.0), float(width)),
        min(max(box.y_min, 0.0), float(height)),
        min(max(box.x_max, 0.0), float(width)),
        min(max(box.y_max, 0.0), float(height)),
    )
    return clamped, clamped != box


def _unique_id(candidate: str | None, kind: str, ordinal: int, used: set[str]) -> str:
    base = candidate or f"{kind}_{ordinal:04d}"
    unique = base
    suffix = 1
    while unique in used:
        unique = f"{base}_{suffix}"
        suffix += 1
    used.add(unique)
    return unique


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _iter_local(root, name: str):
    for el in root.iter():
        if _local(el.tag) == name:
            yield el


def _warn(message: str) -> None:
    warnings.warn(message, AltoWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# writing

def write_alto(page: Page) -> str:
    """Serialize a Page as ALTO v4 text.

    Regions become TextBlock elements in page order with their lines nested
    inside; lines without a region go to a final "UnknownZone" block. A line
    referencing a region that is not on the page raises PageIntegrityError.
    """
    region_ids = {r.id for r in page.regions}
    for line in page.lines:
        if line.region_id is not None and line.region_id not in region_ids:
            raise PageIntegrityError(
                f"line {line.id!r} references missing region {line.region_id!r}"
            )

    lines_by_region: dict[str | None, list[Line]] = {}
    for line in page.lines:
        lines_by_region.setdefault(line.region_id, []).append(line)
    unassigned = lines_by_region.get(None, [])

    labels: dict[str, None] = {}
    for region in page.regions:
        labels.setdefault(region.label, None)
    if unassigned:
        labels.setdefault(UNKNOWN_LABEL, None)
    tag_ids = {label: f"BT{i + 1}" for i, label in enumerate(labels)}

    ET.register_namespace("", ALTO_NS)
    root = ET.Element(_q("alto"))
    description = ET.SubElement(root, _q("Description"))
    ET.SubElement(description, _q("MeasurementUnit")).text = "pixel"
    if page.image_path:
        source_info = ET.SubElement(description, _q("sourceImageInformation"))
        ET.SubElement(source_info, _q("fileName")).text = page.image_path
    if tag_ids:
        tags_el = ET.SubElement(root, _q("Tags"))
        for label, tid in tag_ids.items():
            ET.SubElement(tags_el, _q("OtherTag"), ID=tid, LABEL=label)

    layout = ET.SubElement(root, _q("Layout"))
    page_el = ET.SubElement(layout, _q("Page"), ID="page_1", PHYSICAL_IMG_NR="1",
                            WIDTH=str(page.width), HEIGHT=str(page.height))
    space = ET.SubElement(page_el, _q("PrintSpace"), HPOS="0", VPOS="0",
                          WIDTH=str(page.width), HEIGHT=str(page.height))

    for region in page.regions:
        block = _block_element(space, region.id, tag_ids[region.label], region.box,
                               region.polygon)
        for line in lines_by_region.get(region.id, []):
            _append_line(block, line)

    if unassigned:
        fallback_box = _bbox_of_lines(unassigned)
        fallback_id = _unique_id("block_unassigned", "block", 0, set(region_ids))
        block = _block_element(space, fallback_id, tag_ids[UNKNOWN_LABEL], fallback_box, None)
        for line in unassigned:
            _append_line(block, line)

    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def save_alto(page: Page, path) -> None:
    Path(path).write_text(write_alto(page), encoding="utf-8")


def _block_element(parent, block_id: str, tag_id: str, box: Box, polygon: Polygon | None):
    block = ET.SubElement(parent, _q("TextBlock"), ID=block_id, TAGREFS=tag_id,
                          **_rect_attrs(box))
    if polygon is not None:
        shape = ET.SubElement(block, _q("Shape"))
        ET.SubElement(shape, _q("Polygon"), POINTS=_format_points(polygon.points))
    return block


def _append_line(block, line: Line) -> None:
    if line.boundary is not None:
        line_box = bbox_of_polygon(line.boundary)
    else:
        pts = line.baseline.points
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        line_box = Box(min(xs), min(ys), max(xs), max(ys))
    line_el = ET.SubElement(block, _q("TextLine"), ID=line.id,
                            BASELINE=_format_points(line.baseline.points),
                            **_rect_attrs(line_box))
    if line.boundary is not None:
        shape = ET.SubElement(line_el, _q("Shape"))
        ET.SubElement(shape, _q("Polygon"), POINTS=_format_points(line.boundary.points))
    if line.text is not None:
        ET.SubElement(line_el, _q("String"), CONTENT=line.text, **_rect_attrs(line_box))


def _bbox_of_lines(lines: list[Line]) -> Box:
    points: list[Point] = []
    for line in lines:
        points.extend(line.baseline.points)
        if line.boundary is not None:
            points.extend(line.boundary.points)
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    return Box(min(xs), min(ys), max(xs), max(ys))


def _rect_attrs(box: Box) -> dict[str, str]:
    x0, y0 = _ri(box.x_min), _ri(box.y_min)
    x1, y1 = _ri(box.x_max), _ri(box.y_max)
    return {"HPOS": str(x0), "VPOS": str(y0), "WIDTH": str(x1 - x0), "HEIGHT": str(y1 - y0)}


def _format_points(points: Iterable[Point]) -> str:
    return " ".join(f"{_ri(p.x)} {_ri(p.y)}" for p in points)


def _ri(value: float) -> int:
    return int(round(value))


def _q(name: str) -> str:
    return f"{{{ALTO_NS}}}{name}"
