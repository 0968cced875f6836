"""Normalized detection records and the dataset export around them.

A record is one object on one image, in the text format YOLO-style trainers
consume: ``class cx cy w h`` with an optional trailing confidence, all
coordinates normalized to [0, 1] by image width/height and serialized with
exactly 6 decimal places, one record per line, UTF-8, LF line endings.

``export_dataset`` lays a page collection out as::

    out_dir/
      dataset.yaml          <- manifest (split dirs, class count, names)
      train/ val/ test/
        labels/<stem>.txt   <- one record file per page image
        images.txt          <- image paths of the split, one per line

The manifest schema (``path``/``train``/``val``/``test``/``nc``/``names``)
is the conventional data-YAML read by YOLO-style trainers; it is a
compatible reconstruction, not a copy of any particular trainer's schema.
Split name "dev" is accepted as an alias for "val".
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import yaml

from .alto import LabelMap, Page, Region, collect_label_map
from .errors import (
    DegenerateRegionError,
    ExportError,
    RecordFormatError,
    RecordWarning,
)
from .geometry import Box

MANIFEST_NAME = "dataset.yaml"

_SPLIT_ALIASES = {"train": "train", "val": "val", "dev": "val", "test": "test"}
_SPLIT_ORDER = ("train", "val", "test")


@dataclass(frozen=True)
class DetectionRecord:
    """One detected or ground-truth object in normalized image coordinates."""

    class_index: int
    cx: float
    cy: float
    w: float
    h: float
    confidence: float | None = None

    def __post_init__(self):
        if self.class_index < 0:
            raise ValueError(f"class index must be >= 0, got {self.class_index}")
        for name in ("cx", "cy", "w", "h"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if not (0.0 <= self.cx <= 1.0 and 0.0 <= self.cy <= 1.0):
            raise ValueError(f"center ({self.cx}, {self.cy}) outside [0, 1]")
        if not (0.0 < self.w <= 1.0 and 0.0 < self.h <= 1.0):
            raise ValueError(f"size ({self.w}, {self.h}) outside (0, 1]")
        # Keep the implied box edges inside the unit square; untouched axes
        # keep their exact input values.
        x0, x1 = self.cx - self.w / 2, self.cx + self.w / 2
        if x0 < 0.0 or x1 > 1.0:
            x0, x1 = max(x0, 0.0), min(x1, 1.0)
            if x1 - x0 <= 0.0:
                raise ValueError("record collapses to zero width inside the unit square")
            object.__setattr__(self, "cx", (x0 + x1) / 2)
            object.__setattr__(self, "w", x1 - x0)
        y0, y1 = self.cy - self.h / 2, self.cy + self.h / 2
        if y0 < 0.0 or y1 > 1.0:
            y0, y1 = max(y0, 0.0), min(y1, 1.0)
            if y1 - y0 <= 0.0:
                raise ValueError("record collapses to zero height inside the unit square")
            object.__setattr__(self, "cy", (y0 + y1) / 2)
            object.__setattr__(self, "h", y1 - y0)
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} not in [0, 1]")


def region_to_record(region: Region, page_w: int, page_h: int,
                     label_map: LabelMap) -> DetectionRecord:
    """Normalize a region's box by the page size.

    Boxes sticking out of the page are clamped onto it first (with a
    warning); a box with no area on the page is refused.
    """
    if page_w <= 0 or page_h <= 0:
        raise ValueError(f"page dimensions must be positive, got {page_w}x{page_h}")
    class_index = label_map.index(region.label)
    box = region.box
    clamped = Box(
        min(max(box.x_min, 0.0), float(page_w)),
        min(max(box.y_min, 0.0), float(page_h)),
        min(max(box.x_max, 0.0), float(page_w)),
        min(max(box.y_max, 0.0), float(page_h)),
    )
    if clamped != box:
        warnings.warn(f"region {region.id!r}: box clamped to page before normalization",
                      RecordWarning, stacklevel=2)
    if clamped.area <= 0.0:
        raise DegenerateRegionError(
            f"region {region.id!r} has no area on a {page_w}x{page_h} page"
        )
    return DetectionRecord(
        class_index=class_index,
        cx=(clamped.x_min + clamped.x_max) / (2 * page_w),
        cy=(clamped.y_min + clamped.y_max) / (2 * page_h),
        w=clamped.width / page_w,
        h=clamped.height / page_h,
        confidence=region.confidence,
    )


def record_to_region(record: DetectionRecord, page_w: int, page_h: int,
                     label_map: LabelMap, region_id: str = "det_0001") -> Region:
    """Denormalize a record back into an absolute-coordinate Region.

    The region carries the box's own 4-vertex rectangle as polygon so it
    behaves like any parsed region downstream.
    """
    if page_w <= 0 or page_h <= 0:
        raise ValueError(f"page dimensions must be positive, got {page_w}x{page_h}")
    label = label_map.label(record.class_index)
    x0 = (record.cx - record.w / 2) * page_w
    x1 = (record.cx + record.w / 2) * page_w
    y0 = (record.cy - record.h / 2) * page_h
    y1 = (record.cy + record.h / 2) * page_h
    box = Box(max(x0, 0.0), max(y0, 0.0), min(x1, float(page_w)), min(y1, float(page_h)))
    return Region(id=region_id, label=label, box=box, polygon=box.to_polygon(),
                  confidence=record.confidence)


def records_to_regions(records: Sequence[DetectionRecord], page_w: int, page_h: int,
                       label_map: LabelMap) -> list[Region]:
    """Convert a record file's worth of records; ids follow file order."""
    return [
        record_to_region(rec, page_w, page_h, label_map, region_id=f"det_{i + 1:04d}")
        for i, rec in enumerate(records)
    ]


def format_record(record: DetectionRecord) -> str:
    fields = (f"{record.class_index} {record.cx:.6f} {record.cy:.6f}"
              f" {record.w:.6f} {record.h:.6f}")
    if record.confidence is not None:
        fields += f" {record.confidence:.6f}"
    return fields


def write_records(records: Iterable[DetectionRecord], path) -> None:
    text = "".join(format_record(rec) + "\n" for rec in records)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_records(path) -> list[DetectionRecord]:
    """Read a record file; 5- and 6-field lines are both understood, but one
    file must stick to one width (a per-line-optional confidence is refused).
    """
    path = Path(path)
    records: list[DetectionRecord] = []
    field_count: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (5, 6):
                raise RecordFormatError(path, line_no,
                                        f"expected 5 or 6 fields, got {len(parts)}")
            if field_count is None:
                field_count = len(parts)
            elif len(parts) != field_count:
                raise RecordFormatError(path, line_no,
                                        "mixed 5- and 6-field records in one file")
            try:
                class_index = int(parts[0])
                values = [float(p) for p in parts[1:]]
            except ValueError:
                raise RecordFormatError(path, line_no, f"unparseable field in {line!r}") from None
            confidence = values[4] if len(values) == 5 else None
            try:
                records.append(DetectionRecord(class_index, *values[:4], confidence=confidence))
            except ValueError as exc:
                raise RecordFormatError(path, line_no, str(exc)) from None
    return records


# ---------------------------------------------------------------------------
# dataset export

@dataclass(frozen=True)
class DatasetManifest:
    """What a YOLO-style trainer needs to find the exported dataset."""

    train_dir: str
    val_dir: str
    test_dir: str
    class_names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.class_names)
        if not names:
            raise ValueError("manifest needs at least one class name")
        if len(set(names)) != len(names):
            raise ValueError("duplicate class names in manifest")
        object.__setattr__(self, "class_names", names)

    def label_map(self) -> LabelMap:
        return LabelMap(self.class_names)

    def save(self, path) -> None:
        payload = {
            "path": ".",
            "train": self.train_dir,
            "val": self.val_dir,
            "test": self.test_dir,
            "nc": len(self.class_names),
            "names": list(self.class_names),
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yaml.safe_dump(payload, fh, sort_keys=False)

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        with open(path, "r", encoding="utf-8") as fh:
            payload = yaml.safe_load(fh)
        if not isinstance(payload, dict):
            raise ValueError(f"{path}: manifest is not a mapping")
        try:
            manifest = cls(
                train_dir=str(payload["train"]),
                val_dir=str(payload["val"]),
                test_dir=str(payload["test"]),
                class_names=tuple(str(n) for n in payload["names"]),
            )
        except KeyError as exc:
            raise ValueError(f"{path}: manifest is missing key {exc}") from None
        nc = payload.get("nc")
        if nc is not None and nc != len(manifest.class_names):
            raise ValueError(f"{path}: nc={nc} does not match {len(manifest.class_names)} names")
        return manifest


def export_dataset(pages: Sequence[Page], split_assignment: Mapping[str, str],
                   out_dir) -> DatasetManifest:
    """Write every page's regions as a record file under its split.

    One record per region, one file per page (empty if the page has no
    regions, so negative samples survive), plus per-split image lists and
    the manifest. The class order is first-occurrence order over the pages
    as given.
    """
    seen_paths: set[str] = set()
    for page in pages:
        if page.image_path in seen_paths:
            raise ExportError(f"duplicate page image path {page.image_path!r}")
        seen_paths.add(page.image_path)

    assigned: dict[str, list[Page]] = {name: [] for name in _SPLIT_ORDER}
    for page in pages:
        raw_split = split_assignment.get(page.image_path)
        if raw_split is None:
            raise ExportError(f"page {page.image_path!r} is assigned to no split")
        split = _SPLIT_ALIASES.get(raw_split)
        if split is None:
            raise ExportError(
                f"page {page.image_path!r}: unknown split {raw_split!r} "
                f"(expected train/dev/val/test)"
            )
        assigned[split].append(page)

    label_map = collect_label_map(pages)
    if len(label_map) == 0:
        raise ExportError("no regions anywhere in the input; nothing to train on")

    out_dir = Path(out_dir)
    for split, split_pages in assigned.items():
        labels_dir = out_dir / split / "labels"
        labels_dir.mkdir(parents=True, exist_ok=True)
        stems: set[str] = set()
        for page in split_pages:
            stem = Path(page.image_path).stem
            if stem in stems:
                raise ExportError(
                    f"split {split!r}: two pages share the file stem {stem!r}"
                )
            stems.add(stem)
            records = [region_to_record(r, page.width, page.height, label_map)
                       for r in page.regions]
            write_records(records, labels_dir / f"{stem}.txt")
        with open(out_dir / split / "images.txt", "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(f"{page.image_path}\n" for page in split_pages)

    manifest = DatasetManifest(train_dir="train", val_dir="val", test_dir="test",
                               class_names=label_map.labels)
    manifest.save(out_dir / MANIFEST_NAME)
    return manifest
