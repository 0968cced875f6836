"""Layout analysis plumbing for historical-document pipelines.

ALTO pages in, normalized detection records out (and back), baseline-
midpoint line dispatch, and detection-style evaluation (AP/mAP at an IoU
threshold). See the README for the pipeline walk-through.
"""

from .alto import (
    UNKNOWN_LABEL,
    LabelMap,
    Line,
    Page,
    Region,
    collect_label_map,
    parse_alto,
    read_alto,
    save_alto,
    write_alto,
)
from .dispatch import assign_lines, inject
from .errors import (
    AltoParseError,
    AltoSchemaError,
    AltoWarning,
    DegenerateBaselineError,
    DegenerateRegionError,
    DispatchWarning,
    EvaluationError,
    ExportError,
    LayoutKitError,
    LayoutKitWarning,
    MalformedGeometryError,
    PageIntegrityError,
    RecordFormatError,
    RecordWarning,
    UnknownClassError,
)
from .geometry import (
    Baseline,
    Box,
    Point,
    Polygon,
    baseline_midpoint,
    bbox_of_polygon,
    iou,
    point_in_box,
    point_in_polygon,
)
from .metrics import (
    ClassCounts,
    EvalReport,
    MatchResult,
    PredictionMatch,
    average_precision,
    evaluate,
    format_kv,
    format_table,
    match,
)
from .records import (
    MANIFEST_NAME,
    DatasetManifest,
    DetectionRecord,
    export_dataset,
    format_record,
    read_records,
    record_to_region,
    records_to_regions,
    region_to_record,
    write_records,
)
from .stats import (
    ClassSplitStats,
    format_stats_delimited,
    format_stats_table,
    split_stats,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # geometry
    "Point", "Polygon", "Box", "Baseline",
    "bbox_of_polygon", "iou", "baseline_midpoint", "point_in_polygon", "point_in_box",
    # alto
    "Page", "Region", "Line", "LabelMap", "UNKNOWN_LABEL",
    "parse_alto", "read_alto", "write_alto", "save_alto", "collect_label_map",
    # records
    "DetectionRecord", "DatasetManifest", "MANIFEST_NAME",
    "region_to_record", "record_to_region", "records_to_regions",
    "format_record", "read_records", "write_records", "export_dataset",
    # dispatch
    "assign_lines", "inject",
    # metrics
    "PredictionMatch", "MatchResult", "ClassCounts", "EvalReport",
    "match", "average_precision", "evaluate", "format_table", "format_kv",
    # stats
    "ClassSplitStats", "split_stats", "format_stats_table", "format_stats_delimited",
    # errors
    "LayoutKitError", "MalformedGeometryError", "DegenerateBaselineError",
    "AltoParseError", "AltoSchemaError", "PageIntegrityError", "UnknownClassError",
    "DegenerateRegionError", "RecordFormatError", "ExportError", "EvaluationError",
    "LayoutKitWarning", "AltoWarning", "RecordWarning", "DispatchWarning",
]
