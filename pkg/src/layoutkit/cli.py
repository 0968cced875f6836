"""Command-line pipeline: convert, inject, eval, stats.

Every subcommand is deterministic for identical inputs and flags; the one
place randomness exists (ratio-based splitting in ``convert``) demands an
explicit seed. Warnings go to stderr and never affect the exit code; exit
code 0 means no errors.
"""

from __future__ import annotations

import random
from pathlib import Path

import click

from .alto import LabelMap, Page, Region, read_alto, save_alto
from .dispatch import inject as inject_page
from .errors import EvaluationError, ExportError, LayoutKitError, UnknownClassError
from .metrics import evaluate, format_kv, format_table
from .records import (
    MANIFEST_NAME,
    DatasetManifest,
    export_dataset,
    read_records,
    record_to_region,
    records_to_regions,
)
from .stats import format_stats_delimited, format_stats_table, split_stats

_SPLITS = ("train", "val", "test")


@click.group()
def main():
    """Layout dataset plumbing: ALTO pages to detection records and back."""


# ---------------------------------------------------------------------------
# convert

@main.command()
@click.argument("inputs", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
@click.option("-o", "--out-dir", required=True, type=click.Path(path_type=Path),
              help="Dataset output directory.")
@click.option("--ratios", default=None, metavar="TRAIN/DEV/TEST",
              help="Random split proportions, e.g. 8/1/1; requires --seed.")
@click.option("--seed", type=int, default=None,
              help="Seed for the ratio-based split.")
@click.option("--train-list", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="File listing pages (paths or stems) for the train split.")
@click.option("--dev-list", "--val-list", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="File listing pages for the dev/val split.")
@click.option("--test-list", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="File listing pages for the test split.")
@click.option("--skip-bad", is_flag=True,
              help="Skip unparseable ALTO files instead of failing.")
def convert(inputs, out_dir, ratios, seed, train_list, dev_list, test_list, skip_bad):
    """Convert ALTO files or directories into a record dataset."""
    files = _gather_alto_files(inputs)
    if not files:
        raise click.ClickException("no ALTO files found in the given inputs")

    pages: list[tuple[Path, Page]] = []
    failures: list[str] = []
    for path in files:
        try:
            pages.append((path, read_alto(path)))
        except LayoutKitError as exc:
            failures.append(f"{path}: {exc}")
    if failures and not skip_bad:
        raise click.ClickException(
            "failed to parse {} file(s):\n  {}".format(len(failures), "\n  ".join(failures))
        )
    for failure in failures:
        click.echo(f"skipped {failure}", err=True)
    if not pages:
        raise click.ClickException("every input file failed to parse")

    lists = {"train": train_list, "val": dev_list, "test": test_list}
    if ratios is not None and any(lists.values()):
        raise click.UsageError("use either --ratios or explicit split lists, not both")
    if ratios is not None:
        if seed is None:
            raise click.UsageError("--ratios requires --seed for a reproducible split")
        assignment = _ratio_assignment(pages, ratios, seed)
    elif any(lists.values()):
        assignment = _list_assignment(pages, lists)
    else:
        raise click.UsageError("provide --ratios with --seed, or explicit split lists")

    try:
        export_dataset([page for _, page in pages], assignment, out_dir)
    except LayoutKitError as exc:
        raise click.ClickException(str(exc))

    click.echo(f"manifest: {Path(out_dir) / MANIFEST_NAME}")
    for split in _SPLITS:
        count = sum(1 for v in assignment.values() if v == split)
        click.echo(f"{split}: {count} page(s)")


def _gather_alto_files(inputs) -> list[Path]:
    files: list[Path] = []
    for path in inputs:
        if path.is_dir():
            files.extend(sorted(path.glob("*.xml")))
        else:
            files.append(path)
    unique: dict[Path, None] = {}
    for f in files:
        unique.setdefault(f, None)
    return list(unique)


def _ratio_assignment(pages, ratios: str, seed: int) -> dict[str, str]:
    parts = ratios.split("/")
    if len(parts) != 3:
        raise click.UsageError(f"--ratios wants TRAIN/DEV/TEST, got {ratios!r}")
    try:
        weights = [float(p) for p in parts]
    except ValueError:
        raise click.UsageError(f"--ratios wants numbers, got {ratios!r}")
    if any(w < 0 for w in weights) or sum(weights) <= 0:
        raise click.UsageError("--ratios must be non-negative and not all zero")

    ordered = sorted(pages, key=lambda item: str(item[0]))
    shuffled = list(ordered)
    random.Random(seed).shuffle(shuffled)

    n = len(shuffled)
    total = sum(weights)
    exact = [n * w / total for w in weights]
    counts = [int(e) for e in exact]
    for _ in range(n - sum(counts)):
        # hand leftovers to the largest fractional remainders, split order on ties
        best = max(range(3), key=lambda i: (exact[i] - counts[i], -i))
        counts[best] += 1

    assignment: dict[str, str] = {}
    cursor = 0
    for split, count in zip(_SPLITS, counts):
        for _, page in shuffled[cursor:cursor + count]:
            assignment[page.image_path] = split
        cursor += count
    return assignment


def _list_assignment(pages, lists: dict[str, Path | None]) -> dict[str, str]:
    stem_to_split: dict[str, str] = {}
    for split, list_path in lists.items():
        if list_path is None:
            continue
        for raw in list_path.read_text(encoding="utf-8").splitlines():
            entry = raw.strip()
            if not entry:
                continue
            stem = Path(entry).stem
            if stem_to_split.get(stem, split) != split:
                raise click.ClickException(
                    f"{entry!r} appears in both {stem_to_split[stem]} and {split} lists"
                )
            stem_to_split[stem] = split
    assignment: dict[str, str] = {}
    for path, page in pages:
        split = stem_to_split.get(path.stem)
        if split is not None:
            assignment[page.image_path] = split
    return assignment


# ---------------------------------------------------------------------------
# inject

@main.command()
@click.argument("alto_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("predictions", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--labels", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Class names: one label per line, or a dataset.yaml manifest.")
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="Output ALTO path.")
@click.option("--keep-regions", is_flag=True,
              help="Keep the page's own regions next to the injected ones.")
def inject(alto_path, predictions, labels, out, keep_regions):
    """Place a record file's detections onto an ALTO page."""
    label_map = _load_label_map(labels)
    try:
        page = read_alto(alto_path)
    except LayoutKitError as exc:
        raise click.ClickException(f"{alto_path}: {exc}")
    try:
        records = read_records(predictions)
    except LayoutKitError as exc:
        raise click.ClickException(str(exc))

    regions: list[Region] = []
    for i, record in enumerate(records):
        try:
            regions.append(record_to_region(record, page.width, page.height,
                                            label_map, region_id=f"det_{i + 1:04d}"))
        except UnknownClassError as exc:
            raise click.ClickException(
                f"{predictions}:{_nth_record_line(predictions, i)}: {exc}"
            )

    result = inject_page(page, regions, keep_existing=keep_regions)
    save_alto(result, out)
    assigned = sum(1 for line in result.lines if line.region_id is not None)
    click.echo(f"{out}: {assigned} line(s) assigned, {len(result.lines) - assigned} unassigned")


def _nth_record_line(path: Path, index: int) -> int:
    seen = -1
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if raw.strip():
                seen += 1
                if seen == index:
                    return line_no
    return index + 1


def _load_label_map(path: Path) -> LabelMap:
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            return DatasetManifest.load(path).label_map()
        return LabelMap.load(path)
    except (ValueError, LayoutKitError) as exc:
        raise click.ClickException(f"{path}: {exc}")


# ---------------------------------------------------------------------------
# eval

@main.command(name="eval")
@click.argument("pred_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("gt_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--iou", default=0.5, show_default=True, help="IoU matching threshold.")
@click.option("--format", "fmt", type=click.Choice(["table", "kv"]), default="table",
              show_default=True, help="Report style.")
@click.option("--pred-kind", type=click.Choice(["auto", "alto", "records"]), default="auto",
              show_default=True, help="Force the prediction input kind.")
@click.option("--gt-kind", type=click.Choice(["auto", "alto", "records"]), default="auto",
              show_default=True, help="Force the ground-truth input kind.")
@click.option("--labels", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Label map; required whenever record files are read.")
def eval_cmd(pred_dir, gt_dir, iou, fmt, pred_kind, gt_kind, labels):
    """Score a prediction directory against a ground-truth directory.

    Directories pair up by file stem. ALTO (.xml) and record (.txt) inputs
    are told apart by extension; a ground-truth stem with no prediction
    file counts as an image with zero predictions.
    """
    gt_files, gt_kind = _detect_kind(gt_dir, gt_kind, "--gt-kind")
    if not gt_files:
        raise click.ClickException(f"no .xml or .txt files in ground-truth dir {gt_dir}")
    pred_files, pred_kind = _detect_kind(pred_dir, pred_kind, "--pred-kind")

    label_map = _load_label_map(labels) if labels is not None else None
    reads_records = (gt_kind == "records" and gt_files) or (pred_kind == "records" and pred_files)
    if reads_records and label_map is None:
        raise click.ClickException("--labels is required when reading record files")

    gt_raw = _load_side(gt_files, gt_kind)
    pred_raw = _load_side(pred_files, pred_kind)
    extra = sorted(set(pred_raw) - set(gt_raw))
    if extra:
        raise click.ClickException(
            f"prediction stems with no ground truth: {', '.join(extra)}"
        )

    gts: dict[str, list[Region]] = {}
    preds: dict[str, list[Region]] = {}
    for stem, gt_value in gt_raw.items():
        pred_value = pred_raw.get(stem)
        width, height = _stem_dims(gt_value, pred_value)
        gts[stem] = _as_regions(gt_value, width, height, label_map, gt_files[stem])
        if pred_value is None:
            preds[stem] = []
        else:
            preds[stem] = _as_regions(pred_value, width, height, label_map, pred_files[stem])

    try:
        report = evaluate(preds, gts, iou_thr=iou)
    except (EvaluationError, ValueError) as exc:
        raise click.ClickException(str(exc))
    click.echo(format_table(report) if fmt == "table" else format_kv(report), nl=False)


def _detect_kind(directory: Path, kind: str, flag: str) -> tuple[dict[str, Path], str]:
    xmls = sorted(directory.glob("*.xml"))
    txts = sorted(directory.glob("*.txt"))
    if kind == "auto":
        if xmls and txts:
            raise click.ClickException(
                f"{directory} mixes .xml and .txt files; disambiguate with {flag}"
            )
        kind = "alto" if xmls else "records"
    files = xmls if kind == "alto" else txts
    return {f.stem: f for f in files}, kind


def _load_side(files: dict[str, Path], kind: str) -> dict[str, object]:
    loaded: dict[str, object] = {}
    for stem, path in files.items():
        try:
            loaded[stem] = read_alto(path) if kind == "alto" else read_records(path)
        except LayoutKitError as exc:
            raise click.ClickException(f"{path}: {exc}")
    return loaded


def _stem_dims(gt_value, pred_value) -> tuple[int, int]:
    # Records are normalized; borrow pixel dims from whichever side is ALTO.
    # With records on both sides the unit square works: IoU is unchanged by
    # axis-aligned scaling.
    for value in (gt_value, pred_value):
        if isinstance(value, Page):
            return value.width, value.height
    return 1, 1


def _as_regions(value, width: int, height: int, label_map, path: Path) -> list[Region]:
    if isinstance(value, Page):
        return list(value.regions)
    try:
        return records_to_regions(value, width, height, label_map)
    except UnknownClassError as exc:
        raise click.ClickException(f"{path}: {exc}")


# ---------------------------------------------------------------------------
# stats

@main.command()
@click.option("--split", "split_specs", multiple=True, required=True, metavar="NAME=DIR",
              help="A split name and its ALTO directory; repeatable.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table",
              show_default=True, help="Output style.")
def stats(split_specs, fmt):
    """Per-class instance counts and region areas across splits."""
    pages_by_split: dict[str, list[Page]] = {}
    for spec in split_specs:
        name, sep, raw_dir = spec.partition("=")
        if not sep or not name or not raw_dir:
            raise click.UsageError(f"--split wants NAME=DIR, got {spec!r}")
        if name in pages_by_split:
            raise click.UsageError(f"split {name!r} given twice")
        directory = Path(raw_dir)
        if not directory.is_dir():
            raise click.ClickException(f"{directory} is not a directory")
        pages = []
        for path in sorted(directory.glob("*.xml")):
            try:
                pages.append(read_alto(path))
            except LayoutKitError as exc:
                raise click.ClickException(f"{path}: {exc}")
        pages_by_split[name] = pages

    if not any(pages_by_split.values()):
        raise click.ClickException("no ALTO files found in any split directory")

    rows = split_stats(pages_by_split)
    splits = list(pages_by_split)
    text = (format_stats_table(rows, splits) if fmt == "table"
            else format_stats_delimited(rows, splits))
    click.echo(text, nl=False)


if __name__ == "__main__":
    main()
