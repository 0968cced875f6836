import random
import statistics

import pytest

from layoutkit import LayoutKitWarning, format_stats_delimited, format_stats_table, split_stats

from helpers import make_page, rand_int_box, region_from_bounds


def _region(rid, label, bounds):
    return region_from_bounds(rid, label, bounds, with_polygon=False)


def test_single_region_percentages():
    page = make_page("a", 100, 100, regions=[_region("r1", "MainZone", (0, 0, 10, 10))])
    row, = split_stats({"train": [page]})
    assert row.label == "MainZone"
    assert row.counts == {"train": 1}
    assert row.total == 1
    assert row.mean_area_pct == 1.0
    assert row.median_area_pct == 1.0


def test_mean_and_median_diverge():
    # 1% and 3% of the page: mean 2, lower-middle median 1
    page = make_page("a", 100, 100, regions=[
        _region("r1", "MainZone", (0, 0, 10, 10)),
        _region("r2", "MainZone", (20, 0, 50, 10)),
    ])
    row, = split_stats({"train": [page]})
    assert row.mean_area_pct == pytest.approx(2.0)
    assert row.median_area_pct == pytest.approx(1.0)


def test_median_is_lower_middle_for_even_counts():
    areas = [(0, 0, 10, 10), (0, 0, 10, 20), (0, 0, 10, 30), (0, 0, 10, 40)]
    page = make_page("a", 100, 100,
                     regions=[_region(f"r{i}", "Z", b) for i, b in enumerate(areas)])
    row, = split_stats({"train": [page]})
    assert row.median_area_pct == pytest.approx(2.0)  # sorted 1,2,3,4 -> element 2


def test_counts_split_by_name_and_total():
    train = make_page("t", 100, 100, regions=[_region("r1", "A", (0, 0, 10, 10)),
                                              _region("r2", "B", (0, 0, 20, 20))])
    val = make_page("v", 100, 100, regions=[_region("r1", "A", (0, 0, 30, 30))])
    rows = split_stats({"train": [train], "val": [val]})
    by_label = {row.label: row for row in rows}
    assert by_label["A"].counts == {"train": 1, "val": 1}
    assert by_label["B"].counts == {"train": 1, "val": 0}
    assert by_label["A"].total == 2


def test_rows_sorted_by_total_then_label():
    pages = [make_page("a", 100, 100, regions=[
        _region("r1", "Rare", (0, 0, 10, 10)),
        _region("r2", "Common", (0, 0, 10, 10)),
        _region("r3", "Common", (20, 0, 30, 10)),
        _region("r4", "Also", (40, 0, 50, 10)),
    ])]
    rows = split_stats({"train": pages})
    assert [row.label for row in rows] == ["Common", "Also", "Rare"]


def test_zero_area_page_is_skipped_with_warning():
    good = make_page("good", 100, 100, regions=[_region("r1", "A", (0, 0, 10, 10))])

    class FakePage:
        width = 100
        height = 0
        regions = good.regions
        image_path = "degenerate"

    with pytest.warns(LayoutKitWarning):
        rows = split_stats({"train": [good, FakePage()]})
    row, = rows
    assert row.total == 1


def test_random_dataset_matches_direct_recount():
    rng = random.Random(501)
    labels = ["MainZone", "MarginTextZone", "DropCapitalZone", "GraphicZone"]
    splits = {}
    for name in ("train", "val", "test"):
        pages = []
        for i in range(rng.randint(2, 6)):
            w, h = rng.randint(200, 1000), rng.randint(200, 1000)
            regions = [_region(f"r{k}", rng.choice(labels), rand_int_box(rng, w, h))
                       for k in range(rng.randint(0, 8))]
            pages.append(make_page(f"{name}_{i}", w, h, regions=regions))
        splits[name] = pages

    rows = split_stats(splits)

    per_label_counts = {}
    per_label_areas = {}
    for name, pages in splits.items():
        for page in pages:
            page_area = page.width * page.height
            for region in page.regions:
                per_label_counts.setdefault(region.label, {s: 0 for s in splits})
                per_label_counts[region.label][name] += 1
                per_label_areas.setdefault(region.label, []).append(
                    region.box.area / page_area * 100.0)

    assert {row.label for row in rows} == set(per_label_counts)
    for row in rows:
        assert row.counts == per_label_counts[row.label]
        assert row.total == sum(per_label_counts[row.label].values())
        areas = per_label_areas[row.label]
        assert row.mean_area_pct == pytest.approx(statistics.fmean(areas))
        assert row.median_area_pct == pytest.approx(sorted(areas)[(len(areas) - 1) // 2])
        assert 0.0 < row.mean_area_pct <= 100.0

    totals = [row.total for row in rows]
    assert totals == sorted(totals, reverse=True)


def _sample_rows():
    page_a = make_page("a", 100, 100, regions=[_region("r1", "MainZone", (0, 0, 50, 50)),
                                               _region("r2", "MarginTextZone", (0, 0, 10, 10))])
    page_b = make_page("b", 100, 100, regions=[_region("r1", "MainZone", (0, 0, 30, 30))])
    return split_stats({"train": [page_a], "val": [page_b]})


def test_table_layout():
    text = format_stats_table(_sample_rows())
    lines = text.strip().splitlines()
    assert lines[0].split() == ["class", "train", "val", "total", "avg%", "median%"]
    assert set(lines[1]) == {"-"}
    main = next(line for line in lines if line.startswith("MainZone"))
    assert main.split() == ["MainZone", "1", "1", "2", "17.00", "9.00"]


def test_delimited_output():
    text = format_stats_delimited(_sample_rows())
    lines = text.strip().splitlines()
    assert lines[0] == "class,train,val,total,avg_area_pct,median_area_pct"
    assert "MainZone,1,1,2,17.00,9.00" in lines


def test_formatters_accept_explicit_split_order():
    rows = _sample_rows()
    text = format_stats_delimited(rows, splits=["val", "train"])
    assert text.splitlines()[0] == "class,val,train,total,avg_area_pct,median_area_pct"
    assert "MainZone,1,1,2,17.00,9.00" in text
