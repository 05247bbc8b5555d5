"""
Tests for the SVG line plots.
"""
from newton_maximal.svg import line_plot
from tests.helpers.svg_utils import get_polylines, get_texts, load_svg


def test_one_polyline_per_series(tmp_path):
    path = line_plot(
        {"W": ([1, 2, 4, 8], [1.0, 0.5, 0.25, 0.125]), "bound": ([1, 8], [2.0, 0.25])},
        tmp_path / "plots" / "levels.svg", "Level decay", "N", "W",
    )
    root = load_svg(path)
    lines = get_polylines(root)
    assert [len(points) for points in lines] == [4, 2]
    texts = get_texts(root)
    assert texts[0] == "Level decay"
    assert {"N", "W", "bound"} <= set(texts)


def test_log_axes_drop_nonpositive(tmp_path):
    path = line_plot({"curve": ([0.0, 1.0, 10.0, 100.0], [1.0, 0.0, 2.0, 3.0])}, tmp_path / "a.svg", "t", "x", "y")
    (points,) = get_polylines(load_svg(path))
    assert len(points) == 2


def test_linear_axes_keep_zero(tmp_path):
    path = line_plot({"curve": ([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])}, tmp_path / "a.svg", "t", "x", "y",
                     log_x=False, log_y=False)
    (points,) = get_polylines(load_svg(path))
    assert len(points) == 3
    xs = [x for x, _ in points]
    assert xs == sorted(xs)


def test_empty_plot(tmp_path):
    path = line_plot({"curve": ([1.0], [-1.0])}, tmp_path / "a.svg", "t", "x", "y")
    root = load_svg(path)
    assert get_polylines(root) == []
    assert "no data" in get_texts(root)
