import pytest
from conftest import P

from core.boundary import boundary_components
from core.errors import OutputFileError
from core.endcurves import SpreadCurve, births, corner_data, deaths
from core.gridmod import Bigrade, Window, spread_module
from utils.svg_plot import GridSVG, plot_summary, staircase

W3 = Window(Bigrade(0, 0), Bigrade(2, 2))


def test_screen_coordinates_flip_y():
    svg = GridSVG(W3)
    assert svg.to_screen((0, 0)) == (30.0, 110.0)
    assert svg.to_screen((2, 2)) == (110.0, 30.0)
    assert svg.width == svg.height == 140.0


def test_staircase_starts_top_left():
    assert staircase([(1, 0), (0, 0), (0, 1)]) == [Bigrade(0, 1), Bigrade(0, 0), Bigrade(1, 0)]


def test_plot_summary_of_square(square):
    corners = corner_data(square)
    svg = plot_summary(
        square.window, births(square), deaths(square, closed=True), corners.topleft, corners.botright,
        boundary_components(square),
    )
    text = svg.render()
    assert text.startswith("<?xml")
    assert text.count("<polyline") == 2
    assert text.count("stroke-dasharray") == 1
    assert text.count("<path") == 2
    assert text.count("<line") == 4


def test_single_point_curves_are_dots():
    m = spread_module([(1, 1)], W3, P)
    svg = plot_summary(W3, [SpreadCurve.of([(1, 1)])], [], components=boundary_components(m))
    text = svg.render()
    assert "<polyline" not in text
    assert text.count('r="3"') == 1 and text.count('r="4.0"') == 1


def test_save(tmp_path):
    target = tmp_path / "empty.svg"
    GridSVG(W3).save(str(target))
    assert target.read_text(encoding="utf-8").endswith("</svg>\n")


def test_save_into_a_missing_directory(tmp_path):
    with pytest.raises(OutputFileError):
        GridSVG(W3).save(str(tmp_path / "missing" / "empty.svg"))
