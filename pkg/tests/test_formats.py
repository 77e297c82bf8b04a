import pytest
from conftest import P, SQUARE

from core.errors import FieldError, FieldMismatchError, InputFileError, InvalidPresentationError, ParseError
from core.gridmod import Bigrade, Window, evaluate_presentation, same_rank_profile, spread_module
from ingest.formats import parse_module, parse_presentation, serialize_module, serialize_presentation
from ingest.loader import detect_format, load_module, read_input

SQUARE_TEXT = """
# k[x,y] / (x^2, y^2)
field p=101
gens
0 0
rels
2 0 : 0:1
0 2 : 0:1   # y^2
"""

MODULE_TEXT = """
field p=7
window 0 0 1 0
dim 0 0 1
dim 1 0 1
xmap 0 0
3
"""


def test_parse_presentation(square_presentation):
    pr = parse_presentation(SQUARE_TEXT)
    assert pr.p == P
    assert pr.gen_grades == (Bigrade(0, 0),)
    assert pr.rel_grades == (Bigrade(2, 0), Bigrade(0, 2))
    assert pr.same_as(square_presentation)


def test_serialized_presentation_parses_back(square_presentation):
    text = serialize_presentation(square_presentation)
    assert text.startswith("field p=101\ngens\n")
    assert parse_presentation(text).same_as(square_presentation)


def test_relation_coefficients_are_reduced():
    pr = parse_presentation("gens\n0 0\n0 0\nrels\n1 0 : 0:1 1:-1 0:2\n", p=5)
    assert pr.mat.tolist() == [[3], [4]]


def test_parse_presentation_errors():
    with pytest.raises(ParseError) as info:
        parse_presentation("gens\n0 0\nrels\n1 0 0:1\n")
    assert info.value.line == 4
    with pytest.raises(ParseError) as info:
        parse_presentation("gens\n0 zero\n")
    assert info.value.line == 2
    with pytest.raises(ParseError):
        parse_presentation("0 0\n")
    with pytest.raises(ParseError):
        parse_presentation("gens\n0 0\nrels\n1 0 : 3:1\n")
    with pytest.raises(ParseError):
        parse_presentation("field q=7\ngens\n")


def test_relation_below_its_generator_is_rejected():
    with pytest.raises(InvalidPresentationError):
        parse_presentation("gens\n1 1\nrels\n0 1 : 0:1\n", p=P)


def test_field_header_rules():
    with pytest.raises(FieldError):
        parse_presentation("field p=91\ngens\n0 0\n")
    with pytest.raises(FieldMismatchError):
        parse_presentation(SQUARE_TEXT, p=7)
    assert parse_presentation("gens\n0 0\n").p == 2


def test_parse_module():
    m = parse_module(MODULE_TEXT)
    assert m.p == 7
    assert m.window == Window(Bigrade(0, 0), Bigrade(1, 0))
    assert m.xmap((0, 0)).tolist() == [[3]]


def test_serialized_module_parses_back():
    m = spread_module(SQUARE, Window(Bigrade(0, 0), Bigrade(2, 2)), P)
    assert same_rank_profile(parse_module(serialize_module(m)), m)


def test_parse_module_errors():
    with pytest.raises(ParseError):
        parse_module("field p=7\ndim 0 0 1\n")
    with pytest.raises(ParseError):
        parse_module("window 0 0 1 0\ndim 0 0 1\ndim 1 0 1\nxmap 0 0\n1 1\n")
    with pytest.raises(ParseError) as info:
        parse_module("window 1 0 0 0\n")
    assert info.value.line == 1
    with pytest.raises(ParseError):
        parse_module("window 0 0 1 0\ndim 0 0 1\nxmap 0 0\n1\n")


def test_detect_format():
    assert detect_format(SQUARE_TEXT) == "presentation"
    assert detect_format(MODULE_TEXT) == "module"
    assert detect_format("simplex 0 @ 0 0\n") == "bifiltration"
    with pytest.raises(ParseError):
        detect_format("# nothing\n")
    with pytest.raises(ParseError):
        detect_format("matrix 1 2\n")


def test_load_module(square_presentation):
    m = load_module(SQUARE_TEXT)
    expected = evaluate_presentation(square_presentation, square_presentation.default_window())
    assert same_rank_profile(m, expected)
    h0 = load_module("simplex 0 @ 0 0\nsimplex 1 @ 1 1\n", p=3)
    assert h0.p == 3 and h0.dim((1, 1)) == 2
    wider = load_module(MODULE_TEXT, window=Window(Bigrade(0, 0), Bigrade(2, 1)))
    assert wider.dim((1, 0)) == 1 and wider.dim((2, 1)) == 0


def test_read_input(tmp_path):
    path = tmp_path / "square.txt"
    path.write_text(SQUARE_TEXT, encoding="utf-8")
    assert read_input(path) == SQUARE_TEXT
    with pytest.raises(InputFileError):
        read_input(tmp_path / "missing.txt")
    broken = tmp_path / "latin1.txt"
    broken.write_bytes("caf\xe9".encode("latin-1"))
    with pytest.raises(InputFileError):
        read_input(broken)
