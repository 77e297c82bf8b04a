import pytest
from conftest import P

from core.counts import n2
from core.errors import ContractViolationError
from core.gridmod import Bigrade, Window, random_module, spread_module
from core.oneparam import (
    LineModule,
    bar_count,
    barcode,
    diagonal_path,
    interval_module,
    line_module,
    slice_module,
)


def test_bar_count_examples():
    assert bar_count(interval_module([(0, 3)], P)) == 1
    assert bar_count(LineModule(P, 0, 0, {})) == 0
    assert bar_count(interval_module([(0, 2), (1, 4)], P)) == 2


def test_barcode_examples():
    assert barcode(interval_module([(0, 3)], P)) == [(0, 3)]
    assert barcode(LineModule(P, 0, 0, {})) == []
    a = line_module(P, [1, 2, 1], [[[1], [0]], [[1, 0]]])
    assert barcode(a) == [(0, 3), (1, 2)]
    b = line_module(P, [1, 2, 1], [[[1], [0]], [[0, 1]]])
    assert barcode(b) == [(0, 2), (1, 3)]


def test_bar_count_is_number_of_bars():
    for bars in ([(0, 1)], [(0, 2), (0, 2), (1, 3)], [(2, 5), (0, 1), (1, 4)]):
        a = interval_module(bars, P)
        assert sorted(barcode(a)) == sorted(bars)
        assert bar_count(a) == len(bars)


def test_diagonal_slice_through_square(square):
    line = slice_module(square, diagonal_path(square))
    assert barcode(line) == [(0, 2)]


def test_horizontal_slice_uses_xmaps(square):
    line = slice_module(square, [(0, 0), (1, 0)])
    assert line.zmap(0).tolist() == square.xmap((0, 0)).tolist()


def test_slice_missing_the_support(square):
    m = spread_module([(0, 0)], Window(Bigrade(0, 0), Bigrade(2, 2)), P)
    assert bar_count(slice_module(m, [(1, 1), (2, 2)])) == 0


def test_slice_rejects_bad_paths(square):
    with pytest.raises(ContractViolationError):
        slice_module(square, [(1, 0), (0, 1)])
    with pytest.raises(ContractViolationError):
        slice_module(square, [(0, 0), (5, 5)])


@pytest.mark.slow
def test_slices_never_have_more_bars_than_the_count():
    window = Window(Bigrade(0, 0), Bigrade(3, 3))
    for seed in range(100):
        m = random_module(window, seed, P)
        count = n2(m)
        for path in ([(0, 0), (1, 0), (1, 2), (3, 3)], [(0, 1), (2, 1), (2, 3)], diagonal_path(m)):
            assert bar_count(slice_module(m, path)) <= count
