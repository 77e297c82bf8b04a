import pytest
from conftest import P

from core.betti import (
    BettiTables,
    betti_from_curves,
    betti_from_square_counts,
    euler_defect,
    koszul_betti,
    square_counts,
)
from core.counts import n2
from core.endcurves import births, corner_data, deaths
from core.gridmod import Bigrade, GridModule, Window, evaluate_presentation, random_module

W3 = Window(Bigrade(0, 0), Bigrade(2, 2))


def grades(*qs):
    return [Bigrade(*q) for q in qs]


def test_koszul_betti_of_simple(simple):
    tables = koszul_betti(simple)
    assert tables.b0 == grades((0, 0))
    assert tables.b1 == grades((0, 1), (1, 0))
    assert tables.b2 == grades((1, 1))


def test_koszul_betti_of_square(square):
    tables = koszul_betti(square)
    assert tables.b0 == grades((0, 0))
    assert tables.b1 == grades((0, 2), (2, 0))
    assert tables.b2 == grades((2, 2))


def test_koszul_betti_of_presentation_matches_its_grades(square_presentation):
    m = evaluate_presentation(square_presentation, W3)
    tables = koszul_betti(m)
    assert tables.b0 == grades((0, 0))
    assert Bigrade(2, 0) in tables.b1 and Bigrade(0, 2) in tables.b1


def test_zero_module_has_empty_tables():
    assert koszul_betti(GridModule.zero(W3, P)) == BettiTables()


def test_as_dict():
    tables = BettiTables(b0=grades((0, 0)), b1=[], b2=grades((1, 1)))
    assert tables.as_dict() == {"b0": [[0, 0]], "b1": [], "b2": [[1, 1]]}


@pytest.mark.parametrize("fixture", ["simple", "square"])
def test_curves_give_the_koszul_tables(fixture, request):
    m = request.getfixturevalue(fixture)
    assert betti_from_curves(births(m), deaths(m), corner_data(m)) == koszul_betti(m)


def test_square_counts_examples(simple, square):
    assert square_counts(simple, (0, 0))["d"] == 1
    assert square_counts(simple, (1, 1))["a"] == 1
    at_top = square_counts(square, (1, 1))
    assert at_top["k"] == 1
    assert sum(at_top.counts.values()) == 1
    empty = square_counts(GridModule.zero(W3, P), (1, 1))
    assert not any(empty.counts.values())


def test_square_tallies_give_the_koszul_tables():
    for seed in range(3):
        m = random_module(W3, seed, P)
        tables = koszul_betti(m)
        grid = Window(m.window.lo, m.window.hi.plus((1, 1)))
        for ell in grid.points():
            local = betti_from_square_counts(square_counts(m, ell, seed=seed))
            for degree in range(3):
                assert local[degree] == tables.table(degree).count(ell)


def test_euler_defect_vanishes():
    m = random_module(W3, 2, P)
    assert all(euler_defect(m, q) == 0 for q in Window(W3.lo, W3.hi.plus((1, 1))).points())


@pytest.mark.slow
def test_curves_give_the_koszul_tables_on_random_modules():
    window = Window(Bigrade(0, 0), Bigrade(3, 3))
    for seed in range(500):
        m = random_module(window, seed, P)
        assert betti_from_curves(births(m), deaths(m), corner_data(m)) == koszul_betti(m)


def test_count_is_bounded_by_the_generators():
    for seed in range(8):
        m = random_module(W3, seed, P)
        assert n2(m) <= len(koszul_betti(m).b0)


@pytest.mark.slow
def test_square_tallies_on_larger_modules():
    window = Window(Bigrade(0, 0), Bigrade(3, 3))
    for seed in range(20):
        m = random_module(window, seed, P)
        tables = koszul_betti(m)
        for ell in Window(window.lo, window.hi.plus((1, 1))).points():
            local = betti_from_square_counts(square_counts(m, ell, seed=seed))
            assert [local[d] for d in range(3)] == [tables.table(d).count(ell) for d in range(3)]


@pytest.mark.slow
def test_count_is_bounded_by_the_generators_on_random_modules():
    window = Window(Bigrade(0, 0), Bigrade(3, 3))
    for seed in range(200):
        m = random_module(window, seed, P)
        assert n2(m) <= len(koszul_betti(m).b0)
