import numpy as np
import pytest
from conftest import HOOK, P, SQUARE

from core.errors import (
    ContractViolationError,
    FieldMismatchError,
    InternalInconsistencyError,
    InvalidPresentationError,
    InvalidSpreadError,
)
from core.gridmod import (
    Bigrade,
    GridModule,
    Presentation,
    Window,
    build_module,
    direct_sum,
    dual_presentation,
    dualize,
    evaluate_presentation,
    random_module,
    random_presentation,
    rank_profile,
    same_rank_profile,
    shift,
    spread_module,
)
from core.linalg import rank

W3 = Window(Bigrade(0, 0), Bigrade(2, 2))


def test_spread_module_square(square):
    assert square.support() == frozenset(Bigrade(*q) for q in SQUARE)
    assert square.xmap((0, 0)).tolist() == [[1]]
    assert square.structure_map((0, 0), (1, 1)).tolist() == [[1]]


def test_spread_module_rejects_nonconvex():
    with pytest.raises(InvalidSpreadError):
        spread_module([(0, 0), (1, 0), (0, 2)])


def test_spread_module_rejects_disconnected():
    with pytest.raises(InvalidSpreadError):
        spread_module([(0, 1), (1, 0)])


def test_build_module_rejects_noncommuting_square():
    with pytest.raises(InternalInconsistencyError):
        build_module(
            P,
            Window(Bigrade(0, 0), Bigrade(1, 1)),
            {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
            {(0, 0): [[1]], (0, 1): [[1]]},
            {(0, 0): [[1]], (1, 0): [[2]]},
        )


def test_evaluate_free_module():
    pr = Presentation(P, ((0, 0),), (), np.zeros((1, 0), dtype=np.int64))
    m = evaluate_presentation(pr, W3)
    assert all(m.dim(q) == 1 for q in W3.points())
    assert m.structure_map((0, 0), (2, 2)).tolist() == [[1]]


def test_evaluate_hook():
    pr = Presentation(P, ((0, 0),), ((2, 0), (0, 2), (1, 1)), np.array([[1, 1, 1]]))
    m = evaluate_presentation(pr, W3)
    assert m.support() == frozenset(Bigrade(*q) for q in HOOK)


def test_evaluate_relation_at_generator_grade():
    pr = Presentation(P, ((0, 0), (0, 0)), ((0, 0),), np.array([[1], [1]]))
    m = evaluate_presentation(pr, W3)
    assert all(m.dim(q) == 1 for q in W3.points())


def test_presentation_rejects_incompatible_grades():
    with pytest.raises(InvalidPresentationError):
        Presentation(P, ((1, 1),), ((0, 1),), np.array([[1]]))


def test_dim_at_window_top_is_gens_minus_relation_rank():
    pr = random_presentation(3, 4, W3, seed=4, p=P)
    m = evaluate_presentation(pr, W3)
    assert m.dim(W3.hi) == pr.ngens - rank(pr.mat, P)


def test_shift_examples(square):
    simple = spread_module([(0, 0)], p=P)
    assert shift(simple, (-1, -1)).support() == {Bigrade(1, 1)}
    assert shift(square, (0, 0)).support() == square.support()
    moved = shift(square, (1, 0))
    assert moved.support() == {Bigrade(-1, 0), Bigrade(0, 0), Bigrade(-1, 1), Bigrade(0, 1)}
    assert same_rank_profile(shift(moved, (-1, 0)), square)


def test_direct_sum_adds_dimensions(square):
    simple = spread_module([(0, 0)], p=P)
    both = direct_sum(simple, simple)
    assert both.dim((0, 0)) == 2
    zero = GridModule.zero(square.window, P)
    assert same_rank_profile(direct_sum(square, zero), square)
    hook = spread_module(HOOK, p=P)
    total = direct_sum(square, hook)
    assert [total.dim(q) for q in square.points()] == [
        square.dim(q) + hook.dim(q) for q in square.points()
    ]


def test_direct_sum_field_mismatch():
    with pytest.raises(FieldMismatchError):
        direct_sum(spread_module([(0, 0)], p=2), spread_module([(0, 0)], p=3))


def test_dualize_spread_reflects_support():
    m = spread_module(HOOK, W3, P)
    dual = dualize(m)
    assert dual.support() == {W3.reflect(q) for q in HOOK}
    assert sorted(rank_profile(dual).values()) == sorted(rank_profile(m).values())


def test_dualize_is_an_involution():
    for seed in range(5):
        m = random_module(W3, seed, P)
        assert same_rank_profile(dualize(dualize(m)), m)


def test_dual_presentation_of_simple(simple_presentation):
    window = simple_presentation.default_window()
    dual = dual_presentation(simple_presentation)
    assert dual.ngens == 1
    assert dual.nrels <= simple_presentation.nrels
    assert same_rank_profile(
        evaluate_presentation(dual, window), dualize(evaluate_presentation(simple_presentation, window))
    )


def test_dual_presentation_of_free_module():
    window = Window(Bigrade(0, 0), Bigrade(1, 1))
    pr = Presentation(P, ((0, 0),), (), np.zeros((1, 0), dtype=np.int64))
    dual = dual_presentation(pr, window)
    assert same_rank_profile(evaluate_presentation(dual, window), dualize(evaluate_presentation(pr, window)))


@pytest.mark.slow
def test_dual_presentation_matches_dualize():
    for seed in range(50):
        pr = random_presentation(2, 3, W3, seed, P)
        dual = dual_presentation(pr, W3)
        assert same_rank_profile(evaluate_presentation(dual, W3), dualize(evaluate_presentation(pr, W3)))


def test_random_presentation_is_deterministic():
    a = random_presentation(3, 4, W3, seed=9, p=P)
    b = random_presentation(3, 4, W3, seed=9, p=P)
    assert a.same_as(b)
    free = random_presentation(2, 0, W3, seed=9, p=P)
    assert free.nrels == 0


def test_window_corners_must_be_ordered():
    with pytest.raises(ContractViolationError):
        Window(Bigrade(1, 0), Bigrade(0, 0))
