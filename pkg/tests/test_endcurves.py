import numpy as np
import pytest
from conftest import HOOK, P, SQUARE

from core.errors import InvalidSpreadError, PreconditionError
from core.endcurves import (
    SpreadCurve,
    births,
    botright,
    coker_x,
    coker_xy,
    coker_y,
    corner_data,
    corner_points,
    corners,
    curve_multiset,
    deaths,
    decompose_ephemeral,
    is_annihilated_by,
    is_ephemeral,
    ker_x,
    ker_xy,
    ker_y,
    presentation_cokerxy,
    presentation_kerxy,
    spread_cokerxy_set,
    spread_kerxy_set,
    topleft,
)
from core.gridmod import (
    Bigrade,
    GridModule,
    Presentation,
    Window,
    direct_sum,
    evaluate_presentation,
    random_module,
    random_presentation,
    same_rank_profile,
    spread_module,
)
from core.linalg import rank
from core.oracles import enumerate_spreads

W3 = Window(Bigrade(0, 0), Bigrade(2, 2))


def curve(points):
    return SpreadCurve.of(points)


def test_spread_curve_must_be_thin():
    with pytest.raises(InvalidSpreadError):
        curve(SQUARE)
    assert curve(HOOK).sorted_points() == sorted(Bigrade(*q) for q in HOOK)


def test_kernels_and_cokernels_of_simple(simple):
    assert same_rank_profile(coker_xy(simple), simple)
    assert ker_xy(simple).support() == {Bigrade(1, 1)}


def test_kernels_and_cokernels_of_square(square):
    assert coker_xy(square).support() == {Bigrade(0, 0), Bigrade(1, 0), Bigrade(0, 1)}
    assert ker_xy(square).support() == {Bigrade(2, 1), Bigrade(1, 2), Bigrade(2, 2)}


def test_cokernel_of_free_module_is_a_hook():
    pr = Presentation(P, ((0, 0),), (), np.zeros((1, 0), dtype=np.int64))
    m = evaluate_presentation(pr, W3)
    assert coker_xy(m).support() == {Bigrade(x, 0) for x in range(3)} | {Bigrade(0, y) for y in range(3)}


def test_exact_sequence_dimensions():
    for seed in range(5):
        m = random_module(W3, seed, P)
        kxy = ker_xy(m)
        for q in kxy.points():
            home = q.minus((1, 1))
            assert kxy.dim(q) + rank(m.xymap(home), P) == m.dim(home)


def test_annihilation_of_kernel_and_cokernel_modules():
    for seed in range(5):
        m = random_module(W3, seed, P)
        assert is_ephemeral(coker_xy(m)) and is_ephemeral(ker_xy(m))
        assert is_annihilated_by(coker_x(m), (1, 0)) and is_annihilated_by(ker_x(m), (1, 0))
        assert is_annihilated_by(coker_y(m), (0, 1)) and is_annihilated_by(ker_y(m), (0, 1))


def test_corner_modules(square, simple):
    assert corner_points(topleft(square)) == [Bigrade(0, 2)]
    assert corner_points(botright(square)) == [Bigrade(2, 0)]
    assert corner_data(simple) == ([Bigrade(0, 1)], [Bigrade(1, 0)])
    pr = Presentation(P, ((0, 0),), (), np.zeros((1, 0), dtype=np.int64))
    free = evaluate_presentation(pr, W3)
    inner = Window(Bigrade(0, 0), Bigrade(1, 1))
    assert all(topleft(free).dim(q.plus((0, 1))) == 0 for q in inner.points())
    assert all(botright(free).dim(q.plus((1, 0))) == 0 for q in inner.points())


def test_corners_only_depend_on_the_cokernel():
    for seed in range(5):
        m = random_module(W3, seed, P)
        c = coker_xy(m)
        assert corner_points(topleft(m)) == corner_points(topleft(c))
        assert corner_points(botright(m)) == corner_points(botright(c))


def test_curve_corners():
    single = corners([(0, 0)])
    assert single.convex == single.concave == {Bigrade(0, 0)}
    assert not single.inner_convex and not single.inner_concave
    hook = corners(HOOK)
    assert hook.convex == {Bigrade(0, 0)}
    assert hook.inner_convex == {Bigrade(0, 0)}
    assert hook.concave == {Bigrade(1, 0), Bigrade(0, 1)}
    assert not hook.inner_concave
    flat = corners([(0, 0), (1, 0)])
    assert flat.convex == {Bigrade(0, 0)} and flat.concave == {Bigrade(1, 0)}
    assert not flat.inner_convex and not flat.inner_concave


def test_births_and_deaths(simple, square):
    assert births(simple) == (curve([(0, 0)]),)
    assert deaths(simple) == (curve([(1, 1)]),)
    assert births(square) == (curve(HOOK),)
    assert deaths(square) == (curve([(2, 1), (1, 2), (2, 2)]),)
    assert deaths(square, closed=True) == (curve([(1, 0), (0, 1), (1, 1)]),)


def test_births_are_additive(square, simple):
    both = direct_sum(square, simple)
    assert births(both) == curve_multiset(births(square) + births(simple))
    assert deaths(both) == curve_multiset(deaths(square) + deaths(simple))


def test_decompose_ephemeral_examples(p):
    assert decompose_ephemeral(GridModule.zero(W3, p)) == ()
    two = direct_sum(spread_module(HOOK, W3, p), spread_module([(1, 1), (2, 1)], W3, p))
    assert decompose_ephemeral(two) == curve_multiset([curve(HOOK), curve([(1, 1), (2, 1)])])


def test_decompose_ephemeral_needs_ephemeral_input(square):
    with pytest.raises(PreconditionError):
        decompose_ephemeral(square)


def test_spread_formulas_match_linear_algebra(p):
    for spread in enumerate_spreads(Window(Bigrade(0, 0), Bigrade(1, 2))).spreads:
        m = spread_module(spread, W3, p)
        assert births(m) == (curve(spread_cokerxy_set(spread)),)
        assert deaths(m) == (curve(spread_kerxy_set(spread)),)


def test_presentation_cokerxy_of_free_module():
    pr = Presentation(P, ((0, 0),), (), np.zeros((1, 0), dtype=np.int64))
    out = presentation_cokerxy(pr)
    assert out.ngens == 1 and out.rel_grades == (Bigrade(1, 1),)
    assert evaluate_presentation(out, W3).support() == coker_xy(evaluate_presentation(pr, W3)).support()
    empty = Presentation(P, (), (), np.zeros((0, 0), dtype=np.int64))
    assert presentation_cokerxy(empty).ngens == 0 and presentation_cokerxy(empty).nrels == 0


def test_presentation_kerxy_of_simple(simple_presentation):
    window = simple_presentation.default_window()
    out = presentation_kerxy(simple_presentation, window)
    m = evaluate_presentation(out, window.translate((1, 1)))
    assert m.support() == {Bigrade(1, 1)}


def test_presentation_kerxy_of_clipped_free_module():
    # xy is injective inside the window; only the clipped top and right edges die
    pr = Presentation(P, ((0, 0),), (), np.zeros((1, 0), dtype=np.int64))
    out = presentation_kerxy(pr, W3)
    dead = {Bigrade(3, 1), Bigrade(3, 2), Bigrade(3, 3), Bigrade(1, 3), Bigrade(2, 3)}
    assert evaluate_presentation(out, W3.translate((1, 1))).support() == dead
    assert ker_xy(evaluate_presentation(pr, W3)).support() == dead


@pytest.mark.slow
def test_presentation_algorithms_match_dense_kernels():
    for seed in range(200):
        pr = random_presentation(2, 3, W3, seed, P)
        m = evaluate_presentation(pr, W3)
        coker = evaluate_presentation(presentation_cokerxy(pr), W3)
        assert same_rank_profile(coker, coker_xy(m))
        ker = evaluate_presentation(presentation_kerxy(pr, W3), W3.translate((1, 1)))
        assert same_rank_profile(ker, ker_xy(m))
        assert presentation_cokerxy(pr).nrels == pr.nrels + pr.ngens


@pytest.mark.slow
def test_births_and_deaths_have_the_same_size():
    for seed in range(100):
        m = random_module(Window(Bigrade(0, 0), Bigrade(3, 3)), seed, P)
        assert len(births(m)) == len(deaths(m))
