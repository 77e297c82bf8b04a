import numpy as np
import pytest
from conftest import HOOK, LOWER_BOX, P, SQUARE, UPPER_BOX

from core import linalg as la

from core.boundary import (
    BoundaryComponent,
    boundary_components,
    build_boundary,
    canonical_rotation,
    check_zero_composites,
    component_multisets_equal,
    components_equal,
    curve_from_visits,
    decompose_boundary,
    is_closed_curve,
    is_irreducible,
    relation_core,
    spread_boundary_oracle,
)
from core.gridmod import Bigrade, GridModule, Window, direct_sum, random_module, same_rank_profile, spread_module
from core.oracles import enumerate_spreads

W2 = Window(Bigrade(0, 0), Bigrade(1, 1))
W3 = Window(Bigrade(0, 0), Bigrade(2, 2))


def grades(*qs):
    return tuple(Bigrade(*q) for q in qs)


def test_oracle_curves():
    square = spread_boundary_oracle(SQUARE, P)
    assert square.curve == grades((0, 0), (1, 0), (1, 1), (0, 1))
    assert square.monodromy == [[1, P - 1]]
    assert spread_boundary_oracle([(0, 0)], P).curve == grades((0, 0))
    assert spread_boundary_oracle([(0, 0), (1, 0)], P).curve == grades((0, 0), (1, 0))


def test_curve_helpers():
    assert canonical_rotation(grades((1, 0), (1, 1), (0, 0))) == grades((0, 0), (1, 0), (1, 1))
    assert curve_from_visits(grades((0, 0), (0, 0), (0, 0), (0, 0))) == grades((0, 0), (0, 0))
    assert is_closed_curve(grades((0, 0), (1, 0), (1, 1), (0, 1)))
    assert not is_closed_curve(grades((0, 0), (1, 1)))
    assert is_irreducible(grades((0, 0), (1, 0)))
    assert not is_irreducible(grades((0, 0), (1, 0), (0, 0), (1, 0)))


def test_boundary_composites_vanish(alpha_module):
    check_zero_composites(build_boundary(alpha_module))


def test_spreads_have_one_component():
    for spread in enumerate_spreads(W2).spreads:
        found = boundary_components(spread_module(spread, W2, P))
        assert len(found) == 1
        assert components_equal(found[0], spread_boundary_oracle(spread, P))


def test_components_are_additive(square):
    hook = spread_module(HOOK, W2, P)
    found = boundary_components(direct_sum(square, hook))
    expected = boundary_components(square) + boundary_components(hook)
    assert component_multisets_equal(found, expected)


def test_two_bands_with_inverse_monodromies(alpha_module):
    found = boundary_components(alpha_module)
    assert len(found) == 2
    oracle = [spread_boundary_oracle(UPPER_BOX, P).curve, spread_boundary_oracle(LOWER_BOX, P).curve]
    assert sorted(c.curve for c in found) == sorted(oracle)
    constants = sorted(c.monodromy[0][1] for c in found)
    assert constants == [33, 49]
    lambdas = [(P - c) % P for c in constants]
    assert lambdas[0] * lambdas[1] % P == 1


def test_boundary_does_not_determine_the_module(glued_module):
    split = direct_sum(spread_module(UPPER_BOX, W3, P), spread_module(LOWER_BOX, W3, P))
    assert component_multisets_equal(boundary_components(glued_module), boundary_components(split))
    assert not same_rank_profile(glued_module, split)


def test_components_equal_up_to_rotation():
    a = BoundaryComponent(curve=grades((0, 0), (1, 0), (1, 1), (0, 1)), monodromy=[[1, 3]], p=P)
    b = BoundaryComponent(curve=grades((1, 1), (0, 1), (0, 0), (1, 0)), monodromy=[[1, 3]], p=P)
    c = BoundaryComponent(curve=a.curve, monodromy=[[1, 4]], p=P)
    assert components_equal(a, b)
    assert not components_equal(a, c)
    assert component_multisets_equal([a, c], [c, b])
    assert not component_multisets_equal([a], [a, a])


def test_transfer_is_kept_on_request(square):
    found = boundary_components(square, keep_transfer=True)
    assert found[0].transfer is not None
    assert "transfer" in found[0].as_dict()
    assert "transfer" not in boundary_components(square)[0].as_dict()


def test_zero_module_has_no_components():
    zero = GridModule.zero(W3, P)
    assert build_boundary(zero).total_dim == 0
    assert boundary_components(zero) == []


@pytest.mark.slow
def test_spreads_of_a_larger_window_match_the_oracle():
    for spread in enumerate_spreads(W3).spreads:
        found = boundary_components(spread_module(spread, W3, P))
        assert len(found) == 1
        assert components_equal(found[0], spread_boundary_oracle(spread, P))


def test_equal_rank_invariants_different_boundaries():
    upper_v = [(1, 0), (0, 1), (1, 1)]
    first = direct_sum(spread_module(upper_v, W2, P), spread_module([(1, 1)], W2, P))
    second = direct_sum(spread_module([(1, 0), (1, 1)], W2, P), spread_module([(0, 1), (1, 1)], W2, P))
    assert same_rank_profile(first, second)
    assert not component_multisets_equal(boundary_components(first), boundary_components(second))


def test_distinct_spreads_have_distinct_oracle_curves():
    spreads = enumerate_spreads(W3).spreads
    curves = {spread_boundary_oracle(s, P).curve for s in spreads}
    assert len(curves) == len(spreads)


@pytest.mark.slow
def test_spread_multisets_never_collide():
    spreads = enumerate_spreads(W2).spreads
    seen = []
    for i, a in enumerate(spreads):
        for b in spreads[i:]:
            comps = boundary_components(direct_sum(spread_module(a, W2, P), spread_module(b, W2, P)))
            oracle = [spread_boundary_oracle(a, P), spread_boundary_oracle(b, P)]
            assert component_multisets_equal(comps, oracle)
            assert not any(component_multisets_equal(comps, other) for other in seen)
            seen.append(comps)


def test_relation_core_of_a_map():
    diag = np.array([[3, 0], [0, 0]])
    assert relation_core((la.identity(2), diag), P).tolist() == [[3]]
    # the inverse relation {(D b, b)} acts by 1/3 on its core
    assert relation_core((diag, la.identity(2)), P).tolist() == [[34]]
    assert relation_core((la.identity(2), np.array([[0, 1], [0, 0]])), P) is None


@pytest.mark.parametrize("size, seed", [(4, 15), (3, 39), (4, 40)])
def test_bands_that_revisit_vertices(size, seed):
    m = random_module(Window.square(size), seed, P)
    bands = decompose_boundary(build_boundary(m))
    assert any(len({band.dim(v) for v in band.support()}) > 1 for band in bands)
    found = boundary_components(m)
    assert len(found) == len(bands)
    assert all(is_closed_curve(c.curve) and is_irreducible(c.curve) for c in found)
    assert component_multisets_equal(found, boundary_components(m, seed=5))


@pytest.mark.slow
def test_components_of_random_four_by_four_modules():
    for seed in range(60):
        m = random_module(Window.square(4), seed, P)
        found = boundary_components(m)
        assert len(found) == len(decompose_boundary(build_boundary(m)))
        assert all(is_closed_curve(c.curve) and is_irreducible(c.curve) for c in found)
