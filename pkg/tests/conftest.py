import numpy as np
import pytest

from core.gridmod import Bigrade, Presentation, Window, build_module, spread_module

P = 101
ALPHA = 3

SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]
HOOK = [(0, 0), (1, 0), (0, 1)]
UPPER_BOX = [(0, 1), (1, 1), (0, 2), (1, 2)]
LOWER_BOX = [(1, 0), (2, 0), (1, 1), (2, 1)]


def two_lines_module(top_left_y, top_left_x, p: int = P):
    """
    Dimension 2 at (1,1) and 1 on the six grades around it; the other maps are
    shared, these two decide how the upper-left corner is glued in.
    """
    dims = {(0, 1): 1, (1, 0): 1, (0, 2): 1, (2, 0): 1, (2, 1): 1, (1, 2): 1, (1, 1): 2}
    xmaps = {
        (0, 1): [[1], [0]],
        (1, 0): [[1]],
        (1, 1): [[1, p - 1]],
        (0, 2): top_left_x,
    }
    ymaps = {
        (1, 0): [[0], [1]],
        (0, 1): [[1]],
        (2, 0): [[p - 1]],
        (1, 1): top_left_y,
    }
    return build_module(p, Window(Bigrade(0, 0), Bigrade(2, 2)), dims, xmaps, ymaps)


@pytest.fixture
def p():
    return P


@pytest.fixture
def square(p):
    return spread_module(SQUARE, p=p)


@pytest.fixture
def simple(p):
    return spread_module([(0, 0)], Window(Bigrade(0, 0), Bigrade(2, 2)), p)


@pytest.fixture
def alpha_module(p):
    """Two lines in k^2 meeting a third line of slope alpha: two bands with inverse monodromies."""
    return two_lines_module([[ALPHA, p - 1]], [[ALPHA]], p)


@pytest.fixture
def glued_module(p):
    """Indecomposable, yet its boundary is that of k_UPPER_BOX + k_LOWER_BOX."""
    return two_lines_module([[1, 0]], [[1]], p)


@pytest.fixture
def square_presentation(p):
    return Presentation(p, ((0, 0),), ((2, 0), (0, 2)), np.array([[1, 1]]))


@pytest.fixture
def simple_presentation(p):
    return Presentation(p, ((0, 0),), ((1, 0), (0, 1)), np.array([[1, 1]]))
