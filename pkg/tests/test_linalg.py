import numpy as np
import pytest
from pydantic import ValidationError

from core import linalg as la
from core.errors import ContractViolationError, FieldError


def test_rank_examples():
    assert la.rank(la.zeros(0, 0), 2) == 0
    assert la.rank(la.identity(2), 2) == 2
    assert la.rank(np.array([[1, 1], [1, 1]]), 2) == 1


def test_rank_depends_on_the_field():
    m = np.array([[1, 1], [1, 3]])
    assert la.rank(m, 2) == 1
    assert la.rank(m, 5) == 2


def test_kernel_basis_examples():
    assert la.kernel_basis(la.identity(3), 2).shape == (3, 0)
    assert np.array_equal(la.kernel_basis(la.zeros(2, 3), 2), la.identity(3))
    assert la.kernel_basis(np.array([[1, 1]]), 2).tolist() == [[1], [1]]


def test_rank_nullity_and_annihilation():
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = la.random_matrix(rng, int(rng.integers(1, 6)), int(rng.integers(1, 6)), 7)
        ker = la.kernel_basis(m, 7)
        assert la.rank(m, 7) + ker.shape[1] == m.shape[1]
        assert not la.matmul(m, ker, p=7).any()


def test_sylvester_inequality():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = la.random_matrix(rng, 3, 4, 3)
        b = la.random_matrix(rng, 4, 3, 3)
        assert la.rank(la.matmul(a, b, p=3), 3) >= la.rank(a, 3) + la.rank(b, 3) - 4


def test_solve_membership():
    target = np.array([[1, 2], [0, 1]])
    assert np.array_equal(la.solve_membership(la.identity(2), target, 5), target)
    assert not la.solve_membership(la.zeros(2, 2), la.zeros(2, 1), 5).any()
    assert la.solve_membership(np.array([[1], [1]]), np.array([[1], [0]]), 2) is None


def test_solve_membership_rejects_row_mismatch():
    with pytest.raises(ContractViolationError):
        la.solve_membership(la.identity(2), la.zeros(3, 1), 2)


def test_inverse_and_singular():
    m = np.array([[2, 1], [1, 1]])
    inv = la.inverse(m, 7)
    assert np.array_equal(la.matmul(m, inv, p=7), la.identity(2))
    with pytest.raises(ContractViolationError):
        la.inverse(np.array([[1, 1], [1, 1]]), 7)


def test_quotient_map_is_a_retraction():
    span = np.array([[1], [2], [0]])
    quot, sec = la.quotient_map(span, 3, 5)
    assert quot.shape == (2, 3)
    assert np.array_equal(la.matmul(quot, sec, p=5), la.identity(2))
    assert not la.matmul(quot, span, p=5).any()


def test_charpoly_and_invariant_factors():
    assert la.charpoly(np.array([[2, 0], [0, 3]]), 7) == [1, 2, 6]
    assert la.invariant_factors(la.identity(2), 5) == [[1, 4], [1, 4]]
    jordan = np.array([[1, 1], [0, 1]])
    assert la.invariant_factors(jordan, 5) == [[1, 3, 1]]


def test_factor_mod_splits_over_the_field():
    # t^2 - 1 = (t - 1)(t + 1)
    assert la.factor_mod([1, 0, 4], 5) == [([1, 1], 1), ([1, 4], 1)]
    # t^2 + 1 is irreducible mod 3
    assert la.factor_mod([1, 0, 1], 3) == [([1, 0, 1], 1)]


def test_check_prime():
    assert la.check_prime(101) == 101
    with pytest.raises(FieldError):
        la.check_prime(91)


def test_field_spec_validates_the_modulus():
    assert la.FieldSpec(p=7).p == 7
    assert la.FieldSpec().p == la.DEFAULT_PRIME
    for bad in (0, 1, 4, 91):
        with pytest.raises(ValidationError):
            la.FieldSpec(p=bad)
