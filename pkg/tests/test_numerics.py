import numpy as np
import pytest
from hypothesis import given, strategies as st

from cumsense.c3cs import kron_mapped
from cumsense.mapping import build_P
from cumsense.numerics import dft, numerical_rank, solve_least_squares


def test_identity_system():
    sol = solve_least_squares(np.eye(2), [3.0, 5.0])
    np.testing.assert_allclose(sol.solution, [3, 5])
    assert sol.residual_norm == 0.0
    assert sol.rank == 2


def test_column_of_ones_gives_mean():
    sol = solve_least_squares(np.ones((3, 1)), [1.0, 2.0, 3.0])
    assert sol.solution[0] == pytest.approx(2.0)
    assert sol.residual_norm == pytest.approx(np.sqrt(2.0))


def test_kron_system_round_trip(rng):
    Phi = rng.standard_normal((4, 4))
    A = kron_mapped(Phi, build_P(4))
    c = rng.standard_normal(A.shape[1])
    sol = solve_least_squares(A, A @ c)
    assert np.linalg.norm(sol.solution - c) / np.linalg.norm(c) < 1e-8


def test_rank_deficient_returns_min_norm():
    A = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
    sol = solve_least_squares(A, [2.0, 2.0, 0.0])
    assert sol.rank == 1
    np.testing.assert_allclose(sol.solution, [1.0, 1.0])


def test_complex_system(rng):
    A = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    sol = solve_least_squares(A, A @ x)
    np.testing.assert_allclose(sol.solution, x, atol=1e-12)


@pytest.mark.parametrize("A, b", [(np.eye(2), [1.0]), (np.eye(2), [[1.0, 2.0]]), (np.ones(3), [1.0])])
def test_shape_errors(A, b):
    with pytest.raises(ValueError):
        solve_least_squares(A, b)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        solve_least_squares(np.array([[np.nan]]), [1.0])
    with pytest.raises(ValueError):
        solve_least_squares(np.eye(1), [np.inf])
    with pytest.raises(ValueError):
        numerical_rank(np.array([[np.inf, 0.0]]))


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(3), 1e-10) == 3
    assert numerical_rank(np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]), 1e-10) == 1
    with pytest.raises(ValueError):
        numerical_rank(np.eye(2), 1.5)


@given(st.integers(0, 2 ** 31), st.floats(0.01, 100.0))
def test_rank_invariant_to_permutation_and_scale(seed, scale):
    r = np.random.default_rng(seed)
    A = r.standard_normal((6, 2)) @ r.standard_normal((2, 4))
    perm = r.permutation(6)
    assert numerical_rank(A) == numerical_rank(scale * A[perm]) == 2


@given(st.integers(0, 2 ** 31))
def test_full_rank_residual_small(seed):
    r = np.random.default_rng(seed)
    A = r.standard_normal((8, 4))
    b = A @ r.standard_normal(4)
    assert solve_least_squares(A, b).residual_norm <= 1e-8 * np.linalg.norm(b)


def test_dft_examples():
    np.testing.assert_allclose(dft([1, 0, 0, 0]), [1, 1, 1, 1])
    np.testing.assert_allclose(dft([1, 1, 1, 1]), [4, 0, 0, 0], atol=1e-15)


@given(st.integers(1, 40), st.integers(0, 2 ** 31))
def test_dft_round_trip_and_parseval(n, seed):
    r = np.random.default_rng(seed)
    v = r.standard_normal(n) + 1j * r.standard_normal(n)
    np.testing.assert_allclose(dft(dft(v), inverse=True), v, atol=1e-12)
    F = dft(v)
    assert np.sum(np.abs(F) ** 2) == pytest.approx(n * np.sum(np.abs(v) ** 2), rel=1e-10)


def test_dft_rejects_empty():
    with pytest.raises(ValueError):
        dft([])
