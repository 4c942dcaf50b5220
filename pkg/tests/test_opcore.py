import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floquet_cg.config import ConsistencyError, InvalidInputError
from floquet_cg.opcore import (
    SM, SP, SX, SY, SZ,
    bessel_j, bloch_vector, check_density_matrix, commutator_superop, dag, density_matrix,
    devectorize, expm_hermitian_2x2, lgks_apply, lgks_superop, matrix_exp, spost, spre, vectorize,
)
from oracles import bessel_series

finite = st.floats(-3, 3, allow_nan=False)


def rand_op(rng):
    return rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))


def test_vectorize_is_column_stacking():
    a = np.array([[1, 2], [3, 4]])
    assert np.array_equal(vectorize(a), [1, 3, 2, 4])
    assert np.array_equal(devectorize(vectorize(a)), a)


def test_vec_identity():
    rng = np.random.default_rng(1)
    a, x, b = rand_op(rng), rand_op(rng), rand_op(rng)
    assert np.allclose(vectorize(a @ x @ b), np.kron(b.T, a) @ vectorize(x))
    assert np.allclose(spre(a) @ vectorize(x), vectorize(a @ x))
    assert np.allclose(spost(b) @ vectorize(x), vectorize(x @ b))


def test_commutator_superop():
    rng = np.random.default_rng(2)
    h = rand_op(rng)
    h = h + dag(h)
    x = rand_op(rng)
    assert np.allclose(commutator_superop(h) @ vectorize(x), vectorize(-1j * (h @ x - x @ h)))


def test_matrix_exp_zero_and_shape():
    m = np.arange(16).reshape(4, 4).astype(complex)
    assert np.array_equal(matrix_exp(m, 0.0), np.eye(4))
    with pytest.raises(InvalidInputError):
        matrix_exp(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        matrix_exp(np.full((2, 2), np.nan))


def test_matrix_exp_series_oracle():
    rng = np.random.default_rng(3)
    m = 0.3 * (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    ref = np.eye(4, dtype=complex)
    term = np.eye(4, dtype=complex)
    for k in range(1, 40):
        term = term @ m / k
        ref += term
    assert np.allclose(matrix_exp(m), ref, atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(finite, finite, finite, finite, st.floats(-5, 5))
def test_expm_hermitian_closed_form(h0, hx, hy, hz, t):
    ham = h0 * np.eye(2) + hx * SX + hy * SY + hz * SZ
    assert np.allclose(expm_hermitian_2x2(ham, t), matrix_exp(-1j * ham, t), atol=1e-12)


@pytest.mark.parametrize("n,x", [(0, 0.04), (1, 1.0), (2, 5.0), (-1, 0.7), (-2, 3.0), (5, 12.0), (0, 0.0)])
def test_bessel_matches_series(n, x):
    ref = bessel_series(n, x)
    val = bessel_j(n, x)
    assert abs(val - ref) <= 1e-12 * max(abs(ref), 1e-300) or abs(val - ref) < 1e-15


def test_bessel_range_checks():
    with pytest.raises(InvalidInputError):
        bessel_j(17, 1.0)
    with pytest.raises(InvalidInputError):
        bessel_j(0, 51.0)
    with pytest.raises(InvalidInputError):
        bessel_j(0.5, 1.0)


def test_bloch_roundtrip():
    rho = density_matrix(0.2, -0.3, 0.4)
    assert np.allclose(bloch_vector(rho), [0.2, -0.3, 0.4])
    # rho10 carries <sigma^+>
    assert np.isclose(np.trace(SP @ rho), rho[1, 0])


def test_check_density_matrix():
    check_density_matrix(density_matrix(0.6, 0, 0.8))
    with pytest.raises(ConsistencyError):
        check_density_matrix(density_matrix(1.0, 0, 1.0))
    with pytest.raises(ConsistencyError):
        check_density_matrix(np.eye(2))


def test_lgks_apply_dephasing():
    rho = density_matrix(1.0, 0.0, 0.0)
    out = lgks_apply([[0.5]], [SZ], rho)
    assert np.allclose(out, 0.5 * (SZ @ rho @ SZ - rho))


def test_lgks_superop_matches_apply():
    rng = np.random.default_rng(4)
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    k = b @ dag(b)
    jumps = [SP, SM, SZ, SX]
    h = SY * 0.3
    rho = density_matrix(0.1, 0.2, 0.3)
    assert np.allclose(lgks_superop(k, jumps, h) @ vectorize(rho), vectorize(lgks_apply(k, jumps, rho, h)))
    # trace preservation
    assert np.allclose(vectorize(np.eye(2)) @ lgks_superop(k, jumps, h), 0, atol=1e-12)


def test_lgks_shape_and_hermiticity_errors():
    with pytest.raises(InvalidInputError):
        lgks_apply(np.eye(2), [SZ], np.eye(2) / 2)
    with pytest.raises(InvalidInputError):
        lgks_apply([[0, 1], [0, 0]], [SZ, SX], np.eye(2) / 2)


def test_exp_property_random():
    rng = np.random.default_rng(7)
    for _ in range(20):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m *= rng.uniform(0, 10) / np.linalg.norm(m, 2)
        s1, s2 = rng.uniform(0, 1, 2)
        lhs = matrix_exp(m, s1 + s2)
        assert np.max(np.abs(lhs - matrix_exp(m, s1) @ matrix_exp(m, s2))) < 1e-9 * max(1.0, np.max(np.abs(lhs)))


@pytest.mark.parametrize("x", [0.04, 1.0, 5.0])
@pytest.mark.parametrize("n", [1, 2, 5])
def test_bessel_recurrence(n, x):
    assert abs(bessel_j(n - 1, x) + bessel_j(n + 1, x) - 2 * n / x * bessel_j(n, x)) < 1e-10
