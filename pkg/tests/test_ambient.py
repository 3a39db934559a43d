import numpy as np
import pytest
from hypothesis import given, strategies as st

from hilbert_manifolds import ambient as am

seeds = st.integers(0, 2**32 - 1)


def _cplx(rng, n, p):
    return rng.standard_normal((n, p)) + 1j * rng.standard_normal((n, p))


def test_frobenius_and_hermitian(rng):
    x, y = rng.standard_normal((5, 2)), rng.standard_normal((5, 2))
    assert am.frobenius_inner(x, y) == pytest.approx(np.trace(x.T @ y), rel=1e-14)
    a, b = _cplx(rng, 4, 2), _cplx(rng, 4, 2)
    assert am.hermitian_inner(a, b) == pytest.approx(np.trace(b.conj().T @ a), rel=1e-14)
    # linear in the first slot
    assert am.hermitian_inner(1j * a, b) == pytest.approx(1j * am.hermitian_inner(a, b), rel=1e-14)


def test_shape_mismatch():
    with pytest.raises(am.DimensionError):
        am.frobenius_inner(np.zeros((3, 2)), np.zeros((3, 3)))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        am.frobenius_inner(np.array([[np.nan]]), np.array([[1.0]]))


@given(seeds)
def test_realify_roundtrip_and_j(seed):
    rng = np.random.default_rng(seed)
    x = _cplx(rng, 5, 3)
    xr = am.realify(x)
    np.testing.assert_array_equal(am.complexify(xr), x)
    np.testing.assert_array_equal(am.complex_structure(xr), am.realify(1j * x))
    np.testing.assert_array_equal(am.complex_structure(am.complex_structure(xr)), -xr)


@given(seeds)
def test_kaehler_identity(seed):
    # h = <.,.> - i omega with omega(x, y) = <Jx, y>
    rng = np.random.default_rng(seed)
    x, y = _cplx(rng, 4, 2), _cplx(rng, 4, 2)
    h = am.hermitian_inner(x, y)
    assert am.frobenius_inner(am.realify(x), am.realify(y)) == pytest.approx(h.real, abs=1e-12)
    assert am.kaehler_form(x, y) == pytest.approx(-h.imag, abs=1e-12)
    assert am.kaehler_form(x, y) == pytest.approx(-am.kaehler_form(y, x), abs=1e-12)


def test_orth_decompose(rng):
    x = rng.standard_normal((6, 2))
    z = rng.standard_normal((6, 3))
    img, ker = am.orth_decompose(x, z)
    np.testing.assert_allclose(img + ker, z, atol=1e-14)
    np.testing.assert_allclose(x.T @ ker, 0, atol=1e-12)
    # image part is a combination of the columns of x
    coef, *_ = np.linalg.lstsq(x, img, rcond=None)
    np.testing.assert_allclose(x @ coef, img, atol=1e-12)
    v = rng.standard_normal(6)
    img1, ker1 = am.orth_decompose(x, v)
    assert img1.shape == (6,)
    with pytest.raises(am.RankDeficientError):
        am.orth_decompose(np.column_stack([x[:, 0], 2 * x[:, 0]]), z)
    with pytest.raises(am.DimensionError):
        am.orth_decompose(x, rng.standard_normal(5))


def test_minkowski():
    form = am.MinkowskiForm(3)
    assert form.dim == 4
    np.testing.assert_array_equal(form.signs, [1, 1, 1, -1])
    u = np.array([0.0, 0.0, 0.0, 1.0])
    assert am.minkowski_inner(u, u) == -1.0
    s = 0.7
    v = np.array([np.sinh(s), 0, 0, np.cosh(s)])
    assert am.minkowski_inner(u, v, form) == pytest.approx(-np.cosh(s))
    with pytest.raises(ValueError):
        am.MinkowskiForm(0)
    with pytest.raises(am.DimensionError):
        am.minkowski_inner(u, v, am.MinkowskiForm(4))


def _expm_eig(a):
    # oracle: diagonalize (skew matrices are normal)
    w, v = np.linalg.eig(a)
    return np.real(v @ np.diag(np.exp(w)) @ np.linalg.inv(v))


@given(seeds)
def test_matrix_exp_skew(seed):
    rng = np.random.default_rng(seed)
    b = rng.standard_normal((5, 5))
    a = b - b.T
    e = am.matrix_exp(a)
    np.testing.assert_allclose(e, _expm_eig(a), atol=1e-11)
    assert am.orthonormality_residual(e) < 1e-13


def test_matrix_exp_nilpotent():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_array_equal(am.matrix_exp(a), [[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(am.DimensionError):
        am.matrix_exp(np.zeros((2, 3)))


def test_thin_svd(rng):
    x = rng.standard_normal((7, 3))
    u, s, v = am.thin_svd(x)
    np.testing.assert_allclose(u * s @ v.T, x, atol=1e-13)
    assert np.all(np.diff(s) <= 0)


def test_polar_and_random(rng):
    y = am.random_orthonormal(6, 3, rng)
    assert am.orthonormality_residual(y) < 1e-14
    z = y + 1e-3 * rng.standard_normal(y.shape)
    assert am.orthonormality_residual(am.polar_orthonormalize(z)) < 1e-14
    q = am.random_orthogonal(4, rng, complex_=True)
    assert am.orthonormality_residual(q) < 1e-14
    a = rng.standard_normal((3, 3))
    np.testing.assert_allclose(am.skew(a) + am.sym(a), a, atol=1e-15)
