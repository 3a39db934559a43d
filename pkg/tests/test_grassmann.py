import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from hilbert_manifolds import grassmann as gr
from hilbert_manifolds import stiefel as sf
from hilbert_manifolds.ambient import random_orthonormal

seeds = st.integers(0, 2**32 - 1)


def _e(n, *idx):
    return np.eye(n)[:, list(idx)]


@given(seeds, st.booleans())
def test_principal_angles_vs_scipy(seed, near):
    rng = np.random.default_rng(seed)
    x = gr.random_point(7, 3, rng)
    if near:
        y = gr.grassmann_geodesic(x, gr.random_horizontal(x, rng, norm=1e-4), 1.0)
    else:
        y = gr.random_point(7, 3, rng)
    ours = gr.principal_angles(x, y)
    ref = np.sort(scipy.linalg.subspace_angles(x, y))
    np.testing.assert_allclose(ours, ref, atol=1e-12)


def test_distance_examples():
    x = _e(4, 0, 1)
    assert gr.grassmann_distance(x, x) == 0.0
    assert gr.grassmann_distance(x, _e(4, 0, 2)) == pytest.approx(np.pi / 2, abs=1e-15)
    th = 0.3
    y = np.column_stack([np.eye(4)[0], np.cos(th) * np.eye(4)[1] + np.sin(th) * np.eye(4)[2]])
    xi = gr.grassmann_log(x, y)
    assert np.linalg.norm(xi) == pytest.approx(th, abs=1e-15)
    with pytest.raises(gr.CutLocusError):
        gr.grassmann_log(x, _e(4, 0, 2))


@given(seeds, st.integers(1, 3))
def test_exp_log_roundtrip(seed, p):
    rng = np.random.default_rng(seed)
    x = gr.random_point(2 * p + 3, p, rng)
    y = gr.random_point(2 * p + 3, p, rng)
    if gr.principal_angles(x, y)[-1] > np.pi / 2 - 1e-3:
        return
    xi = gr.grassmann_log(x, y)
    gr.check_horizontal(x, xi)
    assert gr.grassmann_distance(gr.grassmann_geodesic(x, xi), y) <= 1e-8
    assert np.linalg.norm(xi) == pytest.approx(gr.grassmann_distance(x, y), abs=1e-12)


def test_log_of_geodesic_recovers_velocity(rng):
    x = gr.random_point(8, 2, rng)
    xi = gr.random_horizontal(x, rng, norm=1.2)
    np.testing.assert_allclose(gr.grassmann_log(x, gr.grassmann_geodesic(x, xi)), xi, atol=1e-12)


def test_complex_roundtrip(rng):
    x = gr.random_point(6, 2, rng, complex_=True)
    xi = gr.random_horizontal(x, rng, norm=0.8)
    y = gr.grassmann_geodesic(x, xi)
    assert gr.same_point(gr.grassmann_geodesic(x, gr.grassmann_log(x, y)), y)


def test_geodesic_unit_speed_and_velocity(rng):
    x = gr.random_point(7, 2, rng)
    xi = gr.random_horizontal(x, rng, norm=1.0)
    for t in (0.2, 0.9):
        yt = gr.grassmann_geodesic(x, xi, t)
        vt = gr.grassmann_geodesic_velocity(x, xi, t)
        gr.check_horizontal(yt, vt)
        assert np.linalg.norm(vt) == pytest.approx(1.0, abs=1e-13)
        assert gr.grassmann_distance(x, yt) == pytest.approx(t, abs=1e-12)


def test_projective_antipodes():
    x = _e(3, 0)
    assert gr.same_point(x, -x)
    xi = _e(3, 1)
    assert gr.same_point(gr.grassmann_geodesic(x, xi, np.pi), x)


def test_representative_independence(rng):
    x = gr.random_point(7, 3, rng)
    y = gr.random_point(7, 3, rng)
    a = random_orthonormal(3, 3, rng)
    xi = gr.random_horizontal(x, rng)
    assert gr.projector_distance(gr.grassmann_geodesic(x @ a, xi @ a), gr.grassmann_geodesic(x, xi)) < 1e-10
    assert gr.grassmann_distance(x @ a, y) == pytest.approx(gr.grassmann_distance(x, y), abs=1e-12)
    np.testing.assert_allclose(gr.grassmann_log(x @ a, y), gr.grassmann_log(x, y) @ a, atol=1e-10)


def test_isometry_invariance(rng):
    x, y = gr.random_point(6, 2, rng), gr.random_point(6, 2, rng)
    t = random_orthonormal(6, 6, rng)
    assert gr.grassmann_distance(t @ x, t @ y) == pytest.approx(gr.grassmann_distance(x, y), abs=1e-10)


def test_horizontal_split(rng):
    y = sf.random_point(6, 2, rng)
    v = sf.random_tangent(y, rng)
    h = gr.horizontal_project(y, v)
    vert = v - h
    # the split is orthogonal for both metrics
    assert abs(sf.metric(y, h, vert, "euclidean")) < 1e-12
    assert abs(sf.metric(y, h, vert, "canonical")) < 1e-12
    np.testing.assert_allclose(gr.horizontal_project(y, h), h, atol=1e-15)
    np.testing.assert_allclose(gr.horizontal_project(y, y @ np.array([[0, 1.0], [-1.0, 0]])), 0, atol=1e-15)


def test_submersion_metric(rng):
    x = gr.random_point(6, 2, rng)
    xi, eta = gr.random_horizontal(x, rng), gr.random_horizontal(x, rng)
    g = gr.submersion_metric(x, xi, eta)
    assert g == pytest.approx(sf.metric(x, xi, eta, "euclidean"), abs=1e-12)
    assert g == pytest.approx(sf.metric(x, xi, eta, "canonical"), abs=1e-12)
    assert gr.submersion_metric(x, xi, xi + 2 * eta) == pytest.approx(
        gr.submersion_metric(x, xi, xi) + 2 * g, abs=1e-12
    )
    with pytest.raises(gr.NotHorizontalError):
        gr.submersion_metric(x, x, xi)


@pytest.mark.parametrize("kind", ["euclidean", "canonical"])
def test_stiefel_horizontal_geodesic_projects(kind, rng):
    y = sf.random_point(8, 2, rng)
    xi = gr.random_horizontal(y, rng, norm=1.5)
    for t in np.linspace(0, 1, 5):
        assert gr.projector_distance(sf.geodesic(y, xi, t, kind), gr.grassmann_geodesic(y, xi, t)) < 1e-8


@given(seeds)
def test_involution(seed):
    rng = np.random.default_rng(seed)
    w = gr.random_point(8, 2, rng)
    x, y = gr.random_point(8, 2, rng), gr.random_point(8, 2, rng)
    assert gr.same_point(gr.involution(w, w), w)
    assert gr.same_point(gr.involution(w, gr.involution(w, x)), x)
    d = gr.grassmann_distance(gr.involution(w, x), gr.involution(w, y))
    assert abs(d - gr.grassmann_distance(x, y)) < 1e-10


def test_involution_perp_and_differential(rng):
    w = _e(6, 0, 1)
    x = _e(6, 2, 3)
    assert gr.same_point(gr.involution(w, x), x)
    w = gr.random_point(6, 2, rng)
    xi = gr.random_horizontal(w, rng)
    for h in (1e-2, 1e-3):
        fwd = gr.involution(w, gr.grassmann_geodesic(w, xi, h))
        assert gr.projector_distance(fwd, gr.grassmann_geodesic(w, -xi, h)) < 1e-12


def test_embedding_totally_geodesic(rng):
    l = random_orthonormal(8, 4, rng)
    x = gr.random_point(4, 2, rng)
    xi = gr.random_horizontal(x, rng)
    lx = gr.grassmann_embed(l, x)
    out = np.eye(8) - l @ l.T
    for t in np.linspace(0, 2, 9):
        assert np.linalg.norm(out @ gr.grassmann_geodesic(lx, l @ xi, t)) < 1e-12
    # horizontal pushforwards keep their metric
    eta = gr.random_horizontal(x, rng)
    assert gr.submersion_metric(lx, l @ xi, l @ eta) == pytest.approx(gr.submersion_metric(x, xi, eta), abs=1e-12)
    with pytest.raises(ValueError):
        gr.grassmann_embed(2 * l, x)


def test_contract_errors(rng):
    with pytest.raises(ValueError):
        gr.check_basis(2 * np.eye(3)[:, :2])
    with pytest.raises(gr.DimensionError):
        gr.principal_angles(gr.random_point(5, 2, rng), gr.random_point(5, 3, rng))
