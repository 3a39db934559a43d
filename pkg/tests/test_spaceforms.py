import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.optimize import minimize

from hilbert_manifolds import actions as ac
from hilbert_manifolds import spaceforms as sp

seeds = st.integers(0, 2**32 - 1)


def test_halfspace_examples():
    assert sp.halfspace_distance([0, 1], [0, np.e]) == pytest.approx(1.0, abs=1e-15)
    x = np.array([0.3, -1.0, 2.0])
    assert sp.halfspace_distance(x, x) == 0.0
    with pytest.raises(sp.ConstraintViolation):
        sp.halfspace_distance([0, -1], [0, 1])


def _segment_lengths(pts):
    # exact metric length of each straight segment: |dx| * logmean(1/h)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    h = pts[:, -1]
    dl = np.diff(np.log(h))
    dh = np.diff(h)
    small = np.abs(dl) < 1e-8
    inv_mean = np.where(small, (1 - dl / 2) / h[:-1], dl / np.where(small, 1.0, dh))
    return seg * inv_mean


def _path_lengths(x, y, levels=(8, 16, 32, 64)):
    # minimal polygonal length for the metric h^-2 |dx|^2, refined level by level
    d = x.size
    n0 = levels[0]
    ts = np.linspace(0, 1, n0 + 1)[1:-1, None]
    pts = (1 - ts) * x + ts * y
    pts[:, -1] += 0.5 * np.sin(np.pi * ts[:, 0]) * np.linalg.norm(x - y)
    out = []
    for n in levels:
        if len(pts) != n - 1:
            full = np.vstack([x, pts, y])
            mid = 0.5 * (full[1:] + full[:-1])
            fine = np.empty((2 * len(full) - 1, d))
            fine[0::2], fine[1::2] = full, mid
            pts = fine[1:-1]
        init = pts.copy()
        init[:, -1] = np.log(init[:, -1])

        def length(flat):
            q = flat.reshape(-1, d).copy()
            q[:, -1] = np.exp(q[:, -1])
            return np.sum(_segment_lengths(np.vstack([x, q, y])))

        res = minimize(length, init.ravel(), method="BFGS", options={"gtol": 1e-13, "maxiter": 50000})
        pts = res.x.reshape(-1, d).copy()
        pts[:, -1] = np.exp(pts[:, -1])
        out.append(res.fun)
    return out


@pytest.mark.parametrize("seed", range(3))
def test_halfspace_distance_vs_path_shortening(seed):
    rng = np.random.default_rng(seed)
    x = np.array([rng.normal(), np.exp(rng.uniform(-0.5, 0.5))])
    y = np.array([rng.normal(), np.exp(rng.uniform(-0.5, 0.5))])
    dist = sp.halfspace_distance(x, y)
    lengths = _path_lengths(x, y)
    # every polygon is an admissible path, so each length bounds the distance from above
    assert min(lengths) >= dist - 1e-12
    # polygonal error is second order: Richardson-extrapolate the two finest levels
    oracle = (4 * lengths[-1] - lengths[-2]) / 3
    assert abs(oracle - dist) < 1e-5 * max(dist, 1.0)


def test_hyperboloid_examples():
    u = np.array([0.0, 0.0, 1.0])
    assert sp.hyperboloid_distance(u, u) == 0.0
    s = 1.7
    v = np.array([np.sinh(s), 0.0, np.cosh(s)])
    assert sp.hyperboloid_distance(u, v) == pytest.approx(s, abs=1e-14)
    with pytest.raises(sp.ConstraintViolation):
        sp.hyperboloid_distance(u, np.array([0.0, 0.0, 2.0]))
    with pytest.raises(sp.ConstraintViolation):
        sp.hyperboloid_distance(u, -u)


def test_model_basepoint():
    np.testing.assert_array_equal(sp.model_isometry([0.0, 0.0, 1.0]), [0.0, 0.0, 0.0, 1.0])


@given(seeds, st.integers(2, 5))
def test_model_map_roundtrip_and_isometry(seed, d):
    rng = np.random.default_rng(seed)
    x, y = sp.random_halfspace(d, rng), sp.random_halfspace(d, rng)
    u = sp.model_isometry(x)
    sp.check_hyperboloid(u)
    np.testing.assert_allclose(sp.model_isometry_inverse(u), x, atol=1e-12)
    assert abs(sp.halfspace_distance(x, y) - sp.hyperboloid_distance(u, sp.model_isometry(y))) < 1e-9
    w = sp.random_hyperboloid(d, rng)
    np.testing.assert_allclose(sp.model_isometry(sp.model_isometry_inverse(w)), w, atol=1e-12 * w[-1])


def test_near_points_keep_relative_accuracy():
    x = np.array([0.0, 1.0])
    y = np.array([1e-9, 1.0])
    assert sp.halfspace_distance(x, y) == pytest.approx(1e-9, rel=1e-12)
    assert sp.hyperboloid_distance(sp.model_isometry(x), sp.model_isometry(y)) == pytest.approx(1e-9, rel=1e-6)


def test_zn_halfspace_action(rng):
    x = sp.random_halfspace(3, rng)
    np.testing.assert_array_equal(sp.zn_halfspace_action([0, 0], x), x)
    y = sp.random_halfspace(3, rng)
    m = np.array([2, -1])
    d = sp.halfspace_distance(sp.zn_halfspace_action(m, x), sp.zn_halfspace_action(m, y))
    assert d == pytest.approx(sp.halfspace_distance(x, y), abs=1e-12)
    # displacement at (0, h) is arcosh(1 + |m|^2 / (2 h^2)), decreasing in h
    hs = [0.25, 0.5, 1.0, 2.0, 4.0]
    disp = [sp.halfspace_distance(np.array([0, 0, h]), sp.zn_halfspace_action(m, np.array([0, 0, h]))) for h in hs]
    np.testing.assert_allclose(disp, np.arccosh(1 + 5 / (2 * np.array(hs) ** 2)), atol=1e-12)
    assert np.all(np.diff(disp) < 0)
    # constant on horospheres
    a = sp.halfspace_distance(np.array([3.0, 1.0, 0.5]), sp.zn_halfspace_action(m, np.array([3.0, 1.0, 0.5])))
    assert a == pytest.approx(disp[1], abs=1e-13)


def test_orbit_separation(rng):
    x = sp.random_halfspace(3, rng)
    ms = [np.array([a, b]) for a in range(-3, 4) for b in range(-3, 4) if (a, b) != (0, 0)]
    assert min(sp.halfspace_distance(x, sp.zn_halfspace_action(m, x)) for m in ms) > 0


@given(seeds)
def test_minkowski_matrices(seed):
    rng = np.random.default_rng(seed)
    m1, m2 = rng.integers(-5, 6, 2), rng.integers(-5, 6, 2)
    a, b = sp.zn_minkowski_matrix(m1), sp.zn_minkowski_matrix(m2)
    assert a.shape == (4, 4)
    assert sp.lorentz_residual(a) < 1e-10
    np.testing.assert_allclose(sp.zn_minkowski_matrix(m1 + m2), a @ b, atol=1e-9)
    x = sp.random_halfspace(3, rng)
    np.testing.assert_allclose(a @ sp.model_isometry(x), sp.model_isometry(sp.zn_halfspace_action(m1, x)), rtol=1e-9, atol=1e-9)
    # upper sheet is preserved
    assert (a @ np.array([0, 0, 0, 1.0]))[-1] > 0


def test_minkowski_identity():
    np.testing.assert_allclose(sp.zn_minkowski_matrix([0, 0, 0]), np.eye(5), atol=1e-14)


def _hpoint(rng, trunc, scale=1.0):
    x = scale * ac.random_finitely_supported(trunc, rng)
    return sp.HInftyPoint.lift(x, rng.standard_normal(trunc.free_rank + 1))


def test_hinfty_action(rng):
    trunc = ac.L2Truncation(2, 4)
    z = _hpoint(rng, trunc)
    same = sp.hinfty_action([0, 0], z, trunc)
    np.testing.assert_allclose(same.vector(), z.vector(), atol=1e-13)
    m = np.array([1, -2])
    z1 = sp.hinfty_action(m, z, trunc)
    assert abs(z1.q() + 1) < 1e-10
    np.testing.assert_allclose(sp.hinfty_action(-m, z1, trunc).vector(), z.vector(), atol=1e-9)
    w = _hpoint(rng, trunc)
    d0 = sp.hinfty_distance(z, w)
    assert sp.hinfty_distance(z1, sp.hinfty_action(m, w, trunc)) == pytest.approx(d0, abs=1e-9)
    with pytest.raises(sp.ConstraintViolation):
        sp.hinfty_action(m, sp.HInftyPoint(z.x, z.xi, z.t + 1), trunc)


def test_hinfty_zero_block_reduces(rng):
    trunc = ac.L2Truncation(2, 3)
    xi = rng.standard_normal(3)
    z = sp.HInftyPoint.lift(np.zeros(trunc.dim), xi)
    m = np.array([2, 1])
    z1 = sp.hinfty_action(m, z, trunc)
    assert not z1.x.any()
    hs = sp.model_isometry(sp.zn_halfspace_action(m, sp.model_isometry_inverse(np.append(xi, z.t))))
    np.testing.assert_allclose(np.append(z1.xi, z1.t), hs, rtol=1e-10, atol=1e-10)


def test_hinfty_orbit_floor(rng):
    trunc = ac.L2Truncation(1, 16)
    z = _hpoint(rng, trunc)
    zk = z
    overlaps, dists = [], []
    for _ in range(trunc.radius - 1):
        zk = sp.hinfty_action([1], zk, trunc)
        overlaps.append(zk.x @ z.x)
        dists.append(sp.hinfty_distance(z, zk))
    assert min(dists) > 1e-3
    assert overlaps[-1] == pytest.approx(0.0, abs=1e-15)


def test_lattice_basics():
    with pytest.raises(sp.DimensionError):
        sp.Lattice(np.eye(3)[:, :2].T.repeat(2, axis=0))
    with pytest.raises(sp.IllConditionedLattice):
        sp.flat_quotient_distance(sp.Lattice([[1.0, 0], [1.0, 1e-9]]), np.zeros(2), np.ones(2))


def test_flat_examples():
    z2 = sp.Lattice(np.eye(2))
    v1 = np.array([1.0, 0.0])
    x = np.array([0.2, 0.7])
    assert sp.flat_quotient_distance(z2, x, x + v1) == 0.0
    assert sp.flat_quotient_distance(z2, [0.5, 0.5], [0, 0]) == pytest.approx(np.sqrt(2) / 2, abs=1e-15)
    # rank 1 in R^3: the two free directions are Euclidean
    lat = sp.Lattice([[1.0, 0, 0]])
    assert sp.flat_quotient_distance(lat, [0.9, 0.3, 0.4], [0, 0, 0]) == pytest.approx(np.hypot(0.1, 0.5), abs=1e-14)


@given(seeds, st.integers(1, 4))
def test_flat_axioms_and_brute_force(seed, k):
    rng = np.random.default_rng(seed)
    gens = np.eye(4)[:k] + 0.3 * rng.standard_normal((k, 4))
    lat = sp.Lattice(gens)
    x, y, z = rng.standard_normal((3, 4)) * 2
    dxy = sp.flat_quotient_distance(lat, x, y)
    assert dxy == pytest.approx(sp.flat_quotient_distance(lat, y, x), abs=1e-12)
    assert sp.flat_quotient_distance(lat, x, z) <= dxy + sp.flat_quotient_distance(lat, y, z) + 1e-12
    assert dxy <= np.linalg.norm(x - y) + 1e-12
    w = rng.integers(-3, 4, k) @ gens
    assert sp.flat_quotient_distance(lat, x, x + w) < 1e-9
    # oracle: enumerate after a coarse reduction of y towards x
    c = np.linalg.lstsq(gens.T, x - y, rcond=None)[0]
    y0 = y + np.round(c) @ gens
    # any better w has |c' - w|_inf <= 1/2 + |x - y0| / sigma_min(B)
    sigma_min = np.linalg.svd(gens, compute_uv=False)[-1]
    reach = int(np.ceil(0.5 + np.linalg.norm(x - y0) / sigma_min))
    assume(reach <= 8)
    assert dxy == pytest.approx(sp.flat_brute_force_distance(lat, x, y0, reach=reach), abs=1e-12)


def test_voronoi_equality(rng):
    z2 = sp.Lattice(np.eye(2))
    for _ in range(50):
        d = rng.uniform(-0.5, 0.5, 2)
        assert sp.flat_quotient_distance(z2, d, np.zeros(2)) == pytest.approx(np.linalg.norm(d), abs=1e-15)


def test_quaternions():
    i, j, k = np.eye(4)[1], np.eye(4)[2], np.eye(4)[3]
    np.testing.assert_array_equal(sp.quat_mul(i, j), k)
    np.testing.assert_array_equal(sp.quat_mul(j, i), -k)
    np.testing.assert_array_equal(sp.quat_mul(i, i), -np.eye(4)[0])
    q = np.array([0.5, 0.5, 0.5, 0.5])
    v = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_allclose(sp.quat_left_matrix(q) @ v, sp.quat_mul(q, v))


@pytest.mark.parametrize(
    "spec,dim,expected",
    [
        (sp.cyclic_scalar_group(2, "real"), 3, [0.0, np.pi]),
        (sp.cyclic_scalar_group(5), 2, [np.arccos(np.cos(2 * np.pi * k / 5)) for k in range(5)]),
        (sp.quaternion_group(), 1, [0.0, np.pi] + [np.pi / 2] * 6),
    ],
)
def test_sphere_quotients(spec, dim, expected, rng):
    cert = sp.sphere_quotient_check(spec, dim, rng=rng, samples=300)
    assert cert.ok and cert.order == len(expected)
    got = sorted(e for e, _, _ in cert.displacements)
    np.testing.assert_allclose(got, sorted(expected), atol=1e-12)
    for e, lo, hi in cert.displacements:
        assert hi - lo <= 1e-9 and abs(lo - e) <= 1e-9


def test_scalar_group_errors():
    with pytest.raises(ValueError, match="order"):
        sp.ScalarGroupSpec("complex", 4, [np.exp(2j * np.pi / 3)]).elements()
    with pytest.raises(ValueError):
        sp.ScalarGroupSpec("complex", 200, [np.exp(2j * np.pi / 200)]).elements()
    with pytest.raises(ValueError):
        sp.ScalarGroupSpec("complex", 2, [2.0])
    with pytest.raises(ValueError):
        sp.cyclic_scalar_group(3, "real")
