"""Stiefel manifold St(p, R^n) under the embedded and the canonical metric.

Points are ``n x p`` arrays with orthonormal columns, tangent vectors at ``Y``
are ``n x p`` arrays ``V`` with ``Y^T V`` skew.  The canonical metric is

    g_Y(V, W) = Tr(V^T (I - Y Y^T / 2) W)

and the embedded ("euclidean") metric is the Frobenius product.
"""

from __future__ import annotations

import enum
import itertools

import numpy as np
import scipy.linalg

from .ambient import (
    DEFAULT_TOL,
    DimensionError,
    frobenius_inner,
    matrix_exp,
    orthonormality_residual,
    polar_orthonormalize,
    skew,
    sym,
)


class MetricKind(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    CANONICAL = "canonical"


#: Bi-invariant metric on so(n) that makes ``O(n) -> St(p, n)`` a Riemannian
#: submersion onto the canonical metric: <A, B> = SCALE * Tr(A^T B).
#: Fitted on the p = 1 round sphere (curvature 1); see sectional_curvature_canonical.
BIINVARIANT_SCALE = 0.5


class NotOnManifoldError(ValueError):
    pass


class NotTangentError(ValueError):
    pass


class DistanceSolverError(RuntimeError):
    """Shooting did not converge; ``best_bound`` is the shortest length found."""

    def __init__(self, msg, best_bound=np.inf, residual=np.inf):
        super().__init__(msg)
        self.best_bound = best_bound
        self.residual = residual


def _kind(kind) -> MetricKind:
    return MetricKind(kind)


def check_point(y, tol=DEFAULT_TOL, require_codim=True) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 2:
        raise DimensionError("a Stiefel point is an n x p array")
    n, p = y.shape
    if require_codim and n < 2 * p:
        raise NotOnManifoldError(f"need n >= 2p, got n={n}, p={p}")
    if orthonormality_residual(y) > tol:
        raise NotOnManifoldError("columns are not orthonormal")
    return y


def check_tangent(y, v, tol=DEFAULT_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != np.shape(y):
        raise DimensionError(f"tangent shape {v.shape} != base shape {np.shape(y)}")
    a = y.T @ v
    scale = max(1.0, float(np.linalg.norm(v)))
    if np.max(np.abs(a + a.T)) > tol * scale:
        raise NotTangentError("Y^T V is not skew")
    return v


def random_point(n, p, rng) -> np.ndarray:
    from .ambient import random_orthonormal

    return random_orthonormal(n, p, rng)


def random_tangent(y, rng, norm=None) -> np.ndarray:
    v = tangent_project(y, rng.standard_normal(y.shape))
    if norm is not None:
        v *= norm / np.linalg.norm(v)
    return v


def tangent_project(y, z) -> np.ndarray:
    """Frobenius-orthogonal projection of an ambient map onto T_Y St."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.shape != y.shape:
        raise DimensionError(f"shape mismatch: {z.shape} vs {y.shape}")
    return z - y @ sym(y.T @ z)


def l_operator(y, z) -> np.ndarray:
    """``L_Y z = z - Y Y^T z / 2``; ``z`` is a vector or a block of columns."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.shape[0] != y.shape[0]:
        raise DimensionError("z must live in the ambient space of Y")
    return z - 0.5 * (y @ (y.T @ z))


def l_operator_matrix(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return np.eye(y.shape[0]) - 0.5 * y @ y.T


def metric(y, v, w, kind=MetricKind.CANONICAL, check=True) -> float:
    kind = _kind(kind)
    if check:
        check_tangent(y, v)
        check_tangent(y, w)
    if kind is MetricKind.EUCLIDEAN:
        return frobenius_inner(v, w)
    return frobenius_inner(v, l_operator(y, w))


def norm(y, v, kind=MetricKind.CANONICAL) -> float:
    return float(np.sqrt(max(metric(y, v, v, kind, check=False), 0.0)))


# -- geodesics -------------------------------------------------------------


def _euclidean_geodesic(y, v, t, with_velocity=False):
    # Ydot = [Y V] exp(t M) [I; 0] exp(-A t), M = [[A, -S], [I, A]]
    p = y.shape[1]
    a = y.T @ v
    s = v.T @ v
    m = np.block([[a, -s], [np.eye(p), a]])
    e = matrix_exp(t * m)[:, :p]
    r = matrix_exp(-t * a)
    yv = np.hstack([y, v])
    pos = yv @ e @ r
    if not with_velocity:
        return pos
    vel = yv @ (m @ e) @ r - pos @ a
    return pos, vel


def _horizontal_factor(y, v):
    """``(I - Y Y^T) V = Q R`` with Q orthonormal, taken from an SVD."""
    k = v - y @ (y.T @ v)
    u, s, vh = np.linalg.svd(k, full_matrices=False)
    # numerically null directions carry zero weight in R; keep Q clean anyway
    u = u - y @ (y.T @ u)
    return u, s[:, None] * vh


def _canonical_geodesic(y, v, t, with_velocity=False):
    # Y(t) = [Y Q] exp(t [[A, -R^T], [R, 0]]) [I; 0]
    p = y.shape[1]
    a = skew(y.T @ v)
    q, r = _horizontal_factor(y, v)
    m = np.block([[a, -r.T], [r, np.zeros((p, p))]])
    e = matrix_exp(t * m)[:, :p]
    yq = np.hstack([y, q])
    pos = yq @ e
    if not with_velocity:
        return pos
    return pos, yq @ (m @ e)


def geodesic(y, v, t=1.0, kind=MetricKind.CANONICAL, with_velocity=False, check=True):
    """Closed-form geodesic ``Y(t)`` with ``Y(0) = y``, ``Y'(0) = v``.

    Embedded metric: block exponential of size 2p.  Canonical metric:
    exponential of the horizontal lift in so(n), reduced to size 2p.
    """
    kind = _kind(kind)
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    if check:
        check_point(y, require_codim=False)
        check_tangent(y, v)
    if kind is MetricKind.EUCLIDEAN:
        return _euclidean_geodesic(y, v, float(t), with_velocity)
    return _canonical_geodesic(y, v, float(t), with_velocity)


def geodesic_acceleration(y, v, kind=MetricKind.CANONICAL) -> np.ndarray:
    """Second derivative prescribed by the geodesic equation."""
    kind = _kind(kind)
    if kind is MetricKind.EUCLIDEAN:
        return -y @ (v.T @ v)
    a = y.T @ v
    return -(v @ (v.T @ y)) - y @ (a @ a + v.T @ v)


def geodesic_ode(y, v, t=1.0, kind=MetricKind.CANONICAL, steps=400, with_velocity=False):
    """Classical RK4 on the geodesic equation, projected back each step.

    After every step the position is replaced by its polar factor and the
    velocity by its tangent projection.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    kind = _kind(kind)
    y = np.array(y, dtype=float)
    v = np.array(v, dtype=float)
    h = float(t) / steps

    def f(yy, vv):
        return vv, geodesic_acceleration(yy, vv, kind)

    for _ in range(steps):
        k1y, k1v = f(y, v)
        k2y, k2v = f(y + 0.5 * h * k1y, v + 0.5 * h * k1v)
        k3y, k3v = f(y + 0.5 * h * k2y, v + 0.5 * h * k2v)
        k4y, k4v = f(y + h * k3y, v + h * k3v)
        y = y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        y = polar_orthonormalize(y)
        v = tangent_project(y, v)
    if with_velocity:
        return y, v
    return y


def speed(y, v, kind=MetricKind.CANONICAL) -> float:
    return norm(y, v, kind)


# -- log map / distance ----------------------------------------------------


def _tangent_basis(y):
    """Coordinates ``theta -> V = Y A(theta) + Y_perp B(theta)``."""
    n, p = y.shape
    full, _ = np.linalg.qr(np.hstack([y, np.random.default_rng(0).standard_normal((n, n - p))]))
    y_perp = full[:, p:]
    y_perp = y_perp - y @ (y.T @ y_perp)
    y_perp, _ = np.linalg.qr(y_perp)
    iu = list(itertools.combinations(range(p), 2))

    def to_tangent(theta):
        a = np.zeros((p, p))
        for k, (i, j) in enumerate(iu):
            a[i, j] = -theta[k]
            a[j, i] = theta[k]
        b = theta[len(iu):].reshape(n - p, p)
        return y @ a + y_perp @ b

    def to_coords(v):
        a = y.T @ v
        b = y_perp.T @ v
        return np.concatenate([[a[j, i] for i, j in iu], b.ravel()])

    return to_tangent, to_coords, len(iu) + (n - p) * p


def _skew_logs(o):
    """Real skew logarithms of a rotation: principal branch and, for each
    rotation plane, the branch going the long way round."""
    t, z = scipy.linalg.schur(o, output="real")
    logs = [np.real(skew(scipy.linalg.logm(o)))]
    i = 0
    p = o.shape[0]
    while i < p - 1:
        if abs(t[i + 1, i]) > 1e-12:
            ang = np.arctan2(t[i + 1, i], t[i, i])
            alt = ang - 2 * np.pi * np.sign(ang)
            blk = np.zeros((p, p))
            blk[i, i + 1], blk[i + 1, i] = -(alt - ang), alt - ang
            logs.append(logs[0] + z @ blk @ z.T)
            i += 2
        else:
            i += 1
    return logs


def _initial_guesses(y1, y2, rng, extra=2):
    """Horizontal Grassmann logarithm lifted by a vertical rotation.

    When the residual rotation is a reflection, the offending frame
    direction is first turned by pi through a normal direction.
    """
    from . import grassmann

    n, p = y1.shape
    try:
        h = grassmann.grassmann_log(y1, y2, cut_tol=0.0)
    except grassmann.CutLocusError:
        h = np.zeros_like(y1)
    y2p = grassmann.grassmann_geodesic(y1, h, 1.0)
    u, _, vh = np.linalg.svd(y2p.T @ y2)
    o = u @ vh
    base = h
    if np.linalg.det(o) < 0:
        w, vecs = np.linalg.eig(o)
        e = np.real(vecs[:, int(np.argmin(np.abs(w + 1)))])
        e /= np.linalg.norm(e)
        span = np.hstack([y1, y2])
        uu, _, _ = np.linalg.svd(np.eye(n) - span @ np.linalg.pinv(span))
        normal = uu[:, 0] - y1 @ (y1.T @ uu[:, 0])
        normal /= np.linalg.norm(normal)
        base = h + np.pi * np.outer(normal, e)
        o = (np.eye(p) - 2 * np.outer(e, e)) @ o
    logs = _skew_logs(o)
    guesses = [base + y1 @ a for a in logs]
    for _ in range(extra):
        guesses.append(guesses[0] + tangent_project(y1, 0.1 * rng.standard_normal(y1.shape)))
    return [tangent_project(y1, g) for g in guesses]


def path_length_bound(y1, y2, kind=MetricKind.CANONICAL) -> float:
    """Length of an explicit broken path from ``y1`` to ``y2``.

    Horizontal Grassmann geodesic, an optional half turn of one frame vector
    through a normal direction, then a rotation inside the fibre.  Any
    distance is bounded above by this.
    """
    from . import grassmann

    kind = _kind(kind)
    n, p = y1.shape
    try:
        h = grassmann.grassmann_log(y1, y2, cut_tol=0.0)
    except grassmann.CutLocusError:
        return np.inf
    y2p = grassmann.grassmann_geodesic(y1, h, 1.0)
    u, _, vh = np.linalg.svd(y2p.T @ y2)
    o = u @ vh
    length = float(np.linalg.norm(h))
    if np.linalg.det(o) < 0:
        if n <= p:
            return np.inf
        length += np.pi
        w, vecs = np.linalg.eig(o)
        e = np.real(vecs[:, int(np.argmin(np.abs(w + 1)))])
        e /= np.linalg.norm(e)
        o = (np.eye(p) - 2 * np.outer(e, e)) @ o
    a = _skew_logs(o)[0]
    # vertical speed: |Y A|_F for the embedded metric, |A|_F / sqrt(2) canonical
    scale = 1.0 if kind is MetricKind.EUCLIDEAN else np.sqrt(0.5)
    return length + scale * float(np.linalg.norm(a))


def _shoot(y1, y2, kind, v0, tol, max_iter):
    """Levenberg-Marquardt on the endpoint residual from one start."""
    to_tangent, to_coords, dim = _tangent_basis(y1)

    def residual(theta):
        return (geodesic(y1, to_tangent(theta), 1.0, kind, check=False) - y2).ravel()

    def jacobian(theta, step=1e-6):
        cols = []
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = step
            cols.append((residual(theta + e) - residual(theta - e)) / (2 * step))
        return np.stack(cols, axis=1)

    theta = to_coords(v0)
    r = residual(theta)
    lam = 1e-3
    for _ in range(max_iter):
        rn = np.linalg.norm(r)
        if rn <= tol:
            break
        jac = jacobian(theta)
        jtj = jac.T @ jac
        g = jac.T @ r
        improved = False
        while lam <= 1e12:
            step = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj) + 1e-12), -g)
            trial = residual(theta + step)
            if np.linalg.norm(trial) < rn:
                theta, r = theta + step, trial
                lam = max(lam / 3.0, 1e-12)
                improved = True
                break
            lam *= 4.0
        if not improved:
            break
    return to_tangent(theta), float(np.linalg.norm(r))


def stiefel_log(
    y1, y2, kind=MetricKind.CANONICAL, tol=1e-11, max_iter=200, restarts=2, seed=0, guesses=()
):
    """Initial velocity of a short geodesic from ``y1`` to ``y2`` by shooting.

    Damped Gauss-Newton (Levenberg-Marquardt) on the endpoint residual with a
    finite-difference Jacobian.  Starts: the horizontally lifted Grassmann
    logarithm (both branches of each rotation angle), ``restarts`` perturbed
    copies, and any caller-supplied ``guesses``.  Returns the shortest
    converged velocity.
    """
    kind = _kind(kind)
    y1 = check_point(y1, require_codim=False)
    y2 = check_point(y2, require_codim=False)
    if y1.shape != y2.shape:
        raise DimensionError("points must have the same shape")
    if np.linalg.norm(y1 - y2) <= tol:
        return np.zeros_like(y1)
    rng = np.random.default_rng(seed)
    starts = _initial_guesses(y1, y2, rng, extra=restarts)
    starts += [tangent_project(y1, np.asarray(g, dtype=float)) for g in guesses]
    best, best_len, best_res = None, np.inf, np.inf
    for v0 in starts:
        v, res = _shoot(y1, y2, kind, v0, tol, max_iter)
        best_res = min(best_res, res)
        if res <= tol:
            length = norm(y1, v, kind)
            if length < best_len:
                best, best_len = v, length
    if best is None:
        raise DistanceSolverError(
            f"shooting did not converge (best residual {best_res:.3g})",
            best_bound=path_length_bound(y1, y2, kind),
            residual=best_res,
        )
    return best


def _reverse_velocity(y_from, v, kind):
    """Velocity at the endpoint of the geodesic, reversed (a log in the other direction)."""
    _, vel = geodesic(y_from, v, 1.0, kind, with_velocity=True, check=False)
    return -vel


def distance(y1, y2, kind=MetricKind.CANONICAL, cross_seed=True, **solver_kw) -> float:
    """Length of the shortest connecting geodesic found by shooting.

    Shoots from both endpoints, reuses each converged geodesic reversed as a
    start for the opposite direction and, with ``cross_seed``, also starts
    from the geodesics of the other metric.  The minimum is symmetric in its
    arguments by construction.  Far apart points may still return a
    non-minimal geodesic: the value is always an upper bound on the distance.
    """
    kind = _kind(kind)
    kinds = [kind]
    if cross_seed:
        kinds.append(MetricKind.CANONICAL if kind is MetricKind.EUCLIDEAN else MetricKind.EUCLIDEAN)
    logs = {}
    failures = []
    for k in kinds:
        for a, b in ((y1, y2), (y2, y1)):
            try:
                logs[(k, id(a))] = stiefel_log(a, b, k, **solver_kw)
            except DistanceSolverError as exc:
                failures.append(exc)
    lengths = []
    for a, b in ((y1, y2), (y2, y1)):
        seeds = []
        other = y2 if a is y1 else y1
        for k in kinds:
            if (k, id(other)) in logs:
                seeds.append(_reverse_velocity(other, logs[(k, id(other))], k))
            if k is not kind and (k, id(a)) in logs:
                seeds.append(logs[(k, id(a))])
        starts = list(seeds)
        if (kind, id(a)) in logs:
            lengths.append(norm(a, logs[(kind, id(a))], kind))
        for g in starts:
            v, res = _shoot(a, b, kind, tangent_project(a, g), 1e-11, 200)
            if res <= 1e-11:
                lengths.append(norm(a, v, kind))
    if not lengths:
        raise DistanceSolverError(
            "shooting did not converge from either endpoint",
            best_bound=min(path_length_bound(y1, y2, kind), path_length_bound(y2, y1, kind)),
            residual=min((f.residual for f in failures), default=np.inf),
        )
    return float(min(lengths))


# -- isometries and embeddings --------------------------------------------


def embed_isometric(l, y, tol=DEFAULT_TOL) -> np.ndarray:
    """Push a frame of R^m into R^n along an isometric linear map ``l``."""
    l = np.asarray(l, dtype=float)
    if orthonormality_residual(l) > tol:
        raise ValueError("L is not isometric (L^T L != I)")
    if l.shape[1] != np.shape(y)[0]:
        raise DimensionError("L and Y are not composable")
    return l @ y


def isometry_action(t, y, tol=DEFAULT_TOL) -> np.ndarray:
    """``Y -> T Y`` for an orthogonal operator T of the ambient space."""
    t = np.asarray(t, dtype=float)
    if t.shape[0] != t.shape[1] or orthonormality_residual(t) > tol:
        raise ValueError("T is not orthogonal")
    return t @ y


def op_action(a, y, tol=DEFAULT_TOL) -> np.ndarray:
    """Right O(p) action ``(A, Y) -> Y A^T``."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] != a.shape[1] or orthonormality_residual(a) > tol:
        raise ValueError("A is not orthogonal")
    return np.asarray(y) @ a.T


# -- curvature -------------------------------------------------------------


def horizontal_lift(y, v) -> np.ndarray:
    """Skew n x n lift ``Omega`` with ``Omega Y = V`` and ``P_perp Omega P_perp = 0``."""
    a = y.T @ v
    h = v - y @ a
    return y @ a @ y.T + h @ y.T - y @ h.T


def sectional_curvature_canonical(y, v, w, tol=1e-12) -> float:
    """Sectional curvature of span(V, W) for the canonical metric.

    O'Neill for the normal homogeneous space O(n)/O(n-p): with horizontal
    lifts X, Z in so(n) and the bi-invariant metric SCALE * Tr,

        K = (|[X, Z]_vert|^2 + |[X, Z]_horiz|^2 / 4) / |X ^ Z|^2.
    """
    y = np.asarray(y, dtype=float)
    check_tangent(y, v)
    check_tangent(y, w)
    x = horizontal_lift(y, v)
    z = horizontal_lift(y, w)
    c = x @ z - z @ x
    pp = np.eye(y.shape[0]) - y @ y.T
    c_vert = pp @ c @ pp
    c_hor = c - c_vert
    num = BIINVARIANT_SCALE * (np.sum(c_vert**2) + 0.25 * np.sum(c_hor**2))
    gvv = metric(y, v, v, check=False)
    gww = metric(y, w, w, check=False)
    gvw = metric(y, v, w, check=False)
    den = gvv * gww - gvw**2
    if den <= tol * max(gvv * gww, 1e-300):
        raise ValueError("degenerate plane: V and W are (nearly) parallel")
    return float(num / den)


def gram_schmidt(y, v, w, kind=MetricKind.CANONICAL):
    """Orthonormalize (v, w) in the given metric."""
    e1 = v / norm(y, v, kind)
    w2 = w - metric(y, w, e1, kind, check=False) * e1
    return e1, w2 / norm(y, w2, kind)


def jacobi_curvature_estimate(
    exp_map, norm_at, e1, e2, ts=(0.05, 0.1, 0.15, 0.2), ds=1e-5
) -> float:
    """Sectional curvature from geodesic deviation, independent of any formula.

    For orthonormal ``e1, e2`` the Jacobi field ``J(t) = d/ds exp(t (e1 + s e2))``
    satisfies ``|J(t)|^2 = t^2 - K t^4 / 3 + O(t^5)``.  ``J`` is taken by central
    differences in ``s``; the quotient ``3 (t^2 - |J|^2) / t^4`` is extrapolated
    to ``t = 0`` with a quadratic fit.

    ``exp_map(vec, t)`` returns the geodesic point and ``norm_at(point, vec)``
    the norm of an ambient variation vector at that point.
    """
    ts = np.asarray(ts, dtype=float)
    quot = []
    for t in ts:
        plus = exp_map(t * (e1 + ds * e2), 1.0)
        minus = exp_map(t * (e1 - ds * e2), 1.0)
        base = exp_map(t * e1, 1.0)
        jac = (plus - minus) / (2 * ds)
        jn2 = norm_at(base, jac) ** 2
        quot.append(3.0 * (t * t - jn2) / t**4)
    coeffs = np.polyfit(ts, np.asarray(quot), 2)
    return float(coeffs[-1])


def sectional_curvature_jacobi(y, v, w, **kw) -> float:
    """Finite-difference counterpart of :func:`sectional_curvature_canonical`."""
    y = np.asarray(y, dtype=float)
    e1, e2 = gram_schmidt(y, v, w)

    def exp_map(vec, t):
        return geodesic(y, vec, t, MetricKind.CANONICAL, check=False)

    def norm_at(pt, vec):
        # variation vectors are tangent up to O(ds^2); project before measuring
        return norm(pt, tangent_project(pt, vec))

    return jacobi_curvature_estimate(exp_map, norm_at, e1, e2, **kw)
