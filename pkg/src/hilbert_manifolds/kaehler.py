"""Complex Stiefel and Grassmann manifolds as Kaehler manifolds.

On complex n x p maps the Hermitian product ``h(X, Y) = Tr(Y^* X)`` splits as
``h = <., .> - i omega`` with ``<., .> = Re h`` and ``omega(X, Y) = <J X, Y>``,
J being multiplication by i.  Tangent vectors to the Grassmannian at a basis
``Y`` are represented horizontally (``Y^* X = 0``); the same
:mod:`hilbert_manifolds.grassmann` routines handle geodesics.

Curvature normalization
-----------------------
Two natural metrics live on Gr_C(p, n): the submersion metric ``Re Tr(X^* X)``
induced from the Stiefel manifold, and the metric induced by embedding a
subspace as its orthogonal projector ``Y Y^*`` into Hermitian matrices with
the Frobenius norm, which is twice the former.  In the projector metric the
holomorphic sectional curvature lies in ``[2/p, 2]``; in the submersion
metric it lies in ``[4/p, 4]``.  ``PROJECTOR`` is the default.
"""

from __future__ import annotations

import numpy as np

from . import grassmann
from .ambient import (
    DEFAULT_TOL,
    DimensionError,
    complex_structure,
    frobenius_inner,
    hermitian_inner,
    orthonormality_residual,
    realify,
)
from .stiefel import jacobi_curvature_estimate

SUBMERSION = "submersion"
PROJECTOR = "projector"

#: metric scale relative to Re Tr(X^* X)
METRIC_SCALE = {SUBMERSION: 1.0, PROJECTOR: 2.0}


def kaehler_triple(x, y):
    """``(Re h(x, y), omega(x, y))`` with ``omega = -Im h``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")
    hv = hermitian_inner(x, y)
    return hv.real, -hv.imag


def omega_via_j(x, y) -> float:
    """``<J x, y>`` evaluated on realifications (independent of :func:`kaehler_triple`)."""
    return frobenius_inner(complex_structure(realify(x)), realify(y))


def check_point(y, tol=DEFAULT_TOL) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    if y.ndim != 2:
        raise DimensionError("a complex Stiefel point is an n x p array")
    if orthonormality_residual(y) > tol:
        raise ValueError("Y^* Y != I")
    return y


def check_tangent(y, v, tol=DEFAULT_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != np.shape(y):
        raise DimensionError(f"shape mismatch: {v.shape} vs {np.shape(y)}")
    a = np.conj(y).T @ v
    if np.max(np.abs(a + a.conj().T)) > tol * max(1.0, float(np.linalg.norm(v))):
        raise ValueError("Y^* V is not skew-Hermitian")
    return v


def complex_horizontal_project(y, v) -> np.ndarray:
    """Horizontal part ``V - Y (Y^* V)`` of a tangent vector to St_C(p, n)."""
    y = check_point(y)
    v = check_tangent(y, v)
    return v - y @ (np.conj(y).T @ v)


def random_point(n, p, rng) -> np.ndarray:
    return grassmann.random_point(n, p, rng, complex_=True)


def random_horizontal(x, rng, norm=None) -> np.ndarray:
    return grassmann.random_horizontal(np.asarray(x, dtype=complex), rng, norm)


def _curvature_numerator(x, z) -> float:
    # |[X~, Z~]|^2 for horizontal lifts, bi-invariant metric Re Tr / 2
    zx = np.conj(z).T @ x
    xz = x @ np.conj(z).T
    return 0.5 * (np.sum(np.abs(zx - zx.conj().T) ** 2) + np.sum(np.abs(xz - xz.conj().T) ** 2))


def sectional_curvature(x, v, w, normalization=PROJECTOR, tol=1e-12) -> float:
    """Sectional curvature of span(v, w) on the (real or complex) Grassmannian.

    Symmetric space: ``K = |[X~, Z~]|^2 / |X ^ Z|^2`` with ``X~`` the lift
    ``[[0, -B^*], [B, 0]]`` into u(n); written without a complement basis.
    """
    x = np.asarray(x)
    grassmann.check_horizontal(x, v)
    grassmann.check_horizontal(x, w)
    gvv = np.real(np.vdot(v, v))
    gww = np.real(np.vdot(w, w))
    gvw = np.real(np.vdot(v, w))
    den = gvv * gww - gvw**2
    if den <= tol * max(gvv * gww, 1e-300):
        raise ValueError("degenerate plane")
    return float(_curvature_numerator(v, w) / den / METRIC_SCALE[normalization])


def holomorphic_sectional_curvature(x, xv, normalization=PROJECTOR, tol=1e-12) -> float:
    """Sectional curvature of the complex line span(X, J X)."""
    xv = np.asarray(xv, dtype=complex)
    if np.linalg.norm(xv) <= tol:
        raise ValueError("degenerate direction: |X| is below tolerance")
    return sectional_curvature(x, xv, 1j * xv, normalization)


def holomorphic_curvature_closed_form(xv, normalization=PROJECTOR) -> float:
    """``4 |X^* X|_F^2 / |X|^4`` rescaled; depends only on the singular values of X."""
    s = np.linalg.svd(np.asarray(xv), compute_uv=False) ** 2
    return float(4.0 * np.sum(s**2) / np.sum(s) ** 2 / METRIC_SCALE[normalization])


def curvature_jacobi(x, v, w, normalization=PROJECTOR, **kw) -> float:
    """Finite-difference geodesic-deviation estimate of the same quantity."""
    x = np.asarray(x)
    scale = METRIC_SCALE[normalization]

    def sub_norm(a):
        return float(np.sqrt(np.real(np.vdot(a, a))))

    e1 = v / sub_norm(v)
    w2 = w - np.real(np.vdot(e1, w)) * e1
    e2 = w2 / sub_norm(w2)

    def exp_map(vec, t):
        return grassmann.grassmann_geodesic(x, vec, t)

    def norm_at(pt, vec):
        return sub_norm(grassmann.horizontal_project(pt, vec))

    # curvature of the submersion metric; scaling the metric by c divides K by c
    return jacobi_curvature_estimate(exp_map, norm_at, e1, e2, **kw) / scale


def unitary_action(t, x, tol=DEFAULT_TOL) -> np.ndarray:
    """``span x -> span(T x)`` for a unitary T."""
    t = np.asarray(t, dtype=complex)
    if t.shape[0] != t.shape[1] or orthonormality_residual(t) > tol:
        raise ValueError("T is not unitary")
    return t @ x


def right_unitary_action(a, phi) -> np.ndarray:
    """``A . phi = phi A^*`` for A in U(p)."""
    a = np.asarray(a, dtype=complex)
    if orthonormality_residual(a) > DEFAULT_TOL:
        raise ValueError("A is not unitary")
    return np.asarray(phi) @ a.conj().T
