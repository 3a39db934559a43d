"""Grassmann manifold Gr(p, H_n) = St(p, H_n) / O(p).

A point is any orthonormal basis of the subspace; two bases represent the
same point when their orthogonal projectors agree.  Horizontal vectors at a
basis ``Y`` are ``n x p`` maps with ``Y^* xi = 0``.  Everything below works
for real and complex bases alike (conjugate transposes throughout), so the
same code serves the complex Grassmannian.
"""

from __future__ import annotations

import numpy as np

from .ambient import DEFAULT_TOL, DimensionError, orthonormality_residual

#: principal angles within this distance of pi/2 make the logarithm ambiguous
CUT_LOCUS_TOL = 1e-6

#: projector distance below which two subspaces are considered equal
EQUALITY_TOL = 1e-9


class CutLocusError(ValueError):
    """The logarithm is not unique: some principal angle is (nearly) pi/2."""


class NotHorizontalError(ValueError):
    pass


def _h(a):
    return a.conj().T


def check_basis(x, tol=DEFAULT_TOL) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 2:
        raise DimensionError("a Grassmann point is an n x p basis")
    if orthonormality_residual(x) > tol:
        raise ValueError("basis columns are not orthonormal")
    return x


def check_horizontal(x, xi, tol=DEFAULT_TOL) -> np.ndarray:
    xi = np.asarray(xi)
    if xi.shape != np.shape(x):
        raise DimensionError(f"horizontal vector shape {xi.shape} != {np.shape(x)}")
    if np.max(np.abs(_h(x) @ xi), initial=0.0) > tol * max(1.0, float(np.linalg.norm(xi))):
        raise NotHorizontalError("Y^* xi != 0")
    return xi


def projector(x) -> np.ndarray:
    x = np.asarray(x)
    return x @ _h(x)


def projector_distance(x, y) -> float:
    """Frobenius distance between orthogonal projectors (representative-free)."""
    return float(np.linalg.norm(projector(x) - projector(y)))


def same_point(x, y, tol=EQUALITY_TOL) -> bool:
    return projector_distance(x, y) <= tol


def horizontal_project(y, v) -> np.ndarray:
    """``V - Y (Y^* V)``: drop the component tangent to the fibre."""
    y = np.asarray(y)
    v = np.asarray(v)
    if v.shape != y.shape:
        raise DimensionError(f"shape mismatch: {v.shape} vs {y.shape}")
    return v - y @ (_h(y) @ v)


def random_horizontal(x, rng, norm=None) -> np.ndarray:
    z = rng.standard_normal(np.shape(x))
    if np.iscomplexobj(x):
        z = z + 1j * rng.standard_normal(np.shape(x))
    xi = horizontal_project(x, z)
    if norm is not None:
        xi *= norm / np.linalg.norm(xi)
    return xi


def submersion_metric(x, xi, eta, check=True) -> float:
    """Real part of the Frobenius product of horizontal representatives."""
    if check:
        check_horizontal(x, xi)
        check_horizontal(x, eta)
    return float(np.real(np.vdot(xi, eta)))


def grassmann_geodesic(x, xi, t=1.0) -> np.ndarray:
    """Basis of ``exp_x(t xi)``: ``x V cos(S t) V^* + U sin(S t) V^*``."""
    x = np.asarray(x)
    xi = np.asarray(xi)
    u, s, vh = np.linalg.svd(xi, full_matrices=False)
    st = s * float(t)
    out = (x @ _h(vh)) * np.cos(st) @ vh + u * np.sin(st) @ vh
    return out


def grassmann_geodesic_velocity(x, xi, t=1.0) -> np.ndarray:
    x = np.asarray(x)
    u, s, vh = np.linalg.svd(np.asarray(xi), full_matrices=False)
    st = s * float(t)
    return (-(x @ _h(vh)) * (s * np.sin(st)) + u * (s * np.cos(st))) @ vh


def _cos_sin(x, y):
    """Cosines and sines of the principal angles between span(x) and span(y)."""
    cosines = np.linalg.svd(_h(x) @ y, compute_uv=False)
    sines = np.linalg.svd(y - x @ (_h(x) @ y), compute_uv=False)
    return np.clip(cosines, 0.0, 1.0), np.clip(np.sort(sines), 0.0, 1.0)


def principal_angles(x, y) -> np.ndarray:
    """Principal angles in increasing order.

    Definitionally ``arccos`` of the clamped singular values of ``x^* y``;
    angles below pi/4 are taken from the sines instead, where arccos loses
    half the digits.
    """
    x = check_basis(x)
    y = check_basis(y)
    if x.shape != y.shape:
        raise DimensionError("subspaces must share ambient dimension and rank")
    cosines, sines = _cos_sin(x, y)
    from_cos = np.arccos(cosines)  # increasing
    from_sin = np.arcsin(sines)  # increasing
    return np.where(from_cos < np.pi / 4, from_sin, from_cos)


def grassmann_distance(x, y) -> float:
    return float(np.linalg.norm(principal_angles(x, y)))


def grassmann_log(x, y, cut_tol=CUT_LOCUS_TOL) -> np.ndarray:
    """Horizontal ``xi`` at ``x`` with ``exp_x(xi) = span(y)``.

    Align ``y`` to ``x`` by the orthogonal Procrustes factor; angles come from
    ``atan2(sin, cos)`` so both ends of [0, pi/2) keep full precision.
    """
    x = check_basis(x)
    y = check_basis(y)
    if x.shape != y.shape:
        raise DimensionError("subspaces must share ambient dimension and rank")
    angles = principal_angles(x, y)
    if angles.size and angles[-1] > np.pi / 2 - cut_tol:
        raise CutLocusError(f"principal angle {angles[-1]!r} is at the cut locus")
    q, cosines, rh = np.linalg.svd(_h(y) @ x)
    # x^* y_star = rh^* diag(cos) rh; the normal part, in the rh frame, has
    # orthogonal columns whose norms are the sines of the same angles
    y_star = y @ (q @ rh)
    m = (y_star - x @ (_h(x) @ y_star)) @ _h(rh)
    sines = np.linalg.norm(m, axis=0)
    theta = np.arctan2(sines, np.clip(cosines, 0.0, 1.0))
    ratio = np.ones_like(theta)
    nz = sines > 0
    ratio[nz] = theta[nz] / sines[nz]
    return (m * ratio) @ rh


def involution(w, x) -> np.ndarray:
    """Geodesic symmetry at ``w``: reflect through span(w) (``+1`` on w, ``-1`` on w-perp)."""
    w = check_basis(w)
    x = np.asarray(x)
    if w.shape[0] != x.shape[0]:
        raise DimensionError("same ambient dimension required")
    t = 2.0 * projector(w) - np.eye(w.shape[0])
    return t @ x


def grassmann_embed(l, x, tol=DEFAULT_TOL) -> np.ndarray:
    """Image subspace ``L(span x)`` under an isometric linear map."""
    l = np.asarray(l)
    if orthonormality_residual(l) > tol:
        raise ValueError("L is not isometric (L^* L != I)")
    if l.shape[1] != np.shape(x)[0]:
        raise DimensionError("L and x are not composable")
    return l @ x


def random_point(n, p, rng, complex_=False) -> np.ndarray:
    from .ambient import random_orthonormal

    return random_orthonormal(n, p, rng, complex_=complex_)
