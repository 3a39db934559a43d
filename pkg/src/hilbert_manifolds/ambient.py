"""Finite truncations of the ambient Hilbert spaces.

A map ``x`` from R^p (or C^p) into a Hilbert space H is stored as an
``n x p`` array, ``n`` being the truncation dimension of H.  Everything here
is a pure function of numpy arrays.

Complex maps are realified by interleaving columns: column ``2k`` holds the
real part of complex column ``k`` and column ``2k + 1`` its imaginary part.
Multiplication by ``i`` then acts on each column pair as the 2x2 rotation
``(a, b) -> (-b, a)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

#: default relative tolerance for rank and orthonormality tests
DEFAULT_TOL = 1e-10


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class RankDeficientError(ValueError):
    """A map expected to have full column rank does not."""


def _as_finite(x, name="x", dtype=None):
    a = np.asarray(x, dtype=dtype)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _same_shape(x, y):
    if x.shape != y.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {y.shape}")


def frobenius_inner(x, y) -> float:
    """Real Hilbert product ``Tr(x^T y)`` on n x p maps."""
    x = _as_finite(x, "x", float)
    y = _as_finite(y, "y", float)
    _same_shape(x, y)
    return float(np.sum(x * y))


def hermitian_inner(x, y) -> complex:
    """Hermitian product ``h(x, y) = Tr(y^* x)``; linear in ``x``."""
    x = _as_finite(x, "x", complex)
    y = _as_finite(y, "y", complex)
    _same_shape(x, y)
    return complex(np.sum(np.conj(y) * x))


def realify(x) -> np.ndarray:
    """n x p complex -> n x 2p real with interleaved (re, im) columns."""
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        x = x[:, None]
    out = np.empty((x.shape[0], 2 * x.shape[1]))
    out[:, 0::2] = x.real
    out[:, 1::2] = x.imag
    return out


def complexify(xr) -> np.ndarray:
    """Inverse of :func:`realify`."""
    xr = np.asarray(xr, dtype=float)
    if xr.shape[-1] % 2:
        raise DimensionError("realified maps have an even number of columns")
    return xr[:, 0::2] + 1j * xr[:, 1::2]


def complex_structure(xr) -> np.ndarray:
    """Apply J (multiplication by i) to a realified map."""
    xr = np.asarray(xr, dtype=float)
    out = np.empty_like(xr)
    out[:, 0::2] = -xr[:, 1::2]
    out[:, 1::2] = xr[:, 0::2]
    return out


def kaehler_form(x, y) -> float:
    """``omega(x, y) = <J x, y>`` computed on realifications."""
    return frobenius_inner(complex_structure(realify(x)), realify(y))


def orth_decompose(x, z, tol=DEFAULT_TOL):
    """Split ``z`` along ``H = Im x (+) Ker x^T``.

    ``z`` may be a single vector of length n or an n x m block of vectors.
    Returns ``(image_part, kernel_part)``.
    """
    x = _as_finite(x, "x")
    z = _as_finite(z, "z")
    if x.ndim != 2:
        raise DimensionError("x must be a 2-d array")
    if z.shape[0] != x.shape[0]:
        raise DimensionError(f"z has {z.shape[0]} rows, x has {x.shape[0]}")
    u, s, _ = np.linalg.svd(x, full_matrices=False)
    if s.size == 0 or s[-1] <= tol * max(s[0], 1.0):
        raise RankDeficientError("x does not have full column rank")
    image = u @ (u.conj().T @ z)
    return image, z - image


@dataclass(frozen=True)
class MinkowskiForm:
    """Diagonal form with ``positive_dim`` (+1)'s followed by ``negative_dim`` (-1)'s."""

    positive_dim: int
    negative_dim: int = 1

    def __post_init__(self):
        if self.positive_dim < 1 or self.negative_dim < 1:
            raise ValueError("both signature counts must be >= 1")

    @property
    def dim(self) -> int:
        return self.positive_dim + self.negative_dim

    @property
    def signs(self) -> np.ndarray:
        return np.concatenate([np.ones(self.positive_dim), -np.ones(self.negative_dim)])

    def matrix(self) -> np.ndarray:
        return np.diag(self.signs)


def minkowski_inner(u, v, form: MinkowskiForm | None = None) -> float:
    """Indefinite product: positive slots first, negative slots last.

    With ``form=None`` the signature ``(len(u) - 1, 1)`` is assumed.
    """
    u = _as_finite(u, "u", float)
    v = _as_finite(v, "v", float)
    _same_shape(u, v)
    if form is None:
        form = MinkowskiForm(u.shape[0] - 1, 1)
    if u.shape[0] != form.dim:
        raise DimensionError(f"vector length {u.shape[0]} != form dimension {form.dim}")
    k = form.positive_dim
    return float(np.dot(u[:k], v[:k]) - np.dot(u[k:], v[k:]))


def matrix_exp(a) -> np.ndarray:
    """Matrix exponential (Pade scaling-and-squaring)."""
    a = _as_finite(a, "A")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("matrix_exp needs a square matrix")
    return scipy.linalg.expm(a)


def thin_svd(x):
    """Thin SVD ``x = U diag(s) V^T``; returns ``(U, s, V)`` with s nonincreasing."""
    x = _as_finite(x, "x")
    u, s, vh = np.linalg.svd(x, full_matrices=False)
    return u, s, vh.conj().T


def orthonormality_residual(x) -> float:
    """``max |x^* x - I|``."""
    x = np.asarray(x)
    return float(np.max(np.abs(x.conj().T @ x - np.eye(x.shape[1]))))


def polar_orthonormalize(x) -> np.ndarray:
    """Closest matrix with orthonormal columns (polar factor)."""
    u, _, vh = np.linalg.svd(x, full_matrices=False)
    return u @ vh


def skew(a) -> np.ndarray:
    return 0.5 * (a - a.conj().T)


def sym(a) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def random_orthonormal(n, p, rng, complex_=False) -> np.ndarray:
    """Haar-distributed n x p frame."""
    z = rng.standard_normal((n, p))
    if complex_:
        z = z + 1j * rng.standard_normal((n, p))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_orthogonal(n, rng, complex_=False) -> np.ndarray:
    """Haar-distributed orthogonal (or unitary) n x n matrix."""
    return random_orthonormal(n, n, rng, complex_=complex_)
