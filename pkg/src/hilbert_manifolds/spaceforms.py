"""Constant-curvature models and discrete quotients.

Hyperbolic d-space is used in two models:

* upper half-space: ``x = (x_1, ..., x_{d-1}, h)`` with ``h > 0`` and metric
  ``h^{-2} |dx|^2``; Z^{d-1} acts by horizontal translation;
* hyperboloid: ``u = (s_1, ..., s_d, t)`` with ``|s|^2 - t^2 = -1``, ``t > 0``.

The model map is fixed by sending ``(0, ..., 0, 1)`` to the basepoint
``(0, ..., 0, 1)``::

    t = (1 + r^2) / (2h),  s_i = x_i / h,  s_d = (1 - r^2) / (2h),  r^2 = |x|^2 + h^2

Both distances are written as ``2 asinh(chord / 2)`` which, unlike ``arcosh``,
keeps full relative accuracy for nearby points.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .actions import L2Truncation, sphere_distance, translate
from .ambient import DimensionError, MinkowskiForm

HYPERBOLOID_TOL = 1e-10
#: Gram condition number above which lattice reduction is refused
LATTICE_COND_MAX = 1e8
MAX_SCALAR_GROUP_ORDER = 120


class ConstraintViolation(ValueError):
    """A point is off its model (below the boundary, off the sheet, ...)."""


class IllConditionedLattice(ValueError):
    pass


# -- hyperbolic models ------------------------------------------------------


def check_halfspace(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DimensionError("a half-space point is a 1-d vector")
    if not np.all(np.isfinite(x)) or x[-1] <= 0:
        raise ConstraintViolation("half-space points need a positive last coordinate")
    return x


def _mink(u, v):
    return float(np.dot(u[:-1], v[:-1]) - u[-1] * v[-1])


def check_hyperboloid(u, tol=HYPERBOLOID_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size < 2:
        raise DimensionError("a hyperboloid point is a vector of length >= 2")
    if u[-1] <= 0:
        raise ConstraintViolation("hyperboloid points lie on the upper sheet t > 0")
    q = _mink(u, u)
    if abs(q + 1.0) > tol * max(1.0, u[-1] ** 2):
        raise ConstraintViolation(f"q(u) = {q!r}, expected -1")
    return u


def halfspace_distance(x, y) -> float:
    """``arcosh(1 + |x - y|^2 / (2 h_x h_y))``."""
    x = check_halfspace(x)
    y = check_halfspace(y)
    if x.shape != y.shape:
        raise DimensionError("points of different dimension")
    return float(2.0 * np.arcsinh(np.linalg.norm(x - y) / (2.0 * np.sqrt(x[-1] * y[-1]))))


def hyperboloid_distance(u, v) -> float:
    """``arcosh(-<u, v>)``; via the Minkowski length of ``u - v``."""
    u = check_hyperboloid(u)
    v = check_hyperboloid(v)
    if u.shape != v.shape:
        raise DimensionError("points of different dimension")
    w = u - v
    return float(2.0 * np.arcsinh(np.sqrt(max(_mink(w, w), 0.0)) / 2.0))


def model_isometry(x) -> np.ndarray:
    """Half-space point in R^d -> hyperboloid point in R^{d+1}."""
    x = check_halfspace(x)
    h = x[-1]
    r2 = float(np.dot(x, x))
    return np.concatenate([x[:-1] / h, [(1.0 - r2) / (2.0 * h), (1.0 + r2) / (2.0 * h)]])


def model_isometry_inverse(u) -> np.ndarray:
    u = check_hyperboloid(u)
    h = 1.0 / (u[-1] + u[-2])
    return np.concatenate([u[:-2] * h, [h]])


def random_halfspace(d, rng, spread=2.0) -> np.ndarray:
    return np.concatenate([spread * rng.standard_normal(d - 1), [np.exp(rng.uniform(-1.5, 1.5))]])


def random_hyperboloid(d, rng, scale=1.0) -> np.ndarray:
    s = scale * rng.standard_normal(d)
    return np.concatenate([s, [np.sqrt(1.0 + s @ s)]])


def zn_halfspace_action(m, x) -> np.ndarray:
    """``(x_1 + m_1, ..., x_n + m_n, h)``."""
    x = check_halfspace(x)
    m = np.asarray(m, dtype=float)
    if m.shape != (x.size - 1,):
        raise DimensionError("translation needs one entry per horizontal coordinate")
    out = x.copy()
    out[:-1] += m
    return out


def minkowski_form_for(n_horizontal: int) -> MinkowskiForm:
    return MinkowskiForm(n_horizontal + 1, 1)


def zn_minkowski_matrix(m) -> np.ndarray:
    """Lorentz matrix of the horizontal translation by ``m``.

    Obtained by conjugating the translation through :func:`model_isometry`:
    the images of ``d + 1`` spanning hyperboloid points fix the linear map.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 1:
        raise DimensionError("m must be a vector")
    dim = m.size + 2
    base = np.zeros(dim)
    base[-1] = 1.0
    cols = [base]
    for i in range(dim - 1):
        u = np.zeros(dim)
        u[i] = np.sinh(1.0)
        u[-1] = np.cosh(1.0)
        cols.append(u)
    src = np.array(cols).T
    dst = np.array([model_isometry(zn_halfspace_action(m, model_isometry_inverse(u))) for u in cols]).T
    return np.linalg.solve(src.T, dst.T).T


def lorentz_residual(mat) -> float:
    q = MinkowskiForm(mat.shape[0] - 1, 1).matrix()
    return float(np.max(np.abs(mat.T @ q @ mat - q)))


# -- H-infinity: l2(Z^n) block in front of a hyperboloid -----------------------


@dataclass(frozen=True)
class HInftyPoint:
    """``(x, xi, t)`` with ``|x|^2 + |xi|^2 - t^2 = -1`` and ``t > 0``."""

    x: np.ndarray
    xi: np.ndarray
    t: float

    @classmethod
    def lift(cls, x, xi) -> "HInftyPoint":
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        return cls(x, xi, float(np.sqrt(1.0 + x @ x + xi @ xi)))

    def q(self) -> float:
        return float(self.x @ self.x + self.xi @ self.xi - self.t**2)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.xi, [self.t]])


def hinfty_check(z: HInftyPoint, tol=HYPERBOLOID_TOL) -> HInftyPoint:
    if z.t <= 0 or abs(z.q() + 1.0) > tol * max(1.0, z.t**2):
        raise ConstraintViolation(f"q(z) = {z.q()!r}, expected -1 with t > 0")
    return z


def hinfty_action(m, z: HInftyPoint, trunc: L2Truncation) -> HInftyPoint:
    """Right translation on the l2 block, Lorentz matrix on ``(xi, t)``."""
    z = hinfty_check(z)
    m = tuple(int(v) for v in m)
    if len(m) != trunc.free_rank or z.xi.size != len(m) + 1:
        raise DimensionError("need len(xi) = len(m) + 1 = window rank + 1")
    x = translate(z.x, m, trunc)
    tail = zn_minkowski_matrix(m) @ np.concatenate([z.xi, [z.t]])
    return HInftyPoint(x, tail[:-1], float(tail[-1]))


def hinfty_distance(z: HInftyPoint, w: HInftyPoint) -> float:
    d = z.vector() - w.vector()
    chord2 = float(d[:-1] @ d[:-1] - d[-1] ** 2)
    return float(2.0 * np.arcsinh(np.sqrt(max(chord2, 0.0)) / 2.0))


# -- flat quotients ------------------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """``span_Z`` of the rows of ``generators`` (k x n)."""

    generators: np.ndarray

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.generators, dtype=float))
        object.__setattr__(self, "generators", g)
        if g.shape[0] > g.shape[1]:
            raise DimensionError("lattice rank exceeds the ambient dimension")

    @property
    def rank(self) -> int:
        return self.generators.shape[0]

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @property
    def gram(self) -> np.ndarray:
        return self.generators @ self.generators.T

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.gram)) if self.rank else 1.0


def _lattice_points(lo, hi):
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    return np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(axes), -1).T


def flat_quotient_distance(lattice: Lattice, x, y, max_candidates=2_000_000) -> float:
    """Distance between the orbits of ``x`` and ``y`` in ``R^n / lattice``.

    The difference splits into a part in the lattice span (reduced modulo the
    lattice) and an orthogonal part (kept as is).  Babai rounding with a +-1
    box gives an upper bound ``b``; every optimal coefficient vector then
    satisfies ``|c_i - w_i| <= b |B^+ e_i|``, and that box is enumerated.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (lattice.dim,) or y.shape != (lattice.dim,):
        raise DimensionError("points must live in the lattice's ambient space")
    diff = x - y
    if lattice.rank == 0:
        return float(np.linalg.norm(diff))
    if lattice.condition > LATTICE_COND_MAX:
        raise IllConditionedLattice(f"Gram condition number {lattice.condition:.3g}")
    b = lattice.generators
    c = np.linalg.solve(lattice.gram, b @ diff)
    perp = diff - c @ b
    base = np.round(c)
    box = _lattice_points(base - 1, base + 1)
    best = float(np.min(np.linalg.norm((c - box) @ b, axis=1)))
    pinv_norms = np.linalg.norm(np.linalg.pinv(b), axis=0)
    radius = best * pinv_norms * (1 + 1e-12) + 1e-12
    lo = np.ceil(c - radius)
    hi = np.floor(c + radius)
    if np.prod(hi - lo + 1) > max_candidates:
        raise IllConditionedLattice("exact enumeration box too large; reduce the basis first")
    cand = _lattice_points(lo, hi)
    if cand.size:
        best = min(best, float(np.min(np.linalg.norm((c - cand) @ b, axis=1))))
    return float(np.hypot(best, np.linalg.norm(perp)))


def flat_brute_force_distance(lattice: Lattice, x, y, reach=3) -> float:
    """Plain enumeration over coefficients in ``[-reach, reach]^k`` (oracle)."""
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    ws = _lattice_points([-reach] * lattice.rank, [reach] * lattice.rank)
    return float(np.min(np.linalg.norm(diff[None, :] - ws @ lattice.generators, axis=1)))


# -- spherical quotients by scalar groups -----------------------------------------


class ScalarField(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    QUATERNION = "quaternion"


def quat_mul(a, b) -> np.ndarray:
    """Hamilton product of ``(w, x, y, z)`` quaternions."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.array(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ]
    )


def quat_left_matrix(q) -> np.ndarray:
    """Real 4 x 4 matrix of ``v -> q v``."""
    return np.array([quat_mul(q, e) for e in np.eye(4)]).T


@dataclass
class ScalarGroupSpec:
    field: ScalarField
    order: int
    generators: list

    def __post_init__(self):
        self.field = ScalarField(self.field)
        if self.field is ScalarField.QUATERNION:
            self.generators = [np.asarray(g, dtype=float) for g in self.generators]
        else:
            self.generators = [complex(g) for g in self.generators]
        for g in self.generators:
            if abs(np.linalg.norm(g) - 1.0) > 1e-12:
                raise ValueError("scalars must have unit norm")
            if self.field is ScalarField.REAL and abs(complex(g).imag) > 0:
                raise ValueError("real scalars must be real")

    def _mul(self, a, b):
        return quat_mul(a, b) if self.field is ScalarField.QUATERNION else a * b

    def _one(self):
        return np.array([1.0, 0, 0, 0]) if self.field is ScalarField.QUATERNION else 1.0 + 0j

    def elements(self) -> list:
        """Closure of the generators; raises if it is not the declared order."""
        if self.order > MAX_SCALAR_GROUP_ORDER:
            raise ValueError(f"group order {self.order} exceeds {MAX_SCALAR_GROUP_ORDER}")
        elems = [self._one()]
        frontier = list(elems)
        while frontier:
            nxt = []
            for a in frontier:
                for g in self.generators:
                    c = self._mul(a, g)
                    if not any(np.linalg.norm(np.asarray(c) - np.asarray(e)) < 1e-9 for e in elems):
                        elems.append(c)
                        nxt.append(c)
                        if len(elems) > self.order:
                            raise ValueError("generators do not close up within the declared order")
            frontier = nxt
        if len(elems) != self.order:
            raise ValueError(f"generated group has order {len(elems)}, declared {self.order}")
        return elems

    def real_matrix(self, s, dim: int) -> np.ndarray:
        """``v -> s v`` on F^dim, as a real matrix on R^{dim * dim_R F}."""
        if self.field is ScalarField.REAL:
            return complex(s).real * np.eye(dim)
        if self.field is ScalarField.COMPLEX:
            blk = np.array([[s.real, -s.imag], [s.imag, s.real]])
        else:
            blk = quat_left_matrix(s)
        return np.kron(np.eye(dim), blk)


@dataclass
class SphereQuotientCertificate:
    free: bool
    clifford: bool
    closed: bool
    order: int
    displacements: list = field(default_factory=list)  # (expected, min, max) per element
    min_eigen_gap: float = np.inf

    @property
    def ok(self) -> bool:
        return self.free and self.clifford and self.closed


def scalar_displacement(s) -> float:
    """``arccos(Re s)``: the constant displacement of a unit scalar."""
    return float(np.arccos(np.clip(np.asarray(s).ravel()[0].real, -1.0, 1.0)))


def sphere_quotient_check(spec: ScalarGroupSpec, dim: int, rng=None, samples=200, tol=1e-9):
    """Freeness (spectra), Clifford property (sampled displacement) and closure."""
    rng = np.random.default_rng(0) if rng is None else rng
    elems = spec.elements()
    cert = SphereQuotientCertificate(True, True, True, len(elems))
    one = spec._one()
    pts = None
    for s in elems:
        mat = spec.real_matrix(s, dim)
        if pts is None:
            pts = rng.standard_normal((samples, mat.shape[0]))
            pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        deltas = np.array([sphere_distance(p, mat @ p) for p in pts])
        cert.displacements.append((scalar_displacement(s), float(deltas.min()), float(deltas.max())))
        if deltas.max() - deltas.min() > tol * (1 + deltas.mean()):
            cert.clifford = False
        if np.linalg.norm(np.asarray(s) - np.asarray(one)) < 1e-9:
            continue
        gap = float(np.min(np.abs(np.linalg.eigvals(mat) - 1.0)))
        cert.min_eigen_gap = min(cert.min_eigen_gap, gap)
        if gap <= 1e-8:
            cert.free = False
    return cert


def cyclic_scalar_group(order: int, field=ScalarField.COMPLEX) -> ScalarGroupSpec:
    if ScalarField(field) is ScalarField.REAL and order > 2:
        raise ValueError("the only real unit scalars are +-1")
    if ScalarField(field) is ScalarField.REAL:
        return ScalarGroupSpec(field, order, [-1.0 if order == 2 else 1.0])
    return ScalarGroupSpec(field, order, [np.exp(2j * np.pi / order)])


def quaternion_group() -> ScalarGroupSpec:
    """Q8 = {+-1, +-i, +-j, +-k}, generated by i and j."""
    return ScalarGroupSpec(ScalarField.QUATERNION, 8, [[0, 1, 0, 0], [0, 0, 1, 0]])
