"""Finitely generated abelian groups acting linearly and isometrically.

The free part Z^k acts on a finite window of l2(Z^k) by translation of the
index; torsion summands Z_{p^a} act by scalar roots of unity on the
complexified space.  A window is either cyclic (the action factors through
(Z_N)^k and stays exactly orthogonal) or zero padded (mass leaving the window
is dropped, so only short shifts are faithful).

Translation convention: ``(g . x)(h) = x(h - g)``, so the basis vector
``e_0`` is sent to ``e_g``.
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import grassmann, stiefel
from .ambient import DimensionError, orthonormality_residual


class TruncationWarning(UserWarning):
    """A zero-padded translation moved part of the window outside of it."""


class EnumerationOverflow(ValueError):
    pass


# -- groups ----------------------------------------------------------------


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, math.isqrt(q) + 1))


@dataclass(frozen=True)
class GroupSpec:
    """``Z^free_rank (+) Z_{p1^a1} (+) ... (+) Z_{pk^ak}``."""

    free_rank: int = 0
    torsion: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple((int(p), int(a)) for p, a in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free_rank must be >= 0")
        for p, a in self.torsion:
            if not _is_prime(p):
                raise ValueError(f"{p} is not prime")
            if a < 1:
                raise ValueError("torsion exponents must be >= 1")

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(p**a for p, a in self.torsion)

    @property
    def torsion_order(self) -> int:
        return math.prod(self.orders)

    @property
    def has_repeated_prime(self) -> bool:
        primes = [p for p, _ in self.torsion]
        return len(primes) != len(set(primes))

    def identity(self) -> "GroupElement":
        return GroupElement((0,) * self.free_rank, (0,) * len(self.torsion))

    def element(self, free=(), torsion=()) -> "GroupElement":
        free = tuple(int(v) for v in free) or (0,) * self.free_rank
        torsion = tuple(int(v) for v in torsion) or (0,) * len(self.torsion)
        if len(free) != self.free_rank or len(torsion) != len(self.torsion):
            raise DimensionError("element does not match the group")
        return GroupElement(free, tuple(t % o for t, o in zip(torsion, self.orders)))

    def multiply(self, g: "GroupElement", h: "GroupElement") -> "GroupElement":
        return self.element(
            tuple(a + b for a, b in zip(g.free_part, h.free_part)),
            tuple(a + b for a, b in zip(g.torsion_part, h.torsion_part)),
        )

    def torsion_elements(self, include_identity=False, max_order=10**6):
        if self.torsion_order > max_order:
            raise EnumerationOverflow(f"torsion subgroup has order {self.torsion_order}")
        for t in itertools.product(*(range(o) for o in self.orders)):
            if include_identity or any(t):
                yield GroupElement((0,) * self.free_rank, t)

    def random_element(self, rng, free_range=3) -> "GroupElement":
        return self.element(
            tuple(rng.integers(-free_range, free_range + 1, self.free_rank)),
            tuple(rng.integers(0, o) for o in self.orders),
        )


@dataclass(frozen=True)
class GroupElement:
    free_part: tuple[int, ...] = ()
    torsion_part: tuple[int, ...] = ()

    @property
    def has_infinite_order(self) -> bool:
        return any(self.free_part)

    @property
    def is_identity(self) -> bool:
        return not any(self.free_part) and not any(self.torsion_part)


# -- truncations of l2(Z^k) --------------------------------------------------


class BoundaryMode(str, enum.Enum):
    CYCLIC = "cyclic"
    ZERO_PAD = "zero_pad"


@dataclass(frozen=True)
class L2Truncation:
    """Window of Z^k of radius R.

    Cyclic: ``Z_{2R}`` per axis, indices ``-R .. R-1``.  Zero padded:
    ``-R .. R`` per axis.
    """

    free_rank: int
    radius: int
    mode: BoundaryMode = BoundaryMode.CYCLIC

    def __post_init__(self):
        object.__setattr__(self, "mode", BoundaryMode(self.mode))
        if self.free_rank < 0 or self.radius < 1:
            raise ValueError("need free_rank >= 0 and radius >= 1")

    @property
    def side(self) -> int:
        return 2 * self.radius if self.mode is BoundaryMode.CYCLIC else 2 * self.radius + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.free_rank

    @property
    def dim(self) -> int:
        return self.side**self.free_rank

    def index_of(self, h: Sequence[int]) -> int:
        """Flat position of the window index ``h``."""
        h = tuple(int(v) for v in h)
        if len(h) != self.free_rank:
            raise DimensionError("index has the wrong rank")
        offs = tuple(v + self.radius for v in h)
        if any(o < 0 or o >= self.side for o in offs):
            raise IndexError(f"{h} lies outside the window")
        return int(np.ravel_multi_index(offs, self.shape)) if self.free_rank else 0

    def basis_vector(self, h: Sequence[int]) -> np.ndarray:
        e = np.zeros(self.dim)
        e[self.index_of(h)] = 1.0
        return e


def translate(x, shift: Sequence[int], trunc: L2Truncation) -> np.ndarray:
    """``(g . x)(h) = x(h - g)`` on a flat window vector (or block of columns)."""
    x = np.asarray(x)
    shift = tuple(int(s) for s in shift)
    if len(shift) != trunc.free_rank:
        raise DimensionError("shift rank does not match the window")
    if x.shape[0] != trunc.dim:
        raise DimensionError(f"vector length {x.shape[0]} != window size {trunc.dim}")
    tail = x.shape[1:]
    grid = x.reshape(trunc.shape + tail)
    axes = tuple(range(trunc.free_rank))
    if trunc.mode is BoundaryMode.CYCLIC:
        return np.roll(grid, shift, axis=axes).reshape(x.shape)
    out = np.zeros_like(grid)
    src, dst = [], []
    for s in shift:
        if abs(s) >= trunc.side:
            return out.reshape(x.shape)
        src.append(slice(max(0, -s), trunc.side - max(0, s)))
        dst.append(slice(max(0, s), trunc.side - max(0, -s)))
    out[tuple(dst)] = grid[tuple(src)]
    return out.reshape(x.shape)


def right_translation_matrix(g: GroupElement | Sequence[int], trunc: L2Truncation) -> np.ndarray:
    """Matrix of the translation by the free part of ``g`` on the window.

    Cyclic windows give permutation matrices.  In zero-padded windows a shift
    longer than the radius emits :class:`TruncationWarning` (the matrix is then
    a partial permutation).
    """
    if isinstance(g, GroupElement):
        if any(g.torsion_part):
            raise ValueError("translation acts on the free part only; torsion part must be 0")
        shift = g.free_part
    else:
        shift = tuple(g)
    if trunc.mode is BoundaryMode.ZERO_PAD and any(abs(s) > trunc.radius for s in shift):
        warnings.warn(
            f"shift {shift} exceeds window radius {trunc.radius}", TruncationWarning, stacklevel=2
        )
    return translate(np.eye(trunc.dim), shift, trunc)


def root_of_unity(order: int, power: int = 1) -> complex:
    return complex(np.exp(2j * np.pi * power / order))


def torsion_scalar_action(p: int, alpha: int, dim: int) -> np.ndarray:
    """Multiplication by ``exp(2 pi i / p^alpha)`` on C^dim."""
    order = p**alpha
    if order < 2:
        raise ValueError("p^alpha must be >= 2")
    return root_of_unity(order) * np.eye(dim, dtype=complex)


# -- actions -----------------------------------------------------------------


@dataclass
class LinearIsometryAction:
    """Images of the generators: free generators first, then torsion ones."""

    group: GroupSpec
    generator_images: tuple[np.ndarray, ...]
    truncation: L2Truncation | None = None
    tol: float = 1e-10

    def __post_init__(self):
        self.generator_images = tuple(np.asarray(m) for m in self.generator_images)
        k = self.group.free_rank + len(self.group.torsion)
        if len(self.generator_images) != k:
            raise ValueError(f"expected {k} generator images, got {len(self.generator_images)}")
        dims = {m.shape for m in self.generator_images}
        if len(dims) > 1 or any(m.shape[0] != m.shape[1] for m in self.generator_images):
            raise DimensionError("generator images must be square and of one size")
        # zero-padded shifts are partial isometries; only torsion images must be unitary
        padded = self.truncation is not None and self.truncation.mode is BoundaryMode.ZERO_PAD
        checked = self.generator_images[self.group.free_rank :] if padded else self.generator_images
        for m in checked:
            if orthonormality_residual(m) > self.tol:
                raise ValueError("generator image is not orthogonal/unitary")
        for a, b in itertools.combinations(self.generator_images, 2):
            if np.max(np.abs(a @ b - b @ a)) > self.tol:
                raise ValueError("generator images do not commute")
        for m, order in zip(self.generator_images[self.group.free_rank :], self.group.orders):
            if np.max(np.abs(np.linalg.matrix_power(m, order) - np.eye(m.shape[0]))) > 1e-8:
                raise ValueError(f"torsion generator image does not have order dividing {order}")

    @property
    def ambient_dim(self) -> int:
        if self.generator_images:
            return self.generator_images[0].shape[0]
        return self.truncation.dim if self.truncation else 1

    def _power(self, m, k):
        if k >= 0:
            return np.linalg.matrix_power(m, k)
        return np.linalg.matrix_power(m.conj().T, -k)

    def rho(self, g: GroupElement) -> np.ndarray:
        out = np.eye(self.ambient_dim, dtype=np.result_type(*self.generator_images, float))
        for m, k in zip(self.generator_images, tuple(g.free_part) + tuple(g.torsion_part)):
            if k:
                out = out @ self._power(m, k)
        return out

    def as_map(self, g: GroupElement) -> np.ndarray:
        return self.rho(g)


def build_action(spec: GroupSpec, trunc: L2Truncation, multiplicity: int = 1) -> LinearIsometryAction:
    """Direct-sum action on ``l2(window) (x) C^multiplicity``.

    Free generators translate the window, torsion generators multiply by
    primitive roots of unity.  Without torsion the matrices are real.
    """
    if trunc.free_rank != spec.free_rank:
        raise DimensionError("window rank must equal the free rank of the group")
    eye_m = np.eye(multiplicity)
    images = []
    for axis in range(spec.free_rank):
        shift = [0] * spec.free_rank
        shift[axis] = 1
        images.append(np.kron(right_translation_matrix(shift, trunc), eye_m))
    dim = trunc.dim * multiplicity
    for p, a in spec.torsion:
        images.append(torsion_scalar_action(p, a, dim))
    if spec.torsion:
        images = [m.astype(complex) for m in images]
    return LinearIsometryAction(spec, tuple(images), trunc)


@dataclass
class FreenessCertificate:
    free: bool
    exact: bool
    checked: int
    violating_element: GroupElement | None = None
    fixed_vector: np.ndarray | None = None
    min_gap: float = np.inf
    notes: list[str] = field(default_factory=list)


def _fixed_vector(m, tol):
    if _is_diagonal(m):
        d = np.diagonal(m)
        gaps = np.abs(d - 1.0)
        i = int(np.argmin(gaps))
        vec = np.zeros(m.shape[0], dtype=m.dtype)
        vec[i] = 1.0
        return float(gaps[i]), vec
    _, s, vh = np.linalg.svd(m - np.eye(m.shape[0]))
    return float(s[-1]), vh[-1].conj()


def _is_diagonal(m):
    return np.count_nonzero(m - np.diag(np.diagonal(m))) == 0


def freeness_check(
    action: LinearIsometryAction,
    torsion_only: bool = True,
    tol: float = 1e-8,
    max_order: int = 10**6,
    rng=None,
    samples: int = 20,
    floor: float = 1e-3,
) -> FreenessCertificate:
    """Decide whether the action is free on the unit sphere.

    Torsion part (exact): a nontrivial g fixes a unit vector iff 1 is an
    eigenvalue of rho(g).  With ``torsion_only=False`` each free generator is
    additionally probed by orbit sampling, which can refute but not certify.
    """
    gap_min = np.inf
    checked = 0
    for g in action.group.torsion_elements(max_order=max_order):
        gap, vec = _fixed_vector(action.rho(g), tol)
        checked += 1
        gap_min = min(gap_min, gap)
        if gap <= tol:
            return FreenessCertificate(False, True, checked, g, vec, gap)
    cert = FreenessCertificate(True, True, checked, min_gap=gap_min)
    if not torsion_only and action.group.free_rank:
        rng = np.random.default_rng(0) if rng is None else rng
        cert.exact = False
        for axis in range(action.group.free_rank):
            shift = [0] * action.group.free_rank
            shift[axis] = 1
            g = action.group.element(shift)
            for _ in range(samples):
                x = random_finitely_supported(action, rng)
                rep = orbit_divergence_check(action, g, x, floor=floor)
                if not rep.passed:
                    cert.free = False
                    cert.violating_element = g
                    cert.fixed_vector = x
                    cert.notes.append(f"orbit of generator {axis} returned within {rep.min_distance:g}")
                    return cert
        cert.notes.append("free part probed by orbit sampling only")
    return cert


def diagonal_assignments(orders: Sequence[int], dim: int):
    """Every action of ``Z_{o1} (+) ... `` on C^dim by diagonal unitaries.

    Diagonal entries of each generator range over the o-th roots of unity, so
    there are ``prod(o^dim)`` assignments.
    """
    choices = [list(itertools.product(range(o), repeat=dim)) for o in orders]
    for combo in itertools.product(*choices):
        yield tuple(
            np.diag([root_of_unity(o, k) for k in ks]) for o, ks in zip(orders, combo)
        )


def torsion_obstruction_search(p: int, dim: int, copies: int = 2):
    """Exhaustive freeness test of ``(Z_p)^copies`` over all diagonal actions on C^dim.

    Returns ``(n_assignments, n_free, first_free_assignment)``.
    """
    spec = GroupSpec(0, ((p, 1),) * copies)
    total = free = 0
    first = None
    for images in diagonal_assignments([p] * copies, dim):
        action = LinearIsometryAction(spec, images)
        total += 1
        if freeness_check(action).free:
            free += 1
            first = first or images
    return total, free, first


@dataclass
class OrbitReport:
    min_distance: float
    argmin: int
    distances: np.ndarray
    floor: float

    @property
    def passed(self) -> bool:
        return self.min_distance >= self.floor


def orbit_divergence_check(
    action: LinearIsometryAction, g: GroupElement, x, K: int | None = None, floor: float = 1e-3
) -> OrbitReport:
    """``min_{1<=k<=K} |rho(g)^k x - x|`` and whether it clears ``floor``."""
    if not g.has_infinite_order:
        raise ValueError("orbit divergence needs an element of infinite order")
    x = np.asarray(x)
    if abs(np.linalg.norm(x) - 1.0) > 1e-10:
        raise ValueError("x must be a unit vector")
    trunc = action.truncation
    if K is None:
        K = trunc.radius - 1 if trunc else 10
    if trunc is not None:
        limit = trunc.radius - 1 if trunc.mode is BoundaryMode.CYCLIC else trunc.radius
        if K > limit or K < 1:
            raise ValueError(f"K={K} outside the wrap-free range 1..{limit} for this window")
    m = action.rho(g)
    dists = np.empty(K)
    y = x
    for k in range(K):
        y = m @ y
        dists[k] = np.linalg.norm(y - x)
    i = int(np.argmin(dists))
    return OrbitReport(float(dists[i]), i + 1, dists, floor)


def random_finitely_supported(action_or_trunc, rng, max_width=None, multiplicity=None):
    """Unit vector supported on a random box of the window's central region."""
    if isinstance(action_or_trunc, LinearIsometryAction):
        trunc = action_or_trunc.truncation
        multiplicity = action_or_trunc.ambient_dim // trunc.dim
    else:
        trunc = action_or_trunc
        multiplicity = multiplicity or 1
    r = trunc.radius
    max_width = max_width or max(1, r // 2)
    grid = np.zeros(trunc.shape + (multiplicity,))
    sl = []
    for _ in range(trunc.free_rank):
        w = int(rng.integers(1, max_width + 1))
        start = int(rng.integers(0, trunc.side - w + 1)) if trunc.mode is BoundaryMode.CYCLIC else r - w // 2
        sl.append(slice(start, start + w))
    block = grid[tuple(sl)]
    grid[tuple(sl)] = rng.standard_normal(block.shape)
    x = grid.reshape(-1)
    return x / np.linalg.norm(x)


def induced_stiefel_action(action: LinearIsometryAction, g: GroupElement, y) -> np.ndarray:
    y = np.asarray(y)
    if y.shape[0] != action.ambient_dim:
        raise DimensionError("frame does not live in the acted-on space")
    return action.rho(g) @ y


def induced_grassmann_action(action: LinearIsometryAction, g: GroupElement, x) -> np.ndarray:
    return induced_stiefel_action(action, g, x)


def grassmann_fixed_witness(action: LinearIsometryAction, g: GroupElement, x, tol=1e-9):
    """``(fixed, projector_distance)`` for the subspace spanned by ``x`` under g."""
    d = grassmann.projector_distance(x, induced_grassmann_action(action, g, x))
    return d <= tol, d


# -- displacement and Clifford translations -----------------------------------

MANIFOLDS = ("sphere", "stiefel", "grassmann", "flat", "hyperbolic", "halfspace")


def _as_map(f) -> Callable:
    if callable(f):
        return f
    m = np.asarray(f)
    return lambda x: m @ x


def sphere_distance(x, y) -> float:
    """Great-circle distance; complex vectors are read as real vectors of C^n."""
    x = np.asarray(x)
    y = np.asarray(y)
    # half-angle form: accurate near 0 and near pi alike
    return float(2.0 * np.arctan2(np.linalg.norm(x - y), np.linalg.norm(x + y)))


def manifold_distance(x, y, manifold: str, **kw) -> float:
    from . import spaceforms

    if manifold == "sphere":
        return sphere_distance(x, y)
    if manifold == "stiefel":
        return stiefel.distance(x, y, kw.get("kind", "canonical"))
    if manifold == "grassmann":
        return grassmann.grassmann_distance(x, y)
    if manifold == "flat":
        lattice = kw.get("lattice")
        if lattice is None:
            return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))
        return spaceforms.flat_quotient_distance(lattice, x, y)
    if manifold == "hyperbolic":
        return spaceforms.hyperboloid_distance(x, y)
    if manifold == "halfspace":
        return spaceforms.halfspace_distance(x, y)
    raise ValueError(f"unknown manifold {manifold!r}; expected one of {MANIFOLDS}")


def displacement(f, x, manifold: str, **kw) -> float:
    """``delta_f(x) = d(x, f(x))``; ``f`` is a callable or a matrix."""
    return manifold_distance(x, _as_map(f)(x), manifold, **kw)


@dataclass
class DisplacementProfile:
    samples: list
    min: float
    max: float
    mean: float

    @property
    def spread(self) -> float:
        return self.max - self.min


@dataclass
class CliffordVerdict:
    clifford: bool
    profile: DisplacementProfile
    witness: tuple | None = None

    @property
    def verdict(self) -> str:
        return "CLIFFORD" if self.clifford else "NOT_CLIFFORD"


def clifford_detector(f, points, manifold: str, tol: float = 1e-9, **kw) -> CliffordVerdict:
    """Constant displacement over the sampled points, up to ``tol * (1 + mean)``."""
    points = list(points)
    if len(points) < 2:
        raise ValueError("need at least two sample points")
    deltas = [displacement(f, x, manifold, **kw) for x in points]
    if min(deltas) < 0:
        raise AssertionError("negative displacement")
    arr = np.asarray(deltas)
    prof = DisplacementProfile(list(zip(points, deltas)), float(arr.min()), float(arr.max()), float(arr.mean()))
    ok = prof.spread <= tol * (1.0 + prof.mean)
    witness = None if ok else (points[int(arr.argmin())], points[int(arr.argmax())])
    return CliffordVerdict(ok, prof, witness)


@dataclass
class InvariantGeodesic:
    points: np.ndarray  # samples of the extended geodesic on t in [0, 2]
    ts: np.ndarray
    velocity_angle: float
    mapping_residual: float


def _angle(a, b) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0 if na == nb else np.pi
    return sphere_distance(a / na, b / nb)


def _unit_normal(x0):
    """A real-orthogonal unit vector to ``x0`` (deterministic)."""
    basis = np.eye(x0.shape[0], dtype=x0.dtype)
    for e in basis:
        u = e - np.real(np.vdot(x0, e)) * x0
        if np.iscomplexobj(x0):
            pass
        if np.linalg.norm(u) > 0.5:
            return u / np.linalg.norm(u)
    raise ValueError("cannot find a normal direction")


def invariant_geodesic(f, x0, manifold: str, verdict: CliffordVerdict | None, n_samples: int = 21):
    """Geodesic through ``x0`` and ``f(x0)`` continued by ``f``.

    Builds the minimal geodesic from x0 to f(x0), continues it to ``t in [1, 2]``
    and measures (i) the angle between the incoming velocity at f(x0) and the
    pushed-forward initial velocity, (ii) ``max_t |f(gamma(t)) - gamma(1 + t)|``.
    On the sphere and the hyperboloid ``f`` must be linear.
    """
    if verdict is None:
        raise ValueError("a Clifford verdict is required")
    if not verdict.clifford:
        raise ValueError("f is not a Clifford translation on the sampled points")
    fm = _as_map(f)
    x0 = np.asarray(x0)
    y0 = fm(x0)
    ts = np.linspace(0.0, 2.0, 2 * (n_samples - 1) + 1)
    if manifold == "flat":
        v = y0 - x0

        def gamma(t):
            return x0 + t * v

        vel_in = v
        vel_out = fm(x0 + v) - fm(x0)
    elif manifold in ("sphere", "hyperbolic"):
        from . import spaceforms

        if manifold == "sphere":
            d = sphere_distance(x0, y0)
            c, s, dc, ds = np.cos, np.sin, lambda t: -np.sin(t), np.cos
            if np.pi - d < 1e-8:
                u = _unit_normal(x0)
            elif d < 1e-15:
                u = _unit_normal(x0)
            else:
                u = (y0 - np.cos(d) * x0) / np.sin(d)
        else:
            d = spaceforms.hyperboloid_distance(x0, y0)
            c, s, dc, ds = np.cosh, np.sinh, np.sinh, np.cosh
            u = (y0 - np.cosh(d) * x0) / np.sinh(d) if d > 1e-15 else np.zeros_like(x0)

        def gamma(t):
            return c(t * d) * x0 + s(t * d) * u

        vel_in = d * (dc(d) * x0 + ds(d) * u)
        vel_out = fm(d * u)
    else:
        raise ValueError(f"invariant geodesics are built on sphere, flat or hyperbolic, not {manifold!r}")
    pts = np.array([gamma(t) for t in ts])
    half = ts <= 1.0 + 1e-12
    resid = max(np.linalg.norm(fm(gamma(t)) - gamma(1.0 + t)) for t in ts[half])
    return InvariantGeodesic(pts, ts, _angle(vel_in, vel_out), float(resid))
