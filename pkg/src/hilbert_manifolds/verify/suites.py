"""Named verification suites.

Every suite draws its random inputs from per-trial generators
``default_rng(SeedSequence(seed, spawn_key=(stream, trial)))``, so the inputs of
trial ``i`` do not depend on how many trials ran before it.  Checks are
aggregated to their worst case; the inputs of that worst case are kept as
the witness.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .. import actions, grassmann, kaehler, spaceforms, stiefel
from ..ambient import kaehler_form, random_orthonormal

# -- configuration and reports --------------------------------------------------


class ConfigError(ValueError):
    pass


class UnknownSuiteError(KeyError):
    pass


@dataclass
class SuiteConfig:
    suite_name: str
    dims: dict = field(default_factory=dict)
    trials: int | None = None
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output_path: str | None = None

    def validate(self, suite: "Suite"):
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        for name, value in self.tolerances.items():
            if name not in suite.tolerances:
                known = ", ".join(sorted(suite.tolerances))
                raise ConfigError(f"unknown tolerance {name!r} for {suite.name} (known: {known})")
            if not value > 0:
                raise ConfigError(f"tolerance {name} must be positive")
        for name, value in self.dims.items():
            if name not in ("n", "p", "k", "window_radius"):
                raise ConfigError(f"unknown dimension {name!r}")
            if value < 1:
                raise ConfigError(f"dimension {name} must be >= 1")


@dataclass
class CheckRecord:
    check_id: str
    value: float
    bound: float
    margin: float
    passed: bool
    count: int = 1


class Recorder:
    """Keeps, per check id, the observation with the smallest margin."""

    def __init__(self):
        self.checks: dict[str, CheckRecord] = {}
        self.witnesses: dict[str, object] = {}

    def _observe(self, cid, value, bound, margin, witness):
        value = float(value)
        margin = float(margin)
        if math.isnan(margin):
            margin = -math.inf
        rec = self.checks.get(cid)
        if rec is None or margin < rec.margin:
            count = rec.count + 1 if rec else 1
            self.checks[cid] = CheckRecord(cid, value, float(bound), margin, margin >= 0, count)
            if witness is not None:
                self.witnesses[cid] = serialize(witness() if callable(witness) else witness)
        else:
            rec.count += 1

    def le(self, cid, value, bound, witness=None):
        """Record ``value <= bound``."""
        self._observe(cid, value, bound, bound - value, witness)

    def ge(self, cid, value, bound, witness=None):
        """Record ``value >= bound``."""
        self._observe(cid, value, bound, value - bound, witness)

    def flag(self, cid, ok: bool, witness=None):
        self._observe(cid, 1.0 if ok else 0.0, 1.0, 0.0 if ok else -1.0, witness)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks.values())


@dataclass
class SuiteReport:
    suite_name: str
    anchor: str
    config: dict
    passed: bool
    checks: list
    witness: dict
    runtime_ms: float
    error: str | None = None

    def to_dict(self, runtime=True) -> dict:
        d = asdict(self)
        if not runtime:
            d.pop("runtime_ms")
        return _json_safe(d)

    def to_json(self, runtime=True) -> str:
        return json.dumps(self.to_dict(runtime), sort_keys=True, indent=2)

    def digest(self) -> str:
        """Hash of the report without the wall-clock field."""
        return hashlib.sha256(self.to_json(runtime=False).encode()).hexdigest()

    def csv_rows(self):
        for c in self.checks:
            yield (self.suite_name, c["check_id"], c["value"], c["bound"], c["margin"])


def _json_safe(obj):
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def serialize(obj):
    """Plain-JSON rendering of suite inputs (arrays, scalars, group elements...)."""
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"shape": list(obj.shape), "re": obj.real.ravel().tolist(), "im": obj.imag.ravel().tolist()}
        return {"shape": list(obj.shape), "data": obj.astype(float).ravel().tolist()}
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int, bool, np.bool_)):
        return obj if isinstance(obj, bool) else int(obj)
    if isinstance(obj, complex) or isinstance(obj, np.complexfloating):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, dict):
        return {str(k): serialize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [serialize(v) for v in obj]
    if hasattr(obj, "__dataclass_fields__"):
        return {k: serialize(getattr(obj, k)) for k in obj.__dataclass_fields__}
    return str(obj)


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, trial)))


# -- registry ------------------------------------------------------------------


@dataclass
class Suite:
    name: str
    anchor: str
    description: str
    run: Callable
    dims: dict
    trials: int
    tolerances: dict


REGISTRY: dict[str, Suite] = {}


def suite(name, anchor, description, dims=None, trials=100, tolerances=None):
    def deco(fn):
        REGISTRY[name] = Suite(name, anchor, description, fn, dims or {}, trials, tolerances or {})
        return fn

    return deco


class Ctx:
    """What a suite body sees: merged dims, trials, tolerances and rng factory."""

    def __init__(self, s: Suite, cfg: SuiteConfig):
        self.dims = {**s.dims, **cfg.dims}
        self.dims_overridden = set(cfg.dims)
        self.trials = cfg.trials or s.trials
        self.tol = {**s.tolerances, **cfg.tolerances}
        self.seed = cfg.seed

    def rng(self, trial, stream=0):
        return trial_rng(self.seed, trial, stream)


def list_suites():
    return [(s.name, s.anchor, s.description) for s in REGISTRY.values()]


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    """Run one suite.  Solver failures inside the suite are reported, not raised."""
    if cfg.suite_name not in REGISTRY:
        raise UnknownSuiteError(cfg.suite_name)
    s = REGISTRY[cfg.suite_name]
    cfg.validate(s)
    ctx = Ctx(s, cfg)
    rec = Recorder()
    echo = {
        "suite_name": s.name,
        "dims": dict(sorted(ctx.dims.items())),
        "trials": ctx.trials,
        "seed": cfg.seed,
        "tolerances": dict(sorted(ctx.tol.items())),
    }
    t0 = time.perf_counter()
    error = None
    try:
        s.run(ctx, rec)
    except Exception as exc:  # reported as an internal failure (exit 3)
        error = f"{type(exc).__name__}: {exc}"
    runtime = (time.perf_counter() - t0) * 1e3
    checks = [asdict(c) for c in rec.checks.values()]
    passed = error is None and rec.passed
    witness = dict(rec.witnesses)
    if not passed and not witness:
        witness = {"error": error or "no checks recorded"}
    return SuiteReport(s.name, s.anchor, echo, passed, checks, witness, round(runtime, 3), error)


# -- helpers -------------------------------------------------------------------

KINDS = (stiefel.MetricKind.EUCLIDEAN, stiefel.MetricKind.CANONICAL)


def _unit(v):
    return v / np.linalg.norm(v)


def _random_unit_complex(n, rng):
    return _unit(rng.standard_normal(n) + 1j * rng.standard_normal(n))


# -- Stiefel and Grassmann suites ---------------------------------------------------


@suite(
    "metric-bounds",
    "canonical metric: 'defines a norm equivalent to'",
    "1/2 <V,V> <= g_Y(V,V) <= <V,V> and g = <V,V> - 1/2 |Y^T V|^2",
    dims={"n": 10, "p": 3},
    trials=10_000,
    tolerances={"bound": 1e-12, "identity": 1e-12},
)
def _metric_bounds(ctx, rec):
    n, p = ctx.dims["n"], ctx.dims["p"]
    tb, ti = ctx.tol["bound"], ctx.tol["identity"]
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        y = stiefel.random_point(n, p, rng)
        v = stiefel.random_tangent(y, rng, norm=rng.uniform(0.1, 2.0))
        g = stiefel.metric(y, v, v, "canonical")
        e = float(np.sum(v * v))
        a = y.T @ v
        w = lambda: {"Y": y, "V": v}
        rec.ge("lower", g - 0.5 * e, -tb, w)
        rec.le("upper", g - e, tb, w)
        rec.le("identity", abs(g - (e - 0.5 * np.sum(a * a))), ti, w)
    # equality cases: vertical directions halve, horizontal ones keep the norm
    rng = ctx.rng(0, stream=1)
    y = stiefel.random_point(n, p, rng)
    a = rng.standard_normal((p, p))
    vert = y @ (a - a.T)
    hor = grassmann.random_horizontal(y, rng)
    rec.le("vertical-equality", abs(stiefel.metric(y, vert, vert) - 0.5 * np.sum(vert**2)), tb)
    rec.le("horizontal-equality", abs(stiefel.metric(y, hor, hor) - np.sum(hor**2)), tb)


@suite(
    "geodesic-crossval",
    "closed-form geodesics of both metrics vs the geodesic equation",
    "matrix-exponential geodesics agree with RK4 integration; constant speed",
    dims={"n": 6, "p": 2},
    trials=200,
    tolerances={"crossval": 1e-6, "speed": 1e-8},
)
def _geodesic_crossval(ctx, rec):
    n, p = ctx.dims["n"], ctx.dims["p"]
    ts = np.linspace(0.0, 1.0, 6)
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        y = stiefel.random_point(n, p, rng)
        v = stiefel.random_tangent(y, rng, norm=rng.uniform(0.05, 2.0))
        for kind in KINDS:
            w = lambda: {"Y": y, "V": v, "kind": kind.value}
            closed = stiefel.geodesic(y, v, 1.0, kind)
            ode = stiefel.geodesic_ode(y, v, 1.0, kind)
            rec.le(f"crossval-{kind.value}", np.max(np.abs(closed - ode)), ctx.tol["crossval"], w)
            s0 = stiefel.speed(y, v, kind)
            drift = 0.0
            for t in ts[1:]:
                yt, vt = stiefel.geodesic(y, v, t, kind, with_velocity=True, check=False)
                drift = max(drift, abs(stiefel.speed(yt, vt, kind) - s0))
            rec.le(f"speed-{kind.value}", drift, ctx.tol["speed"], w)


@suite(
    "totally-geodesic",
    "isometric embeddings: 'are totally geodesic'",
    "geodesics of St(2,R^4) and Gr(2,R^4) stay inside St(2,R^8) and Gr(2,R^8)",
    dims={"n": 4, "p": 2},
    trials=100,
    tolerances={"residual": 1e-9},
)
def _totally_geodesic(ctx, rec):
    n, p = ctx.dims["n"], ctx.dims["p"]
    ts = np.linspace(0.0, 2.0, 9)
    tol = ctx.tol["residual"]
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        l = random_orthonormal(2 * n, n, rng)
        out = np.eye(2 * n) - l @ l.T
        y = stiefel.random_point(n, p, rng)
        v = stiefel.random_tangent(y, rng, norm=rng.uniform(0.1, 2.0))
        ly, lv = stiefel.embed_isometric(l, y), l @ v
        for kind in KINDS:
            w = lambda: {"L": l, "Y": y, "V": v, "kind": kind.value}
            res = max(np.linalg.norm(out @ stiefel.geodesic(ly, lv, t, kind)) for t in ts)
            rec.le(f"stiefel-out-of-subspace-{kind.value}", res, tol, w)
            push = max(
                np.linalg.norm(stiefel.geodesic(ly, lv, t, kind) - l @ stiefel.geodesic(y, v, t, kind))
                for t in ts
            )
            rec.le(f"stiefel-pushforward-{kind.value}", push, tol, w)
        x = grassmann.random_point(n, p, rng)
        xi = grassmann.random_horizontal(x, rng, norm=rng.uniform(0.1, 2.0))
        lx = grassmann.grassmann_embed(l, x)
        w = lambda: {"L": l, "X": x, "xi": xi}
        res = max(np.linalg.norm(out @ grassmann.grassmann_geodesic(lx, l @ xi, t)) for t in ts)
        rec.le("grassmann-out-of-subspace", res, tol, w)


@suite(
    "grassmann-hopfrinow",
    "Grassmann manifold: 'satisfying the Hopf-Rinow theorem'",
    "exp_x(log_x y) = y below the cut locus",
    dims={"n": 8, "p": 2},
    trials=500,
    tolerances={"roundtrip": 1e-8, "cut_margin": 1e-3},
)
def _hopf_rinow(ctx, rec):
    n, p = ctx.dims["n"], ctx.dims["p"]
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        x = grassmann.random_point(n, p, rng)
        while True:
            y = grassmann.random_point(n, p, rng)
            if grassmann.principal_angles(x, y)[-1] < np.pi / 2 - ctx.tol["cut_margin"]:
                break
        xi = grassmann.grassmann_log(x, y)
        w = lambda: {"X": x, "Y": y}
        back = grassmann.grassmann_geodesic(x, xi, 1.0)
        rec.le("roundtrip-distance", grassmann.grassmann_distance(back, y), ctx.tol["roundtrip"], w)
        rec.le("log-length", abs(np.linalg.norm(xi) - grassmann.grassmann_distance(x, y)), ctx.tol["roundtrip"], w)
        rec.le("log-horizontal", np.max(np.abs(x.T @ xi)), ctx.tol["roundtrip"], w)


@suite(
    "submersion",
    "Grassmann projection: 'is a Riemannian submersion'",
    "horizontal Stiefel geodesics project to Grassmann geodesics; metrics agree on horizontals",
    dims={"n": 8, "p": 2},
    trials=200,
    tolerances={"projector": 1e-8, "metric": 1e-12},
)
def _submersion(ctx, rec):
    n, p = ctx.dims["n"], ctx.dims["p"]
    ts = np.linspace(0.0, 1.0, 5)
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        y = stiefel.random_point(n, p, rng)
        xi = grassmann.random_horizontal(y, rng, norm=rng.uniform(0.1, 2.0))
        eta = grassmann.random_horizontal(y, rng)
        w = lambda: {"Y": y, "xi": xi, "eta": eta}
        for kind in KINDS:
            d = max(
                grassmann.projector_distance(stiefel.geodesic(y, xi, t, kind), grassmann.grassmann_geodesic(y, xi, t))
                for t in ts
            )
            rec.le(f"projected-geodesic-{kind.value}", d, ctx.tol["projector"], w)
        ge = stiefel.metric(y, xi, eta, "euclidean")
        gc = stiefel.metric(y, xi, eta, "canonical")
        rec.le("euclid-vs-canonical-on-horizontals", abs(ge - gc), ctx.tol["metric"] * (1 + abs(ge)), w)
        rec.le("submersion-metric", abs(grassmann.submersion_metric(y, xi, eta) - ge), ctx.tol["metric"] * (1 + abs(ge)), w)
        # representative independence
        a = random_orthonormal(p, p, rng)
        d = grassmann.projector_distance(grassmann.grassmann_geodesic(y @ a, xi @ a, 0.7), grassmann.grassmann_geodesic(y, xi, 0.7))
        rec.le("representative-independence", d, 1e-10, w)


@suite(
    "involution",
    "geodesic symmetry: '(d sigma_W)_W = -Id'",
    "sigma_W fixes W, is an involution, preserves distance and reverses geodesics through W",
    dims={"n": 8, "p": 2},
    trials=200,
    tolerances={"fixed": 1e-10, "distance": 1e-10, "differential": 1e-8},
)
def _involution(ctx, rec):
    n, p = ctx.dims["n"], ctx.dims["p"]
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        wb = grassmann.random_point(n, p, rng)
        x = grassmann.random_point(n, p, rng)
        y = grassmann.random_point(n, p, rng)
        w = lambda: {"W": wb, "X": x, "Y": y}
        rec.le("fixes-W", grassmann.projector_distance(grassmann.involution(wb, wb), wb), ctx.tol["fixed"], w)
        sx = grassmann.involution(wb, x)
        rec.le("involutive", grassmann.projector_distance(grassmann.involution(wb, sx), x), ctx.tol["fixed"], w)
        d0 = grassmann.grassmann_distance(x, y)
        d1 = grassmann.grassmann_distance(sx, grassmann.involution(wb, y))
        rec.le("isometry", abs(d1 - d0), ctx.tol["distance"], w)
        xi = grassmann.random_horizontal(wb, rng)
        h = 1e-3
        fwd = grassmann.involution(wb, grassmann.grassmann_geodesic(wb, xi, h))
        bwd = grassmann.grassmann_geodesic(wb, -xi, h)
        rec.le("differential-minus-identity", grassmann.projector_distance(fwd, bwd), ctx.tol["differential"], w)


@suite(
    "curvature-sign",
    "canonical metric curvature: 'nonnegative and nonconstant whenever p >= 2'",
    "O'Neill sectional curvature >= 0, nonconstant, matches a Jacobi-field estimate",
    dims={},
    trials=1000,
    tolerances={"sign": 1e-9, "spread": 0.05, "jacobi": 5e-3},
)
def _curvature_sign(ctx, rec):
    if {"n", "p"} & ctx.dims_overridden:
        configs = [(ctx.dims.get("p", 2), ctx.dims.get("n", 4))]
    else:
        configs = [(2, 4), (2, 6), (3, 6)]
    n_jacobi = min(50, ctx.trials)
    for ci, (p, n) in enumerate(configs):
        vals = []
        for i in range(ctx.trials):
            rng = ctx.rng(i, stream=ci)
            y = stiefel.random_point(n, p, rng)
            v = stiefel.random_tangent(y, rng)
            u = stiefel.random_tangent(y, rng)
            w = lambda: {"Y": y, "V": v, "W": u}
            k = stiefel.sectional_curvature_canonical(y, v, u)
            vals.append(k)
            rec.ge(f"nonnegative-p{p}-n{n}", k, -ctx.tol["sign"], w)
            if i < n_jacobi:
                kj = stiefel.sectional_curvature_jacobi(y, v, u)
                rec.le(f"oneill-vs-jacobi-p{p}-n{n}", abs(k - kj), ctx.tol["jacobi"], w)
        rec.ge(f"nonconstant-p{p}-n{n}", max(vals) - min(vals), ctx.tol["spread"])
    # p = 1 is the round unit sphere
    rng = ctx.rng(0, stream=99)
    y = stiefel.random_point(5, 1, rng)
    k1 = stiefel.sectional_curvature_canonical(y, stiefel.random_tangent(y, rng), stiefel.random_tangent(y, rng))
    rec.le("sphere-curvature-one", abs(k1 - 1.0), 1e-10)


@suite(
    "kaehler-bounds",
    "complex Grassmannian: '2/p <= K_Y(X, J(X)) <= 2'",
    "holomorphic sectional curvature within [2/p, 2]; equal to 2 for p = 1",
    dims={},
    trials=1000,
    tolerances={"bound": 5e-3, "closed_form": 1e-10, "kaehler_form": 1e-12, "jacobi": 5e-3},
)
def _kaehler_bounds(ctx, rec):
    ps = [ctx.dims["p"]] if "p" in ctx.dims_overridden else [1, 2, 3]
    for p in ps:
        n = ctx.dims["n"] if "n" in ctx.dims_overridden else 2 * p + 2
        for i in range(ctx.trials):
            rng = ctx.rng(i, stream=p)
            x = kaehler.random_point(n, p, rng)
            xv = kaehler.random_horizontal(x, rng)
            w = lambda: {"Y": x, "X": xv}
            k = kaehler.holomorphic_sectional_curvature(x, xv)
            rec.ge(f"lower-p{p}", k, 2.0 / p - ctx.tol["bound"], w)
            rec.le(f"upper-p{p}", k, 2.0 + ctx.tol["bound"], w)
            if p == 1:
                rec.le("p1-equals-2", abs(k - 2.0), ctx.tol["bound"], w)
            rec.le(f"closed-form-p{p}", abs(k - kaehler.holomorphic_curvature_closed_form(xv)), ctx.tol["closed_form"], w)
            if i < 10:
                kj = kaehler.curvature_jacobi(x, xv, 1j * xv)
                rec.le(f"jacobi-p{p}", abs(k - kj), ctx.tol["jacobi"], w)
        rng = ctx.rng(0, stream=50 + p)
        a = rng.standard_normal((n, p)) + 1j * rng.standard_normal((n, p))
        b = rng.standard_normal((n, p)) + 1j * rng.standard_normal((n, p))
        rec.le(f"omega-equals-minus-imag-h-p{p}", abs(kaehler.kaehler_triple(a, b)[1] - kaehler_form(a, b)), ctx.tol["kaehler_form"])


# -- discrete actions ----------------------------------------------------------------


FREE_SPECS = [((2, 1),), ((2, 2),), ((3, 1),), ((2, 1), (3, 1)), ((2, 1), (3, 2)), ((2, 3), (5, 1), (7, 1))]
NONFREE_SPECS = [((2, 1), (2, 1)), ((3, 1), (3, 2)), ((2, 1), (3, 1), (3, 1))]


@suite(
    "action-freeness",
    "torsion summands: 'if and only if p_i != p_j'",
    "scalar torsion with distinct primes is free, repeated primes are not; group law and isometry",
    dims={"k": 1, "window_radius": 4},
    trials=1000,
    tolerances={"group_law": 1e-10, "equivariance": 1e-9, "separation": 1e-3},
)
def _action_freeness(ctx, rec):
    trunc = actions.L2Truncation(ctx.dims["k"], ctx.dims["window_radius"])
    for tors in FREE_SPECS:
        act = actions.build_action(actions.GroupSpec(0, tors), actions.L2Truncation(0, 1), multiplicity=3)
        cert = actions.freeness_check(act)
        rec.flag(f"free-{_spec_label(tors)}", cert.free and cert.exact, lambda: cert)
    for tors in NONFREE_SPECS:
        act = actions.build_action(actions.GroupSpec(0, tors), actions.L2Truncation(0, 1), multiplicity=3)
        cert = actions.freeness_check(act)
        rec.flag(f"nonfree-{_spec_label(tors)}", not cert.free and cert.fixed_vector is not None, lambda: cert)
        if not cert.free:
            m = act.rho(cert.violating_element)
            rec.le(f"fixed-vector-{_spec_label(tors)}", np.linalg.norm(m @ cert.fixed_vector - cert.fixed_vector), 1e-12)
    spec = actions.GroupSpec(trunc.free_rank, ((2, 2), (3, 1)))
    act = actions.build_action(spec, trunc)
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        g1 = spec.random_element(rng)
        g2 = spec.random_element(rng)
        w = lambda: {"g1": g1, "g2": g2}
        lhs = act.rho(spec.multiply(g1, g2))
        rec.le("group-law", np.max(np.abs(lhs - act.rho(g1) @ act.rho(g2))), ctx.tol["group_law"], w)
        x = rng.standard_normal(trunc.dim)
        gx = actions.translate(x, g1.free_part, trunc)
        # correctly rounded sums are order-free, so a permutation must match bitwise
        rec.le("translation-norm-exact", abs(math.fsum(gx * gx) - math.fsum(x * x)), 0.0, w)
    for a, b in zip(act.generator_images, act.generator_images[1:]):
        rec.le("generators-commute", np.max(np.abs(a @ b - b @ a)), 1e-12)
    # displacement equivariance delta_g(x) = delta_{T g T^-1}(T x)
    for i in range(min(ctx.trials, 100)):
        rng = ctx.rng(i, stream=1)
        dim = 6
        g = random_orthonormal(dim, dim, rng)
        t = random_orthonormal(dim, dim, rng)
        x = _unit(rng.standard_normal(dim))
        d0 = actions.displacement(g, x, "sphere")
        d1 = actions.displacement(t @ g @ t.T, t @ x, "sphere")
        rec.le("displacement-equivariance", abs(d1 - d0), ctx.tol["equivariance"], lambda: {"g": g, "T": t, "x": x})
    # scalar torsion fixes every complex line: the Grassmann action is not free
    act3 = actions.build_action(actions.GroupSpec(0, ((3, 1),)), actions.L2Truncation(0, 1), multiplicity=4)
    g = act3.group.element(torsion=(1,))
    x = kaehler.random_point(4, 1, ctx.rng(0, stream=2))
    fixed, d = actions.grassmann_fixed_witness(act3, g, x)
    rec.flag("scalar-fixes-complex-line", fixed, {"X": x, "projector_distance": d})
    # shift action on Gr(2, window): sampled orbit separation
    shift_act = actions.build_action(actions.GroupSpec(1), actions.L2Truncation(1, 8))
    g = shift_act.group.element((1,))
    for i in range(min(ctx.trials, 50)):
        rng = ctx.rng(i, stream=3)
        cols = np.stack([actions.random_finitely_supported(shift_act, rng, max_width=3) for _ in range(2)], axis=1)
        x = np.linalg.qr(cols)[0]
        y = x
        sep = np.inf
        for _ in range(shift_act.truncation.radius - 1):
            y = actions.induced_grassmann_action(shift_act, g, y)
            sep = min(sep, grassmann.projector_distance(x, y))
        rec.ge("grassmann-shift-separation", sep, ctx.tol["separation"], lambda: {"X": x})


def _spec_label(tors):
    return "+".join(f"Z{p ** a}" for p, a in tors)


@suite(
    "torsion-obstruction",
    "torsion summands: 'if and only if p_i != p_j'",
    "every diagonal action of Z_p + Z_p has a fixed vector; distinct-prime scalar actions are free",
    dims={},
    trials=1,
    tolerances={},
)
def _torsion_obstruction(ctx, rec):
    cases = [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4)]
    for p, d in cases:
        total, n_free, first = actions.torsion_obstruction_search(p, d)
        rec.le(f"free-assignments-Z{p}+Z{p}-C{d}", n_free, 0, lambda: {"first_free": first})
        rec.ge(f"assignments-enumerated-Z{p}+Z{p}-C{d}", total, float(p ** (2 * d)))
    for tors in [((2, 2),), ((2, 1), (3, 1)), ((2, 1), (3, 2))]:
        act = actions.build_action(actions.GroupSpec(0, tors), actions.L2Truncation(0, 1), multiplicity=2)
        cert = actions.freeness_check(act)
        rec.flag(f"scalar-free-{_spec_label(tors)}", cert.free and cert.exact, lambda: cert)


@suite(
    "orbit-divergence",
    "discontinuous action: 'then a_n(x) does not converge'",
    "shift orbits of finitely supported unit vectors stay away from the start",
    dims={"k": 1, "window_radius": 32},
    trials=100,
    tolerances={"floor": 1e-3},
)
def _orbit_divergence(ctx, rec):
    trunc = actions.L2Truncation(ctx.dims["k"], ctx.dims["window_radius"])
    act = actions.build_action(actions.GroupSpec(trunc.free_rank), trunc)
    g = act.group.element((1,) + (0,) * (trunc.free_rank - 1))
    K = trunc.radius - 1
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        x = actions.random_finitely_supported(act, rng)
        rep = actions.orbit_divergence_check(act, g, x, K, floor=ctx.tol["floor"])
        rec.ge("min-orbit-distance", rep.min_distance, ctx.tol["floor"], lambda: {"x": x, "argmin_k": rep.argmin})
    e0 = trunc.basis_vector((0,) * trunc.free_rank)
    rep = actions.orbit_divergence_check(act, g, e0, K)
    rec.le("basis-vector-sqrt2", abs(rep.min_distance - np.sqrt(2.0)), 1e-15)


@suite(
    "clifford",
    "Clifford translations: 'of hyperbolic space is the identity'",
    "scalar sphere maps and Euclidean translations are Clifford; half-space translations are not",
    dims={"n": 3},
    trials=200,
    tolerances={"spread": 1e-9, "hyperbolic_spread": 0.1, "velocity": 1e-8, "angle": 1e-6},
)
def _clifford(ctx, rec):
    n = ctx.dims["n"]
    pts = [_random_unit_complex(n, ctx.rng(i)) for i in range(ctx.trials)]
    for j, theta in enumerate([0.3, 1.0, 2.0, np.pi]):
        f = np.exp(1j * theta) * np.eye(n)
        verdict = actions.clifford_detector(f, pts, "sphere", tol=ctx.tol["spread"])
        rec.le(f"scalar-spread-theta{j}", verdict.profile.spread, ctx.tol["spread"])
        rec.le(f"scalar-displacement-theta{j}", abs(verdict.profile.mean - theta), 1e-12)
        for x in pts[:20]:
            geo = actions.invariant_geodesic(f, x, "sphere", verdict)
            rec.le("invariant-geodesic-residual", geo.mapping_residual, ctx.tol["velocity"], lambda: {"x": x, "theta": theta})
            rec.le("invariant-geodesic-angle", geo.velocity_angle, ctx.tol["angle"], lambda: {"x": x, "theta": theta})
    rng = ctx.rng(0, stream=1)
    v = rng.standard_normal(n)
    flat_pts = [rng.standard_normal(n) for _ in range(20)]
    verdict = actions.clifford_detector(lambda x: x + v, flat_pts, "flat", tol=ctx.tol["spread"])
    rec.flag("euclidean-translation-clifford", verdict.clifford)
    geo = actions.invariant_geodesic(lambda x: x + v, flat_pts[0], "flat", verdict)
    rec.le("euclidean-invariant-line", geo.mapping_residual, ctx.tol["velocity"])
    m = np.ones(n - 1)
    heights = [np.concatenate([np.zeros(n - 1), [h]]) for h in (0.5, 2.0)]
    verdict = actions.clifford_detector(lambda x: spaceforms.zn_halfspace_action(m, x), heights, "halfspace")
    rec.ge("halfspace-translation-spread", verdict.profile.spread, ctx.tol["hyperbolic_spread"])
    rec.flag("halfspace-translation-not-clifford", not verdict.clifford)


# -- space forms --------------------------------------------------------------------


@suite(
    "hyperbolic-models",
    "hyperboloid model: 'isometries with respect to the Minkowski metric'",
    "half-space and hyperboloid distances agree; Z^n translations are Lorentz matrices",
    dims={"n": 3},
    trials=1000,
    tolerances={"cross_model": 1e-9, "unit": 1e-12, "form": 1e-10, "group_law": 1e-9, "roundtrip": 1e-12},
)
def _hyperbolic_models(ctx, rec):
    d = ctx.dims["n"]
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        x = spaceforms.random_halfspace(d, rng)
        y = spaceforms.random_halfspace(d, rng)
        w = lambda: {"x": x, "y": y}
        dh = spaceforms.halfspace_distance(x, y)
        dk = spaceforms.hyperboloid_distance(spaceforms.model_isometry(x), spaceforms.model_isometry(y))
        rec.le("cross-model", abs(dh - dk), ctx.tol["cross_model"], w)
        rec.le("roundtrip", np.max(np.abs(spaceforms.model_isometry_inverse(spaceforms.model_isometry(x)) - x)), ctx.tol["roundtrip"], w)
    e = np.zeros(d)
    e[-1] = 1.0
    f = e.copy()
    f[-1] = np.e
    rec.le("unit-vertical-distance", abs(spaceforms.halfspace_distance(e, f) - 1.0), ctx.tol["unit"])
    rec.le("basepoint", np.max(np.abs(spaceforms.model_isometry(e) - np.eye(d + 1)[-1])), 0.0)
    for i in range(min(ctx.trials, 200)):
        rng = ctx.rng(i, stream=1)
        m1 = rng.integers(-5, 6, d - 1)
        m2 = rng.integers(-5, 6, d - 1)
        w = lambda: {"m1": m1, "m2": m2}
        a = spaceforms.zn_minkowski_matrix(m1)
        b = spaceforms.zn_minkowski_matrix(m2)
        rec.le("form-preservation", spaceforms.lorentz_residual(a), ctx.tol["form"], w)
        ab = spaceforms.zn_minkowski_matrix(m1 + m2)
        rec.le("group-law", np.max(np.abs(ab - a @ b)) / max(1.0, np.max(np.abs(ab))), ctx.tol["group_law"], w)
        x = spaceforms.random_halfspace(d, rng)
        u = spaceforms.model_isometry(spaceforms.zn_halfspace_action(m1, x))
        rec.le("conjugation-consistency", np.max(np.abs(a @ spaceforms.model_isometry(x) - u)) / max(1.0, u[-1]), ctx.tol["group_law"], w)


@suite(
    "hinfty-action",
    "infinite-dimensional hyperbolic space: 'acts on H-infinity by setting'",
    "Z^n acts on the l2 block by translation and on (xi, t) by a Lorentz matrix",
    dims={"k": 2, "window_radius": 4},
    trials=200,
    tolerances={"constraint": 1e-10, "floor": 1e-3, "reduction": 1e-9},
)
def _hinfty(ctx, rec):
    k, r = ctx.dims["k"], ctx.dims["window_radius"]
    trunc = actions.L2Truncation(k, r)
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        x = rng.uniform(0.1, 2.0) * actions.random_finitely_supported(trunc, rng)
        z = spaceforms.HInftyPoint.lift(x, rng.standard_normal(k + 1))
        m = rng.integers(-2, 3, k)
        if not m.any():
            m[0] = 1
        w = lambda: {"z": z, "m": m}
        z1 = spaceforms.hinfty_action(m, z, trunc)
        rec.le("constraint", abs(z1.q() + 1.0), ctx.tol["constraint"], w)
        back = spaceforms.hinfty_action(-m, z1, trunc)
        rec.le("inverse", np.max(np.abs(back.vector() - z.vector())), 1e-9 * z.t, w)
        zk, floor = z, np.inf
        for _ in range(r - 1):
            zk = spaceforms.hinfty_action(m, zk, trunc)
            floor = min(floor, spaceforms.hinfty_distance(z, zk))
        rec.ge("orbit-floor", floor, ctx.tol["floor"], w)
        # x = 0: the finite-dimensional action
        xi = rng.standard_normal(k + 1)
        z0 = spaceforms.HInftyPoint.lift(np.zeros(trunc.dim), xi)
        z0m = spaceforms.hinfty_action(m, z0, trunc)
        rec.le("zero-block-stays-zero", np.max(np.abs(z0m.x)), 0.0, w)
        hs = spaceforms.model_isometry(spaceforms.zn_halfspace_action(m, spaceforms.model_isometry_inverse(np.append(xi, z0.t))))
        rec.le("zero-block-reduction", np.max(np.abs(np.append(z0m.xi, z0m.t) - hs)) / max(1.0, hs[-1]), ctx.tol["reduction"], w)


def _random_lattice(k, dim, rng):
    while True:
        b = np.eye(dim)[:k] + 0.4 * rng.standard_normal((k, dim))
        lat = spaceforms.Lattice(b)
        if lat.condition < 1e3:
            return lat


@suite(
    "flat-quotient",
    "flat quotients: 'family of linearly independent vectors'",
    "R^n / lattice distance is a metric on orbits and matches brute force",
    dims={"n": 4},
    trials=1000,
    tolerances={"axiom": 1e-12, "orbit": 1e-9, "brute_force": 1e-12},
)
def _flat_quotient(ctx, rec):
    dim = ctx.dims["n"]
    for i in range(ctx.trials):
        rng = ctx.rng(i)
        k = int(rng.integers(1, dim + 1))
        lat = _random_lattice(k, dim, rng)
        x, y, z = (2.0 * rng.standard_normal(dim) for _ in range(3))
        w = lambda: {"lattice": lat.generators, "x": x, "y": y, "z": z}
        dxy = spaceforms.flat_quotient_distance(lat, x, y)
        dyx = spaceforms.flat_quotient_distance(lat, y, x)
        dyz = spaceforms.flat_quotient_distance(lat, y, z)
        dxz = spaceforms.flat_quotient_distance(lat, x, z)
        tol = ctx.tol["axiom"] * (1 + dxy + dyz)
        rec.le("symmetry", abs(dxy - dyx), tol, w)
        rec.le("triangle", dxz - dxy - dyz, tol, w)
        rec.le("below-euclidean", dxy - np.linalg.norm(x - y), tol, w)
        coeffs = rng.integers(-3, 4, k)
        rec.le("vanishes-on-orbit", spaceforms.flat_quotient_distance(lat, x, x + coeffs @ lat.generators), ctx.tol["orbit"], w)
        shifted = spaceforms.flat_quotient_distance(lat, x + coeffs @ lat.generators, y)
        rec.le("orbit-invariance", abs(shifted - dxy), ctx.tol["orbit"], w)
        rec.ge("positive-off-orbit", dxy, 1e-12, w)
    z2 = spaceforms.Lattice(np.eye(2))
    rec.le("half-half", abs(spaceforms.flat_quotient_distance(z2, [0.5, 0.5], [0.0, 0.0]) - np.sqrt(0.5)), 1e-15)
    for i in range(min(ctx.trials, 300)):
        rng = ctx.rng(i, stream=1)
        x, y = 5.0 * rng.standard_normal(2), 5.0 * rng.standard_normal(2)
        d = spaceforms.flat_quotient_distance(z2, x, y)
        # shift y into the unit box around x, then enumerate |w|_inf <= 2
        y0 = y + np.round(x - y)
        bf = spaceforms.flat_brute_force_distance(z2, x, y0, reach=2)
        rec.le("brute-force-Z2", abs(d - bf), ctx.tol["brute_force"], lambda: {"x": x, "y": y})


@suite(
    "sphere-quotient",
    "spherical space forms: 'finite multiplicative group of elements'",
    "finite scalar groups act freely on spheres by Clifford translations",
    dims={"n": 2},
    trials=1000,
    tolerances={"spread": 1e-9},
)
def _sphere_quotient(ctx, rec):
    dim = ctx.dims["n"]
    groups = [("Z2-real", spaceforms.cyclic_scalar_group(2, "real"))]
    groups += [(f"Z{m}-complex", spaceforms.cyclic_scalar_group(m)) for m in (3, 4, 5, 7, 12)]
    groups += [("Q8-quaternion", spaceforms.quaternion_group())]
    for gi, (label, spec) in enumerate(groups):
        cert = spaceforms.sphere_quotient_check(spec, dim, rng=ctx.rng(gi), samples=ctx.trials, tol=ctx.tol["spread"])
        rec.flag(f"free-{label}", cert.free, lambda: {"min_eigen_gap": cert.min_eigen_gap})
        rec.flag(f"closed-{label}", cert.closed)
        worst = max(hi - lo for _, lo, hi in cert.displacements)
        rec.le(f"displacement-spread-{label}", worst, ctx.tol["spread"])
        off = max(max(abs(lo - e), abs(hi - e)) for e, lo, hi in cert.displacements)
        rec.le(f"displacement-arccos-{label}", off, ctx.tol["spread"])
