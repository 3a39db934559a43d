"""The twelve acceptance criteria, each run at its stated tolerance.

Every criterion runs its verification suite at the default configuration,
checks that the configuration echoed in the report is the one the criterion
names, and records one PASS/FAIL line.  The lines are printed at the end of
the pytest session, or directly when this file is run as a script.
"""

import sys

import pytest

from hilbert_manifolds.verify.suites import SuiteConfig, run_suite

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []

# number, suite, expected trials, expected dims, expected tolerances, check ids that must be present
CRITERIA = [
    (1, "metric-bounds", 10_000, {"n": 10, "p": 3}, {"bound": 1e-12, "identity": 1e-12},
     ["lower", "upper", "identity"]),
    (2, "geodesic-crossval", 200, {}, {"crossval": 1e-6, "speed": 1e-8},
     ["crossval-euclidean", "crossval-canonical", "speed-euclidean", "speed-canonical"]),
    (3, "totally-geodesic", 100, {"n": 4, "p": 2}, {"residual": 1e-9}, []),
    (4, "grassmann-hopfrinow", 500, {"n": 8, "p": 2}, {"roundtrip": 1e-8}, []),
    (5, "curvature-sign", 1000, {}, {"sign": 1e-9, "spread": 0.05, "jacobi": 5e-3}, []),
    (6, "kaehler-bounds", 1000, {}, {"bound": 5e-3}, []),
    (7, "torsion-obstruction", None, {}, {},
     ["free-assignments-Z2+Z2-C2", "free-assignments-Z2+Z2-C3", "free-assignments-Z3+Z3-C3",
      "scalar-free-Z4", "scalar-free-Z2+Z3", "scalar-free-Z2+Z9"]),
    (8, "orbit-divergence", 100, {"window_radius": 32}, {"floor": 1e-3}, []),
    (9, "clifford", None, {}, {"spread": 1e-9, "hyperbolic_spread": 0.1, "velocity": 1e-8},
     ["invariant-geodesic-residual", "halfspace-translation-spread"]),
    (10, "hyperbolic-models", 1000, {}, {"cross_model": 1e-9, "unit": 1e-12, "form": 1e-10, "group_law": 1e-9}, []),
    (11, "hinfty-action", None, {}, {"constraint": 1e-10, "reduction": 1e-9}, []),
    (12, "flat-quotient", 1000, {"n": 4}, {}, []),
]


def _run(number, name, trials, dims, tols, required):
    rep = run_suite(SuiteConfig(name, {}, None, 0, {}, None))
    cfg = rep.config
    problems = []
    if trials is not None and cfg["trials"] != trials:
        problems.append(f"trials {cfg['trials']} != {trials}")
    for k, v in dims.items():
        if cfg["dims"].get(k) != v:
            problems.append(f"dim {k}={cfg['dims'].get(k)} != {v}")
    for k, v in tols.items():
        if cfg["tolerances"].get(k) != v:
            problems.append(f"tolerance {k}={cfg['tolerances'].get(k)} != {v}")
    ids = {c["check_id"] for c in rep.checks}
    problems += [f"missing check {cid}" for cid in required if cid not in ids]
    if not rep.checks:
        problems.append("no checks recorded")
    if rep.error:
        problems.append(rep.error)
    failed = [c["check_id"] for c in rep.checks if not c["passed"]]
    if failed:
        problems.append("failed: " + ", ".join(failed[:5]))
    ok = rep.passed and not problems
    status = "PASS" if ok else "FAIL"
    line = f"{status} criterion {number}: {name} ({len(rep.checks)} checks)"
    if problems:
        line += " " + "; ".join(problems)
    return ok, line


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"{c[0]:02d}-{c[1]}" for c in CRITERIA])
def test_criterion(criterion):
    ok, line = _run(*criterion)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def main() -> int:
    results = [_run(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    return 0 if all(ok for ok, _ in results) else 1


if __name__ == "__main__":
    sys.exit(main())
