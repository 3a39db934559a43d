"""Free isometric actions of Z^k plus finite abelian groups on the unit sphere.

Translations of l2(Z^k) act freely, and orbits never settle down: for a
finitely supported x the shifts g^k x leave every neighbourhood of x.  A
finite part can act freely only when its primes are distinct.  Two copies of
Z_2 on C^2 always leave some nontrivial element with eigenvalue 1.
"""

import numpy as np

from hilbert_manifolds import actions as ac

rng = np.random.default_rng(4)

trunc = ac.L2Truncation(1, 32)
spec = ac.GroupSpec(1)
act = ac.build_action(spec, trunc)
x = ac.random_finitely_supported(act, rng)
rep = ac.orbit_divergence_check(act, spec.element((1,)), x, K=31)
print(f"shift orbit on a window of side {trunc.side}: min_k |g^k x - x| = {rep.min_distance:.4f}")

# free scalar action of Z_4 + Z_3 (distinct primes) on C^2
mixed = ac.build_action(ac.GroupSpec(0, ((2, 2), (3, 1))), ac.L2Truncation(0, 1), multiplicity=2)
print("Z4+Z3 scalars free:", ac.freeness_check(mixed).free)

# every diagonal assignment of Z2+Z2 on C^2 has a fixed vector
total, n_free, first = ac.torsion_obstruction_search(2, 2)
print(f"Z2+Z2 on C^2: {total} diagonal assignments, {n_free} free")

# Clifford test: scalar rotation of the sphere moves every point the same amount
theta = 0.7
pts = [v / np.linalg.norm(v) for v in rng.standard_normal((50, 3)) + 1j * rng.standard_normal((50, 3))]
verdict = ac.clifford_detector(lambda z: np.exp(1j * theta) * z, pts, "sphere")
print("e^{i theta} is Clifford:", verdict.clifford, f"(displacement {verdict.profile.mean:.6f}, theta {theta})")
