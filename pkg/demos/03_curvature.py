"""Sectional curvature: nonnegative, and not constant once p >= 2.

On the Stiefel manifold with the canonical metric we compute curvature from
O'Neill's formula and cross-check a few planes by finite differences of Jacobi
fields.  On the complex Grassmannian, the holomorphic sectional curvature lies
in [2/p, 2] under the projector normalization.
"""

import numpy as np

from hilbert_manifolds import kaehler as kh
from hilbert_manifolds import stiefel as st

rng = np.random.default_rng(3)
for p, n in ((2, 4), (2, 6), (3, 6)):
    ks = []
    for _ in range(200):
        y = st.random_point(n, p, rng)
        ks.append(st.sectional_curvature_canonical(y, st.random_tangent(y, rng), st.random_tangent(y, rng)))
    print(f"St({p},{n}): K in [{min(ks):.4f}, {max(ks):.4f}]")

y = st.random_point(4, 2, rng)
v, w = st.random_tangent(y, rng), st.random_tangent(y, rng)
print("O'Neill vs Jacobi:", st.sectional_curvature_canonical(y, v, w), st.sectional_curvature_jacobi(y, v, w))

for p in (1, 2, 3):
    n = 2 * p + 2
    x = kh.random_point(n, p, rng)
    hs = [kh.holomorphic_sectional_curvature(x, kh.random_horizontal(x, rng)) for _ in range(300)]
    print(f"Gr_C({p},{n}): holomorphic K in [{min(hs):.4f}, {max(hs):.4f}], bounds [{2 / p:.4f}, 2]")
