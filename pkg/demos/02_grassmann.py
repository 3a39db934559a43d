"""The Grassmannian as a quotient of the Stiefel manifold.

Points are orthonormal bases up to a rotation inside the span.  Distances are
the root sum of squared principal angles, and the logarithm inverts the
exponential map away from the cut locus (some angle equal to pi/2).
"""

import numpy as np

from hilbert_manifolds import grassmann as gr

rng = np.random.default_rng(2)
n, p = 8, 2
x = gr.random_point(n, p, rng)
y = gr.random_point(n, p, rng)

print("principal angles:", gr.principal_angles(x, y))
print("distance        :", gr.grassmann_distance(x, y))

xi = gr.grassmann_log(x, y)
back = gr.grassmann_geodesic(x, xi, 1.0)
print("exp(log y) == y :", gr.same_point(back, y), f"(projector gap {gr.projector_distance(back, y):.1e})")

# rotating the basis does not move the point
q, _ = np.linalg.qr(rng.standard_normal((p, p)))
print("basis change    :", gr.same_point(x, x @ q))

# pairs at the cut locus have no unique log
z = np.zeros((n, p)); z[2, 0] = z[3, 1] = 1
x0 = np.zeros((n, p)); x0[0, 0] = x0[1, 1] = 1
try:
    gr.grassmann_log(x0, z)
except gr.CutLocusError as exc:
    print("cut locus       :", exc)
