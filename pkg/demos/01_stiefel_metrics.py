"""Two metrics on the Stiefel manifold St(p, R^n).

The canonical metric discounts the part of a tangent vector that stays inside
span(Y) by one half, so it is squeezed between half the Euclidean norm and the
Euclidean norm.  Both metrics have closed-form geodesics; we check them
against a plain RK4 integration of the geodesic equation.
"""

import numpy as np

from hilbert_manifolds import stiefel as st

rng = np.random.default_rng(1)
n, p = 10, 3
y = st.random_point(n, p, rng)
v = st.random_tangent(y, rng)

e = st.metric(y, v, v, kind="euclidean")
c = st.metric(y, v, v, kind="canonical")
print(f"<V,V> = {e:.6f}   g_c(V,V) = {c:.6f}   ratio = {c / e:.4f}  (always in [1/2, 1])")

# a purely vertical direction Y*Omega is discounted by exactly one half
om = rng.standard_normal((p, p))
vert = y @ (om - om.T)
print("vertical ratio  :", st.metric(y, vert, vert) / st.metric(y, vert, vert, kind="euclidean"))

for kind in ("euclidean", "canonical"):
    closed = st.geodesic(y, v, 1.0, kind=kind)
    ode = st.geodesic_ode(y, v, 1.0, kind=kind)
    print(f"{kind:9s} geodesic: closed form vs RK4 = {np.linalg.norm(closed - ode):.2e}")

# the geodesic distance is computed by shooting; it never exceeds the length of the path it found
y2 = st.geodesic(y, 0.8 * v / st.norm(y, v))
print("distance along a short geodesic:", st.distance(y, y2), "(expected 0.8)")
