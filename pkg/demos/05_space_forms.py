"""Space forms and their quotients.

Hyperbolic space in two models (upper half space and hyperboloid) with the
isometry between them, the Z^n action by horizontal translations written as a
Lorentz matrix, the infinite-dimensional extension that carries an extra l2
block, flat tori as quotients of R^n by lattices and spherical space forms
from finite scalar groups.
"""

import numpy as np

from hilbert_manifolds import spaceforms as sp

rng = np.random.default_rng(5)

print("d((0,1),(0,e)) =", sp.halfspace_distance([0.0, 1.0], [0.0, np.e]))
x, y = sp.random_halfspace(3, rng), sp.random_halfspace(3, rng)
print("half space vs hyperboloid:", sp.halfspace_distance(x, y),
      sp.hyperboloid_distance(sp.model_isometry(x), sp.model_isometry(y)))

m = np.array([1, -2])
mat = sp.zn_minkowski_matrix(m)
print("Lorentz residual of the (1,-2) translation:", sp.lorentz_residual(mat))
u = sp.model_isometry(x)
print("matrix agrees with the half-space action:",
      np.allclose(mat @ u, sp.model_isometry(sp.zn_halfspace_action(m, x))))

lat = sp.Lattice(np.array([[1.0, 0.0], [0.3, 1.2]]))
p, q = rng.standard_normal(2), rng.standard_normal(2)
print("flat torus distance:", sp.flat_quotient_distance(lat, p, q),
      "brute force:", sp.flat_brute_force_distance(lat, p, q, reach=6))

for name, spec in (("Z5", sp.cyclic_scalar_group(5)), ("Q8", sp.quaternion_group())):
    cert = sp.sphere_quotient_check(spec, 2, rng)
    print(f"S/{name}: free={cert.free} clifford={cert.clifford} order={cert.order}")
