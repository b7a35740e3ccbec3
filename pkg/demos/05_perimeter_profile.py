"""Interface energy of the multi-well perimeter functional.

The diffuse interface between two pure phases carries, per unit length,
an energy that converges (as the regularization length shrinks) to twice
the geodesic distance between the wells of W.  For the shipped W the
straight simplex edge gives 2 * 1/3; the 1D minimization confirms the
profile does not find a cheaper path through the simplex interior.
"""

import numpy as np

from morphopt import DesignField, perimeter_energy
from morphopt.mesh import build_rect_mesh
from morphopt.verify import minimize_profile, profile_coefficient

print("1D optimal-profile energies (per unit interface):")
rows = profile_coefficient([0.08, 0.04, 0.02])
for eps, energy in rows:
    print(f"  eps = {eps:5.3f}: {energy:.8f}")
print(f"  straight-edge bound 2/3 = {2 / 3:.8f}")

print("\nscalar double-well cross-check (classical value 1/3):")
(eps, energy), = profile_coefficient([0.05], potential="double")
print(f"  eps = {eps}: {energy:.8f}")

# Embed the optimal 1D profile in a 2D strip and evaluate the full
# perimeter functional: the energies agree.
eps = 0.04
energy_1d, (r2_prof, r3_prof) = minimize_profile(eps, n_intervals=2000)
mesh = build_rect_mesh(1.0, 0.1, 1 / 200, "left", None)
length = 40.0 * eps
x1d = np.linspace(0.0, length, len(r2_prof)) + 0.5 - 0.5 * length
design = DesignField(
    np.interp(mesh.nodes[:, 0], x1d, r2_prof, left=0.0, right=1.0),
    np.interp(mesh.nodes[:, 0], x1d, r3_prof, left=0.0, right=0.0))
per_unit = perimeter_energy(mesh, design, eps) / 0.1
print(f"\n2D strip evaluation at eps = {eps}: {per_unit:.8f} per unit "
      f"interface (1D oracle {energy_1d:.8f})")
