"""
A path with geometrically growing conductances
==============================================

On the path 0 - 1 - 2 - ... with conductance Q^n on the edge (n-1, n), the
solution of (Laplacian + I)u = 0 started at u(0) = 1 has finite energy when
Q > 1 and infinite energy on the unit path.  This script shows the partial
energies, the slow approach of the difference ratio to 1/Q, and the harmonic
function Q^-n.
"""

import numpy as np

from energynet.models import (
    GeometricModel,
    deficiency_recurrence,
    friedrichs_domain_test,
    harmonic_geometric,
)

for Q, N in ((1.5, 640), (2.0, 320), (5.0, 320), (1.0, 640)):
    rep = deficiency_recurrence(GeometricModel(Q, N))
    print(f"Q={Q:<4} energy at n=40: {rep.energy_partial[40]:.6g}, at n={N}: {rep.energy_partial[-1]:.6g}"
          f" -> {rep.energy_classification}")

# the difference ratio tends to 1/Q, but only like 1/n
rep = deficiency_recurrence(GeometricModel(2.0, 320))
for n in (10, 40, 160, 319):
    print(f"  n={n:<3} ratio {rep.diff_ratio[n]:.6f}  (1/Q = 0.5, gap {rep.diff_ratio[n] - 0.5:.2e})")

# Q^-n is harmonic away from vertex 0, with energy Q - 1 in the limit
h = harmonic_geometric(GeometricModel(2.0, 30))
print(f"harmonic Q^-n: energy {h.energy:.12f}, limit {h.limit}, residual {h.interior_residual:.1e}")

# but its Laplacian-weighted differences do not decay: every term equals (1 - 1/Q)^2
dom = friedrichs_domain_test(GeometricModel(2.0, 40), lambda n: 2.0 ** -n)
print("domain test terms:", np.unique(np.round(dom.terms, 12)), "->", dom.classification)
