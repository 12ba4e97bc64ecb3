"""
Edge vectors form a Parseval frame
==================================

For a random connected network the normalised edge dipoles reproduce the
energy of every function exactly, and they form an orthonormal basis only
when the network is a tree.
"""

import numpy as np

from energynet.energy import energy_norm
from energynet.frame import analysis, build_frame, frame_diagnostics, orient, synthesis
from energynet.models import random_connected_network

rng = np.random.default_rng(1)

for tree in (False, True):
    net = random_connected_network(25, rng, tree=tree)
    frame = build_frame(net, orient(net))
    diag = frame_diagnostics(frame)
    print(f"tree={tree}: {len(net)} vertices, {len(net.edges)} edges, rank {diag.rank}, "
          f"ONB {diag.is_onb}, idempotence defect {diag.idempotence_defect:.1e}")

    # energy of a random function against the sum of squared frame coefficients
    u = rng.normal(size=len(net))
    coeffs = analysis(frame, u)
    print(f"  |u|_E^2 = {energy_norm(net, u) ** 2:.12f}")
    print(f"  sum c^2 = {np.sum(coeffs ** 2):.12f}")

    # synthesis from the coefficients gives u back modulo constants
    back = synthesis(frame, coeffs).values
    err = np.ptp((back - back[0]) - (u - u[0]))
    print(f"  reconstruction spread {err:.1e}")
