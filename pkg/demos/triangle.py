"""
The weighted triangle
=====================

Dipoles, currents, frame vectors and the Laplacian spectrum of a three-vertex
network, computed numerically and compared with their closed forms.
"""

import numpy as np

from energynet.energy import dipole, resistance_distance
from energynet.frame import build_frame, current, frame_diagnostics, orient
from energynet.models import TriangleModel, triangle_closed_forms, triangle_network, triangle_spectrum

# all conductances equal to one: the dipole v_01 is (1/3, -1/3, 0) up to a constant
unit = TriangleModel(1.0, 1.0, 1.0)
net = triangle_network(unit)
v = dipole(net, "0", "1")
print("v_01 grounded at vertex 2:", np.round(v.values - v.values[2], 6))
print("current through 0->1:", current(net, v, ("0", "1")))
print("resistance d(0,1):", resistance_distance(net, "0", "1"))

# unequal conductances: solver and closed form agree
model = TriangleModel(1.0, 2.0, 3.0)
net = triangle_network(model)
forms = triangle_closed_forms(model)
v = dipole(net, "0", "1").values
print("solver v_01:     ", np.round(v - v[2], 6))
print("closed-form v_01:", np.round(forms["v01"], 6))

# three edges, a two-dimensional energy space: a Parseval frame that is not a basis
diag = frame_diagnostics(build_frame(net, orient(net)))
for key, value in diag.rows():
    print(f"  {key:>20} {value}")

# the spectrum has a closed form; the gap collapses to zero for equal conductances
for m in (unit, model, TriangleModel(0.1, 5.0, 5.0)):
    rep = triangle_spectrum(m)
    print((m.c01, m.c02, m.c12), "eigenvalues", np.round(rep.eigenvalues, 6), "gap", round(rep.gap, 6))
