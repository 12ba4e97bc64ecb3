"""Energy-space analysis of finite resistor networks.

The package works with a finite connected network of positive conductances
and the Hilbert space of vertex functions modulo constants under the energy
form.  Submodules:

``network``    network data, validation, Laplacian and random-walk data
``energy``     energy inner product, grounded solver, dipoles, resistance
``frame``      the Parseval frame of scaled dipoles and current functionals
``operators``  K, L and their adjoints, LL* versus the Laplacian, transition operator
``models``     paths, geometric paths, binary trees, lattice strips, triangles
``series``     convergence verdicts for partial sums
"""

from .energy import (
    PotentialFunction,
    VerificationError,
    dipole,
    dipole_system,
    energy_inner,
    energy_norm,
    resistance_distance,
    resistance_matrix,
)
from .frame import build_frame, frame_diagnostics, orient
from .network import (
    InvalidNetworkError,
    Network,
    NetworkError,
    NotReversibleError,
    laplacian_apply,
    laplacian_matrix,
    load,
    loads,
    save,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "InvalidNetworkError", "Network", "NetworkError", "NotReversibleError", "PotentialFunction",
    "VerificationError", "build_frame", "dipole", "dipole_system", "energy_inner", "energy_norm",
    "frame_diagnostics", "laplacian_apply", "laplacian_matrix", "load", "loads", "orient",
    "resistance_distance", "resistance_matrix", "save", "validate",
]
