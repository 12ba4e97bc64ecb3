"""The energy Hilbert space of a network.

Vectors are functions on V modulo constants.  Every function this module
returns is the *grounded* representative, i.e. the one vanishing at the base
vertex ``o``.  Dipoles are obtained from one factorization of the reduced
(grounded) Laplacian, which is symmetric positive definite on a connected
network.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .network import Network, laplacian_apply, laplacian_matrix, total_conductance

#: above this many vertices the grounded system is solved iteratively
DIRECT_SOLVE_LIMIT = 2000
ITERATIVE_RTOL = 1e-12


class VerificationError(ArithmeticError):
    """A numerical identity that must hold was violated beyond tolerance."""


@dataclass(frozen=True, eq=False)
class PotentialFunction:
    """A vertex function standing for its class modulo constants."""

    network: Network
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", self.network.values(self.values))

    @property
    def grounded(self) -> bool:
        return self.values[self.network.base_index] == 0

    def ground(self) -> "PotentialFunction":
        return PotentialFunction(self.network, self.values - self.values[self.network.base_index])

    def __getitem__(self, vertex: str):
        return self.values[self.network.index[vertex]]

    def as_dict(self) -> dict:
        return dict(zip(self.network.vertices, self.values.tolist()))

    def _coerce(self, other):
        if isinstance(other, PotentialFunction):
            return other.values
        return self.network.values(other)

    def __add__(self, other):
        return PotentialFunction(self.network, self.values + self._coerce(other))

    def __sub__(self, other):
        return PotentialFunction(self.network, self.values - self._coerce(other))

    def __mul__(self, scalar):
        return PotentialFunction(self.network, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return PotentialFunction(self.network, -self.values)


def _vals(net, u):
    return u.values if isinstance(u, PotentialFunction) else net.values(u)


def ground(net: Network, u) -> np.ndarray:
    v = _vals(net, u)
    return v - v[net.base_index]


# ---- solver -----------------------------------------------------------------------


class GroundedSolver:
    """Solves Δu = f with u(o) = 0 for right-hand sides summing to zero."""

    def __init__(self, net: Network):
        net.require_valid()
        self.network = net
        self.reduced = net.reduced_indices
        L = laplacian_matrix(net)
        self.reduced_laplacian = L[np.ix_(self.reduced, self.reduced)]
        self.direct = len(net) <= DIRECT_SOLVE_LIMIT
        if self.direct:
            try:
                self._factor = sla.cho_factor(self.reduced_laplacian, lower=True)
            except np.linalg.LinAlgError:
                raise VerificationError("reduced Laplacian is not positive definite "
                                        "(network disconnected?)") from None
        else:
            self._sparse = sp.csr_matrix(self.reduced_laplacian)
            self._diag = self.reduced_laplacian.diagonal()

    def solve_reduced(self, rhs: np.ndarray) -> np.ndarray:
        """Solve the reduced system for one or several right-hand sides on V'."""
        if self.direct:
            return sla.cho_solve(self._factor, rhs)
        rhs = np.asarray(rhs, dtype=float)
        if rhs.ndim == 2:
            return np.column_stack([self.solve_reduced(col) for col in rhs.T])
        M = sp.diags(1.0 / self._diag)
        sol, info = spla.cg(self._sparse, rhs, rtol=ITERATIVE_RTOL, atol=0.0, M=M,
                            maxiter=20 * len(rhs))
        if info != 0:
            raise VerificationError(f"conjugate gradient did not converge (info={info})")
        return sol

    def potential(self, source) -> np.ndarray:
        """Grounded u with Δu = source (source must sum to zero)."""
        src = np.asarray(source)
        out = np.zeros(len(self.network), dtype=np.result_type(src, float))
        if np.iscomplexobj(src):
            out[self.reduced] = (self.solve_reduced(src.real[self.reduced])
                                 + 1j * self.solve_reduced(src.imag[self.reduced]))
        else:
            out[self.reduced] = self.solve_reduced(src[self.reduced])
        return out


def solver_for(net: Network) -> GroundedSolver:
    """Cached solver; networks are immutable so one factorization serves all."""
    cache = net._cache
    if "solver" not in cache:
        cache["solver"] = GroundedSolver(net)
    return cache["solver"]


# ---- inner products -------------------------------------------------------------------


def energy_inner(net: Network, u, v):
    """<u, v>_E = ½ ΣΣ c_xy conj(u(x)-u(y)) (v(x)-v(y)), summed once per edge."""
    i, j, c = net.edge_arrays()
    a, b = _vals(net, u), _vals(net, v)
    val = np.sum(c * np.conj(a[i] - a[j]) * (b[i] - b[j]))
    return complex(val) if np.iscomplexobj(val) else float(val)


def energy_norm(net: Network, u) -> float:
    return float(np.sqrt(abs(energy_inner(net, u, u))))


def energy_gram(net: Network, rows: np.ndarray, cols: np.ndarray | None = None) -> np.ndarray:
    """Matrix of energy inner products between rows of two value matrices."""
    i, j, c = net.edge_arrays()
    A = rows[:, i] - rows[:, j]
    B = A if cols is None else cols[:, i] - cols[:, j]
    return (np.conj(A) * c) @ B.T


def delta(net: Network, x: str) -> np.ndarray:
    e = np.zeros(len(net))
    e[net.index[x]] = 1.0
    return e


# ---- dipoles ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DipoleSystem:
    """Grounded dipoles v_x = v_{x,o} for x in V' and their energy Gramian.

    ``values[k]`` is the grounded v_x for ``x = vertices[k]`` on all of V.
    """

    network: Network
    vertices: tuple[str, ...]
    values: np.ndarray
    gramian: np.ndarray
    _pos: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._pos.update({x: k for k, x in enumerate(self.vertices)})

    def position(self, x: str) -> int:
        return self._pos[x]

    def dipole(self, x: str) -> np.ndarray:
        """Values of v_x; v_o is the zero function."""
        if x == self.network.base:
            return np.zeros(len(self.network))
        return self.values[self._pos[x]]

    @cached_property
    def dipoles(self) -> dict[str, PotentialFunction]:
        return {x: PotentialFunction(self.network, self.values[k])
                for k, x in enumerate(self.vertices)}

    def extended_gramian(self) -> np.ndarray:
        """Gramian over all of V with the zero row/column for v_o (canonical order)."""
        n = len(self.network)
        red = self.network.reduced_indices
        G = np.zeros((n, n))
        G[np.ix_(red, red)] = self.gramian
        return G

    def combine(self, coeffs) -> np.ndarray:
        """Values of Σ ξ_x v_x for coefficients on V' (canonical order)."""
        return np.asarray(coeffs) @ self.values


def dipole_system(net: Network) -> DipoleSystem:
    """Solve all grounded dipoles v_x, x in V', with one factorization."""
    cache = net._cache
    if "dipole_system" in cache:
        return cache["dipole_system"]
    solver = solver_for(net)
    red = solver.reduced
    n = len(net)
    inv = solver.solve_reduced(np.eye(len(red)))
    values = np.zeros((len(red), n))
    values[:, red] = inv.T
    gram = energy_gram(net, values)
    gram = 0.5 * (gram + gram.T)
    system = DipoleSystem(net, net.reduced_vertices, values, gram)
    cache["dipole_system"] = system
    return system


def dipole(net: Network, x: str, y: str) -> PotentialFunction:
    """Grounded dipole v_xy solving Δv = δ_x - δ_y."""
    if x == y:
        raise ValueError("dipole needs two distinct vertices")
    for z in (x, y):
        if z not in net.index:
            raise KeyError(z)
    system = dipole_system(net)
    return PotentialFunction(net, system.dipole(x) - system.dipole(y))


def resistance_distance(net: Network, x: str, y: str) -> float:
    """Effective resistance d(x, y) = ||v_xy||_E^2."""
    if x == y:
        return 0.0
    v = dipole(net, x, y)
    return float(energy_inner(net, v, v))


def resistance_matrix(net: Network) -> np.ndarray:
    """All-pairs resistance via N_c(x,y) = G_xx + G_yy - 2 G_xy (v_o = 0)."""
    return negative_definite_kernel(net)


def negative_definite_kernel(net: Network) -> np.ndarray:
    G = dipole_system(net).extended_gramian()
    d = np.diag(G)
    N = d[:, None] + d[None, :] - 2.0 * G
    np.fill_diagonal(N, 0.0)
    return N


# ---- delta-vector identities ----------------------------------------------------------


def delta_inner(net: Network, x: str, y: str) -> float:
    """<δ_x, δ_y>_E: c(x) on the diagonal, -c_xy on edges, 0 otherwise."""
    if x == y:
        return float(total_conductance(net)[net.index[x]])
    net.require_valid()
    return -net.conductance(x, y)


def delta_pairing(net: Network, f, x: str, rtol: float = 1e-10):
    """<δ_x, f>_E, checked against (Δf)(x)."""
    vals = _vals(net, f)
    lhs = energy_inner(net, delta(net, x), vals)
    rhs = laplacian_apply(net, vals)[net.index[x]]
    k = net.index[x]
    scale = total_conductance(net)[k] * max(
        [abs(vals[k])] + [abs(vals[net.index[y]]) for y in net.neighbors(x)])
    if abs(lhs - rhs) > rtol * max(scale, 1e-300):
        raise VerificationError(f"<δ_{x}, f>_E = {lhs!r} but (Δf)({x}) = {rhs!r}")
    return lhs


def delta_expansion(net: Network, x: str, form: str | None = None) -> PotentialFunction:
    """Dipole combination equal to δ_x in the energy space.

    ``form="grounded"`` (default for x in V') is c(x) v_x - Σ_{y~x} c_xy v_y;
    ``form="pairs"`` (the only choice at the base vertex) is Σ_{y~x} c_xy v_xy.
    """
    system = dipole_system(net)
    if form is None:
        form = "pairs" if x == net.base else "grounded"
    out = np.zeros(len(net))
    if form == "grounded":
        if x == net.base:
            raise ValueError("grounded expansion needs x in V'")
        out += total_conductance(net)[net.index[x]] * system.dipole(x)
        for y in net.neighbors(x):
            out -= net.conductance(x, y) * system.dipole(y)
    elif form == "pairs":
        for y in net.neighbors(x):
            out += net.conductance(x, y) * (system.dipole(x) - system.dipole(y))
    else:
        raise ValueError(f"unknown form {form!r}")
    return PotentialFunction(net, out)


def harmonic_grounded_basis(net: Network) -> np.ndarray:
    """Grounded functions energy-orthogonal to every δ_x (columns on V').

    On a finite connected network only the zero function qualifies, so the
    returned array has no columns.
    """
    L = laplacian_matrix(net)
    return sla.null_space(L[:, net.reduced_indices])


@dataclass(frozen=True)
class NegativeDefiniteReport:
    trials: int
    max_violation: float
    max_identity_defect: float


def conditionally_negative_form(net: Network, xi) -> tuple[float, float]:
    """Return (ΣΣ conj(ξ_x) ξ_y N_c(x,y), -2 ||Σ ξ_x v_x||_E^2) for ξ on V."""
    xi = net.values(xi)
    N = negative_definite_kernel(net)
    lhs = np.conj(xi) @ N @ xi
    G = dipole_system(net).extended_gramian()
    energy = np.conj(xi) @ G @ xi
    return float(np.real(lhs)), float(-2.0 * np.real(energy))


def negative_definite_check(net: Network, trials: int, seed: int = 42) -> NegativeDefiniteReport:
    """Probe conditional negative definiteness of N_c on random mean-zero ξ."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst_pos = 0.0
    worst_defect = 0.0
    for _ in range(trials):
        xi = rng.standard_normal(len(net))
        xi -= xi.mean()
        lhs, rhs = conditionally_negative_form(net, xi)
        scale = max(abs(rhs), 1e-300)
        worst_pos = max(worst_pos, lhs / scale)
        worst_defect = max(worst_defect, abs(lhs - rhs) / scale)
    return NegativeDefiniteReport(trials, worst_pos, worst_defect)
