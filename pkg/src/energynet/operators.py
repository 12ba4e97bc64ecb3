"""Operators between coefficient space and the energy space.

Coordinates
-----------
An energy-space vector u = Σ_{x∈V'} ξ_x v_x is stored by its dipole
coordinates ξ (canonical order of V').  In these coordinates the energy
inner product is ξᴴ G η with G the dipole Gramian, and the coordinates of a
grounded function f are ``L_red @ f[V']`` with L_red the reduced Laplacian.

K sends a coefficient vector ξ to Σ ξ_x v_x, so its matrix is the identity
and its adjoint is G.  L sends ξ to Σ ξ_x δ_x; δ_x has dipole coordinates
equal to column x of L_red, so L is L_red and L* is the identity.  Both
pairs act on mean-zero coefficient vectors, spanned by e_x - e_x̄ for a
fixed reference x̄ in V'.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import series
from .energy import (
    VerificationError,
    _vals,
    dipole_system,
    energy_gram,
    energy_inner,
    energy_norm,
    solver_for,
)
from .network import Network, laplacian_apply, laplacian_matrix, total_conductance

ADJOINT_RTOL = 1e-10
FACTOR_RTOL = 1e-10
TRANSITION_TOL = 1e-12


@dataclass(frozen=True)
class OperatorPair:
    """Matrix of an operator and of its adjoint in dipole coordinates."""

    name: str
    forward: np.ndarray
    adjoint: np.ndarray
    domain_note: str
    basis: np.ndarray  # columns span the mean-zero domain

    def apply(self, xi):
        return self.forward @ np.asarray(xi)

    def apply_adjoint(self, w):
        return self.adjoint @ np.asarray(w)


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    gap: float
    geometry: str


def mean_zero_basis(n: int, reference: int = 0) -> np.ndarray:
    """Columns e_x - e_ref for x ≠ ref, an (n, n-1) matrix."""
    if n < 2:
        return np.zeros((n, 0))
    B = np.zeros((n, n - 1))
    cols = [k for k in range(n) if k != reference]
    for j, k in enumerate(cols):
        B[k, j] = 1.0
        B[reference, j] = -1.0
    return B


def _reduced_laplacian(net: Network) -> np.ndarray:
    return solver_for(net).reduced_laplacian


def build_K(net: Network) -> OperatorPair:
    """K(ξ) = Σ ξ_x v_x and its adjoint ζ = Gξ."""
    system = dipole_system(net)
    n = len(system.vertices)
    return OperatorPair("K", np.eye(n), system.gramian.copy(),
                        "mean-zero coefficient vectors on V'", mean_zero_basis(n))


def build_L(net: Network) -> OperatorPair:
    """L(ξ) = Σ ξ_x δ_x in dipole coordinates and L*(Σ ξ_x v_x) = ξ."""
    Lr = _reduced_laplacian(net)
    n = Lr.shape[0]
    return OperatorPair("L", Lr.copy(), np.eye(n),
                        "mean-zero coefficient vectors on V'", mean_zero_basis(n))


def _random_mean_zero(rng, n, complex_=False):
    xi = rng.standard_normal(n)
    if complex_:
        xi = xi + 1j * rng.standard_normal(n)
    return xi - xi.mean()


def adjointness_defect(net: Network, pair: OperatorPair, trials: int = 100, seed: int = 42) -> float:
    """Largest relative defect of ⟨A ξ, u⟩_E = ⟨ξ, A* u⟩_ℓ² over random mean-zero pairs.

    The energy side is evaluated edge by edge on actual functions, not through
    the Gramian, so the two sides are computed independently.
    """
    system = dipole_system(net)
    n = len(system.vertices)
    rng = np.random.default_rng(seed)
    red = net.reduced_indices
    worst = 0.0
    for _ in range(trials):
        xi = _random_mean_zero(rng, n)
        w = _random_mean_zero(rng, n)
        u = system.combine(w)
        if pair.name == "L":
            image = np.zeros(len(net))
            image[red] = xi  # Σ ξ_x δ_x straight from the definition
        else:
            image = system.combine(pair.apply(xi))
        lhs = energy_inner(net, image, u)
        rhs = float(np.dot(xi, pair.apply_adjoint(w)))
        scale = energy_norm(net, image) * energy_norm(net, u) + abs(rhs)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


@dataclass(frozen=True)
class FriedrichsResult:
    """LL* in dipole coordinates, its check against Δ, and the spectrum of Δ on H_E.

    ``ll_star`` acts on coordinates in V'; ``matrix`` is Δ itself on the whole
    energy space in the basis v_x = v_{x,o}.  The two agree on mean-zero ξ.
    """

    ll_star: np.ndarray
    matrix: np.ndarray
    defect: float
    worst_vertex: str
    spectrum: SpectralReport


def friedrichs_matrix(net: Network, rtol: float = FACTOR_RTOL) -> FriedrichsResult:
    system = dipole_system(net)
    Lpair = build_L(net)
    LLs = Lpair.forward @ Lpair.adjoint
    G = system.gramian
    n = G.shape[0]
    ones = np.ones(n)
    M = LLs @ (np.eye(n) + np.outer(ones, ones))

    B = mean_zero_basis(n)
    worst, where = 0.0, net.reduced_vertices[0] if n else net.base
    for k in range(B.shape[1]):
        u = system.combine(B[:, k])
        lap = laplacian_apply(net, u)
        got = system.combine(LLs @ B[:, k])
        d = energy_norm(net, got - lap) / max(energy_norm(net, lap), 1e-300)
        if d > worst:
            worst, where = d, net.reduced_vertices[k + 1]
    for k in range(n):
        lap = laplacian_apply(net, system.values[k])
        got = system.combine(M[:, k])
        d = energy_norm(net, got - lap) / max(energy_norm(net, lap), 1e-300)
        if d > worst:
            worst, where = d, net.reduced_vertices[k]
    if worst > rtol:
        raise VerificationError(f"LL* differs from the Laplacian at {where!r} "
                                f"(relative defect {worst:.3g})")
    # Δ is selfadjoint for the energy form: G M = I + 11ᵀ is symmetric
    evals = sla.eigh(np.eye(n) + np.outer(ones, ones), G, eigvals_only=True) if n else np.zeros(0)
    gap = float(evals[1] - evals[0]) if n > 1 else 0.0
    return FriedrichsResult(LLs, M, worst, where, SpectralReport(np.sort(evals), gap, "energy"))


def quadratic_form_defect(net: Network, trials: int = 100, seed: int = 42) -> float:
    """max |⟨φ, Δφ⟩_E - Σ|ξ_x|²| / Σ|ξ_x|² for φ = Σ ξ_x v_x, ξ mean-zero."""
    system = dipole_system(net)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        xi = _random_mean_zero(rng, len(system.vertices))
        phi = system.combine(xi)
        lhs = energy_inner(net, phi, laplacian_apply(net, phi))
        rhs = float(np.sum(np.abs(xi) ** 2))
        worst = max(worst, abs(lhs - rhs) / rhs)
    return worst


def greens_gauss_check(net: Network) -> float:
    """Apply Δ in y to y ↦ ⟨v_x, v_y⟩ and compare with δ_xz on V'."""
    system = dipole_system(net)
    Gext = system.extended_gramian()
    red = net.reduced_indices
    worst = 0.0
    for k, x in enumerate(red):
        col = laplacian_apply(net, Gext[x])
        target = np.zeros(len(net))
        target[x] = 1.0
        worst = max(worst, float(np.max(np.abs(col[red] - target[red]))))
    return worst


# ---- transition operator --------------------------------------------------------------


@dataclass(frozen=True)
class TransitionReport:
    matrix: np.ndarray
    spectrum: SpectralReport
    factorization_defect: float
    asymmetry: float
    spectral_radius: float
    row_sum_defect: float
    energy_norm: float


def transition_matrix(net: Network) -> np.ndarray:
    """P[x, y] = c_xy / c(x)."""
    L = laplacian_matrix(net)
    ct = total_conductance(net)
    C = -L.copy()
    np.fill_diagonal(C, 0.0)
    return C / ct[:, None]


def _coordinates(net: Network, values: np.ndarray) -> np.ndarray:
    """Dipole coordinates of the rows of ``values`` (functions on V)."""
    o = net.base_index
    grounded = values - values[..., [o]]
    return _reduced_laplacian(net) @ grounded[..., net.reduced_indices].T


def energy_operator_norm(net: Network, P: np.ndarray) -> float:
    """Norm of u ↦ Pu on the finite energy space (P must fix constants)."""
    system = dipole_system(net)
    G = system.gramian
    if G.shape[0] == 0:
        return 0.0
    images = (P @ system.values.T).T  # row k = P v_x
    M = _coordinates(net, images)  # column k = coordinates of P v_x
    evals = sla.eigh(M.T @ G @ M, G, eigvals_only=True)
    return float(np.sqrt(max(evals[-1], 0.0)))


def transition_operator(net: Network, tol: float = TRANSITION_TOL) -> TransitionReport:
    """Build P and check it against Δ = c̃(I - P) and ℓ²(c̃) symmetry."""
    net.require_valid()
    P = transition_matrix(net)
    ct = total_conductance(net)
    L = laplacian_matrix(net)
    fac = float(np.max(np.abs(L - ct[:, None] * (np.eye(len(net)) - P))) / np.max(np.abs(L)))
    d = np.sqrt(ct)
    S = d[:, None] * P / d[None, :]
    asym = float(np.max(np.abs(S - S.T)))
    evals = np.linalg.eigvalsh(0.5 * (S + S.T))
    radius = float(np.max(np.abs(evals)))
    rows = float(np.max(np.abs(P.sum(axis=1) - 1.0)))
    problems = [name for name, val in [("Laplacian factorization", fac), ("symmetrization", asym),
                                       ("row sums", rows)] if val > tol]
    if radius > 1.0 + tol:
        problems.append("spectral radius")
    if problems:
        raise VerificationError("transition operator check failed: " + ", ".join(problems))
    gap = float(evals[-1] - evals[-2]) if len(evals) > 1 else 0.0
    return TransitionReport(P, SpectralReport(evals, gap, "l2(c)"), fac, asym, radius, rows,
                            energy_operator_norm(net, P))


def harmonic_fixed_point_agreement(net: Network, trials: int = 20, seed: int = 42,
                                   tol: float = 1e-9) -> bool:
    """Check Δu = 0 ⇔ Pu = u on constants and random functions, and that both
    kernels are exactly the constants."""
    P = transition_matrix(net)
    L = laplacian_matrix(net)
    n = len(net)
    kerL = sla.null_space(L, rcond=1e-10)
    kerP = sla.null_space(np.eye(n) - P, rcond=1e-10)
    if kerL.shape[1] != 1 or kerP.shape[1] != 1:
        return False
    for k in (kerL[:, 0], kerP[:, 0]):
        if np.ptp(k / k[0]) > tol:
            return False
    rng = np.random.default_rng(seed)
    probes = [np.ones(n) * rng.standard_normal()] + [rng.standard_normal(n) for _ in range(trials)]
    for u in probes:
        harmonic = np.max(np.abs(L @ u)) <= tol * np.max(np.abs(L)) * np.max(np.abs(u))
        fixed = np.max(np.abs(P @ u - u)) <= tol * np.max(np.abs(u))
        if harmonic != fixed:
            return False
    return True


@dataclass(frozen=True)
class PDipoleReport:
    """Compare P v_x with Σ_y p_xy v_y.

    On a finite network the two differ by δ_o / c(o) exactly, so
    ``energy_defect`` equals ``predicted_defect`` = 1/sqrt(c(o)); pointwise on
    V' they coincide (``reduced_defect``).
    """

    energy_defect: float
    predicted_defect: float
    reduced_defect: float
    mean_zero_defect: float


def p_on_dipoles_check(net: Network, trials: int = 100, seed: int = 42) -> PDipoleReport:
    system = dipole_system(net)
    P = transition_matrix(net)
    red = net.reduced_indices
    V = np.zeros((len(net), len(net)))
    V[red] = system.values  # row = canonical index, v_o = 0
    lhs = V[red] @ P.T  # row k: P applied to v_x
    rhs = P[red] @ V  # row k: Σ_y p_xy v_y
    diff = lhs - rhs
    e_def = max((energy_norm(net, d) for d in diff), default=0.0)
    r_def = float(np.max(np.abs(diff[:, red]))) if len(red) else 0.0
    ct = total_conductance(net)
    rng = np.random.default_rng(seed)
    mz = 0.0
    for _ in range(trials):
        xi = np.zeros(len(net))
        xi[red] = _random_mean_zero(rng, len(red))
        mz = max(mz, abs(float(np.sum(xi @ P))) / max(float(np.sum(np.abs(xi))), 1e-300))
    return PDipoleReport(e_def, 1.0 / np.sqrt(ct[net.base_index]), r_def, mz)


# ---- deficiency ----------------------------------------------------------------------


MIN_INTERIOR = 8

_VERDICT = {series.CONVERGENT: "finite energy", series.DIVERGENT: "infinite energy",
            series.INCONCLUSIVE: "inconclusive"}


@dataclass(frozen=True)
class DeficiencyReport:
    """Solution of (Δ + I)u = 0 on the interior with u(o) = 1."""

    network: Network
    values: np.ndarray
    interior: tuple[str, ...]
    interior_residual: float
    layer_energy: np.ndarray  # partial energy over edges within BFS layer ≤ k
    classification: str
    method: str


def bfs_layers(net: Network, start=None) -> dict[str, int]:
    start = net.base if start is None else start
    dist = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in net.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def _peel(net: Network, interior: set, order):
    """Forward solve when every interior equation has one unknown neighbour.

    Edge differences are carried directly instead of being recomputed from
    values; this keeps the scheme stable on paths whose conductances grow
    geometrically.  Returns ``None`` when the equations do not peel.
    """
    u = {net.base: 1.0}
    diffs = {}  # (x, y) -> u(y) - u(x)

    def d(x, y):
        if (x, y) in diffs:
            return diffs[(x, y)]
        if (y, x) in diffs:
            return -diffs[(y, x)]
        return u[y] - u[x]

    for x in order:
        if x not in interior:
            continue
        if x not in u:
            return None
        nbrs = net.neighbors(x)
        unknown = [y for y in nbrs if y not in u]
        if len(unknown) > 1:
            return None
        s = u[x] - sum(net.conductance(x, y) * d(x, y) for y in nbrs if y in u)
        if unknown:
            y = unknown[0]
            diffs[(x, y)] = s / net.conductance(x, y)
            u[y] = u[x] + diffs[(x, y)]
    if len(u) != len(net):
        return None
    return np.array([u[x] for x in net.vertices]), d


def _min_energy(net: Network, interior: list):
    """Least-energy u with u(o) = 1 subject to (Δu + u)(x) = 0 on the interior.

    The constraints are solved exactly first (least squares plus a null-space
    basis) and the energy is minimised over the remaining freedom.
    """
    L = laplacian_matrix(net)
    o = net.base_index
    red = net.reduced_indices
    rows = [net.index[x] for x in interior]
    A = (L + np.eye(len(net)))[rows]
    Ar, b = A[:, red], -A[:, o]
    z0 = sla.lstsq(Ar, b)[0]
    Z = sla.null_space(Ar)
    Lr = L[np.ix_(red, red)]
    if Z.shape[1]:
        H = Z.T @ Lr @ Z
        g = Z.T @ (Lr @ z0 + L[red, o])
        z0 = z0 - Z @ sla.solve(0.5 * (H + H.T), g, assume_a="pos")
    for _ in range(3):  # iterative refinement of the constraints
        z0 = z0 + sla.lstsq(Ar, b - Ar @ z0)[0]
    u = np.zeros(len(net))
    u[o] = 1.0
    u[red] = z0
    return u


def deficiency_probe(net: Network, interior, tolerance: float = 1e-10) -> DeficiencyReport:
    """Solve (Δ + I)u = 0 at interior vertices and judge the energy of u.

    The base vertex is pinned to u(o) = 1 and no condition is imposed outside
    the interior (free truncation).  When the interior equations can be solved
    one new vertex at a time the solution is unique and found by forward
    substitution; otherwise the least-energy solution is taken.
    """
    net.require_valid()
    interior = [x for x in net.vertices if x in set(interior)]
    if len(interior) < MIN_INTERIOR:
        raise ValueError(f"truncation too small: {len(interior)} interior vertices "
                         f"(need at least {MIN_INTERIOR})")
    layers = bfs_layers(net)
    order = sorted(net.vertices, key=lambda x: (layers[x], net.index[x]))
    peeled = _peel(net, set(interior), order)
    if peeled is not None:
        u, d = peeled
        method = "forward"
    else:
        u = _min_energy(net, interior)
        method = "least-energy"

        def d(x, y):
            return u[net.index[y]] - u[net.index[x]]

    ct = total_conductance(net)
    P = transition_matrix(net)
    worst = 0.0
    for x in interior:
        k = net.index[x]
        lhs = (1.0 + 1.0 / ct[k]) * u[k]
        rhs = P[k] @ u
        scale = abs(lhs) + np.abs(P[k]) @ np.abs(u)
        worst = max(worst, abs(lhs - rhs) / max(scale, 1e-300))
    if worst > tolerance:
        raise VerificationError(f"interior residual {worst:.3g} exceeds {tolerance:g}")

    depth = max(layers.values())
    per_layer = np.zeros(depth + 1)
    for a, b, c in net.edges:
        per_layer[max(layers[a], layers[b])] += c * d(a, b) ** 2
    with np.errstate(over="ignore", invalid="ignore"):
        sums = np.cumsum(per_layer)
    verdict, _, _ = series.classify_partial_sums(sums)
    return DeficiencyReport(net, u, tuple(interior), worst, sums, _VERDICT[verdict], method)


# ---- growth along greedy paths --------------------------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    path: tuple[str, ...]
    values: np.ndarray
    bounds: np.ndarray
    min_slack: float  # min over steps of (u(x_{k+1}) - bound_k) / |bound_k|


def greedy_growth_path(net: Network, u, interior, start=None, max_steps: int | None = None,
                       slack: float = 1e-10) -> GrowthReport:
    """Follow argmax neighbours from ``start`` while inside ``interior``.

    For a solution of (Δ + I)u = 0 with u(start) > 0 every step satisfies
    u(x_{k+1}) ≥ Π_{i≤k} (1 + 1/c(x_i)) u(start).  A negative start value is
    handled by flipping the sign of u.
    """
    vals = np.asarray(_vals(net, u), dtype=float)
    start = net.base if start is None else start
    if vals[net.index[start]] < 0:
        vals = -vals
    if vals[net.index[start]] <= 0:
        raise ValueError("u must be nonzero at the start vertex")
    inside = set(interior)
    ct = total_conductance(net)
    path = [start]
    bounds = []
    bound = vals[net.index[start]]
    x = start
    limit = len(net) if max_steps is None else max_steps
    while x in inside and len(bounds) < limit:
        bound = bound * (1.0 + 1.0 / ct[net.index[x]])
        # rounding can tie values far out; prefer vertices not yet visited
        seen = set(path)
        y = max(net.neighbors(x), key=lambda z: (vals[net.index[z]], z not in seen, -net.index[z]))
        bounds.append(bound)
        path.append(y)
        x = y
    got = np.array([vals[net.index[z]] for z in path])
    b = np.array(bounds)
    rel = (got[1:] - b) / np.abs(b) if len(b) else np.zeros(0)
    min_slack = float(rel.min()) if len(rel) else 0.0
    if min_slack < -slack:
        raise VerificationError(f"growth bound violated by {-min_slack:.3g} (relative)")
    return GrowthReport(tuple(path), got, b, min_slack)
