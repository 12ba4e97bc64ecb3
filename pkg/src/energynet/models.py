"""Example network families with closed forms and recurrence experiments.

Families: nearest-neighbour paths with arbitrary conductances, the geometric
path a_n = Qⁿ, a reversible walk on finite binary words, a two-rail lattice
strip and the weighted triangle.  Infinite families are truncated freely: edges
past the cutoff are dropped and no boundary condition is imposed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import series
from .energy import VerificationError, dipole, energy_inner, resistance_matrix
from .network import Network, conductance_from_walk, laplacian_apply
from .operators import DeficiencyReport, SpectralReport, deficiency_probe, transition_matrix

# ---- paths ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathModel:
    """Vertices 0..N with c_{n-1,n} = a_n.

    ``conductances`` is either a finite sequence (a_1, ..., a_N) or a
    vectorised callable n ↦ a_n on integer arrays.
    """

    conductances: Callable | Sequence[float]
    N: int | None = None

    def __post_init__(self):
        if not callable(self.conductances):
            seq = tuple(float(a) for a in self.conductances)
            object.__setattr__(self, "conductances", seq)
            if self.N is None:
                object.__setattr__(self, "N", len(seq))
            elif self.N > len(seq):
                raise ValueError(f"only {len(seq)} conductances given for N={self.N}")
        if self.N is None or self.N < 1:
            raise ValueError("path needs N >= 1")

    def a(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=int)
        if callable(self.conductances):
            out = np.broadcast_to(np.asarray(self.conductances(n), dtype=float), n.shape)
        else:
            if np.any(n > len(self.conductances)):
                raise IndexError("conductance index beyond the given sequence")
            out = np.asarray(self.conductances, dtype=float)[n - 1]
        if np.any(~(out > 0)):
            raise ValueError("conductances must be positive")
        return np.array(out, dtype=float)

    def network(self) -> Network:
        a = self.a(np.arange(1, self.N + 1))
        verts = [str(n) for n in range(self.N + 1)]
        return Network(verts, [(str(n - 1), str(n), float(a[n - 1])) for n in range(1, self.N + 1)],
                       base="0")


@dataclass(frozen=True)
class GeometricModel:
    """Path with a_n = Qⁿ."""

    Q: float
    N: int

    def __post_init__(self):
        if not self.Q > 0:
            raise ValueError("Q must be positive")
        if self.N < 1:
            raise ValueError("N must be >= 1")

    @property
    def p_plus(self) -> float:
        return self.Q / (1.0 + self.Q)

    @property
    def p_minus(self) -> float:
        return 1.0 / (1.0 + self.Q)

    def c(self, n) -> np.ndarray:
        """Total conductance Qⁿ + Qⁿ⁺¹ at interior vertices (Q at vertex 0)."""
        n = np.asarray(n, dtype=float)
        return np.where(n == 0, self.Q, self.Q**n + self.Q ** (n + 1))

    def path(self) -> PathModel:
        Q = float(self.Q)
        return PathModel(lambda n: Q ** np.asarray(n, dtype=float), self.N)

    def network(self) -> Network:
        return self.path().network()


def path_closed_forms(model: PathModel, x: int, y: int):
    """Dipole v_xy and distance on the path from the series formula.

    v_xy vanishes up to x, drops by 1/a_k across each edge up to y and is flat
    afterwards; d(x, y) = Σ_{x<k≤y} 1/a_k.
    """
    if not (0 <= x < y <= model.N):
        raise ValueError(f"need 0 <= x < y <= {model.N}")
    inv = 1.0 / model.a(np.arange(1, model.N + 1))
    steps = np.zeros(model.N + 1)
    steps[x + 1 : y + 1] = inv[x:y]
    values = -np.cumsum(steps)
    return values - values[0], float(inv[x:y].sum())


@dataclass(frozen=True)
class BoundedMetricReport:
    checkpoints: tuple[int, ...]
    partial_sums: tuple[float, ...]
    classification: str  # "bounded" | "unbounded" | "inconclusive"

    @property
    def limit(self) -> float:
        return self.partial_sums[-1]

    def at(self, n: int) -> float:
        return self.partial_sums[self.checkpoints.index(n)]


def bounded_metric_probe(model: PathModel, N_max: int) -> BoundedMetricReport:
    """Partial sums of Σ 1/a_n on a doubling schedule ending at N_max."""
    if N_max < 10:
        raise ValueError("N_max must be >= 10")
    sums = np.concatenate([[0.0], np.cumsum(1.0 / model.a(np.arange(1, N_max + 1)))])
    verdict, pts, vals = series.classify_partial_sums(sums, start=10)
    label = {series.CONVERGENT: "bounded", series.DIVERGENT: "unbounded"}.get(verdict, verdict)
    return BoundedMetricReport(tuple(pts), tuple(float(v) for v in vals), label)


# ---- geometric recurrences ------------------------------------------------------------


def _iterate(Q: float, N: int, lam: float, f1: float | None = None):
    """Solve Δf = λf on the path a_n = Qⁿ forward from f(0) = 1.

    With e_n = Qⁿ (f(n) - f(n-1)) the equation at vertex n reads
    e_{n+1} = e_n - λ f(n) (e_0 = 0 encodes the vertex-0 condition).  Carrying
    e_n avoids the cancellation of the three-term form.  ``f1`` replaces the
    vertex-0 condition by an explicit value of f(1).
    """
    f = np.empty(N + 1)
    e = np.zeros(N + 1)
    f[0] = 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(N):
            if n == 0 and f1 is not None:
                e[1] = Q * (f1 - 1.0)
            else:
                e[n + 1] = e[n] - lam * f[n]
            f[n + 1] = f[n] + e[n + 1] * Q ** (-(n + 1.0))
        n = np.arange(N + 1, dtype=float)
        terms = (e * Q ** (-n / 2)) ** 2  # a_n d_n² = e_n² Q⁻ⁿ
    terms[0] = 0.0
    return f, e, terms


def _three_term_residual(Q: float, lam: float, f: np.ndarray) -> float:
    """Relative residual of f(n+1) = ((1+Q)/Q - λ/Q^{n+1}) f(n) - f(n-1)/Q."""
    worst = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, len(f) - 1):
            t = (1.0 + Q) / Q - lam / Q ** (n + 1.0)
            r = f[n + 1] - t * f[n] + f[n - 1] / Q
            scale = abs(f[n + 1]) + abs(t * f[n]) + abs(f[n - 1] / Q)
            if math.isfinite(scale) and scale > 0:
                worst = max(worst, abs(r) / scale)
    return worst


def transfer_eigenvalues(Q: float, lam: float, n) -> np.ndarray:
    """Eigenvalues of [[t_n, -1/Q], [1, 0]], larger first; they tend to {1, 1/Q}."""
    n = np.atleast_1d(np.asarray(n, dtype=float))
    t = (1.0 + Q) / Q - lam / Q ** (n + 1)
    disc = np.sqrt(np.maximum(t * t - 4.0 / Q, 0.0))
    return np.column_stack([(t + disc) / 2, (t - disc) / 2])


def _ratios(num, den):
    out = np.full(len(num), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = den != 0
        out[ok] = num[ok] / den[ok]
    return out


_INDICATOR = {series.CONVERGENT: "(1,1) indicator", series.DIVERGENT: "(0,0) indicator",
              series.INCONCLUSIVE: "inconclusive"}


@dataclass(frozen=True)
class RecurrenceReport:
    """Solution of (Δ + I)u = 0 on the geometric path, u(0) = 1.

    ``diff_ratio[n]`` is (u_{n+1} - u_n)/(u_n - u_{n-1}) for 1 ≤ n < N (NaN
    elsewhere); ``energy_partial[n]`` is Σ_{k≤n} a_k (u_k - u_{k-1})².
    """

    Q: float
    N: int
    u: np.ndarray
    diff_ratio: np.ndarray
    energy_partial: np.ndarray
    transfer: np.ndarray  # row n: eigenvalues of the step-n transfer matrix
    energy_classification: str
    indicator: str
    recurrence_residual: float

    def rows(self):
        for n in range(self.N + 1):
            yield n, self.u[n], self.diff_ratio[n], self.energy_partial[n]


def deficiency_recurrence(model: GeometricModel) -> RecurrenceReport:
    if model.N < 20:
        raise ValueError("N must be >= 20")
    Q, N = float(model.Q), model.N
    u, e, terms = _iterate(Q, N, -1.0)
    ratio = np.full(N + 1, np.nan)
    ratio[1:N] = _ratios(e[2:], Q * e[1:N])
    with np.errstate(over="ignore", invalid="ignore"):
        energy = np.cumsum(terms)
    verdict, _, _ = series.classify_partial_sums(energy)
    return RecurrenceReport(Q, N, u, ratio, energy, transfer_eigenvalues(Q, -1.0, np.arange(N + 1)),
                            verdict, _INDICATOR[verdict], _three_term_residual(Q, -1.0, u))


@dataclass(frozen=True)
class HarmonicReport:
    values: np.ndarray
    energy: float  # truncated energy, summed over the network's edges
    closed_form: float  # (Q - 1)(1 - Q⁻ᴺ)
    limit: float  # Q - 1
    interior_residual: float  # max |Pu - u| / |u| over vertices 1..N-1


def harmonic_geometric(model: GeometricModel) -> HarmonicReport:
    """u_n = Q⁻ⁿ, harmonic at every vertex except 0, with finite energy."""
    Q = float(model.Q)
    if Q <= 1:
        raise ValueError("Q must exceed 1 (otherwise Q^-n has infinite energy)")
    net = model.network()
    u = Q ** -np.arange(model.N + 1, dtype=float)
    P = transition_matrix(net)
    inner = np.arange(1, model.N)
    res = float(np.max(np.abs(P[inner] @ u - u[inner]) / u[inner])) if len(inner) else 0.0
    return HarmonicReport(u, float(energy_inner(net, u, u)), (Q - 1.0) * (1.0 - Q ** -model.N),
                          Q - 1.0, res)


@dataclass(frozen=True)
class DomainReport:
    terms: np.ndarray
    partial_sums: np.ndarray
    classification: str
    member: bool | None


def friedrichs_domain_test(model: GeometricModel, f=None, *, differences=None) -> DomainReport:
    """Partial sums of Σ_x |f(x) - f(x+1)|² Q^{2x}, x = 0..N-1.

    ``f`` may be a vectorised callable or a sequence of N+1 values; for
    sequences whose increments would cancel badly pass ``differences``, a
    callable x ↦ f(x) - f(x+1), instead.
    """
    Q, N = float(model.Q), model.N
    x = np.arange(N, dtype=float)
    if differences is not None:
        diff = np.asarray(differences(x), dtype=complex if np.iscomplexobj(differences(x)) else float)
    elif f is not None:
        vals = np.asarray(f(np.arange(N + 1, dtype=float)) if callable(f) else f)
        if vals.shape != (N + 1,):
            raise ValueError(f"expected {N + 1} values of f")
        diff = vals[:-1] - vals[1:]
    else:
        raise ValueError("give f or differences")
    with np.errstate(over="ignore", invalid="ignore"):
        terms = (np.abs(diff) * Q**x) ** 2
        sums = np.concatenate([[0.0], np.cumsum(terms)])
    verdict, _, _ = series.classify_partial_sums(sums)
    member = {series.CONVERGENT: True, series.DIVERGENT: False}.get(verdict)
    return DomainReport(terms, sums, verdict, member)


@dataclass(frozen=True)
class EigenReport:
    lam: float
    f: np.ndarray
    tail_ratio: np.ndarray  # f(n+1)/f(n)
    diff_ratio: np.ndarray
    energy_partial: np.ndarray
    classification: str
    recurrence_residual: float
    laplacian_residual: float  # Δf = λf at vertices 0..N-2, relative


def eigenfunction_recurrence(model: GeometricModel, lam: float, f1: float | None = None) -> EigenReport:
    """Iterate Δf = λf on the geometric path from f(0) = 1.

    By default f(1) follows from the vertex-0 equation a_1 (f(0) - f(1)) = λ f(0);
    ``f1`` seeds f(1) explicitly instead.
    """
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if model.N < 20:
        raise ValueError("N must be >= 20")
    Q, N = float(model.Q), model.N
    f, e, terms = _iterate(Q, N, lam, f1)
    with np.errstate(over="ignore", invalid="ignore"):
        energy = np.cumsum(terms)
    verdict, _, _ = series.classify_partial_sums(energy)
    tail = np.full(N + 1, np.nan)
    tail[:N] = _ratios(f[1:], f[:N])
    diff = np.full(N + 1, np.nan)
    diff[1:N] = _ratios(e[2:], Q * e[1:N])

    lap_res = 0.0
    if Q ** (N + 1.0) < 1e300:
        net = model.network()
        lap = laplacian_apply(net, f)
        a = np.concatenate([[0.0], Q ** np.arange(1, N + 1, dtype=float), [0.0]])
        start = 0 if f1 is None else 1
        for n in range(start, N - 1):
            scale = (a[n] + a[n + 1]) * max(abs(f[max(n - 1, 0)]), abs(f[n]), abs(f[n + 1]))
            lap_res = max(lap_res, abs(lap[n] - lam * f[n]) / scale)
    return EigenReport(lam, f, tail, diff, energy, verdict, _three_term_residual(Q, lam, f), lap_res)


# ---- binary tree ------------------------------------------------------------------------


ROOT = "o"


@dataclass(frozen=True)
class BinaryTreeModel:
    """Walk on binary words of length ≤ depth: append 0 or 1, or delete the last letter."""

    p0: float
    p1: float
    p_minus: float
    depth: int

    def __post_init__(self):
        ps = (self.p0, self.p1, self.p_minus)
        if not all(0 < p < 1 for p in ps):
            raise ValueError("probabilities must lie in (0, 1)")
        if abs(sum(ps) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        if self.depth < 2:
            raise ValueError("depth must be >= 2")

    def words(self) -> list[str]:
        out = [ROOT]
        for k in range(1, self.depth + 1):
            out += ["".join(w) for w in itertools.product("01", repeat=k)]
        return out

    def weight(self, x: str) -> float:
        """c(x) = p0^{F0(x)} p1^{F1(x)} / p_minus^{|x|} with |x| the word length."""
        if x == ROOT:
            return 1.0
        return self.p0 ** x.count("0") * self.p1 ** x.count("1") / self.p_minus ** len(x)

    def transitions(self) -> dict[tuple[str, str], float]:
        p = {}
        for x in self.words():
            if x != ROOT:
                p[(x, parent(x))] = self.p_minus
            if len(word(x)) < self.depth:
                p[(x, child(x, "0"))] = self.p0
                p[(x, child(x, "1"))] = self.p1
        return p


def word(x: str) -> str:
    return "" if x == ROOT else x


def parent(x: str) -> str:
    return ROOT if len(x) == 1 else x[:-1]


def child(x: str, letter: str) -> str:
    return word(x) + letter


def tree_reversibility_defect(model: BinaryTreeModel) -> float:
    """max over edges of |c(x)P(x→y) - c(y)P(y→x)| / c(x)P(x→y)."""
    p = model.transitions()
    worst = 0.0
    for (x, y), pxy in p.items():
        lhs = model.weight(x) * pxy
        rhs = model.weight(y) * p[(y, x)]
        worst = max(worst, abs(lhs - rhs) / lhs)
    return worst


class TreeBuild(NamedTuple):
    network: Network
    reversibility_defect: float


def binary_tree_network(model: BinaryTreeModel) -> TreeBuild:
    """Tree with c_xy = c(x) P(x→y), checked for reversibility edge by edge."""
    defect = tree_reversibility_defect(model)
    weights = {x: model.weight(x) for x in model.words()}
    net = conductance_from_walk(model.transitions(), weights, base=ROOT, vertices=model.words())
    return TreeBuild(net, defect)


def tree_interior(model: BinaryTreeModel) -> list[str]:
    return [x for x in model.words() if len(word(x)) < model.depth]


@dataclass(frozen=True)
class TreeEnergyTrend:
    depths: tuple[int, ...]
    energies: tuple[float, ...]
    increments: tuple[float, ...]
    classification: str  # "finite" | "infinite" | "inconclusive"
    probes: tuple[DeficiencyReport, ...]


def tree_energy_trend(model: BinaryTreeModel, depths=(5, 6, 7, 8), shrink: float = 0.9) -> TreeEnergyTrend:
    """Energy of the truncated defect vector as the depth grows.

    At each depth the least-energy solution of (Δ + I)u = 0 on words shorter
    than the depth, with u(root) = 1, is computed; its energy cannot decrease
    with depth.  The trend is "finite" when every increment is at most
    ``shrink`` times the one before (a geometric tail), "infinite" when no
    increment is smaller than the one before, and "inconclusive" otherwise.
    """
    probes, energies = [], []
    for D in depths:
        m = BinaryTreeModel(model.p0, model.p1, model.p_minus, D)
        net = binary_tree_network(m).network
        rep = deficiency_probe(net, tree_interior(m))
        probes.append(rep)
        energies.append(float(rep.layer_energy[-1]))
    inc = np.diff(energies)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = inc[1:] / inc[:-1]
    if len(ratios) == 0:
        verdict = "inconclusive"
    elif not np.all(np.isfinite(energies)) or np.all(ratios >= 1.0):
        verdict = "infinite"
    elif np.all(ratios <= shrink):
        verdict = "finite"
    else:
        verdict = "inconclusive"
    return TreeEnergyTrend(tuple(depths), tuple(energies), tuple(float(v) for v in inc), verdict,
                           tuple(probes))


# ---- lattice strip ------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeStripModel:
    """Rails t0..tN and b0..bN with c = Qⁿ and Q̄ⁿ and rungs t_n–b_n."""

    Q: float
    Qbar: float
    N: int
    rung: float = 1.0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not (self.Q > 0 and self.Qbar > 0 and self.rung > 0):
            raise ValueError("conductance parameters must be positive")


def lattice_strip_network(model: LatticeStripModel) -> Network:
    N = model.N
    verts = [v for n in range(N + 1) for v in (f"t{n}", f"b{n}")]
    edges = []
    for n in range(N + 1):
        edges.append((f"t{n}", f"b{n}", float(model.rung)))
        if n:
            edges.append((f"t{n - 1}", f"t{n}", float(model.Q) ** n))
            edges.append((f"b{n - 1}", f"b{n}", float(model.Qbar) ** n))
    return Network(verts, edges, base="t0")


# ---- triangle --------------------------------------------------------------------------


@dataclass(frozen=True)
class TriangleModel:
    c01: float
    c02: float
    c12: float

    def __post_init__(self):
        if not all(c > 0 for c in (self.c01, self.c02, self.c12)):
            raise ValueError("conductances must be positive")

    @property
    def triples(self):
        """The conductance triples c̃₀, c̃₁, c̃₂."""
        c01, c02, c12 = self.c01, self.c02, self.c12
        return (np.array([c01, c02, c12]), np.array([c01, c01, c02]), np.array([c02, c12, c12]))

    def laplacian(self) -> np.ndarray:
        c01, c02, c12 = self.c01, self.c02, self.c12
        return np.array([[c01 + c02, -c01, -c02],
                         [-c01, c01 + c12, -c12],
                         [-c02, -c12, c02 + c12]])


def triangle_network(model: TriangleModel, base: str = "2") -> Network:
    return Network(["0", "1", "2"],
                   [("0", "1", model.c01), ("0", "2", model.c02), ("1", "2", model.c12)], base=base)


def triangle_closed_forms(model: TriangleModel) -> dict[str, np.ndarray]:
    """Dipoles and scaled frame vectors of the triangle in closed form.

    Values at (0, 1, 2); the dipole v_xy vanishes at the third vertex z and
    takes c_yz/D at x and -c_xz/D at y, D = c01 c02 + c01 c12 + c02 c12.
    """
    c01, c02, c12 = model.c01, model.c02, model.c12
    D = c01 * c02 + c01 * c12 + c02 * c12
    v01 = np.array([c12, -c02, 0.0]) / D
    v12 = np.array([0.0, c02, -c01]) / D
    v20 = np.array([-c12, 0.0, c01]) / D
    return {"v01": v01, "v12": v12, "v20": v20,
            "w01": math.sqrt(c01) * v01, "w12": math.sqrt(c12) * v12, "w20": math.sqrt(c02) * v20}


@dataclass(frozen=True)
class TriangleSpectrum(SpectralReport):
    direct: np.ndarray = None
    discrepancy: float = 0.0


def triangle_spectrum(model: TriangleModel, rtol: float = 1e-10) -> TriangleSpectrum:
    """λ = 0, S ∓ sqrt(‖c̃₀‖² - ⟨c̃₁, c̃₂⟩) with S = c01 + c02 + c12."""
    t0, t1, t2 = model.triples
    S = float(t0.sum())
    root = math.sqrt(max(float(t0 @ t0 - t1 @ t2), 0.0))
    formula = np.array([0.0, S - root, S + root])
    direct = np.linalg.eigvalsh(model.laplacian())
    disc = float(np.max(np.abs(formula - direct)) / S)
    if disc > rtol:
        raise VerificationError(f"triangle spectrum formula off by {disc:.3g} (relative)")
    return TriangleSpectrum(formula, 2.0 * root, "l2", direct, disc)


# ---- random test networks ------------------------------------------------------------------


def random_connected_network(n: int, rng: np.random.Generator, extra: float = 0.3,
                             cmin: float = 0.1, cmax: float = 10.0, tree: bool = False) -> Network:
    """Random spanning tree plus about ``extra * n`` chords, conductances uniform."""
    if n < 2:
        raise ValueError("need at least two vertices")
    verts = [f"v{k}" for k in range(n)]
    order = rng.permutation(n)
    pairs = set()
    for k in range(1, n):
        a, b = int(order[k]), int(order[rng.integers(k)])
        pairs.add((min(a, b), max(a, b)))
    if not tree:
        target = len(pairs) + int(round(extra * n))
        possible = n * (n - 1) // 2
        while len(pairs) < min(target, possible):
            a, b = rng.choice(n, size=2, replace=False)
            pairs.add((int(min(a, b)), int(max(a, b))))
    edges = [(verts[a], verts[b], float(rng.uniform(cmin, cmax))) for a, b in sorted(pairs)]
    return Network(verts, edges)


def metric_axioms_defect(net: Network, tol: float = 1e-10) -> float:
    """Largest violation of symmetry, positivity or the triangle inequality of d."""
    R = resistance_matrix(net)
    scale = max(float(R.max()), 1e-300)
    worst = float(np.max(np.abs(R - R.T)))
    off = R[~np.eye(len(net), dtype=bool)]
    if off.size:
        worst = max(worst, float(np.max(np.maximum(0.0, -off))))
        if off.min() <= tol * scale:
            worst = max(worst, scale)
    tri = R[:, None, :] - R[:, :, None] - R[None, :, :]  # d(x,z) - d(x,y) - d(y,z)
    worst = max(worst, float(np.max(tri)))
    return worst / scale


def dipole_path_defect(model: PathModel, x: int, y: int) -> float:
    """Sup distance, modulo constants, between closed-form and solved dipoles."""
    vals, _ = path_closed_forms(model, x, y)
    net = model.network()
    solved = dipole(net, str(x), str(y)).values
    diff = (vals - vals[0]) - (solved - solved[0])
    return float(np.max(np.abs(diff)))


__all__ = [
    "PathModel", "GeometricModel", "BinaryTreeModel", "LatticeStripModel", "TriangleModel",
    "path_closed_forms", "bounded_metric_probe", "deficiency_recurrence", "harmonic_geometric",
    "friedrichs_domain_test", "eigenfunction_recurrence", "binary_tree_network",
    "tree_energy_trend", "lattice_strip_network", "triangle_network", "triangle_spectrum",
    "triangle_closed_forms", "random_connected_network", "transfer_eigenvalues",
]
