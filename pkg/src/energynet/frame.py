"""Scaled dipoles w_e = sqrt(c_e) v_e as a Parseval frame of the energy space.

Frame vectors are indexed by oriented edges.  All inner products go through
the energy form; raw value vectors are never compared directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .energy import (
    PotentialFunction,
    VerificationError,
    _vals,
    dipole,
    dipole_system,
    energy_gram,
)
from .network import Network

PARSEVAL_RTOL = 1e-9
ONB_TOL = 1e-9

SCHEMES = ("arbitrary-lexicographic", "geometric", "current-induced")


@dataclass(frozen=True)
class OrientedEdgeSet:
    edges: tuple[tuple[str, str], ...]
    scheme: str
    source: str | None = None
    sink: str | None = None

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)


def _canonical_pairs(net: Network):
    i, j, _ = net.edge_arrays()
    V = net.vertices
    return [(V[a], V[b]) for a, b in zip(i, j)]


def orient(net: Network, scheme: str = "arbitrary-lexicographic", source=None, sink=None,
           zero_tol: float = 1e-12) -> OrientedEdgeSet:
    """Pick one orientation per edge.

    ``arbitrary-lexicographic``: lower canonical index first.
    ``geometric``: away from the base vertex by graph distance, ties lexicographic.
    ``current-induced``: along the current of the unit dipole source -> sink;
    edges whose current is zero (relative to the largest current) fall back to
    lexicographic.
    """
    net.require_valid()
    pairs = _canonical_pairs(net)
    if scheme in ("lex", "arbitrary-lexicographic"):
        return OrientedEdgeSet(tuple(pairs), "arbitrary-lexicographic")
    if scheme == "geometric":
        dist = {net.base: 0}
        queue = deque([net.base])
        while queue:
            x = queue.popleft()
            for y in net.neighbors(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        out = [(y, x) if dist[y] < dist[x] else (x, y) for x, y in pairs]
        return OrientedEdgeSet(tuple(out), "geometric")
    if scheme == "current-induced":
        if source is None or sink is None:
            raise ValueError("current-induced orientation needs source and sink")
        if source == sink:
            raise ValueError("source and sink must differ")
        u = dipole(net, source, sink).values
        cur = np.array([net.conductance(x, y) * (u[net.index[x]] - u[net.index[y]])
                        for x, y in pairs])
        cutoff = zero_tol * np.max(np.abs(cur))
        out = [(y, x) if I < -cutoff else (x, y) for (x, y), I in zip(pairs, cur)]
        return OrientedEdgeSet(tuple(out), "current-induced", source, sink)
    raise ValueError(f"unknown orientation scheme {scheme!r}")


# ---- currents ----------------------------------------------------------------------


def current(net: Network, u, e) -> float:
    """Ohm's-law current I(u)_(x,y) = c_xy (u(x) - u(y))."""
    x, y = e
    if not net.has_edge(x, y):
        raise KeyError(f"({x},{y}) is not an edge")
    vals = _vals(net, u)
    return net.conductance(x, y) * (vals[net.index[x]] - vals[net.index[y]])


def currents(net: Network, u, oriented: OrientedEdgeSet | None = None) -> np.ndarray:
    if oriented is None:
        oriented = orient(net)
    vals = _vals(net, u)
    idx = net.index
    return np.array([net.conductance(x, y) * (vals[idx[x]] - vals[idx[y]]) for x, y in oriented])


def path_dissipation(net: Network, u, path) -> float:
    """Σ Res_e |I(u)_e|^2 along a vertex path."""
    total = 0.0
    for x, y in zip(path[:-1], path[1:]):
        total += abs(current(net, u, (x, y))) ** 2 / net.conductance(x, y)
    return total


# ---- frame -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ParsevalFrame:
    network: Network
    oriented: OrientedEdgeSet
    vectors: np.ndarray  # row k = grounded values of w_e for e = oriented.edges[k]
    gramian: np.ndarray
    conductances: np.ndarray

    def vector(self, e) -> PotentialFunction:
        k = self.oriented.edges.index(tuple(e))
        return PotentialFunction(self.network, self.vectors[k])

    def as_dict(self) -> dict:
        return {e: self.vectors[k] for k, e in enumerate(self.oriented.edges)}


def build_frame(net: Network, oriented: OrientedEdgeSet | None = None) -> ParsevalFrame:
    """Assemble w_xy = sqrt(c_xy) v_xy and self-check the Parseval identity."""
    if oriented is None:
        oriented = orient(net)
    edge_keys = {frozenset(e) for e in oriented}
    if len(oriented) != len(net.edges) or edge_keys != {frozenset((u, v)) for u, v, _ in net.edges}:
        raise ValueError("orientation must list every edge exactly once")
    system = dipole_system(net)
    c = np.array([net.conductance(x, y) for x, y in oriented])
    W = np.array([np.sqrt(ce) * (system.dipole(x) - system.dipole(y))
                  for ce, (x, y) in zip(c, oriented)])
    gram = energy_gram(net, W)
    frame = ParsevalFrame(net, oriented, W, 0.5 * (gram + gram.T), c)

    # probe with δ_x - δ_o, which spans the energy space
    o = net.base_index
    probes = np.zeros((len(net) - 1, len(net)))
    for k, r in enumerate(net.reduced_indices):
        probes[k, r] = 1.0
        probes[k, o] = -1.0
    coeffs = energy_gram(net, W, probes)
    lhs = np.sum(coeffs**2, axis=0)
    rhs = np.diag(energy_gram(net, probes))
    rel = np.max(np.abs(lhs - rhs) / rhs)
    if rel > PARSEVAL_RTOL:
        raise VerificationError(f"Parseval identity fails on probe set (rel. defect {rel:.3g})")
    return frame


def analysis(frame: ParsevalFrame, u) -> np.ndarray:
    """Frame coefficients (<w_e, u>_E)_e."""
    vals = _vals(frame.network, u)
    return energy_gram(frame.network, frame.vectors, vals[None, :])[:, 0]


def synthesis(frame: ParsevalFrame, coeffs) -> PotentialFunction:
    """Σ_e coeff_e w_e (grounded)."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (len(frame.oriented),):
        raise ValueError(f"expected {len(frame.oriented)} coefficients")
    return PotentialFunction(frame.network, coeffs @ frame.vectors)


def current_decomposition(frame: ParsevalFrame, u) -> PotentialFunction:
    """Rebuild u as Σ_e I(u)_e v_e."""
    net = frame.network
    cur = currents(net, u, frame.oriented)
    V = frame.vectors / np.sqrt(frame.conductances)[:, None]
    return PotentialFunction(net, cur @ V)


@dataclass(frozen=True)
class FrameDiagnostics:
    edges: tuple[tuple[str, str], ...]
    norms_squared: np.ndarray
    idempotence_defect: float
    rank: int
    trace: float
    redundancy: int
    is_onb: bool

    def rows(self) -> list[tuple[str, str]]:
        """Flat key/value rows, deterministic order."""
        out = [
            ("edges", str(len(self.edges))),
            ("rank", str(self.rank)),
            ("redundancy", str(self.redundancy)),
            ("is_onb", "true" if self.is_onb else "false"),
            ("idempotence_defect", _g(self.idempotence_defect)),
            ("trace", _g(self.trace)),
        ]
        out += [(f"norm2[{x}->{y}]", _g(n)) for (x, y), n in zip(self.edges, self.norms_squared)]
        return out


def _g(x: float) -> str:
    s = format(float(x), ".12g")
    return "0" if s == "-0" else s


def frame_diagnostics(frame: ParsevalFrame) -> FrameDiagnostics:
    G = frame.gramian
    norms = np.diag(G).copy()
    defect = float(np.linalg.norm(G @ G - G))
    rank = int(np.linalg.matrix_rank(G, tol=1e-8 * max(1.0, np.max(np.abs(G)))))
    net = frame.network
    return FrameDiagnostics(
        edges=frame.oriented.edges,
        norms_squared=norms,
        idempotence_defect=defect,
        rank=rank,
        trace=float(np.trace(G)),
        redundancy=len(net.edges) - (len(net) - 1),
        is_onb=bool(np.all(np.abs(norms - 1.0) <= ONB_TOL)),
    )


def frame_norm_squared(frame: ParsevalFrame, u) -> float:
    """Σ_e |<w_e, u>|^2."""
    return float(np.sum(np.abs(analysis(frame, u)) ** 2))

