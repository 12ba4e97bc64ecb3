"""Weighted networks, their graph Laplacian and the associated reversible walk.

A :class:`Network` is an immutable finite vertex/edge set with one positive
conductance per unordered edge and a distinguished base vertex.  Vertex
identifiers are opaque strings; their position in ``Network.vertices`` is the
canonical order used for matrix layouts and tie-breaking.

Construction never rejects a candidate outright (except for structurally
unreadable input such as duplicate edges); :func:`validate` lists everything
wrong with it, and downstream computations call :meth:`Network.require_valid`.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np


class NetworkError(ValueError):
    """Malformed network document or operation on an unusable network."""


class InvalidNetworkError(NetworkError):
    """Raised when an operation needs a valid network and got an invalid one."""

    def __init__(self, report):
        self.report = report
        super().__init__("invalid network: " + "; ".join(report.violations))


class NotReversibleError(ValueError):
    """Transition data that admits no reversing vertex weight."""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    def __bool__(self):
        # truthy iff the network is usable
        return not self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        return list(self.violations)


@dataclass(frozen=True, eq=False)
class Network:
    """Finite weighted graph with base vertex.

    Parameters
    ----------
    vertices : sequence of str
        Vertex identifiers in canonical order.
    edges : iterable of (u, v, c)
        One entry per unordered edge.  Listing both ``(u, v)`` and ``(v, u)``
        is an error.
    base : str, optional
        The base vertex ``o``.  Defaults to the first vertex.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    base: str
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __init__(self, vertices, edges, base=None):
        verts = tuple(str(v) for v in vertices)
        if len(set(verts)) != len(verts):
            raise NetworkError("duplicate vertex identifiers")
        seen = set()
        clean = []
        for u, v, c in edges:
            key = frozenset((str(u), str(v)))
            if key in seen:
                raise NetworkError(f"duplicate edge {{{u},{v}}}")
            seen.add(key)
            clean.append((str(u), str(v), float(c)))
        if base is None:
            if not verts:
                raise NetworkError("empty vertex list and no base")
            base = verts[0]
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(clean))
        object.__setattr__(self, "base", str(base))
        object.__setattr__(self, "_cache", {})

    # ---- basic accessors -------------------------------------------------

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"Network({len(self.vertices)} vertices, {len(self.edges)} edges, base={self.base!r})"

    @property
    def index(self) -> dict[str, int]:
        if "index" not in self._cache:
            self._cache["index"] = {v: i for i, v in enumerate(self.vertices)}
        return self._cache["index"]

    @property
    def base_index(self) -> int:
        return self.index[self.base]

    @property
    def reduced_vertices(self) -> tuple[str, ...]:
        """V' = V minus the base vertex, in canonical order."""
        return tuple(v for v in self.vertices if v != self.base)

    @property
    def reduced_indices(self) -> np.ndarray:
        o = self.base_index
        return np.array([i for i in range(len(self.vertices)) if i != o], dtype=int)

    def edge_arrays(self):
        """Return ``(i, j, c)`` arrays with ``i < j`` in canonical order."""
        if "edge_arrays" not in self._cache:
            self.require_valid()
            idx = self.index
            ii, jj, cc = [], [], []
            for u, v, c in self.edges:
                a, b = idx[u], idx[v]
                if a > b:
                    a, b = b, a
                ii.append(a)
                jj.append(b)
                cc.append(c)
            order = np.lexsort((jj, ii))
            self._cache["edge_arrays"] = (
                np.asarray(ii, dtype=int)[order],
                np.asarray(jj, dtype=int)[order],
                np.asarray(cc, dtype=float)[order],
            )
        return self._cache["edge_arrays"]

    def conductance(self, x: str, y: str) -> float:
        """c_xy, or 0.0 when {x, y} is not an edge."""
        return self._edge_map().get(frozenset((x, y)), 0.0)

    def has_edge(self, x: str, y: str) -> bool:
        return x != y and frozenset((x, y)) in self._edge_map()

    def neighbors(self, x: str) -> list[str]:
        if "adj" not in self._cache:
            adj = {v: [] for v in self.vertices}
            for u, v, _ in self.edges:
                if u in adj and v in adj and u != v:
                    adj[u].append(v)
                    adj[v].append(u)
            for v in adj:
                adj[v].sort(key=lambda w: self.index[w])
            self._cache["adj"] = adj
        return self._cache["adj"][x]

    def _edge_map(self):
        if "edge_map" not in self._cache:
            self._cache["edge_map"] = {frozenset((u, v)): c for u, v, c in self.edges}
        return self._cache["edge_map"]

    def values(self, u) -> np.ndarray:
        """Coerce a vertex function (mapping, sequence or array) to a vector."""
        if isinstance(u, Mapping):
            missing = [v for v in self.vertices if v not in u]
            if missing:
                raise ValueError(f"vertex function undefined at {missing[0]!r}")
            arr = np.array([u[v] for v in self.vertices])
        else:
            arr = np.asarray(getattr(u, "values", u))
        if arr.shape != (len(self.vertices),):
            raise ValueError(f"expected {len(self.vertices)} values, got shape {arr.shape}")
        if not np.iscomplexobj(arr):
            arr = arr.astype(float)
        return arr

    # ---- validity ----------------------------------------------------------

    def report(self) -> ValidationReport:
        if "report" not in self._cache:
            self._cache["report"] = validate(self)
        return self._cache["report"]

    def require_valid(self):
        rep = self.report()
        if not rep.ok:
            raise InvalidNetworkError(rep)
        return self

    # ---- derived sizes -----------------------------------------------------

    @property
    def cycle_rank(self) -> int:
        return len(self.edges) - (len(self.vertices) - 1)

    def is_tree(self) -> bool:
        return self.cycle_rank == 0

    # ---- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "base": self.base,
            "edges": [{"u": u, "v": v, "c": c} for u, v, c in self.edges],
        }

    @classmethod
    def from_dict(cls, doc) -> "Network":
        if not isinstance(doc, Mapping):
            raise NetworkError("network document must be an object")
        for key in ("vertices", "base", "edges"):
            if key not in doc:
                raise NetworkError(f"missing field {key!r}")
        if not isinstance(doc["vertices"], list) or not isinstance(doc["edges"], list):
            raise NetworkError("'vertices' and 'edges' must be arrays")
        edges = []
        for k, e in enumerate(doc["edges"]):
            if not isinstance(e, Mapping) or not {"u", "v", "c"} <= set(e):
                raise NetworkError(f"edge #{k} must have fields u, v, c")
            try:
                c = float(e["c"])
            except (TypeError, ValueError):
                raise NetworkError(f"edge #{k}: conductance {e['c']!r} is not a number") from None
            edges.append((e["u"], e["v"], c))
        return cls(doc["vertices"], edges, doc["base"])


def dumps(net: Network) -> str:
    """Deterministic JSON text for a network (shortest round-trip floats)."""
    return json.dumps(net.to_dict(), indent=1) + "\n"


def loads(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"malformed network document: {exc.msg} at line {exc.lineno}") from None
    return Network.from_dict(doc)


def load(path) -> Network:
    return loads(Path(path).read_text())


def save(net: Network, path) -> None:
    Path(path).write_text(dumps(net), newline="\n")


def validate(net: Network) -> ValidationReport:
    """List every violated network condition; empty report means usable."""
    out = []
    verts = set(net.vertices)
    if net.base not in verts:
        out.append(f"base vertex {net.base!r} not in vertex list")
    if not net.edges:
        out.append("no edges")
    degree = {v: 0 for v in net.vertices}
    for u, v, c in net.edges:
        if u not in verts or v not in verts:
            out.append(f"edge {{{u},{v}}} references an unknown vertex")
            continue
        if u == v:
            out.append(f"self-loop at {u!r}")
            continue
        if not math.isfinite(c):
            out.append(f"non-finite conductance on {{{u},{v}}}")
        elif c <= 0.0:
            out.append(f"nonpositive conductance on {{{u},{v}}}")
        degree[u] += 1
        degree[v] += 1
    isolated = [v for v, d in degree.items() if d == 0]
    if isolated and net.edges:
        out.append(f"vertex {isolated[0]!r} has no incident edge")
    if net.base in verts and len(verts) > 1:
        reached = {net.base}
        queue = deque([net.base])
        while queue:
            x = queue.popleft()
            for y in net.neighbors(x):
                if y not in reached:
                    reached.add(y)
                    queue.append(y)
        if len(reached) != len(verts):
            out.append("not connected")
    return ValidationReport(tuple(out))


# ---- walk data ---------------------------------------------------------------


@dataclass(frozen=True)
class WalkData:
    """Total conductance per vertex and transition probabilities per edge."""

    total_conductance: dict[str, float]
    transition: dict[tuple[str, str], float]

    def row_sums(self) -> dict[str, float]:
        sums = {x: 0.0 for x in self.total_conductance}
        for (x, _), p in self.transition.items():
            sums[x] += p
        return sums


def total_conductance(net: Network) -> np.ndarray:
    """c(x) = sum of c_xy over incident edges, as a vector."""
    i, j, c = net.edge_arrays()
    out = np.zeros(len(net))
    np.add.at(out, i, c)
    np.add.at(out, j, c)
    return out


def walk_data(net: Network) -> WalkData:
    net.require_valid()
    ctot = total_conductance(net)
    idx = net.index
    trans = {}
    for u, v, c in net.edges:
        trans[(u, v)] = c / ctot[idx[u]]
        trans[(v, u)] = c / ctot[idx[v]]
    return WalkData({x: float(ctot[k]) for k, x in enumerate(net.vertices)}, trans)


def conductance_from_walk(p: Mapping, c_tilde: Mapping, *, base=None, rtol: float = 1e-12,
                          vertices: Iterable[str] | None = None) -> Network:
    """Recover the conductance network of a reversible walk.

    ``p`` maps ordered pairs ``(x, y)`` to transition probabilities; both
    directions of every edge must be present.  ``c_tilde`` is the reversing
    vertex weight.  Edge conductances are ``c_xy = c_tilde(x) * p_xy``.
    Rows need not sum to one (truncated walks are allowed); the round trip
    through :func:`walk_data` reproduces ``p`` exactly when they do.
    """
    done = set()
    edges = []
    for (x, y), pxy in p.items():
        key = frozenset((x, y))
        if key in done:
            continue
        if (y, x) not in p:
            raise NotReversibleError(f"edge ({x},{y}) has no reverse transition")
        lhs = c_tilde[x] * pxy
        rhs = c_tilde[y] * p[(y, x)]
        if not math.isclose(lhs, rhs, rel_tol=rtol, abs_tol=0.0):
            raise NotReversibleError(
                f"reversibility fails on edge ({x},{y}): {lhs!r} != {rhs!r}")
        done.add(key)
        edges.append((x, y, lhs))
    if vertices is None:
        vertices = list(c_tilde)
    return Network(vertices, edges, base)


# ---- Laplacian -----------------------------------------------------------------


def laplacian_apply(net: Network, u) -> np.ndarray:
    """(Δu)(x) = Σ_{y~x} c_xy (u(x) - u(y)), edge by edge."""
    i, j, c = net.edge_arrays()
    vals = net.values(u)
    flow = c * (vals[i] - vals[j])
    out = np.zeros(len(net), dtype=flow.dtype)
    np.add.at(out, i, flow)
    np.subtract.at(out, j, flow)
    return out


def laplacian_matrix(net: Network, ordering: Iterable[str] | None = None) -> np.ndarray:
    """Dense symmetric Laplacian matrix in the given vertex ordering."""
    i, j, c = net.edge_arrays()
    n = len(net)
    M = np.zeros((n, n))
    np.add.at(M, (i, j), -c)
    np.add.at(M, (j, i), -c)
    ctot = total_conductance(net)
    M[np.arange(n), np.arange(n)] = ctot
    if ordering is None:
        return M
    order = list(ordering)
    if sorted(order) != sorted(net.vertices) or len(order) != n:
        raise ValueError("ordering is not a permutation of the vertices")
    perm = np.array([net.index[v] for v in order])
    return M[np.ix_(perm, perm)]


def incidence_matrix(net: Network) -> np.ndarray:
    """Signed edge-by-vertex incidence (+1 at the lower index end)."""
    i, j, _ = net.edge_arrays()
    D = np.zeros((len(i), len(net)))
    D[np.arange(len(i)), i] = 1.0
    D[np.arange(len(i)), j] = -1.0
    return D
