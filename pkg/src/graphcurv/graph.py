"""Finite measured weighted graphs: data model, metric, and JSON I/O.

A graph consists of a finite vertex set, a symmetric non-negative edge weight
``w`` with zero diagonal, and a strictly positive vertex measure ``m``.  The
transition rate from x to y is ``q(x, y) = w(x, y) / m(x)``.  Vertex functions
are numpy arrays indexed in canonical order, which is the order of the vertex
list in the source document.
"""

from __future__ import annotations

import json
import math
import numbers
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, InvariantError, SchemaError, UnknownVertex

__all__ = [
    "MeasuredWeightedGraph",
    "load_graph",
    "dump_graph",
    "transition_weight",
    "vertex_degree",
    "max_degree",
    "combinatorial_distance",
    "diameter",
    "ball",
    "three_vertex_example",
    "random_connected_graph",
]


@dataclass(frozen=True, eq=False)
class MeasuredWeightedGraph:
    """Immutable finite graph with symmetric edge weights and positive vertex measure.

    Adjacency is ``w > 0``; the graph must be connected under it.  All matrices
    built from a graph use the canonical vertex order of ``vertices``.
    """

    vertices: tuple[str, ...]
    w: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        vertices = tuple(str(v) for v in self.vertices)
        w = np.array(self.w, dtype=float)
        m = np.array(self.m, dtype=float)
        n = len(vertices)
        if n == 0:
            raise InvariantError("graph must have at least one vertex")
        if any(not v for v in vertices):
            raise InvariantError("vertex ids must be non-empty")
        if len(set(vertices)) != n:
            raise InvariantError("vertex ids must be unique")
        if w.shape != (n, n):
            raise InvariantError(f"weight matrix must have shape ({n}, {n}), got {w.shape}")
        if m.shape != (n,):
            raise InvariantError(f"measure must have shape ({n},), got {m.shape}")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(m)):
            raise InvariantError("weights and measures must be finite")
        if np.any(w < 0):
            raise InvariantError("edge weights must be non-negative")
        if not np.array_equal(w, w.T):
            raise InvariantError("edge weights must be symmetric")
        if np.any(np.diag(w) != 0):
            raise InvariantError("self-loops are not allowed")
        if np.any(m <= 0):
            raise InvariantError("vertex measure must be positive")
        w.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "_pos", {v: i for i, v in enumerate(vertices)})
        if not self._is_connected():
            raise InvariantError("graph is disconnected under positive-weight adjacency")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def index(self, vertex: str) -> int:
        """Canonical index of a vertex id."""
        try:
            return self._pos[vertex]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {vertex!r}") from None

    @cached_property
    def q_matrix(self) -> np.ndarray:
        """Transition rates q(x, y) = w(x, y) / m(x), row-indexed by x."""
        q = self.w / self.m[:, None]
        q.setflags(write=False)
        return q

    @cached_property
    def degrees(self) -> np.ndarray:
        """Deg(x) = sum_y q(x, y) for every vertex."""
        d = self.q_matrix.sum(axis=1)
        d.setflags(write=False)
        return d

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = self.w > 0
        a.setflags(write=False)
        return a

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """All-pairs hop distances on the positive-weight adjacency (BFS)."""
        n = self.n_vertices
        neighbors = [np.nonzero(self.adjacency[i])[0] for i in range(n)]
        dist = np.full((n, n), -1, dtype=np.int32)
        for src in range(n):
            row = dist[src]
            row[src] = 0
            queue = deque([src])
            while queue:
                u = queue.popleft()
                for v in neighbors[u]:
                    if row[v] < 0:
                        row[v] = row[u] + 1
                        queue.append(v)
        dist.setflags(write=False)
        return dist

    def _is_connected(self) -> bool:
        n = self.n_vertices
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        adjacency = self.w > 0
        while queue:
            u = queue.popleft()
            for v in np.nonzero(adjacency[u])[0]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return bool(seen.all())


def transition_weight(g: MeasuredWeightedGraph, x: str, y: str) -> float:
    """q(x, y) = w(x, y) / m(x); not symmetric in general."""
    i = g.index(x)
    j = g.index(y)
    return float(g.w[i, j] / g.m[i])


def vertex_degree(g: MeasuredWeightedGraph, x: str) -> float:
    """Deg(x) = sum_y q(x, y)."""
    return float(g.degrees[g.index(x)])


def max_degree(g: MeasuredWeightedGraph) -> float:
    return float(g.degrees.max())


def combinatorial_distance(g: MeasuredWeightedGraph, x: str, y: str) -> int:
    """Hop distance between x and y on the positive-weight adjacency."""
    return int(g.distance_matrix[g.index(x), g.index(y)])


def diameter(g: MeasuredWeightedGraph) -> int:
    return int(g.distance_matrix.max())


def ball(g: MeasuredWeightedGraph, x: str, r: int) -> list[str]:
    """Vertices within hop distance r of x, with x first, then canonical order."""
    if r < 0:
        raise DomainError(f"ball radius must be non-negative, got {r}")
    i = g.index(x)
    row = g.distance_matrix[i]
    return [x] + [v for j, v in enumerate(g.vertices) if j != i and row[j] <= r]


def ball_indices(g: MeasuredWeightedGraph, i: int, r: int) -> np.ndarray:
    """Index form of :func:`ball`: center index first, then canonical order."""
    row = g.distance_matrix[i]
    rest = [j for j in range(g.n_vertices) if j != i and row[j] <= r]
    return np.array([i] + rest, dtype=int)


def _check_number(value, key: str):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise SchemaError(f"field {key!r} must be a number, got {value!r}")
    return float(value)


def load_graph(document: bytes | str) -> MeasuredWeightedGraph:
    """Parse and validate a graph document.

    The schema is ``{"vertices": [{"id": str, "m": number}, ...],
    "edges": [{"u": str, "v": str, "w": number}, ...]}``.  Edges may be listed
    once per unordered pair; listing both orientations is allowed only with
    identical weights.

    Raises:
        SchemaError: malformed JSON, missing or mistyped fields, unknown edge
            endpoints, duplicate vertex ids.
        InvariantError: negative weight, non-positive measure, self-loop,
            contradictory duplicate edges, or a disconnected graph.
    """
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top-level JSON value must be an object")
    for key in ("vertices", "edges"):
        if key not in doc or not isinstance(doc[key], list):
            raise SchemaError(f"document must contain a {key!r} list")

    ids: list[str] = []
    measures: list[float] = []
    for entry in doc["vertices"]:
        if not isinstance(entry, dict) or "id" not in entry or "m" not in entry:
            raise SchemaError(f"vertex entry must be an object with 'id' and 'm': {entry!r}")
        vid = entry["id"]
        if not isinstance(vid, str) or not vid:
            raise SchemaError(f"vertex id must be a non-empty string, got {vid!r}")
        if vid in ids:
            raise SchemaError(f"duplicate vertex id {vid!r}")
        ids.append(vid)
        measures.append(_check_number(entry["m"], "m"))
    if not ids:
        raise SchemaError("document must contain at least one vertex")

    pos = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    w = np.zeros((n, n))
    seen: dict[tuple[int, int], float] = {}
    for entry in doc["edges"]:
        if not isinstance(entry, dict) or any(k not in entry for k in ("u", "v", "w")):
            raise SchemaError(f"edge entry must be an object with 'u', 'v' and 'w': {entry!r}")
        try:
            i = pos[entry["u"]]
            j = pos[entry["v"]]
        except (KeyError, TypeError):
            raise SchemaError(f"edge references unknown vertex: {entry!r}") from None
        weight = _check_number(entry["w"], "w")
        if weight < 0:
            raise InvariantError(f"edge weight must be non-negative: {entry!r}")
        if i == j:
            if weight != 0:
                raise InvariantError(f"self-loop on vertex {entry['u']!r}")
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            if seen[key] != weight:
                raise InvariantError(
                    f"contradictory duplicate edge {entry['u']!r}-{entry['v']!r}: "
                    f"{seen[key]!r} vs {weight!r}"
                )
            continue
        seen[key] = weight
        w[i, j] = weight
        w[j, i] = weight
    return MeasuredWeightedGraph(tuple(ids), w, np.array(measures))


def dump_graph(g: MeasuredWeightedGraph) -> str:
    """Serialize a graph to the input JSON schema, vertices in canonical order."""
    doc = {
        "vertices": [{"id": v, "m": float(g.m[i])} for i, v in enumerate(g.vertices)],
        "edges": [
            {"u": g.vertices[i], "v": g.vertices[j], "w": float(g.w[i, j])}
            for i in range(g.n_vertices)
            for j in range(i + 1, g.n_vertices)
            if g.w[i, j] > 0
        ],
    }
    return json.dumps(doc, indent=2)


def three_vertex_example(eps: float) -> MeasuredWeightedGraph:
    """Built-in path graph x - y - z with measures (eps, 1, eps), w(x,y) = 1 and
    w(y,z) = 1/eps + 3 + eps.

    For small eps this graph has slightly negative curvature at x and strongly
    positive curvature at y and z.
    """
    if isinstance(eps, bool) or not isinstance(eps, numbers.Real) or not math.isfinite(eps) or eps <= 0:
        raise DomainError(f"eps must be a positive finite real, got {eps!r}")
    eps = float(eps)
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = 1.0
    w[1, 2] = w[2, 1] = 1.0 / eps + 3.0 + eps
    return MeasuredWeightedGraph(("x", "y", "z"), w, np.array([eps, 1.0, eps]))


def random_connected_graph(
    n_vertices: int,
    rng,
    extra_edge_prob: float = 0.35,
    weight_range: tuple[float, float] = (0.1, 2.0),
    measure_range: tuple[float, float] = (0.1, 2.0),
) -> MeasuredWeightedGraph:
    """Random connected graph: a random attachment tree plus independent extra edges.

    ``rng`` is an integer seed or a numpy Generator.  Weights and measures are
    drawn uniformly from the given ranges, so connectivity holds by
    construction and loading never needs rejection sampling.
    """
    if n_vertices < 1:
        raise DomainError(f"need at least one vertex, got {n_vertices}")
    rng = np.random.default_rng(rng)
    w = np.zeros((n_vertices, n_vertices))

    def draw_weight():
        return float(rng.uniform(*weight_range))

    for v in range(1, n_vertices):
        u = int(rng.integers(0, v))
        w[u, v] = w[v, u] = draw_weight()
    for i in range(n_vertices):
        for j in range(i + 1, n_vertices):
            if w[i, j] == 0 and rng.random() < extra_edge_prob:
                w[i, j] = w[j, i] = draw_weight()
    m = rng.uniform(*measure_range, size=n_vertices)
    labels = tuple(f"v{i}" for i in range(n_vertices))
    return MeasuredWeightedGraph(labels, w, m)
