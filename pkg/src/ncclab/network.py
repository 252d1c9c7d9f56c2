"""Networks: a graph with positive edge capacities and source-target pairs.

Text format, one record per line, ``#`` starts a comment line::

    network <directed|undirected> <#vertices> <#edges> <#pairs>
    e <u> <v> <capacity>
    p <s_i> <t_i>

Vertices are 0-based.  Capacities are written with Python's shortest
round-trip float repr (integers without a decimal point) so a file read back
reproduces the network bit for bit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .errors import CyclicNetwork, InputError, ParseError


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    cap: float


@dataclass(frozen=True)
class Network:
    n_vertices: int
    edges: tuple[Edge, ...]
    pairs: tuple[tuple[int, int], ...]
    directed: bool = True
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        for e in self.edges:
            if not (0 <= e.u < self.n_vertices and 0 <= e.v < self.n_vertices):
                raise InputError(f"edge ({e.u},{e.v}) outside 0..{self.n_vertices - 1}")
            if e.u == e.v:
                raise InputError(f"self-loop at {e.u}")
            if not e.cap > 0:
                raise InputError(f"capacity of ({e.u},{e.v}) must be positive, got {e.cap}")
        for s, t in self.pairs:
            if not (0 <= s < self.n_vertices and 0 <= t < self.n_vertices):
                raise InputError(f"pair ({s},{t}) outside the vertex range")

    @property
    def k(self) -> int:
        return len(self.pairs)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    @cached_property
    def _out(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.n_vertices)]
        for i, e in enumerate(self.edges):
            out[e.u].append(i)
        return tuple(tuple(x) for x in out)

    @cached_property
    def _in(self) -> tuple[tuple[int, ...], ...]:
        inc = [[] for _ in range(self.n_vertices)]
        for i, e in enumerate(self.edges):
            inc[e.v].append(i)
        return tuple(tuple(x) for x in inc)

    def out_edges(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_edges(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def topological_order(self) -> list[int]:
        indeg = [len(self._in[v]) for v in range(self.n_vertices)]
        queue = deque(v for v in range(self.n_vertices) if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for ei in self._out[v]:
                w = self.edges[ei].v
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        if len(order) != self.n_vertices:
            raise CyclicNetwork("network has a directed cycle")
        return order

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except CyclicNetwork:
            return False
        return True

    def undirected_distances(self, src: int) -> list[float]:
        """BFS hop distances from ``src`` ignoring edge directions."""
        adj = [[] for _ in range(self.n_vertices)]
        for e in self.edges:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        dist = [float("inf")] * self.n_vertices
        dist[src] = 0
        queue = deque([src])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if dist[w] == float("inf"):
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    def scaled(self, factor: float) -> "Network":
        return Network(self.n_vertices, tuple(Edge(e.u, e.v, e.cap * factor) for e in self.edges),
                       self.pairs, self.directed, self.labels)

    def with_pairs(self, pairs) -> "Network":
        return Network(self.n_vertices, self.edges, tuple(tuple(p) for p in pairs),
                       self.directed, self.labels)


def format_capacity(c: float) -> str:
    if float(c).is_integer():
        return str(int(c))
    return repr(float(c))


def dumps(net: Network) -> str:
    kind = "directed" if net.directed else "undirected"
    lines = [f"network {kind} {net.n_vertices} {len(net.edges)} {net.k}"]
    lines += [f"e {e.u} {e.v} {format_capacity(e.cap)}" for e in net.edges]
    lines += [f"p {s} {t}" for s, t in net.pairs]
    return "\n".join(lines) + "\n"


def loads(text: str) -> Network:
    header = None
    edges, pairs = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if header is None:
                if parts[0] != "network" or len(parts) != 5 or parts[1] not in ("directed", "undirected"):
                    raise ParseError(f"line {lineno}: expected 'network <directed|undirected> V E K'")
                header = (parts[1] == "directed", int(parts[2]), int(parts[3]), int(parts[4]))
            elif parts[0] == "e" and len(parts) == 4:
                edges.append(Edge(int(parts[1]), int(parts[2]), float(parts[3])))
            elif parts[0] == "p" and len(parts) == 3:
                pairs.append((int(parts[1]), int(parts[2])))
            else:
                raise ParseError(f"line {lineno}: unrecognised record {line!r}")
        except ValueError:
            raise ParseError(f"line {lineno}: bad number in {line!r}") from None
    if header is None:
        raise ParseError("missing 'network' header line")
    directed, nv, ne, k = header
    if len(edges) != ne or len(pairs) != k:
        raise ParseError(f"header promises {ne} edges/{k} pairs, found {len(edges)}/{len(pairs)}")
    try:
        return Network(nv, tuple(edges), tuple(pairs), directed)
    except InputError as exc:
        raise ParseError(str(exc)) from None


def read_network(path) -> Network:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return loads(text)


def write_network(net: Network, path) -> None:
    Path(path).write_text(dumps(net))
