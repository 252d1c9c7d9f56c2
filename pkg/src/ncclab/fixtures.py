"""Small named networks and circuits used by tests and the CLI."""

from __future__ import annotations

import numpy as np

from . import circuits
from .errors import InputError
from .network import Edge, Network

BUTTERFLY_LABELS = ("s1", "s2", "m1", "m2", "t1", "t2")


def butterfly(bottleneck: bool = True, cap: float = 1.0) -> Network:
    """s1, s2 feed m1; m1 -> m2 -> t1, t2; side edges s1 -> t2 and s2 -> t1.

    Pairs (s1, t1) and (s2, t2): each source reaches its own target only
    through the shared edge m1 -> m2.
    """
    s1, s2, m1, m2, t1, t2 = range(6)
    edges = [(s1, m1), (s2, m1), (m1, m2), (m2, t1), (m2, t2), (s1, t2), (s2, t1)]
    if not bottleneck:
        edges.remove((m1, m2))
    return Network(6, tuple(Edge(u, v, cap) for u, v in edges), ((s1, t1), (s2, t2)),
                   directed=True, labels=BUTTERFLY_LABELS)


def path(caps=(3.0, 5.0, 4.0)) -> Network:
    n = len(caps) + 1
    return Network(n, tuple(Edge(i, i + 1, float(c)) for i, c in enumerate(caps)), ((0, n - 1),))


def random_dag(rng: np.random.Generator, n_vertices: int = 6, n_edges: int = 9, k: int = 2,
               max_cap: int = 4) -> Network:
    """Random DAG on vertices in index order; pairs drawn among reachable
    (u, v) with u < v, integral capacities 1..max_cap."""
    all_pairs = [(u, v) for u in range(n_vertices) for v in range(u + 1, n_vertices)]
    n_edges = min(n_edges, len(all_pairs))
    picks = rng.choice(len(all_pairs), size=n_edges, replace=False)
    edges = tuple(Edge(*all_pairs[i], float(rng.integers(1, max_cap + 1))) for i in sorted(picks))
    reach = np.eye(n_vertices, dtype=bool)
    for e in sorted(edges, key=lambda e: -e.u):
        reach[e.u] |= reach[e.v]
    reachable = [(u, v) for u, v in all_pairs if reach[u, v]]
    if not reachable:
        raise InputError("random DAG has no reachable pair")
    chosen = rng.choice(len(reachable), size=min(k, len(reachable)), replace=False)
    return Network(n_vertices, edges, tuple(reachable[i] for i in sorted(chosen)))


NETWORKS = {
    "butterfly": lambda: butterfly(),
    "butterfly-cut": lambda: butterfly(bottleneck=False),
    "path": lambda: path(),
}


def circuit_fixture(name: str, n: int = 4, b: int = 2) -> circuits.Circuit:
    if name == "hub":
        return circuits.build_hub_circuit(n)
    if name == "identity":
        return circuits.build_identity_circuit(n)
    if name == "inversion":
        return circuits.build_inversion_circuit(n)
    if name == "sorter":
        return circuits.build_sorting_network(n, b)
    raise InputError(f"unknown circuit fixture {name!r}")


CIRCUITS = ("hub", "identity", "inversion", "sorter")
