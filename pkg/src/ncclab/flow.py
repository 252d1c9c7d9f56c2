"""Multicommodity flow rate (maximum concurrent flow).

The main route is an edge-flow LP solved by the in-house simplex in
:mod:`ncclab.simplex`.  :func:`flow_rate_paths` is an independent check that
enumerates every simple path and hands the path LP to scipy's HiGHS.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .errors import InputError, SearchSpaceTooLarge, VerificationError
from .network import Edge, Network
from .simplex import solve_lp

FEAS_TOL = 1e-9
OPT_TOL = 1e-7


def undirect(net: Network) -> Network:
    """Forget directions; parallel and antiparallel edges merge by summing
    capacities, keeping the orientation of the first occurrence."""
    merged: dict[frozenset, list] = {}
    order = []
    for e in net.edges:
        key = frozenset((e.u, e.v))
        if key in merged:
            merged[key][2] += e.cap
        else:
            merged[key] = [e.u, e.v, e.cap]
            order.append(key)
    edges = tuple(Edge(*merged[k]) for k in order)
    return Network(net.n_vertices, edges, net.pairs, directed=False, labels=net.labels)


@dataclass
class FlowSolution:
    rate: float
    arcs: list[tuple[int, int, int]]  # (u, v, edge index)
    flows: np.ndarray  # shape (k, len(arcs))
    directed: bool
    iterations: int
    max_violation: float
    cs_residual: float

    def delivered(self, net: Network) -> np.ndarray:
        out = np.zeros(len(net.pairs))
        for i, (s, t) in enumerate(net.pairs):
            for a, (u, v, _) in enumerate(self.arcs):
                if v == t:
                    out[i] += self.flows[i, a]
                if u == t:
                    out[i] -= self.flows[i, a]
        return out

    def through_vertex(self, w: int) -> np.ndarray:
        """Per-commodity flow entering ``w``."""
        mask = np.array([v == w for (_, v, _) in self.arcs])
        return self.flows[:, mask].sum(axis=1) if mask.any() else np.zeros(self.flows.shape[0])

    def rows(self, tol: float = 1e-12):
        for i in range(self.flows.shape[0]):
            for a, (u, v, _) in enumerate(self.arcs):
                f = self.flows[i, a]
                if f > tol:
                    yield i, u, v, f

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["commodity", "u", "v", "flow"])
        for i, u, v, f in self.rows():
            w.writerow([i, u, v, repr(float(f))])
        return buf.getvalue()


def _arcs(net: Network) -> list[tuple[int, int, int]]:
    arcs = []
    for idx, e in enumerate(net.edges):
        arcs.append((e.u, e.v, idx))
        if not net.directed:
            arcs.append((e.v, e.u, idx))
    return arcs


def _build_lp(net: Network, arcs):
    k, A = net.k, len(arcs)
    nvar = k * A + 1
    r_col = k * A
    eq_rows, ub_rows, ub_rhs = [], [], []
    for i, (s, t) in enumerate(net.pairs):
        if s == t:
            raise InputError(f"pair {i} has source == target")
        for v in range(net.n_vertices):
            row = np.zeros(nvar)
            for a, (au, av, _) in enumerate(arcs):
                if av == v:
                    row[i * A + a] += 1.0
                if au == v:
                    row[i * A + a] -= 1.0
            if v == t:
                # delivery: r - (in - out at t) <= 0
                drow = -row
                drow[r_col] = 1.0
                ub_rows.append(drow)
                ub_rhs.append(0.0)
            elif v != s and row.any():
                eq_rows.append(row)
    for idx, e in enumerate(net.edges):
        row = np.zeros(nvar)
        for a, (_, _, ai) in enumerate(arcs):
            if ai == idx:
                row[a::A][:k] = 1.0
        ub_rows.append(row)
        ub_rhs.append(e.cap)
    c = np.zeros(nvar)
    c[r_col] = 1.0
    A_eq = np.array(eq_rows) if eq_rows else np.zeros((0, nvar))
    return c, np.array(ub_rows), np.array(ub_rhs), A_eq, np.zeros(len(eq_rows))


def _cancel_antiparallel(flows: np.ndarray, arcs) -> None:
    """Keep only the net direction on each undirected edge, per commodity."""
    for a in range(0, len(arcs), 2):
        both = np.minimum(flows[:, a], flows[:, a + 1])
        flows[:, a] -= both
        flows[:, a + 1] -= both


def residuals(net: Network, sol: FlowSolution) -> float:
    """Largest violation of conservation, capacity, delivery or sign."""
    worst = float(np.max(np.maximum(-sol.flows, 0.0))) if sol.flows.size else 0.0
    for i, (s, t) in enumerate(net.pairs):
        bal = np.zeros(net.n_vertices)
        for a, (u, v, _) in enumerate(sol.arcs):
            bal[v] += sol.flows[i, a]
            bal[u] -= sol.flows[i, a]
        for v in range(net.n_vertices):
            if v not in (s, t):
                worst = max(worst, abs(bal[v]))
        worst = max(worst, sol.rate - bal[t])
    load = np.zeros(len(net.edges))
    for a, (_, _, idx) in enumerate(sol.arcs):
        load[idx] += sol.flows[:, a].sum()
    for idx, e in enumerate(net.edges):
        worst = max(worst, load[idx] - e.cap)
    return float(worst)


def flow_rate(net: Network, feas_tol: float = FEAS_TOL, opt_tol: float = OPT_TOL) -> FlowSolution:
    """Maximum r such that every commodity ships at least r units at once.

    Directed networks only route along edge directions.  Undirected networks
    get a variable per orientation; opposite flows of one commodity on one
    edge are cancelled afterwards, which leaves deliveries unchanged.
    """
    if net.k == 0:
        raise InputError("flow rate needs at least one source-target pair")
    arcs = _arcs(net)
    c, A_ub, b_ub, A_eq, b_eq = _build_lp(net, arcs)
    res = solve_lp(c, A_ub, b_ub, A_eq, b_eq, feas_tol=feas_tol)
    cs = res.certificate_residual(c, A_ub, b_ub, A_eq, b_eq)
    k, A = net.k, len(arcs)
    flows = res.x[: k * A].reshape(k, A).copy()
    if not net.directed:
        _cancel_antiparallel(flows, arcs)
    flows[flows < 0] = 0.0
    sol = FlowSolution(float(res.x[-1]), arcs, flows, net.directed, res.iterations, 0.0, cs)
    sol.max_violation = residuals(net, sol)
    if sol.max_violation > feas_tol * max(1.0, max(e.cap for e in net.edges)):
        raise VerificationError(f"flow residual {sol.max_violation:.3g} exceeds {feas_tol}")
    if cs > opt_tol:
        raise VerificationError(f"complementary slackness residual {cs:.3g} exceeds {opt_tol}")
    return sol


def simple_paths(net: Network, s: int, t: int, limit: int = 200_000) -> list[tuple[int, ...]]:
    """All simple s-t paths as tuples of edge indices (orientation-aware)."""
    adj = [[] for _ in range(net.n_vertices)]
    for idx, e in enumerate(net.edges):
        adj[e.u].append((e.v, idx))
        if not net.directed:
            adj[e.v].append((e.u, idx))
    paths = []
    visited = [False] * net.n_vertices

    def walk(v, trail):
        if v == t:
            paths.append(tuple(trail))
            if len(paths) > limit:
                raise SearchSpaceTooLarge(f"more than {limit} simple paths")
            return
        visited[v] = True
        for w, idx in adj[v]:
            if not visited[w]:
                trail.append(idx)
                walk(w, trail)
                trail.pop()
        visited[v] = False

    walk(s, [])
    return paths


def flow_rate_paths(net: Network) -> float:
    """Path-formulation LP over every simple path; independent oracle."""
    per_pair = [simple_paths(net, s, t) for s, t in net.pairs]
    if any(not ps for ps in per_pair):
        return 0.0
    cols = [(i, p) for i, ps in enumerate(per_pair) for p in ps]
    nvar = len(cols) + 1
    A_ub, b_ub = [], []
    for i in range(net.k):
        row = np.zeros(nvar)
        for j, (ci, _) in enumerate(cols):
            if ci == i:
                row[j] = -1.0
        row[-1] = 1.0
        A_ub.append(row)
        b_ub.append(0.0)
    for idx, e in enumerate(net.edges):
        row = np.zeros(nvar)
        for j, (_, path) in enumerate(cols):
            row[j] = path.count(idx)
        A_ub.append(row)
        b_ub.append(e.cap)
    c = np.zeros(nvar)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.array(A_ub), b_ub=np.array(b_ub), method="highs")
    if res.status != 0:
        raise VerificationError(f"path LP failed: {res.message}")
    return float(-res.fun)


def ncc_gap_report(net: Network, coding_rate: float) -> dict:
    directed = flow_rate(net).rate if net.directed else None
    undirected = flow_rate(undirect(net)).rate
    report = {
        "coding_rate": coding_rate,
        "directed_flow_rate": directed,
        "undirected_flow_rate": undirected,
        "directed_gap": None if not directed else coding_rate / directed,
        "undirected_ratio": None if not undirected else coding_rate / undirected,
    }
    report["directed_gap_flag"] = directed is not None and coding_rate > directed + OPT_TOL
    report["undirected_counterexample_flag"] = coding_rate > undirected + OPT_TOL
    return report


def long_pairs_check(n_edges: int, k: int, delta, d: int) -> dict:
    """Evaluate |E|/k >= delta' d with delta' = (delta - 5/6)/10.

    ``delta`` may be a Fraction for exact arithmetic.  When delta <= 5/6 the
    implication has no content and the result is flagged vacuous instead of
    passing or failing.
    """
    delta = Fraction(delta).limit_denominator(10**9) if not isinstance(delta, Fraction) else delta
    delta_prime = (delta - Fraction(5, 6)) / 10
    lhs = Fraction(n_edges, k) if k else Fraction(0)
    rhs = delta_prime * d
    vacuous = delta <= Fraction(5, 6)
    return {
        "edges": n_edges,
        "k": k,
        "delta": float(delta),
        "d": d,
        "delta_prime": float(delta_prime),
        "delta_prime_exact": str(delta_prime),
        "edges_per_pair": float(lhs),
        "delta_prime_times_d": float(rhs),
        "vacuous": vacuous,
        "holds": None if vacuous else lhs >= rhs,
    }
