"""From a non-adaptive systematic data structure to a coding instance.

Vertex numbering of the layered network: sources s_i = i, middle layer
v_j = n + j, target layer u_l = 2n + l.  Edge (s_i, v_j) exists when the
first pass reads position i to answer query j; edge (v_j, u_l) exists when
the second pass reads position j for target vertex u_l.

The scheme runs the data structure twice.  Pass one: v_j answers its query
on the source values and broadcasts a derived value h(j).  Pass two: u_l
answers a query on the h values.  Target t_i = u_{(i+b) mod n} then holds
the input x_i.

Inversion (x a permutation f):  h(j) = f^-1(j) + b,  u_l outputs h^-1(l).
Polynomial, evaluation form:  h(j) = p(sigma^j) sigma^(jb); u_l asks the
evaluation structure for p'(sigma^-l) (query index -l mod n) and divides by
n, where p' has coefficients h.
Polynomial, interpolation form:  pass one uses an interpolation structure
over sigma^-1 (whose answer j is p(sigma^j)/n), pass two one over sigma
(whose answer l is p'(sigma^-l)/n directly).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .coding import CodingScheme, audit_scheme, execute_scheme, is_delta_d_long
from .ds import (
    AdviceString,
    SystematicDS,
    index_bits,
    eval_ds,
    interp_ds,
    is_permutation,
    preprocess,
    run_query,
)
from .errors import (
    AdaptiveDSRejected,
    DegenerateSize,
    EmptyInput,
    InconsistentInput,
    InputError,
    NotAPermutation,
    VerificationError,
)
from .field import RootOfUnity, ffft
from .flow import long_pairs_check
from .network import Edge, Network

DEFAULT_Q = 8
DEFAULT_EPS = 1 / 16
DEFAULT_SAMPLES = 100_000


# -- problems -----------------------------------------------------------------


class InversionProblem:
    kind = "inversion"

    def __init__(self, ds: SystematicDS):
        if ds.adaptive:
            raise AdaptiveDSRejected(f"{ds.name} is adaptive; the reduction needs fixed query sets")
        self.first = self.second = ds
        self.n = ds.n
        self.r = index_bits(ds.n)

    def second_query(self, l: int) -> int:
        return l

    def check_input(self, x) -> tuple[int, ...]:
        x = tuple(int(v) for v in x)
        if len(x) != self.n:
            raise InputError(f"expected {self.n} values, got {len(x)}")
        if not is_permutation(x):
            raise NotAPermutation(f"{x} is not a permutation of [{self.n}]")
        return x

    def middle_value(self, answer: int, j: int, b: int) -> int:
        return (answer + b) % self.n

    def output_value(self, answer: int, l: int) -> int:
        return answer

    def h_table(self, x: Sequence[int], b: int) -> list[int]:
        inv = [0] * self.n
        for i, y in enumerate(x):
            inv[y] = i
        return [(v + b) % self.n for v in inv]


class PolyProblem:
    kind = "poly"

    def __init__(self, root: RootOfUnity, block: int = 0, variant: str = "eval"):
        if variant not in ("eval", "interp"):
            raise InputError(f"variant must be 'eval' or 'interp', got {variant!r}")
        self.root = root
        self.variant = variant
        self.n = root.n
        self.p = root.p
        self.r = root.field.bits
        self.n_inv = root.field.inv(self.n % self.p)
        if variant == "eval":
            self.first = self.second = eval_ds(root, block)
        else:
            self.first = interp_ds(root.inverse(), block)
            self.second = interp_ds(root, block)

    def second_query(self, l: int) -> int:
        return (-l) % self.n if self.variant == "eval" else l

    def check_input(self, x) -> tuple[int, ...]:
        x = tuple(int(v) for v in x)
        if len(x) != self.n or any(not 0 <= v < self.p for v in x):
            raise InputError(f"expected {self.n} residues mod {self.p}")
        return x

    def middle_value(self, answer: int, j: int, b: int) -> int:
        scale = self.n if self.variant == "interp" else 1
        return answer * scale % self.p * self.root.power(j * b) % self.p

    def output_value(self, answer: int, l: int) -> int:
        return answer * self.n_inv % self.p if self.variant == "eval" else answer

    def h_table(self, x: Sequence[int], b: int) -> list[int]:
        vals = ffft(np.array(x, dtype=np.int64), self.root)
        tw = np.array([self.root.power(j * b) for j in range(self.n)], dtype=np.int64)
        return [int(v) for v in vals * tw % self.p]


def make_problem(kind: str, ds: SystematicDS | None = None, root: RootOfUnity | None = None,
                 block: int = 0, variant: str = "eval"):
    if kind == "inversion":
        return InversionProblem(ds)
    return PolyProblem(root, block, variant)


# -- graph ------------------------------------------------------------------


def source(i: int, n: int) -> int:
    return i


def middle(j: int, n: int) -> int:
    return n + j


def target_layer(l: int, n: int) -> int:
    return 2 * n + l


@dataclass
class LayeredGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    r: int
    t: int
    first_sets: tuple[tuple[int, ...], ...]
    second_sets: tuple[tuple[int, ...], ...]

    def out_degrees(self) -> Counter:
        return Counter(u for u, _ in self.edges)


def build_layered_graph(problem) -> LayeredGraph:
    """(s_i, v_j) for i in Q_j of pass one; (v_j, u_l) for j in the pass-two
    query set of u_l."""
    for ds in (problem.first, problem.second):
        if ds.adaptive:
            raise AdaptiveDSRejected(f"{ds.name} is adaptive")
    n = problem.n
    first = tuple(tuple(problem.first.query_set(j)) for j in range(n))
    second = tuple(tuple(problem.second.query_set(problem.second_query(l))) for l in range(n))
    edges = [(source(i, n), middle(j, n)) for j in range(n) for i in first[j]]
    edges += [(middle(j, n), target_layer(l, n)) for l in range(n) for j in second[l]]
    t = max(problem.first.t_queries, problem.second.t_queries)
    return LayeredGraph(n, tuple(edges), problem.r, t, first, second)


@dataclass
class Reduction:
    problem: object
    graph: LayeredGraph
    q: int
    W: frozenset
    edges: tuple[tuple[int, int], ...]
    d: int
    b: int
    delta: float
    long_pairs: int

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def qt(self) -> int:
        return self.q * self.graph.t

    def targets(self) -> tuple[int, ...]:
        return tuple(target_layer((i + self.b) % self.n, self.n) for i in range(self.n))

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(range(self.n), self.targets()))

    def network(self) -> Network:
        n = self.n
        labels = tuple([f"s{i}" for i in range(n)] + [f"v{j}" for j in range(n)]
                       + [f"u{l}" for l in range(n)])
        return Network(3 * n, tuple(Edge(u, v, self.graph.r) for u, v in self.edges),
                       self.pairs(), directed=True, labels=labels)


def prune_high_degree(g: LayeredGraph, q: int) -> tuple[frozenset, tuple[tuple[int, int], ...]]:
    """Vertices with out-degree above q*t form W; every edge touching W goes."""
    if q < 1:
        raise InputError("q must be at least 1")
    deg = g.out_degrees()
    W = frozenset(v for v, dgr in deg.items() if dgr > q * g.t)
    kept = tuple(e for e in g.edges if e[0] not in W and e[1] not in W)
    return W, kept


def distance_threshold(n: int, qt: int) -> int:
    """ceil(log_{qt}(n) / 2), computed exactly; 1 when qt < 2."""
    if qt < 2:
        return 1
    k = 0
    while qt ** (2 * k) < n:
        k += 1
    return max(1, k)


def _undirected_distances(n_vertices: int, edges, src: int) -> list[float]:
    adj = [[] for _ in range(n_vertices)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    dist = [math.inf] * n_vertices
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if dist[w] == math.inf:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def source_distances(n: int, edges) -> list[list[float]]:
    """dist[i][l] = undirected distance from s_i to u_l."""
    out = []
    for i in range(n):
        d = _undirected_distances(3 * n, edges, source(i, n))
        out.append([d[target_layer(l, n)] for l in range(n)])
    return out


def choose_shift(n: int, edges, d: int) -> tuple[int, int]:
    """Shift b maximising #{i : dist(s_i, u_{i+b}) >= d}; smallest b on ties.
    Returns (b, count)."""
    dist = source_distances(n, edges)
    best_b, best = 0, -1
    for b in range(n):
        count = sum(dist[i][(i + b) % n] >= d for i in range(n))
        if count > best:
            best_b, best = b, count
    return best_b, best


def build_reduction(problem, q: int = DEFAULT_Q, d: int | None = None) -> Reduction:
    n = problem.n
    if n < 4:
        raise DegenerateSize(f"the reduction needs n >= 4, got {n}")
    g = build_layered_graph(problem)
    W, kept = prune_high_degree(g, q)
    if d is None:
        d = distance_threshold(n, q * g.t)
    b, count = choose_shift(n, kept, d)
    return Reduction(problem, g, q, W, kept, d, b, count / n, count)


def with_shift(red: Reduction, b: int) -> Reduction:
    """Same network with a caller-chosen shift; delta is recounted."""
    n = red.n
    dist = source_distances(n, red.edges)
    count = sum(dist[i][(i + b) % n] >= red.d for i in range(n))
    return Reduction(red.problem, red.graph, red.q, red.W, red.edges, red.d, b % n, count / n, count)


# -- fixings and buckets ------------------------------------------------------


@dataclass(frozen=True)
class Fixing:
    advice_1: AdviceString
    advice_2: AdviceString
    source_fixes: tuple[tuple[int, int], ...]  # (i, x_i) for s_i in W
    middle_fixes: tuple[tuple[int, int], ...]  # (j, h(j)) for v_j in W

    def key(self) -> tuple:
        return (self.advice_1.bits, self.advice_2.bits, self.source_fixes, self.middle_fixes)

    def fixed_bits(self, r: int) -> int:
        return len(self.advice_1) + len(self.advice_2) + r * (len(self.source_fixes) + len(self.middle_fixes))

    def to_json(self) -> dict:
        return {
            "advice_1": self.advice_1.to_hex(),
            "advice_2": self.advice_2.to_hex(),
            "source_fixes": [list(p) for p in self.source_fixes],
            "middle_fixes": [list(p) for p in self.middle_fixes],
        }


def compute_fixing(red: Reduction, x: Sequence[int]) -> Fixing:
    prob, n = red.problem, red.n
    h = prob.h_table(x, red.b)
    adv1 = preprocess(prob.first, x)
    adv2 = preprocess(prob.second, h)
    src = tuple((i, int(x[i])) for i in range(n) if source(i, n) in red.W)
    mid = tuple((j, int(h[j])) for j in range(n) if middle(j, n) in red.W)
    return Fixing(adv1, adv2, src, mid)


@dataclass
class Bucket:
    fixing: Fixing
    members: list[tuple[int, ...]]
    n_inputs: int
    n_buckets: int
    exhaustive: bool
    seed: int | None = None

    @property
    def fraction(self) -> float:
        return len(self.members) / self.n_inputs


def all_permutations(n: int):
    return itertools.permutations(range(n))


def sample_permutations(n: int, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        yield tuple(int(v) for v in rng.permutation(n))


def select_bucket(red: Reduction, inputs: Iterable, exhaustive: bool = True,
                  seed: int | None = None) -> Bucket:
    """Group inputs by their fixing and return the largest group (ties go to
    the lexicographically smallest fixing key)."""
    groups: dict[tuple, list] = {}
    fixings: dict[tuple, Fixing] = {}
    total = 0
    for x in inputs:
        x = tuple(int(v) for v in x)
        f = compute_fixing(red, x)
        key = f.key()
        if key not in groups:
            groups[key] = []
            fixings[key] = f
        groups[key].append(x)
        total += 1
    if not total:
        raise EmptyInput("no inputs to bucket")
    best = min(groups, key=lambda k: (-len(groups[k]), k))
    return Bucket(fixings[best], groups[best], total, len(groups), exhaustive, seed)


# -- scheme execution ---------------------------------------------------------


@dataclass
class SchemeRun:
    outputs: tuple[int, ...]  # output at t_i, in pair order
    middle: dict[int, int]  # h(j) computed at v_j
    transcript: dict[tuple[int, int], int]  # (u, v) -> message


def run_scheme(red: Reduction, fixing: Fixing, x: Sequence[int]) -> SchemeRun:
    prob, n = red.problem, red.n
    x = prob.check_input(x)
    for i, c in fixing.source_fixes:
        if x[i] != c:
            raise InconsistentInput(f"x_{i} = {x[i]} but the fixing says {c}")
    transcript: dict[tuple[int, int], int] = {}
    into: dict[int, dict[int, int]] = {}
    for u, v in red.edges:
        if u < n:
            transcript[(u, v)] = x[u]
            into.setdefault(v, {})[u] = x[u]
    src_fix = dict(fixing.source_fixes)

    h: dict[int, int] = {}
    for j in range(n):
        vj = middle(j, n)
        if vj in red.W:
            continue
        view = {**into.get(vj, {}), **src_fix}
        ans, _ = run_query(prob.first, fixing.advice_1, j, view)
        h[j] = prob.middle_value(int(ans), j, red.b)

    for u, v in red.edges:
        if u >= n:
            transcript[(u, v)] = h[u - n]
            into.setdefault(v, {})[u - n] = h[u - n]
    mid_fix = dict(fixing.middle_fixes)

    outputs = []
    for i in range(n):
        l = (i + red.b) % n
        view = {**into.get(target_layer(l, n), {}), **mid_fix}
        ans, _ = run_query(prob.second, fixing.advice_2, prob.second_query(l), view)
        outputs.append(prob.output_value(int(ans), l))
    return SchemeRun(tuple(outputs), h, transcript)


def run_inversion_scheme(red: Reduction, fixing: Fixing, x) -> SchemeRun:
    if red.problem.kind != "inversion":
        raise InputError("run_inversion_scheme needs an inversion reduction")
    return run_scheme(red, fixing, x)


def run_poly_scheme(red: Reduction, fixing: Fixing, alpha) -> SchemeRun:
    if red.problem.kind != "poly":
        raise InputError("run_poly_scheme needs a polynomial reduction")
    return run_scheme(red, fixing, alpha)


def as_coding_scheme(red: Reduction, fixing: Fixing) -> tuple[Network, CodingScheme]:
    """The same scheme expressed edge by edge for the generic executor."""
    net = red.network()
    prob, n = red.problem, red.n
    src_fix = dict(fixing.source_fixes)
    mid_fix = dict(fixing.middle_fixes)
    encoders, decoders = {}, {}

    def forward(args):
        return args[0]
    forward.arity = 1

    for e, edge in enumerate(net.edges):
        if edge.u < n:
            encoders[e] = forward
            continue
        j = edge.u - n
        senders = [net.edges[x].u for x in net.in_edges(edge.u)]

        def relay(args, j=j, senders=senders):
            view = dict(zip(senders, args))
            view.update(src_fix)
            ans, _ = run_query(prob.first, fixing.advice_1, j, view)
            return prob.middle_value(int(ans), j, red.b)
        relay.arity = len(senders)
        encoders[e] = relay

    for i, (_, t) in enumerate(net.pairs):
        l = t - 2 * n
        senders = [net.edges[x].u - n for x in net.in_edges(t)]

        def decode(args, l=l, senders=senders):
            view = dict(zip(senders, args))
            view.update(mid_fix)
            ans, _ = run_query(prob.second, fixing.advice_2, prob.second_query(l), view)
            return prob.output_value(int(ans), l)
        decode.arity = len(senders)
        decoders[i] = decode
    return net, CodingScheme(encoders, decoders, red.graph.r, name=f"{prob.kind}-two-pass")


def verify_bucket(red: Reduction, bucket: Bucket) -> dict:
    """Run every member through the direct runner and the generic executor."""
    direct_ok = replay_ok = agree = 0
    net, scheme = as_coding_scheme(red, bucket.fixing)
    for x in bucket.members:
        a = run_scheme(red, bucket.fixing, x)
        b = execute_scheme(net, scheme, x)
        direct_ok += a.outputs == x
        replay_ok += b.outputs == x
        agree += a.outputs == b.outputs
        for e, edge in enumerate(net.edges):
            if b.messages[e] != a.transcript[(edge.u, edge.v)]:
                raise VerificationError(f"transcripts differ on edge ({edge.u},{edge.v}) for {x}")
    m = len(bucket.members)
    return {"members": m, "direct_correct": direct_ok, "replay_correct": replay_ok, "agree": agree}


# -- identities and audit -----------------------------------------------------


def telescoping_values(alpha: np.ndarray, root: RootOfUnity, b: int) -> np.ndarray:
    """p'(sigma^-l)/n for every l, batched over leading axes of ``alpha``."""
    p, n = root.p, root.n
    tw = np.array([root.power(j * b) for j in range(n)], dtype=np.int64)
    h = ffft(alpha, root) * tw % p
    # p'(sigma^-l) = sum_j h_j sigma^(-l j)
    vals = ffft(h, root.inverse())
    return vals * root.field.inv(n % p) % p


def two_pass_outputs(problem, alpha, b: int) -> list[int]:
    """Both data-structure passes with no network: full tables as the oracle."""
    n = problem.n
    adv1 = preprocess(problem.first, alpha)
    h = [problem.middle_value(int(run_query(problem.first, adv1, j, alpha)[0]), j, b) for j in range(n)]
    adv2 = preprocess(problem.second, h)
    return [problem.output_value(int(run_query(problem.second, adv2, problem.second_query(l), h)[0]), l)
            for l in range(n)]


def tagged(value, formula: str) -> dict:
    return {"value": value, "formula": formula}


def audit_reduction(red: Reduction, bucket: Bucket | None = None, verification: dict | None = None,
                    eps: float = DEFAULT_EPS) -> dict:
    g, n, q, t, r = red.graph, red.n, red.q, red.graph.t, red.graph.r
    first = red.problem.first
    deg_after = Counter(u for u, _ in red.edges)
    max_deg = max(deg_after.values(), default=0)
    total_q = sum(len(s) for s in g.first_sets) + sum(len(s) for s in g.second_sets)
    s_bits = first.s_bits
    net = red.network()
    long_flag, delta_bfs = is_delta_d_long(net, red.d)
    report = {
        "problem": red.problem.kind,
        "ds": first.name,
        "n": n,
        "t": t,
        "q": q,
        "r": tagged(r, "ceil(log2 n)" if red.problem.kind == "inversion" else "ceil(log2 p)"),
        "edges_G_prime": tagged(len(g.edges), "sum_j |Q_j| over both passes"),
        "two_t_n": tagged(2 * t * n, "2*t*n"),
        "edges_equal_2tn": len(g.edges) == 2 * t * n,
        "query_set_total": total_q,
        "edges_after_pruning": len(red.edges),
        "max_out_degree": max_deg,
        "qt": tagged(q * t, "q*t"),
        "degree_ok": max_deg <= q * t,
        "W_size": len(red.W),
        "W": sorted(red.W),
        "two_n_over_q": tagged(2 * n / q, "2*n/q"),
        "W_ok": len(red.W) <= 2 * n / q,
        "d": tagged(red.d, "ceil(log_{qt}(n)/2)"),
        "b": red.b,
        "delta": tagged(red.delta, "#{i : dist_un(s_i, u_{i+b}) >= d} / n"),
        "delta_bfs_recheck": delta_bfs,
        "targets": [int(x) for x in red.targets()],
        "s_bits": s_bits,
        "eps_measured": tagged(s_bits / (n * r), "s / (n*r)"),
    }
    fixed_bound = 2 * s_bits + (2 / q) * n * r
    report["fixed_bits_bound"] = tagged(fixed_bound, "2*s + (2/q)*n*r")
    eps_prime = 2 * eps + 2 / q + 2 / math.log2(n)
    report["eps_prime"] = tagged(eps_prime, "2*eps + 2/q + 2/log2(n)")
    if bucket is not None:
        fb = bucket.fixing.fixed_bits(r)
        report["bucket"] = {
            "size": len(bucket.members),
            "inputs": bucket.n_inputs,
            "buckets": bucket.n_buckets,
            "exhaustive": bucket.exhaustive,
            "seed": bucket.seed,
            "fixed_bits": fb,
            "fixed_bits_ok": fb <= fixed_bound,
            "fraction": tagged(bucket.fraction, "|bucket| / #inputs"),
            "pigeonhole_floor": tagged(2.0 ** -fb, "2^-(fixed bits)"),
            "paper_fraction_bound": tagged(2.0 ** (-(2 * eps + 2 / q) * n * r), "2^-((2*eps + 2/q)*n*r)"),
            "fixing": bucket.fixing.to_json(),
        }
        if verification is None:
            verification = verify_bucket(red, bucket)
    if verification is not None:
        report["scheme"] = verification
    if bucket is not None and bucket.members:
        net_s, scheme = as_coding_scheme(red, bucket.fixing)
        aud = audit_scheme(net_s, scheme, bucket.members)
        report["entropy"] = {
            "max_edge_entropy": max(aud.edge_entropy.values(), default=0.0),
            "capacity": r,
            "capacity_ok": aud.capacity_ok,
            "distribution": "uniform on bucket members",
        }
    lem = long_pairs_check(len(red.edges), n, Fraction(red.long_pairs, n), red.d)
    report["long_pairs_bound"] = lem
    return report

