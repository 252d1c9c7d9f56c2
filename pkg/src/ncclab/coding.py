"""Network coding schemes on directed acyclic networks.

A scheme assigns every edge an encoder and every source-target pair a
decoder.  An encoder for edge (v, w) is called with one tuple: the messages
of the pairs sourced at v (pair order) followed by the messages on v's
in-edges (edge-index order).  A decoder for pair i gets the messages on the
in-edges of t_i.  Encoders that carry an ``arity`` attribute are checked
against that tuple length before execution.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .correction import correction_protocol, player_decode
from .errors import ArityMismatch, InputError, ParseError, SearchSpaceTooLarge
from .network import Edge, Network


class TableFunction:
    """A finite function stored as an explicit table ``input tuple -> symbol``."""

    def __init__(self, table: dict, arity: int):
        self.table = dict(table)
        self.arity = arity

    def __call__(self, args):
        return self.table[tuple(args)]

    def items(self):
        return sorted(self.table.items())


@dataclass
class CodingScheme:
    encoders: dict[int, Callable]
    decoders: dict[int, Callable]
    message_bits: int | None = None  # r, when messages are r-bit integers
    name: str = "scheme"


@dataclass
class Execution:
    outputs: tuple
    messages: dict[int, Hashable]


def _sources_at(net: Network) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for i, (s, _) in enumerate(net.pairs):
        out.setdefault(s, []).append(i)
    return out


def encoder_arity(net: Network, v: int, sources_at=None) -> int:
    sources_at = _sources_at(net) if sources_at is None else sources_at
    return len(sources_at.get(v, ())) + len(net.in_edges(v))


def execute_scheme(net: Network, scheme: CodingScheme, inputs: Sequence) -> Execution:
    """Run the three steps: sources emit, relays forward in topological order,
    targets decode."""
    if len(inputs) != net.k:
        raise InputError(f"expected {net.k} input messages, got {len(inputs)}")
    order = net.topological_order()
    sources_at = _sources_at(net)
    msgs: dict[int, Hashable] = {}
    for v in order:
        outs = net.out_edges(v)
        if not outs:
            continue
        args = tuple(inputs[i] for i in sources_at.get(v, ())) + tuple(msgs[e] for e in net.in_edges(v))
        for e in outs:
            enc = scheme.encoders.get(e)
            if enc is None:
                raise ArityMismatch(f"no encoder for edge {e} ({net.edges[e].u}->{net.edges[e].v})")
            want = getattr(enc, "arity", None)
            if want is not None and want != len(args):
                raise ArityMismatch(f"encoder on edge {e} takes {want} inputs, vertex {v} supplies {len(args)}")
            msgs[e] = enc(args)
    outputs = []
    for i, (_, t) in enumerate(net.pairs):
        dec = scheme.decoders[i]
        args = tuple(msgs[e] for e in net.in_edges(t))
        want = getattr(dec, "arity", None)
        if want is not None and want != len(args):
            raise ArityMismatch(f"decoder {i} takes {want} inputs, target {t} supplies {len(args)}")
        outputs.append(dec(args))
    return Execution(tuple(outputs), msgs)


def entropy(values) -> float:
    counts = np.array(list(Counter(values).values()), dtype=float)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum()) + 0.0


@dataclass
class SchemeAudit:
    correct_count: int
    total: int
    edge_entropy: dict[int, float]
    capacity_ok: bool
    over_capacity: list[int] = field(default_factory=list)
    alphabet_ok: bool | None = None
    eps: float | None = None
    threshold: float | None = None
    is_eps_r_scheme: bool | None = None

    @property
    def all_correct(self) -> bool:
        return self.correct_count == self.total


def audit_scheme(net: Network, scheme: CodingScheme, input_set, eps: float | None = None,
                 strict: bool = False, expected=None) -> SchemeAudit:
    """Count correctly decoded inputs and measure per-edge empirical entropy
    under the uniform distribution on ``input_set``.

    ``expected`` maps an input tuple to the outputs the targets should
    produce; by default each target should reproduce its own source message.
    """
    inputs = [tuple(x) for x in input_set]
    per_edge: dict[int, list] = {e: [] for e in range(len(net.edges))}
    correct = 0
    for x in inputs:
        run = execute_scheme(net, scheme, x)
        want = tuple(expected(x)) if expected else x
        correct += run.outputs == want
        for e, msg in run.messages.items():
            per_edge[e].append(msg)
    ent = {e: entropy(v) if v else 0.0 for e, v in per_edge.items()}
    over = [e for e, h in ent.items() if h > net.edges[e].cap + 1e-9]
    alphabet_ok = None
    if strict:
        alphabet_ok = all(math.log2(max(1, len(set(v)))) <= net.edges[e].cap + 1e-9
                          for e, v in per_edge.items())
    audit = SchemeAudit(correct, len(inputs), ent, not over, over, alphabet_ok)
    if eps is not None and scheme.message_bits is not None:
        audit.eps = eps
        audit.threshold = 2.0 ** ((1 - eps) * scheme.message_bits * net.k)
        audit.is_eps_r_scheme = correct >= audit.threshold
    return audit


def is_delta_d_long(net: Network, d: float, delta: float = 1.0) -> tuple[bool, float]:
    """Fraction of pairs at undirected distance >= d, and whether it reaches ``delta``."""
    if net.k == 0:
        return True, 1.0
    far = 0
    cache: dict[int, list[float]] = {}
    for s, t in net.pairs:
        if s not in cache:
            cache[s] = net.undirected_distances(s)
        far += cache[s][t] >= d
    measured = far / net.k
    return measured >= delta, measured


# -- supervisor augmentation ------------------------------------------------

BETA_GRANULARITY = 1024


def round_up_capacity(x: float) -> float:
    return max(1, math.ceil(x * BETA_GRANULARITY - 1e-9)) / BETA_GRANULARITY


@dataclass
class Augmented:
    net: Network
    base: Network
    new_sources: tuple[int, ...]
    hub: int
    r: int
    beta_caps: tuple[float, ...]

    def hub_capacity(self) -> float:
        return sum(self.net.edges[e].cap for e in range(len(self.net.edges))
                   if self.hub in (self.net.edges[e].u, self.net.edges[e].v))


def augment_with_supervisor(net: Network, r: int, beta_budgets: Sequence[float]) -> Augmented:
    """Add sources s'_i and one supervisor vertex u; pairs become (s'_i, t_i).

    Edges (s'_i, s_i) and (s'_i, u) get capacity r; (u, s_i) and (u, t_i) get
    E|beta_i| rounded up to 1/1024 bit.  Original edge indices are kept.
    """
    k = net.k
    if len(beta_budgets) != k:
        raise InputError(f"need {k} beta budgets, got {len(beta_budgets)}")
    N = net.n_vertices
    new_sources = tuple(N + i for i in range(k))
    hub = N + k
    caps = tuple(round_up_capacity(b) for b in beta_budgets)
    edges = list(net.edges)
    for i, (s, t) in enumerate(net.pairs):
        edges.append(Edge(new_sources[i], s, r))
        edges.append(Edge(new_sources[i], hub, r))
    for i, (s, t) in enumerate(net.pairs):
        edges.append(Edge(hub, s, caps[i]))
        edges.append(Edge(hub, t, caps[i]))
    labels = None
    if net.labels:
        labels = tuple(net.labels) + tuple(f"s'{i}" for i in range(k)) + ("u",)
    pairs = tuple((new_sources[i], t) for i, (_, t) in enumerate(net.pairs))
    aug = Network(N + k + 1, tuple(edges), pairs, directed=True, labels=labels)
    return Augmented(aug, net, new_sources, hub, r, caps)


def combined_scheme(aug: Augmented, base: CodingScheme, codebook) -> CodingScheme:
    """Scheme on R' built from a base scheme correct on the codebook F.

    s'_i forwards w'_i to s_i and u; u plays the supervisor and sends beta_i
    to s_i and t_i; s_i feeds w'_i XOR gamma_i (a member of F) into the base
    scheme; t_i decodes the base output and XORs gamma_i back out.
    """
    net, R = aug.net, aug.base
    m = codebook.m
    encoders = dict(base.encoders)
    src_of = {s: i for i, (s, _) in enumerate(R.pairs)}

    for i, sp in enumerate(aug.new_sources):
        for e in net.out_edges(sp):
            encoders[e] = TableFunction({(w,): w for w in range(1 << m)}, 1)

    hub_in = net.in_edges(aug.hub)  # one edge per s'_i, in pair order
    cache: dict[tuple, tuple[str, ...]] = {}

    def supervisor(alpha):
        if alpha not in cache:
            cache[alpha] = correction_protocol(codebook, alpha).beta
        return cache[alpha]

    for e in net.out_edges(aug.hub):
        dest = net.edges[e].v
        idx = src_of[dest] if dest in src_of else [t for _, t in R.pairs].index(dest)

        def hub_enc(args, idx=idx):
            return supervisor(tuple(args))[idx]
        hub_enc.arity = len(hub_in)
        encoders[e] = hub_enc

    for s, i in src_of.items():
        ins = net.in_edges(s)
        from_new = ins.index(next(e for e in ins if net.edges[e].u == aug.new_sources[i]))
        from_hub = ins.index(next(e for e in ins if net.edges[e].u == aug.hub))
        for e in R.out_edges(s):
            inner = base.encoders[e]

            def src_enc(args, inner=inner, a=from_new, b=from_hub):
                return inner((args[a] ^ player_decode(args[b], m),))
            src_enc.arity = len(ins)
            encoders[e] = src_enc

    decoders = {}
    for i, (_, t) in enumerate(R.pairs):
        ins = net.in_edges(t)
        hub_pos = ins.index(next(e for e in ins if net.edges[e].u == aug.hub))
        inner = base.decoders[i]

        def dec(args, inner=inner, h=hub_pos):
            rest = args[:h] + args[h + 1:]
            return inner(rest) ^ player_decode(args[h], m)
        dec.arity = len(ins)
        decoders[i] = dec
    return CodingScheme(encoders, decoders, base.message_bits, name=f"{base.name}+supervisor")


def expected_beta_lengths(codebook, m: int, k: int) -> tuple[float, ...]:
    """E|beta_i| under uniform independent m-bit inputs (exhaustive)."""
    totals = np.zeros(k)
    count = 0
    for alpha in itertools.product(range(1 << m), repeat=k):
        res = correction_protocol(codebook, alpha)
        totals += [len(b) for b in res.beta]
        count += 1
    return tuple(float(x) for x in totals / count)


def supervisor_flow_claims(aug: Augmented, flow) -> dict:
    """Recompute the hub-flow arithmetic on a flow solution for un(R').

    through_i is commodity i's flow entering u; A collects commodities with at
    least r/10 delivered units that avoid u.  If the total through u is at most
    (3/4) k r, then |A| >= k/6 must follow.
    """
    k = aug.net.k
    r = flow.rate
    through = flow.through_vertex(aug.hub)
    delivered = flow.delivered(aug.net)
    A = [i for i in range(k) if delivered[i] - through[i] >= r / 10 - 1e-9]
    total_through = float(through.sum())
    premise = total_through <= 0.75 * k * r + 1e-9
    return {
        "rate": r,
        "flow_through_hub": total_through,
        "three_quarters_kr": 0.75 * k * r,
        "premise_holds": premise,
        "A_size": len(A),
        "k_over_6": k / 6,
        "implication_holds": (not premise) or len(A) >= k / 6,
    }


# -- exhaustive coding-rate search ------------------------------------------


def edge_alphabet_bits(net: Network, alphabet_bits: int) -> list[int]:
    return [min(int(math.floor(e.cap + 1e-9)), alphabet_bits) for e in net.edges]


def min_cut_bits(net: Network, s: int, t: int, widths: Sequence[int]) -> int:
    n = net.n_vertices
    cap = np.zeros((n, n), dtype=np.int32)
    for e, w in zip(net.edges, widths):
        cap[e.u, e.v] += w
    if s == t:
        return 0
    return int(maximum_flow(csr_matrix(cap), s, t).flow_value)


@dataclass
class SearchResult:
    rate: int
    witness: CodingScheme | None
    refuted_by_cut: dict[int, bool]
    explored: dict[int, int]


def search_coding_rate(net: Network, alphabet_bits: int = 1, use_cut_bound: bool = True,
                       max_tables: int = 1 << 22) -> SearchResult:
    """Largest r in {1, .., alphabet_bits} with a correct scheme, or 0.

    Edge (u, v) carries symbols of min(floor(c), alphabet_bits) bits.
    Encoders are enumerated as explicit tables edge by edge in topological
    order; equivalent tables (same message on every input) are merged.  A
    target decodes when its received tuple determines its pair's message over
    all inputs, so decoders never have to be enumerated.
    """
    if not 1 <= alphabet_bits <= 2:
        raise SearchSpaceTooLarge("alphabets above 2 bits are not searched")
    if len(net.edges) > 12:
        raise SearchSpaceTooLarge(f"{len(net.edges)} edges is too many for exhaustive search")
    net.topological_order()
    widths = edge_alphabet_bits(net, alphabet_bits)
    refuted, explored = {}, {}
    best_rate, best = 0, None
    for r in range(1, alphabet_bits + 1):
        cut_fail = any(min_cut_bits(net, s, t, widths) < r for s, t in net.pairs)
        refuted[r] = cut_fail
        if cut_fail and use_cut_bound:
            explored[r] = 0
            break
        scheme, count = _exhaustive(net, r, widths, max_tables)
        explored[r] = count
        if scheme is None:
            break
        best_rate, best = r, scheme
    return SearchResult(best_rate, best, refuted, explored)


def _exhaustive(net: Network, r: int, widths, max_tables: int):
    k = net.k
    inputs = list(itertools.product(range(1 << r), repeat=k))
    n_in = len(inputs)
    order = net.topological_order()
    sources_at = _sources_at(net)
    edge_order = [e for v in order for e in net.out_edges(v)]

    # each edge's candidate message vectors over all inputs, as tuples
    budget = 1
    for e in edge_order:
        v = net.edges[e].u
        ar = len(sources_at.get(v, ())) * r + sum(widths[x] for x in net.in_edges(v))
        budget *= (1 << widths[e]) ** (1 << ar)
        if budget > max_tables:
            raise SearchSpaceTooLarge(f"encoder table space exceeds {max_tables}")

    def args_vector(v, msgs):
        cols = [tuple(x[i] for x in inputs) for i in sources_at.get(v, ())]
        cols += [msgs[e] for e in net.in_edges(v)]
        return list(zip(*cols)) if cols else [()] * n_in

    def decodable(msgs):
        for i, (_, t) in enumerate(net.pairs):
            seen = {}
            cols = [msgs[e] for e in net.in_edges(t)]
            for idx, x in enumerate(inputs):
                key = tuple(c[idx] for c in cols)
                if seen.setdefault(key, x[i]) != x[i]:
                    return False
        return True

    explored = 0

    def walk(pos, msgs, tables):
        nonlocal explored
        if pos == len(edge_order):
            explored += 1
            return dict(tables) if decodable(msgs) else None
        e = edge_order[pos]
        v = net.edges[e].u
        args = args_vector(v, msgs)
        domain = sorted(set(args))
        seen_vectors = set()
        for values in itertools.product(range(1 << widths[e]), repeat=len(domain)):
            table = dict(zip(domain, values))
            vec = tuple(table[a] for a in args)
            if vec in seen_vectors:
                continue
            seen_vectors.add(vec)
            msgs[e] = vec
            tables[e] = table
            found = walk(pos + 1, msgs, tables)
            if found is not None:
                return found
        msgs.pop(e, None)
        tables.pop(e, None)
        return None

    tables = walk(0, {}, {})
    if tables is None:
        return None, explored
    msgs = {}
    for e in edge_order:
        msgs[e] = tuple(tables[e][a] for a in args_vector(net.edges[e].u, msgs))
    encoders = {e: TableFunction(tables[e], len(next(iter(tables[e])))) for e in edge_order}
    decoders = {}
    for i, (_, t) in enumerate(net.pairs):
        cols = [msgs[e] for e in net.in_edges(t)]
        table = {}
        for idx, x in enumerate(inputs):
            table[tuple(c[idx] for c in cols)] = x[i]
        decoders[i] = TableFunction(table, len(cols))
    return CodingScheme(encoders, decoders, r, name=f"search-r{r}"), explored


# -- witness text format ----------------------------------------------------


def _fmt_tuple(t) -> str:
    return ",".join(str(x) for x in t) if t else "-"


def dumps_scheme(net: Network, scheme: CodingScheme) -> str:
    """One line per (vertex, out-edge) table row and per decoder row::

        scheme <r>
        f <u> <v> <input,tuple> -> <symbol>
        d <pair> <input,tuple> -> <symbol>
    """
    lines = [f"scheme {scheme.message_bits}"]
    for e, edge in enumerate(net.edges):
        enc = scheme.encoders[e]
        if not isinstance(enc, TableFunction):
            raise InputError("only table-based schemes can be serialised")
        for args, sym in enc.items():
            lines.append(f"f {edge.u} {edge.v} {_fmt_tuple(args)} -> {sym}")
    for i in range(net.k):
        for args, sym in scheme.decoders[i].items():
            lines.append(f"d {i} {_fmt_tuple(args)} -> {sym}")
    return "\n".join(lines) + "\n"


def loads_scheme(net: Network, text: str) -> CodingScheme:
    def parse_tuple(s):
        return () if s == "-" else tuple(int(x) for x in s.split(","))

    edge_index = {(e.u, e.v): i for i, e in enumerate(net.edges)}
    enc_tables: dict[int, dict] = {}
    dec_tables: dict[int, dict] = {}
    r = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "scheme":
                r = None if parts[1] == "None" else int(parts[1])
            elif parts[0] == "f" and parts[4] == "->":
                e = edge_index[(int(parts[1]), int(parts[2]))]
                enc_tables.setdefault(e, {})[parse_tuple(parts[3])] = int(parts[5])
            elif parts[0] == "d" and parts[3] == "->":
                dec_tables.setdefault(int(parts[1]), {})[parse_tuple(parts[2])] = int(parts[4])
            else:
                raise ParseError(f"line {lineno}: unrecognised record {raw!r}")
        except (IndexError, KeyError, ValueError):
            raise ParseError(f"line {lineno}: malformed record {raw!r}") from None

    def wrap(tables):
        return {key: TableFunction(t, len(next(iter(t)))) for key, t in tables.items()}
    return CodingScheme(wrap(enc_tables), wrap(dec_tables), r, name="loaded")

