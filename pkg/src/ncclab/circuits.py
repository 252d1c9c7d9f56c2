"""Boolean circuits, common-bits cuts and circuit-derived data structures.

Gates are numbered in topological order.  INPUT gates take no operands and
are numbered as input bits in order of appearance; OUTPUT gates take one
operand and define the output bits in order.  Multi-bit values are laid out
MSB first inside their block.

Netlist format::

    circuit <n_in> <n_out>
    gate <id> <INPUT|AND|OR|NOT|OUTPUT> [op1] [op2]
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .ds import SystematicDS, index_bits
from .errors import InputError, InvalidCut, ParseError, UnsupportedWidth, WidthMismatch

KINDS = ("INPUT", "AND", "OR", "NOT", "OUTPUT")
ARITY = {"INPUT": 0, "AND": 2, "OR": 2, "NOT": 1, "OUTPUT": 1}
CUTTABLE = ("AND", "OR", "NOT")


@dataclass(frozen=True)
class Gate:
    kind: str
    ops: tuple[int, ...] = ()


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]

    def __post_init__(self):
        for gid, g in enumerate(self.gates):
            if g.kind not in KINDS:
                raise InputError(f"gate {gid}: unknown kind {g.kind}")
            if len(g.ops) != ARITY[g.kind]:
                raise InputError(f"gate {gid}: {g.kind} takes {ARITY[g.kind]} operands, got {len(g.ops)}")
            for op in g.ops:
                if not 0 <= op < gid:
                    raise InputError(f"gate {gid}: operand {op} is not an earlier gate")
                if self.gates[op].kind == "OUTPUT":
                    raise InputError(f"gate {gid}: OUTPUT gate {op} cannot feed other gates")

    @cached_property
    def inputs(self) -> tuple[int, ...]:
        return tuple(i for i, g in enumerate(self.gates) if g.kind == "INPUT")

    @cached_property
    def outputs(self) -> tuple[int, ...]:
        return tuple(i for i, g in enumerate(self.gates) if g.kind == "OUTPUT")

    @property
    def n_in(self) -> int:
        return len(self.inputs)

    @property
    def n_out(self) -> int:
        return len(self.outputs)

    @cached_property
    def logic_gates(self) -> tuple[int, ...]:
        return tuple(i for i, g in enumerate(self.gates) if g.kind in CUTTABLE)

    @property
    def size(self) -> int:
        return len(self.logic_gates)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        """Longest path from an input, counting AND/OR/NOT gates only."""
        d = []
        for g in self.gates:
            base = max((d[o] for o in g.ops), default=0)
            d.append(base + (g.kind in CUTTABLE))
        return tuple(d)

    @property
    def depth(self) -> int:
        return max((self.depths[o] for o in self.outputs), default=0)

    @cached_property
    def consumers(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in self.gates]
        for gid, g in enumerate(self.gates):
            for o in g.ops:
                out[o].append(gid)
        return tuple(tuple(x) for x in out)


class CircuitBuilder:
    def __init__(self):
        self.gates: list[Gate] = []

    def add(self, kind: str, *ops: int) -> int:
        self.gates.append(Gate(kind, tuple(ops)))
        return len(self.gates) - 1

    def input(self) -> int:
        return self.add("INPUT")

    def AND(self, a, b):
        return self.add("AND", a, b)

    def OR(self, a, b):
        return self.add("OR", a, b)

    def NOT(self, a):
        return self.add("NOT", a)

    def output(self, a):
        return self.add("OUTPUT", a)

    def and_all(self, xs):
        acc = xs[0]
        for x in xs[1:]:
            acc = self.AND(acc, x)
        return acc

    def or_all(self, xs):
        acc = xs[0]
        for x in xs[1:]:
            acc = self.OR(acc, x)
        return acc

    def build(self) -> Circuit:
        return Circuit(tuple(self.gates))


# -- netlist I/O --------------------------------------------------------------


def dumps(c: Circuit) -> str:
    lines = [f"circuit {c.n_in} {c.n_out}"]
    for gid, g in enumerate(c.gates):
        lines.append(" ".join(["gate", str(gid), g.kind] + [str(o) for o in g.ops]))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    header = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if header is None:
                if parts[0] != "circuit" or len(parts) != 3:
                    raise ParseError(f"line {lineno}: expected 'circuit <n_in> <n_out>'")
                header = (int(parts[1]), int(parts[2]))
                continue
            if parts[0] != "gate" or len(parts) < 3:
                raise ParseError(f"line {lineno}: expected 'gate <id> <KIND> [ops]'")
            gid, kind = int(parts[1]), parts[2]
            if gid != len(gates):
                raise ParseError(f"line {lineno}: gate ids must be 0, 1, 2, ... in order")
            if kind not in KINDS:
                raise ParseError(f"line {lineno}: unknown gate kind {kind!r}")
            gates.append(Gate(kind, tuple(int(x) for x in parts[3:])))
        except ValueError:
            raise ParseError(f"line {lineno}: bad integer in {raw!r}") from None
    if header is None:
        raise ParseError("missing 'circuit' header")
    try:
        c = Circuit(tuple(gates))
    except InputError as exc:
        raise ParseError(str(exc)) from None
    if (c.n_in, c.n_out) != header:
        raise ParseError(f"header says {header[0]} in / {header[1]} out, netlist has {c.n_in} / {c.n_out}")
    return c


def read_circuit(path) -> Circuit:
    try:
        return loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


# -- evaluation -----------------------------------------------------------------


def eval_batch(c: Circuit, inputs: np.ndarray, keep_all: bool = False):
    """Evaluate many input vectors at once; ``inputs`` has shape (batch, n_in)."""
    inputs = np.asarray(inputs, dtype=bool)
    if inputs.ndim != 2 or inputs.shape[1] != c.n_in:
        raise WidthMismatch(f"expected {c.n_in} input bits, got shape {inputs.shape}")
    vals = [None] * len(c.gates)
    k = 0
    for gid, g in enumerate(c.gates):
        if g.kind == "INPUT":
            vals[gid] = inputs[:, k]
            k += 1
        elif g.kind == "AND":
            vals[gid] = vals[g.ops[0]] & vals[g.ops[1]]
        elif g.kind == "OR":
            vals[gid] = vals[g.ops[0]] | vals[g.ops[1]]
        elif g.kind == "NOT":
            vals[gid] = ~vals[g.ops[0]]
        else:
            vals[gid] = vals[g.ops[0]]
    out = np.stack([vals[o] for o in c.outputs], axis=1) if c.outputs else np.zeros((len(inputs), 0), bool)
    if keep_all:
        return out, vals
    return out


def eval_circuit(c: Circuit, bits: Sequence[int]) -> list[int]:
    bits = list(bits)
    if len(bits) != c.n_in:
        raise WidthMismatch(f"expected {c.n_in} input bits, got {len(bits)}")
    return [int(v) for v in eval_batch(c, np.array([bits], dtype=bool))[0]]


def to_bits(values: Sequence[int], width: int) -> list[int]:
    return [(int(v) >> (width - 1 - k)) & 1 for v in values for k in range(width)]


def from_bits(bits: Sequence[int], width: int) -> list[int]:
    out = []
    for i in range(0, len(bits), width):
        v = 0
        for b in bits[i:i + width]:
            v = (v << 1) | int(b)
        out.append(v)
    return out


def all_tables(n: int, width: int) -> np.ndarray:
    """Every table of n values in [2^width] as a (2^(n*width), n*width) bit matrix."""
    total = n * width
    idx = np.arange(1 << total, dtype=np.int64)
    return ((idx[:, None] >> np.arange(total - 1, -1, -1)) & 1).astype(bool)


# -- connectivity and cuts ----------------------------------------------------


def input_reach(c: Circuit, cut=frozenset()) -> list[int]:
    """Bitmask of input bits reaching each gate once cut gates are removed."""
    reach = [0] * len(c.gates)
    k = 0
    for gid, g in enumerate(c.gates):
        if g.kind == "INPUT":
            reach[gid] = 1 << k
            k += 1
        elif gid in cut:
            reach[gid] = 0
        else:
            m = 0
            for o in g.ops:
                m |= reach[o]
            reach[gid] = m
    return reach


def mask_bits(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class CommonBitsCut:
    cut: tuple[int, ...]
    block: int  # output bits per block
    connectivity: tuple[tuple[int, ...], ...]  # input bits reaching each output block
    bound: int
    bound_reached: bool = True
    method: str = "heuristic"

    @property
    def size(self) -> int:
        return len(self.cut)

    def max_fanin(self) -> int:
        return max((len(c) for c in self.connectivity), default=0)


def block_connectivity(c: Circuit, cut, block: int = 1) -> tuple[tuple[int, ...], ...]:
    if block < 1 or c.n_out % block:
        raise UnsupportedWidth(f"block width {block} must divide n_out = {c.n_out}")
    reach = input_reach(c, frozenset(cut))
    out = []
    for j in range(c.n_out // block):
        m = 0
        for o in c.outputs[j * block:(j + 1) * block]:
            m |= reach[o]
        out.append(mask_bits(m))
    return tuple(out)


def _violations(c: Circuit, cut, block: int, bound: int) -> int:
    return sum(max(0, len(x) - bound) for x in block_connectivity(c, cut, block))


def _bit_classes(c: Circuit) -> dict[int, set[int]]:
    """Group cuttable gates by the highest bit where their depth label differs
    from a consumer's depth label."""
    classes: dict[int, set[int]] = {}
    depth = c.depths
    for gid in c.logic_gates:
        for w in c.consumers[gid]:
            diff = depth[gid] ^ depth[w]
            if diff:
                classes.setdefault(diff.bit_length() - 1, set()).add(gid)
    return classes


def find_common_bits(c: Circuit, max_fanin_per_output: int, block: int = 1) -> CommonBitsCut:
    """Greedy depth-label cut, then drop cut gates that turn out unnecessary.

    Each round scores every depth-label bit class (restricted to gates not yet
    cut) plus every single gate, and takes the candidate with the smallest
    remaining excess connectivity per added gate.  Rounds stop once every
    output block reaches at most ``max_fanin_per_output`` input bits.
    """
    bound = max_fanin_per_output
    cut: set[int] = set()
    excess = _violations(c, cut, block, bound)
    classes = _bit_classes(c)
    while excess:
        candidates = [frozenset(s - cut) for s in classes.values() if s - cut]
        candidates += [frozenset([g]) for g in c.logic_gates if g not in cut]
        if not candidates:
            break
        best = None
        for cand in candidates:
            ex = _violations(c, cut | cand, block, bound)
            gain = excess - ex
            if gain <= 0:
                continue
            key = (-gain / len(cand), ex, len(cand), sorted(cand))
            if best is None or key < best[0]:
                best = (key, cand, ex)
        if best is None:
            break
        cut |= best[1]
        excess = best[2]
    reached = excess == 0
    if not reached:
        cut = set(c.logic_gates)
        reached = _violations(c, cut, block, bound) == 0
    else:
        for g in sorted(cut, reverse=True):
            trial = cut - {g}
            if _violations(c, trial, block, bound) == 0:
                cut = trial
    conn = block_connectivity(c, cut, block)
    return CommonBitsCut(tuple(sorted(cut)), block, conn, bound, reached, "heuristic")


def exhaustive_common_bits(c: Circuit, max_fanin_per_output: int, block: int = 1,
                           max_gates: int = 12) -> CommonBitsCut:
    """Smallest cut by brute force over gate subsets (smallest lexicographic on ties)."""
    gates = c.logic_gates
    if len(gates) > max_gates:
        raise InputError(f"{len(gates)} cuttable gates exceeds the exhaustive limit of {max_gates}")
    for size in range(len(gates) + 1):
        for cand in itertools.combinations(gates, size):
            if _violations(c, set(cand), block, max_fanin_per_output) == 0:
                conn = block_connectivity(c, cand, block)
                return CommonBitsCut(tuple(cand), block, conn, max_fanin_per_output, True, "exhaustive")
    conn = block_connectivity(c, gates, block)
    return CommonBitsCut(tuple(gates), block, conn, max_fanin_per_output, False, "exhaustive")


# -- circuit -> data structure ---------------------------------------------------


class CircuitDS(SystematicDS):
    """Non-adaptive structure read off a circuit and a cut.

    Input: n positions of ``in_width`` bits.  Query j returns output block j
    (``block`` bits) as an integer.  Advice: the cut gates' values, one bit
    each, in gate order.  Q_j: the input positions holding any input bit that
    still reaches block j once the cut is removed.
    """

    name = "circuit_ds"

    def __init__(self, c: Circuit, cut: CommonBitsCut, in_width: int):
        if in_width < 1 or c.n_in % in_width:
            raise UnsupportedWidth(f"input width {in_width} must divide n_in = {c.n_in}")
        block = cut.block
        if block_connectivity(c, cut.cut, block) != cut.connectivity:
            raise InvalidCut("connectivity map does not match the cut")
        self.circuit = c
        self.cut = cut
        self.in_width = in_width
        self.block = block
        self._cutset = frozenset(cut.cut)
        self._qsets = tuple(tuple(sorted({b // in_width for b in conn})) for conn in cut.connectivity)
        self._n_queries = c.n_out // block
        self._needed = [self._cone(j) for j in range(self._n_queries)]
        self._input_index = {g: k for k, g in enumerate(c.inputs)}
        t = max((len(q) for q in self._qsets), default=0)
        super().__init__(c.n_in // in_width, len(cut.cut), t)

    def _cone(self, j: int) -> list[int]:
        """Gates feeding block j, stopping at cut gates and inputs."""
        c = self.circuit
        todo = list(c.outputs[j * self.block:(j + 1) * self.block])
        seen = set(todo)
        while todo:
            g = todo.pop()
            if g in self._cutset or c.gates[g].kind == "INPUT":
                continue
            for o in c.gates[g].ops:
                if o not in seen:
                    seen.add(o)
                    todo.append(o)
        return sorted(seen)

    def query_domain(self) -> range:
        return range(self._n_queries)

    def query_set(self, q):
        return self._qsets[q]

    def _preprocess(self, table):
        bits = to_bits(table, self.in_width)
        _, vals = eval_batch(self.circuit, np.array([bits], dtype=bool), keep_all=True)
        return [int(vals[g][0]) for g in self.cut.cut]

    def _answer(self, advice, q, read):
        c = self.circuit
        cut_val = dict(zip(self.cut.cut, advice.bits))
        words = {pos: int(read(pos)) for pos in self._qsets[q]}
        val: dict[int, int] = {}
        for g in self._needed[q]:
            gate = c.gates[g]
            if g in cut_val:
                val[g] = cut_val[g]
            elif gate.kind == "INPUT":
                k = self._input_index[g]
                pos, off = divmod(k, self.in_width)
                if pos not in words:
                    raise InvalidCut(f"block {q} needs input bit {k} outside its query set")
                val[g] = (words[pos] >> (self.in_width - 1 - off)) & 1
            elif gate.kind == "AND":
                val[g] = val[gate.ops[0]] & val[gate.ops[1]]
            elif gate.kind == "OR":
                val[g] = val[gate.ops[0]] | val[gate.ops[1]]
            elif gate.kind == "NOT":
                val[g] = 1 - val[gate.ops[0]]
            else:
                val[g] = val[gate.ops[0]]
        out = 0
        for o in c.outputs[q * self.block:(q + 1) * self.block]:
            out = (out << 1) | val[o]
        return out


def circuit_to_ds(c: Circuit, cut: CommonBitsCut, in_width: int) -> CircuitDS:
    return CircuitDS(c, cut, in_width)


# -- fixtures -----------------------------------------------------------------


def build_inversion_circuit(n: int) -> Circuit:
    """Inverse table of f: [n] -> [n] with f^-1(y) = least preimage, 0 if none.

    Input and output are n blocks of ceil(log2 n) bits.  For every (x, y) an
    equality test f(x) == y; a running OR marks whether an earlier x matched;
    the first match drives the output bits.
    """
    if n < 2:
        raise UnsupportedWidth("inversion circuit needs n >= 2")
    w = index_bits(n)
    cb = CircuitBuilder()
    xs = [[cb.input() for _ in range(w)] for _ in range(n)]
    neg = [[cb.NOT(b) for b in blk] for blk in xs]
    outs = []
    for y in range(n):
        ybits = to_bits([y], w)
        eq = [cb.and_all([xs[x][k] if ybits[k] else neg[x][k] for k in range(w)]) for x in range(n)]
        sel = [eq[0]]
        seen = eq[0]
        for x in range(1, n):
            sel.append(cb.AND(eq[x], cb.NOT(seen)))
            if x < n - 1:
                seen = cb.OR(seen, eq[x])
        for k in range(w):
            terms = [sel[x] for x in range(n) if (x >> (w - 1 - k)) & 1]
            outs.append(cb.or_all(terms))
    for o in outs:
        cb.output(o)
    return cb.build()


def _less_than(cb: CircuitBuilder, a: list[int], b: list[int]) -> int:
    """a < b for MSB-first bit lists."""
    lt = None
    eq = None
    for ak, bk in zip(a, b):
        na, nb = cb.NOT(ak), cb.NOT(bk)
        here = cb.AND(na, bk)
        same = cb.OR(cb.AND(ak, bk), cb.AND(na, nb))
        if lt is None:
            lt, eq = here, same
        else:
            lt = cb.OR(lt, cb.AND(eq, here))
            eq = cb.AND(eq, same)
    return lt


def _mux(cb: CircuitBuilder, s: int, ns: int, x: int, y: int) -> int:
    """s ? x : y"""
    return cb.OR(cb.AND(s, x), cb.AND(ns, y))


def _compare_exchange(cb, a, b):
    lt = _less_than(cb, a, b)
    nlt = cb.NOT(lt)
    lo = [_mux(cb, lt, nlt, x, y) for x, y in zip(a, b)]
    hi = [_mux(cb, lt, nlt, y, x) for x, y in zip(a, b)]
    return lo, hi


def bitonic_pairs(n: int) -> list[tuple[int, int]]:
    """Comparator list (i, j): after it, position i holds the min."""
    pairs = []
    k = 2
    while k <= n:
        j = k // 2
        while j >= 1:
            for i in range(n):
                partner = i ^ j
                if partner > i:
                    if i & k == 0:
                        pairs.append((i, partner))
                    else:
                        pairs.append((partner, i))
            j //= 2
        k *= 2
    return pairs


def build_sorting_network(n: int, b: int) -> Circuit:
    """Bitonic sorter on n keys of b bits, ascending."""
    if n < 1 or n & (n - 1):
        raise UnsupportedWidth(f"bitonic sorter needs n a power of two, got {n}")
    if b < 1:
        raise UnsupportedWidth("key width must be at least 1 bit")
    cb = CircuitBuilder()
    wires = [[cb.input() for _ in range(b)] for _ in range(n)]
    for i, j in bitonic_pairs(n):
        wires[i], wires[j] = _compare_exchange(cb, wires[i], wires[j])
    for blk in wires:
        for bit in blk:
            cb.output(bit)
    return cb.build()


def build_hub_circuit(n: int = 4) -> Circuit:
    """g = AND(x0, x1); output j = OR(g, x_j)."""
    cb = CircuitBuilder()
    xs = [cb.input() for _ in range(n)]
    g = cb.AND(xs[0], xs[1])
    outs = [cb.OR(g, x) for x in xs]
    for o in outs:
        cb.output(o)
    return cb.build()


def build_identity_circuit(n: int) -> Circuit:
    cb = CircuitBuilder()
    xs = [cb.input() for _ in range(n)]
    for x in xs:
        cb.output(x)
    return cb.build()


def build_not_chain(length: int = 2) -> Circuit:
    cb = CircuitBuilder()
    x = cb.input()
    for _ in range(length):
        x = cb.NOT(x)
    cb.output(x)
    return cb.build()


def build_and2() -> Circuit:
    cb = CircuitBuilder()
    a, b = cb.input(), cb.input()
    cb.output(cb.AND(a, b))
    return cb.build()
