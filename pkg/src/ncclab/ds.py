"""Systematic data structures with counted oracle access.

A data structure preprocesses its input into an :class:`AdviceString` and
then answers a query while reading at most ``t_queries`` positions of the
input through an :class:`OracleTape`.  Advice reads are free.  For
non-adaptive structures every read must fall inside the declared query set
``Q_q``, which depends on ``q`` alone; both limits are enforced by the tape
rather than merely tested.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    InputError,
    MissingMessage,
    NonAdaptivityViolation,
    NotAPermutation,
    Unanswerable,
)
from .field import RootOfUnity, ffft, ffft_inverse


def index_bits(n: int) -> int:
    """ceil(log2 n), at least one bit."""
    return max(1, (n - 1).bit_length())


def is_permutation(table: Sequence[int]) -> bool:
    n = len(table)
    return sorted(int(v) for v in table) == list(range(n))


def min_preimage_inverse(table: Sequence[int]) -> list[int]:
    """Inverse table with f^-1(y) = min{x : f(x) = y} and min of nothing = 0."""
    inv = [None] * len(table)
    for x, y in enumerate(table):
        if inv[y] is None:
            inv[y] = x
    return [0 if v is None else v for v in inv]


class BitWriter:
    def __init__(self):
        self.bits: list[int] = []

    def write(self, value: int, width: int) -> None:
        for k in range(width - 1, -1, -1):
            self.bits.append((value >> k) & 1)

    def flag(self, bit: bool) -> None:
        self.bits.append(1 if bit else 0)


class BitReader:
    def __init__(self, bits: Sequence[int], pos: int = 0):
        self.bits = bits
        self.pos = pos

    def read(self, width: int) -> int:
        if self.pos + width > len(self.bits):
            raise Unanswerable("advice string exhausted")
        v = 0
        for b in self.bits[self.pos:self.pos + width]:
            v = (v << 1) | b
        self.pos += width
        return v

    def skip(self, width: int) -> None:
        self.pos += width


@dataclass(frozen=True)
class AdviceString:
    bits: tuple[int, ...]
    declared_budget: int

    def __len__(self):
        return len(self.bits)

    def to_hex(self) -> str:
        """8-byte little-endian bit count, then the bits packed LSB-first."""
        n = len(self.bits)
        body = bytearray((n + 7) // 8)
        for i, b in enumerate(self.bits):
            if b:
                body[i // 8] |= 1 << (i % 8)
        return (n.to_bytes(8, "little") + bytes(body)).hex()

    @classmethod
    def from_hex(cls, text: str, declared_budget: int | None = None) -> "AdviceString":
        try:
            raw = bytes.fromhex(text.strip())
        except ValueError as exc:
            raise InputError(f"bad advice hex: {exc}") from None
        if len(raw) < 8:
            raise InputError("advice hex shorter than its 8-byte header")
        n = int.from_bytes(raw[:8], "little")
        body = raw[8:]
        if len(body) != (n + 7) // 8:
            raise InputError(f"advice header says {n} bits, body has {len(body)} bytes")
        bits = tuple((body[i // 8] >> (i % 8)) & 1 for i in range(n))
        return cls(bits, n if declared_budget is None else declared_budget)


class OracleTape:
    """Counted access to the input table.

    ``table`` may be a full sequence or a partial mapping (a vertex's local
    view in a network); reading a position that is not present raises
    :class:`MissingMessage`.
    """

    def __init__(self, table, budget: int | None = None, allowed=None):
        self.table = table
        self.budget = budget
        self.allowed = None if allowed is None else frozenset(allowed)
        self.read_log: list[int] = []

    def read(self, i: int):
        if self.allowed is not None and i not in self.allowed:
            raise NonAdaptivityViolation(f"read of {i} outside declared query set")
        if self.budget is not None and len(self.read_log) >= self.budget:
            raise BudgetExceeded(f"more than {self.budget} oracle reads")
        self.read_log.append(i)
        try:
            return self.table[i]
        except (KeyError, IndexError):
            raise MissingMessage(f"oracle position {i} unavailable") from None


@dataclass(frozen=True)
class DSDescriptor:
    name: str
    n: int
    s_bits: int
    t_queries: int
    adaptive: bool
    query_sets: tuple[tuple[int, ...], ...] | None


class SystematicDS:
    """Base class; subclasses fill in ``_preprocess`` and ``_answer``."""

    name = "abstract"
    adaptive = False

    def __init__(self, n: int, s_bits: int, t_queries: int):
        self.n = n
        self.s_bits = s_bits
        self.t_queries = t_queries

    def query_domain(self) -> range:
        return range(self.n)

    def query_set(self, q: int) -> tuple[int, ...]:
        raise NotImplementedError

    def descriptor(self) -> DSDescriptor:
        sets = None
        if not self.adaptive:
            sets = tuple(tuple(self.query_set(q)) for q in self.query_domain())
        return DSDescriptor(self.name, self.n, self.s_bits, self.t_queries, self.adaptive, sets)

    def _preprocess(self, table: list) -> list[int]:
        raise NotImplementedError

    def _answer(self, advice: AdviceString, q: int, read: Callable[[int], object]):
        raise NotImplementedError

    def __repr__(self):
        return f"{self.name}(n={self.n}, s={self.s_bits}, t={self.t_queries})"


def preprocess(ds: SystematicDS, table) -> AdviceString:
    if isinstance(table, OracleTape):
        table = table.table
    table = [int(v) for v in table]
    if len(table) != ds.n:
        raise InputError(f"{ds.name} expects {ds.n} inputs, got {len(table)}")
    bits = tuple(ds._preprocess(table))
    if len(bits) > ds.s_bits:
        raise BudgetExceeded(f"{ds.name} produced {len(bits)} advice bits > s = {ds.s_bits}")
    return AdviceString(bits, ds.s_bits)


def run_query(ds: SystematicDS, advice: AdviceString, q: int, oracle) -> tuple[object, list[int]]:
    """Answer ``q`` and return ``(value, read_log)`` with all limits enforced."""
    table = oracle.table if isinstance(oracle, OracleTape) else oracle
    allowed = None if ds.adaptive else ds.query_set(q)
    tape = OracleTape(table, budget=ds.t_queries, allowed=allowed)
    value = ds._answer(advice, q, tape.read)
    if isinstance(oracle, OracleTape):
        oracle.read_log.extend(tape.read_log)
    return value, tape.read_log


def answer(ds: SystematicDS, advice: AdviceString, q: int, oracle):
    return run_query(ds, advice, q, oracle)[0]


# ---------------------------------------------------------------- inversion


class InvTrivialTable(SystematicDS):
    """Stores the whole inverse table; no oracle reads."""

    name = "inv_trivial_table"

    def __init__(self, n: int):
        super().__init__(n, n * index_bits(n), 0)

    def query_set(self, q):
        return ()

    def _preprocess(self, table):
        w = BitWriter()
        for x in min_preimage_inverse(table):
            w.write(x, index_bits(self.n))
        return w.bits

    def _answer(self, advice, q, read):
        b = index_bits(self.n)
        return BitReader(advice.bits, q * b).read(b)


class InvTrivialScan(SystematicDS):
    """Empty advice, reads the whole table for every query."""

    name = "inv_trivial_scan"

    def __init__(self, n: int):
        super().__init__(n, 0, n)

    def query_set(self, q):
        return tuple(range(self.n))

    def _preprocess(self, table):
        return []

    def _answer(self, advice, q, read):
        found = None
        for x in range(self.n):
            if read(x) == q and found is None:
                found = x
        return 0 if found is None else found


class InvBlock(SystematicDS):
    """Non-adaptive permutation inverter with block query sets.

    Q_y is the aligned block of ``block`` positions containing y.  Advice,
    in query order: one flag bit per y, set when f^-1(y) lies in Q_y;
    a cleared flag is followed by f^-1(y) in ceil(log2 n) bits.  Answers
    always read all of Q_y.
    """

    name = "inv_block"

    def __init__(self, n: int, block: int):
        if block < 1 or n % block:
            raise InputError(f"block size {block} must divide n = {n}")
        self.block = block
        super().__init__(n, n * (1 + index_bits(n)), block)

    def query_set(self, q):
        start = self.block * (q // self.block)
        return tuple(range(start, start + self.block))

    def _preprocess(self, table):
        if not is_permutation(table):
            raise NotAPermutation("inv_block inverts permutations only")
        inv = min_preimage_inverse(table)
        w = BitWriter()
        for y in range(self.n):
            inside = inv[y] in self.query_set(y)
            w.flag(inside)
            if not inside:
                w.write(inv[y], index_bits(self.n))
        return w.bits

    def _answer(self, advice, q, read):
        b = index_bits(self.n)
        r = BitReader(advice.bits)
        for _ in range(q):
            if not r.read(1):
                r.skip(b)
        inside = r.read(1)
        seen = {x: read(x) for x in self.query_set(q)}
        if not inside:
            return r.read(b)
        for x, fx in seen.items():
            if fx == q:
                return x
        raise Unanswerable(f"advice claims f^-1({q}) in its block, none found")


class HellmanPermutationInverter(SystematicDS):
    """Adaptive permutation inverter with anchors every ``t`` steps per cycle.

    Cycles no longer than t get no anchors: walking forward from y meets y's
    preimage within t reads.  Longer cycles store (anchor, previous anchor)
    pairs, 2*ceil(log2 n) bits each, so s <= 4 n ceil(log2 n) / t.  A query
    walks forward to the next anchor, jumps back one anchor and walks
    forward again, at most 2t reads in total.
    """

    name = "hellman"
    adaptive = True

    def __init__(self, n: int, t: int):
        if not 1 <= t <= n:
            raise InputError(f"need 1 <= t <= n, got t = {t}")
        self.t = t
        super().__init__(n, 2 * index_bits(n) * (2 * n // t), 2 * t)

    def query_set(self, q):
        raise NotImplementedError("adaptive structure has no fixed query sets")

    def anchors(self, table) -> dict[int, int]:
        n, t = self.n, self.t
        seen = [False] * n
        out = {}
        for start in range(n):
            if seen[start]:
                continue
            cycle = []
            x = start
            while not seen[x]:
                seen[x] = True
                cycle.append(x)
                x = table[x]
            if x != start:
                raise NotAPermutation("cycle walk revisited a non-start point")
            if len(cycle) <= t:
                continue
            marks = cycle[::t]
            for k, a in enumerate(marks):
                out[a] = marks[k - 1]
        return out

    def _preprocess(self, table):
        if not is_permutation(table):
            raise NotAPermutation("hellman inverter needs a permutation")
        b = index_bits(self.n)
        w = BitWriter()
        for a, prev in sorted(self.anchors(table).items()):
            w.write(a, b)
            w.write(prev, b)
        return w.bits

    def _answer(self, advice, q, read):
        b = index_bits(self.n)
        r = BitReader(advice.bits)
        pred = {}
        while r.pos < len(advice.bits):
            a = r.read(b)
            pred[a] = r.read(b)
        z = q
        for _ in range(self.t):
            if z in pred:
                break
            nz = read(z)
            if nz == q:
                return z
            z = nz
        if z not in pred:
            raise Unanswerable(f"no anchor within {self.t} steps of {q}")
        w = pred[z]
        for _ in range(self.t):
            nw = read(w)
            if nw == q:
                return w
            w = nw
        raise Unanswerable(f"preimage of {q} not reached from its anchor")


# ------------------------------------------------------------- polynomials


class LinearBlockDS(SystematicDS):
    """Answers one coordinate of a fixed linear map over GF(p).

    Query j returns sum_k M[j,k] y[k].  The advice holds, per query, the
    part of that sum coming from positions outside Q_j (one field element
    each); the answer adds the queried part back.  With ``block = 0`` the
    advice is the full answer table and no reads happen.
    """

    def __init__(self, name: str, root: RootOfUnity, block: int,
                 full_map: Callable[[np.ndarray], np.ndarray],
                 coeff: Callable[[int, int], int]):
        n = root.n
        if block < 0 or (block and n % block):
            raise InputError(f"block size {block} must divide n = {n}")
        self.name = name
        self.root = root
        self.block = block
        self._full_map = full_map
        self._coeff = coeff
        super().__init__(n, n * root.field.bits, block)

    def query_set(self, q):
        if not self.block:
            return ()
        start = self.block * (q // self.block)
        return tuple(range(start, start + self.block))

    def _preprocess(self, table):
        p = self.root.p
        full = self._full_map(np.array(table, dtype=np.int64))
        w = BitWriter()
        for j in range(self.n):
            part = sum(self._coeff(j, k) * table[k] for k in self.query_set(j))
            w.write(int(full[j] - part) % p, self.root.field.bits)
        return w.bits

    def _answer(self, advice, q, read):
        width = self.root.field.bits
        acc = BitReader(advice.bits, q * width).read(width)
        for k in self.query_set(q):
            acc += self._coeff(q, k) * int(read(k))
        return acc % self.root.p


def eval_ds(root: RootOfUnity, block: int = 0) -> LinearBlockDS:
    """Evaluation at sigma^j: query j returns p(sigma^j) from coefficients."""
    return LinearBlockDS(
        "eval_table" if block == 0 else "eval_block", root, block,
        lambda a: ffft(a, root),
        lambda j, k: root.power(j * k),
    )


def interp_ds(root: RootOfUnity, block: int = 0) -> LinearBlockDS:
    """Interpolation from values at the fixed points sigma^k: query j returns
    the coefficient of x^j."""
    p = root.p
    n_inv = root.field.inv(root.n % p)
    return LinearBlockDS(
        "interp_table" if block == 0 else "interp_block", root, block,
        lambda v: ffft_inverse(v, root),
        lambda j, k: n_inv * root.power(-j * k) % p,
    )


INVERSION_DS = ("inv_trivial_table", "inv_trivial_scan", "inv_block", "hellman")
POLY_DS = ("eval_table", "eval_block", "interp_table", "interp_block")


def make_inversion_ds(name: str, n: int, t: int | None = None) -> SystematicDS:
    if name == "inv_trivial_table":
        return InvTrivialTable(n)
    if name == "inv_trivial_scan":
        return InvTrivialScan(n)
    if name == "inv_block":
        return InvBlock(n, t or 2)
    if name == "hellman":
        return HellmanPermutationInverter(n, t or 2)
    raise InputError(f"unknown inversion data structure {name!r}; choose from {INVERSION_DS}")


def make_poly_ds(name: str, root: RootOfUnity, t: int | None = None) -> LinearBlockDS:
    if name == "eval_table":
        return eval_ds(root, 0)
    if name == "eval_block":
        return eval_ds(root, t or 2)
    if name == "interp_table":
        return interp_ds(root, 0)
    if name == "interp_block":
        return interp_ds(root, t or 2)
    raise InputError(f"unknown polynomial data structure {name!r}; choose from {POLY_DS}")


def check_against_scan(ds: SystematicDS, table: Sequence[int]) -> Mapping[int, tuple[int, list[int]]]:
    """Run every query and return ``{y: (answer, read_log)}``; raises on the
    first answer that disagrees with a direct scan."""
    adv = preprocess(ds, table)
    truth = min_preimage_inverse(table)
    out = {}
    for y in ds.query_domain():
        val, log = run_query(ds, adv, y, table)
        if val != truth[y]:
            raise Unanswerable(f"{ds.name}: f^-1({y}) = {truth[y]}, answered {val}")
        out[y] = (val, log)
    return out
