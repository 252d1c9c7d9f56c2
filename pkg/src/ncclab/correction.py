"""F-correction game: a supervisor nudges ell random m-bit blocks into a codebook.

The supervisor sees alpha = (alpha_0, ..., alpha_{l-1}), picks a codeword w in
F and sends player i a prefix-free message beta_i describing the error block
e_i = alpha_i XOR w_i.  Player i decodes gamma_i = e_i, so alpha_i XOR gamma_i
= w_i and the corrected tuple lies in F.

Block code (prefix-free, self-delimiting given m)::

    '0' + m raw bits                         (any block)
    '1' + gamma(weight + 1) + positions      (sparse block)

``gamma`` is the Elias gamma code and each position takes ceil(log2 m) bits,
written in increasing order.  The encoder emits whichever form is shorter,
preferring the raw form on ties.

The supervisor chooses w to minimise the total message length, breaking ties
by the lexicographically smallest w (blocks in order, bits MSB first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import EmptyCodebook, InputError

# -- block code -------------------------------------------------------------


def elias_gamma(x: int) -> str:
    if x < 1:
        raise ValueError("Elias gamma encodes positive integers only")
    b = bin(x)[2:]
    return "0" * (len(b) - 1) + b


def read_elias_gamma(bits: str, pos: int) -> tuple[int, int]:
    zeros = 0
    while bits[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    return int(bits[pos + zeros:end], 2), end


def position_bits(m: int) -> int:
    return max(1, math.ceil(math.log2(m))) if m > 1 else 1


def encode_block(e: int, m: int) -> str:
    raw = "0" + format(e, f"0{m}b")
    ones = [i for i in range(m) if (e >> (m - 1 - i)) & 1]
    pb = position_bits(m)
    sparse_len = 1 + 2 * (len(ones) + 1).bit_length() - 1 + pb * len(ones)
    if sparse_len >= len(raw):
        return raw
    return "1" + elias_gamma(len(ones) + 1) + "".join(format(i, f"0{pb}b") for i in ones)


def block_cost(e: int, m: int) -> int:
    w = bin(e).count("1")
    sparse_len = 1 + 2 * (w + 1).bit_length() - 1 + position_bits(m) * w
    return min(1 + m, sparse_len)


def decode_block(bits: str, m: int, pos: int = 0) -> tuple[int, int]:
    """Decode one block starting at ``pos``; returns (value, next position)."""
    if bits[pos] == "0":
        end = pos + 1 + m
        if end > len(bits):
            raise InputError("truncated raw block")
        return int(bits[pos + 1:end], 2), end
    count, p = read_elias_gamma(bits, pos + 1)
    pb = position_bits(m)
    e = 0
    for _ in range(count - 1):
        e |= 1 << (m - 1 - int(bits[p:p + pb], 2))
        p += pb
    return e, p


def is_prefix_free(codewords) -> bool:
    words = sorted(set(codewords))
    return all(not b.startswith(a) for a, b in zip(words, words[1:]))


# -- codebooks --------------------------------------------------------------


def _blocks_to_bits(w, m: int) -> np.ndarray:
    return np.array([(b >> (m - 1 - j)) & 1 for b in w for j in range(m)], dtype=np.uint8)


class ExplicitCodebook:
    """A codebook given by listing its members (tuples of ell m-bit ints)."""

    def __init__(self, members, m: int, ell: int):
        self.m, self.ell = m, ell
        self.members = sorted({tuple(int(b) for b in w) for w in members})
        for w in self.members:
            if len(w) != ell or any(not 0 <= b < (1 << m) for b in w):
                raise InputError(f"codeword {w} is not {ell} blocks of {m} bits")

    def __len__(self):
        return len(self.members)

    @property
    def log2_size(self) -> float:
        return math.log2(len(self.members)) if self.members else float("-inf")

    def __contains__(self, w) -> bool:
        w = tuple(w)
        lo, hi = 0, len(self.members)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.members[mid] < w:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self.members) and self.members[lo] == w

    def best_correction(self, alpha) -> tuple[tuple[int, ...], int]:
        if not self.members:
            raise EmptyCodebook("codebook F is empty")
        best, best_cost = None, None
        for w in self.members:  # sorted, so the first minimum is lexicographically smallest
            cost = sum(block_cost(a ^ b, self.m) for a, b in zip(alpha, w))
            if best_cost is None or cost < best_cost:
                best, best_cost = w, cost
        return best, best_cost


class AffineCodebook:
    """F = {w : A w = c} over GF(2), with A a full-rank (codim x m*ell) matrix.

    |F| = 2^(m*ell - codim) exactly.  Used for codebooks far too large to list.
    """

    def __init__(self, A: np.ndarray, c: np.ndarray, m: int, ell: int):
        self.A = np.asarray(A, dtype=np.uint8) & 1
        self.c = np.asarray(c, dtype=np.uint8) & 1
        self.m, self.ell = m, ell
        if self.A.shape[1] != m * ell:
            raise InputError("constraint matrix width must be m*ell")
        if _gf2_rank(self.A) != self.A.shape[0]:
            raise InputError("constraint matrix must have full row rank")
        self._tables = None  # syndrome and cost tables, built on first use

    @classmethod
    def random(cls, rng: np.random.Generator, m: int, ell: int, codim: int) -> "AffineCodebook":
        while True:
            A = rng.integers(0, 2, size=(codim, m * ell), dtype=np.uint8)
            if _gf2_rank(A) == codim:
                break
        c = rng.integers(0, 2, size=codim, dtype=np.uint8)
        return cls(A, c, m, ell)

    @property
    def log2_size(self) -> float:
        return float(self.m * self.ell - self.A.shape[0])

    def __contains__(self, w) -> bool:
        return bool(np.all((self.A @ _blocks_to_bits(w, self.m)) % 2 == self.c))

    def _block_syndromes(self) -> np.ndarray:
        """syn[i, e] = syndrome (as int) of error pattern e placed in block i."""
        m, codim = self.m, self.A.shape[0]
        patterns = np.array([[(e >> (m - 1 - j)) & 1 for j in range(m)] for e in range(1 << m)],
                            dtype=np.int64)
        weights = 1 << np.arange(codim - 1, -1, -1)
        out = np.empty((self.ell, 1 << m), dtype=np.int64)
        for i in range(self.ell):
            cols = self.A[:, i * m:(i + 1) * m].astype(np.int64)
            out[i] = ((patterns @ cols.T) % 2) @ weights
        return out

    def best_correction(self, alpha) -> tuple[tuple[int, ...], int]:
        """Exact minimum-cost codeword via dynamic programming over syndromes."""
        m, ell, codim = self.m, self.ell, self.A.shape[0]
        S = 1 << codim
        if self._tables is None:
            syn = self._block_syndromes()
            cost = np.array([block_cost(e, m) for e in range(1 << m)], dtype=np.int64)
            # cheapest pattern per (block, syndrome)
            per_syn = np.full((ell, S), 1 << 30, dtype=np.int64)
            for i in range(ell):
                np.minimum.at(per_syn[i], syn[i], cost)
            self._tables = (syn, cost, per_syn)
        syn, cost, per_syn = self._tables
        weights = 1 << np.arange(codim - 1, -1, -1)
        a_bits = _blocks_to_bits(alpha, m)
        target = int((((self.A.astype(np.int64) @ a_bits) + self.c) % 2) @ weights)

        INF = 1 << 30
        # best[i][s]: cheapest errors on blocks i.. whose syndromes XOR to s
        best = np.full((ell + 1, S), INF, dtype=np.int64)
        best[ell, 0] = 0
        xor = np.arange(S)[:, None] ^ np.arange(S)[None, :]
        for i in range(ell - 1, -1, -1):
            best[i] = np.min(per_syn[i][None, :] + best[i + 1][xor], axis=1)
        total = int(best[0, target])

        w, s = [], target
        for i in range(ell):
            ok = np.nonzero(cost + best[i + 1, s ^ syn[i]] == best[i, s])[0]
            wi = int(np.min(alpha[i] ^ ok))
            e = alpha[i] ^ wi
            w.append(wi)
            s ^= int(syn[i, e])
        return tuple(w), total


def _gf2_rank(A: np.ndarray) -> int:
    M = (np.asarray(A, dtype=np.uint8) & 1).copy()
    rank = 0
    rows, cols = M.shape
    for col in range(cols):
        piv = np.nonzero(M[rank:, col])[0]
        if piv.size == 0:
            continue
        p = rank + piv[0]
        M[[rank, p]] = M[[p, rank]]
        others = np.nonzero(M[:, col])[0]
        others = others[others != rank]
        M[others] ^= M[rank]
        rank += 1
        if rank == rows:
            break
    return rank


# -- protocol ---------------------------------------------------------------


@dataclass
class CorrectionResult:
    w: tuple[int, ...]
    beta: tuple[str, ...]
    gamma: tuple[int, ...]

    @property
    def total_bits(self) -> int:
        return sum(len(b) for b in self.beta)


def correction_protocol(codebook, alpha) -> CorrectionResult:
    """Run the supervisor and all ell players on one input tuple."""
    alpha = tuple(int(a) for a in alpha)
    m = codebook.m
    if len(alpha) != codebook.ell:
        raise InputError(f"expected {codebook.ell} blocks, got {len(alpha)}")
    w, _ = codebook.best_correction(alpha)
    beta = tuple(encode_block(a ^ b, m) for a, b in zip(alpha, w))
    gamma = tuple(player_decode(b, m) for b in beta)
    return CorrectionResult(w, beta, gamma)


def player_decode(beta: str, m: int) -> int:
    value, end = decode_block(beta, m)
    if end != len(beta):
        raise InputError("trailing bits after block")
    return value


def eq1_value(m: int, ell: int, eps: float) -> float:
    """Message-length target 3l + 2l log(sqrt(eps/2) m + 1) + sqrt(eps/8) m l log(2/eps)."""
    return (3 * ell + 2 * ell * math.log2(math.sqrt(eps / 2) * m + 1)
            + math.sqrt(eps / 8) * m * ell * math.log2(2 / eps))


def all_short_messages(m: int, max_weight: int | None = None):
    """Every codeword the block encoder can emit (for prefix-freeness scans)."""
    weights = range(m + 1) if max_weight is None else range(max_weight + 1)
    seen = set()
    for w in weights:
        for pos in combinations(range(m), w):
            e = sum(1 << (m - 1 - p) for p in pos)
            seen.add(encode_block(e, m))
    return sorted(seen)
