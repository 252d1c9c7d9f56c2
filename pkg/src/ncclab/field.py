"""Prime-field arithmetic, roots of unity and the finite field Fourier transform.

Scalars are :class:`FieldElement` objects; vector transforms work on numpy
``int64`` arrays of residues so a whole batch of vectors can be pushed
through one call (the last axis is the transform axis).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DivisionByZero,
    DuplicatePoint,
    LengthMismatch,
    MixedFields,
    NoSuchRoot,
    NotPrime,
)

MAX_MODULUS = 1 << 31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not (2 <= self.p < MAX_MODULUS) or not is_prime(self.p):
            raise NotPrime(f"{self.p} is not a prime below 2^31")

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.p, self)

    @property
    def bits(self) -> int:
        """Bits needed to write one element, i.e. ceil(log2 p)."""
        return (self.p - 1).bit_length()

    def one(self) -> "FieldElement":
        return self(1)

    def zero(self) -> "FieldElement":
        return self(0)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def generator(self) -> int:
        """Smallest generator of the multiplicative group."""
        order = self.p - 1
        qs = prime_factors(order)
        for g in range(1, self.p):
            if all(pow(g, order // q, self.p) != 1 for q in qs):
                return g
        raise AssertionError("multiplicative group of a prime field is cyclic")

    def random_vector(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.p, size=size, dtype=np.int64)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise MixedFields(f"GF({self.field.p}) vs GF({other.field.p})")
            return other.value
        return int(other) % self.field.p

    def __add__(self, other):
        return self.field(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.field(self.value - self._coerce(other))

    def __rsub__(self, other):
        return self.field(self._coerce(other) - self.value)

    def __mul__(self, other):
        return self.field(self.value * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.field(-self.value)

    def inv(self) -> "FieldElement":
        return self.field(self.field.inv(self.value))

    def __truediv__(self, other):
        return self * self.field(self.field.inv(self._coerce(other)))

    def __rtruediv__(self, other):
        return self.field(self._coerce(other)) * self.inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return self.field(pow(self.value, e, self.field.p))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.p))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch one of add/sub/mul/div/pow/inv; ``b`` is an int for pow."""
    if op == "inv":
        return a.inv()
    if op == "pow":
        return a ** int(b)
    if isinstance(b, FieldElement) and b.field != a.field:
        raise MixedFields(f"GF({a.field.p}) vs GF({b.field.p})")
    return {
        "add": a.__add__,
        "sub": a.__sub__,
        "mul": a.__mul__,
        "div": a.__truediv__,
    }[op](b)


@dataclass(frozen=True)
class RootOfUnity:
    sigma: FieldElement
    n: int

    def __post_init__(self):
        p = self.sigma.field.p
        if (p - 1) % self.n:
            raise NoSuchRoot(f"{self.n} does not divide {p - 1}")
        if not is_primitive_root(self.sigma.value, self.n, p):
            raise NoSuchRoot(f"{self.sigma.value} does not have order {self.n} mod {p}")

    @property
    def field(self) -> PrimeField:
        return self.sigma.field

    @property
    def p(self) -> int:
        return self.sigma.field.p

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(self.sigma.inv(), self.n)

    def power(self, k: int) -> int:
        """sigma^k as a plain residue; negative k allowed."""
        return pow(self.sigma.value, k % self.n, self.p)


def is_primitive_root(sigma: int, n: int, p: int) -> bool:
    if pow(sigma, n, p) != 1:
        return False
    return all(pow(sigma, n // q, p) != 1 for q in prime_factors(n))


def find_root_of_unity(field: PrimeField, n: int) -> RootOfUnity:
    if n < 1 or (field.p - 1) % n:
        raise NoSuchRoot(f"{n} does not divide p-1 = {field.p - 1}")
    g = field.generator()
    return RootOfUnity(field(pow(g, (field.p - 1) // n, field.p)), n)


def _as_residues(values, p: int) -> np.ndarray:
    if isinstance(values, np.ndarray) and values.dtype != object:
        arr = values.astype(np.int64, copy=False)
    else:
        arr = np.vectorize(int, otypes=[np.int64])(np.array(values, dtype=object))
    return np.mod(arr, p)


def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _cooley_tukey(a: np.ndarray, sigma: int, p: int) -> np.ndarray:
    n = a.shape[-1]
    lead = a.shape[:-1]
    a = a[..., _bit_reverse(n)]
    m = 2
    while m <= n:
        w = pow(sigma, n // m, p)
        tw = np.empty(m // 2, dtype=np.int64)
        acc = 1
        for k in range(m // 2):
            tw[k] = acc
            acc = acc * w % p
        blocks = a.reshape(lead + (n // m, m))
        even = blocks[..., : m // 2]
        odd = blocks[..., m // 2:] * tw % p
        a = np.concatenate(((even + odd) % p, (even - odd) % p), axis=-1).reshape(lead + (n,))
        m *= 2
    return a


def _dft_matrix(n: int, sigma: int, p: int) -> np.ndarray:
    powers = np.empty(n, dtype=np.int64)
    acc = 1
    for k in range(n):
        powers[k] = acc
        acc = acc * sigma % p
    ij = np.outer(np.arange(n), np.arange(n)) % n
    return powers[ij]


def _definitional(a: np.ndarray, sigma: int, p: int) -> np.ndarray:
    n = a.shape[-1]
    mat = _dft_matrix(n, sigma, p)
    if n * (p - 1) ** 2 < (1 << 63):
        return (a @ mat.T) % p
    # products near 2^62 would overflow when summed; reduce row by row
    out = np.empty_like(a)
    for i in range(n):
        out[..., i] = ((a * mat[i]) % p).sum(axis=-1) % p
    return out


def _check_length(a: np.ndarray, root: RootOfUnity) -> None:
    if a.ndim == 0 or a.shape[-1] != root.n:
        got = a.shape[-1] if a.ndim else 0
        raise LengthMismatch(f"vector length {got} != root order {root.n}")


def naive_dft(coeffs, root: RootOfUnity) -> np.ndarray:
    """O(n^2) definitional transform, kept separate as the reference oracle."""
    a = _as_residues(coeffs, root.p)
    _check_length(a, root)
    n, p, s = root.n, root.p, root.sigma.value
    out = np.zeros_like(a)
    for i in range(n):
        acc = np.zeros(a.shape[:-1], dtype=np.int64)
        step = pow(s, i, p)
        w = 1
        for j in range(n):
            acc = (acc + a[..., j] * w) % p
            w = w * step % p
        out[..., i] = acc
    return out


def _transform(a: np.ndarray, sigma: int, n: int, p: int) -> np.ndarray:
    if n & (n - 1) == 0:
        return _cooley_tukey(a, sigma, p)
    return _definitional(a, sigma, p)


def ffft(coeffs, root: RootOfUnity) -> np.ndarray:
    """beta_i = sum_j alpha_j sigma^(i j), for every i in [n]."""
    a = _as_residues(coeffs, root.p)
    _check_length(a, root)
    return _transform(a, root.sigma.value, root.n, root.p)


def ffft_inverse(values, root: RootOfUnity) -> np.ndarray:
    """alpha_i = n^-1 sum_j beta_j sigma^(-i j)."""
    a = _as_residues(values, root.p)
    _check_length(a, root)
    p = root.p
    n_inv = root.field.inv(root.n % p)
    return _transform(a, root.field.inv(root.sigma.value), root.n, p) * n_inv % p


def poly_eval(coeffs: Sequence, x: FieldElement) -> FieldElement:
    acc = x.field.zero()
    for c in reversed(list(coeffs)):
        if isinstance(c, FieldElement) and c.field != x.field:
            raise MixedFields(f"GF({c.field.p}) coefficient at GF({x.field.p}) point")
        acc = acc * x + c
    return acc


def lagrange_interpolate(points: Iterable[tuple]) -> list[FieldElement]:
    """Coefficients (low degree first) of the unique polynomial through ``points``."""
    points = list(points)
    if not points:
        return []
    fld = points[0][0].field
    p = fld.p
    xs = [int(x) for x, _ in points]
    ys = [int(y) for _, y in points]
    for x, y in points:
        for v in (x, y):
            if isinstance(v, FieldElement) and v.field != fld:
                raise MixedFields("points from different fields")
    if len(set(xs)) != len(xs):
        raise DuplicatePoint("interpolation points must be pairwise distinct")
    n = len(xs)

    # full product prod_j (x - x_j), then divide out one root at a time
    full = [1]
    for xj in xs:
        nxt = [0] * (len(full) + 1)
        for k, c in enumerate(full):
            nxt[k] = (nxt[k] - c * xj) % p
            nxt[k + 1] = (nxt[k + 1] + c) % p
        full = nxt

    result = [0] * n
    for i, xi in enumerate(xs):
        # synthetic division of full by (x - xi)
        quot = [0] * n
        carry = 0
        for k in range(n, 0, -1):
            carry = (full[k] + carry * xi) % p if k < n else full[k]
            quot[k - 1] = carry
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                denom = denom * (xi - xj) % p
        scale = ys[i] * pow(denom, p - 2, p) % p
        for k in range(n):
            result[k] = (result[k] + scale * quot[k]) % p
    return [fld(c) for c in result]
