"""Exact arithmetic: prime and extension fields, linear functionals, cyclotomic integers.

Field elements are plain integers ``0 <= x < p**m``.  The base-``p`` digits of
``x`` (least significant first) are the coordinates of the element in the
power basis ``1, r, r**2, ...`` of a root ``r`` of the field's modulus, so
addition of elements is digitwise addition mod ``p``.  All operation tables
are precomputed as numpy arrays and may be indexed with arrays.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

MAX_FIELD_ORDER = 256


class AlgebraError(ValueError):
    """Raised on invalid field, functional or cyclotomic input."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


# -- polynomials over Z_p, as coefficient lists [c_0, ..., c_d] ----------------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    """Remainder of ``a`` divided by the monic polynomial ``b``."""
    a = _poly_trim(a)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = a[-1]
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _poly_trim(a)
    return a


def _monic_polys(p: int, d: int):
    """Monic degree-``d`` polynomials in increasing order of ``sum c_i p**i``."""
    for n in range(p ** d):
        yield [(n // p ** i) % p for i in range(d)] + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = [c % p for c in poly]
    deg = len(_poly_trim(poly)) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(poly, g, p):
                return False
    return True


# -- fields ---------------------------------------------------------------------

@dataclass(frozen=True)
class Field:
    """GF(p**m) with a fixed monic irreducible modulus ``[c_0, ..., c_m]``."""

    p: int
    m: int
    modulus: tuple[int, ...]
    add_table: np.ndarray = dc_field(init=False, repr=False, compare=False)
    mul_table: np.ndarray = dc_field(init=False, repr=False, compare=False)
    neg_table: np.ndarray = dc_field(init=False, repr=False, compare=False)
    inv_table: np.ndarray = dc_field(init=False, repr=False, compare=False)
    digits: np.ndarray = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p, m = self.p, self.m
        if not is_prime(p):
            raise AlgebraError(f"characteristic {p} is not prime")
        if m < 1:
            raise AlgebraError("extension degree must be >= 1")
        if p ** m > MAX_FIELD_ORDER:
            raise AlgebraError(f"field order {p}^{m} exceeds the limit {MAX_FIELD_ORDER}")
        modulus = tuple(int(c) % p for c in self.modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise AlgebraError("modulus must be monic of degree m")
        if not is_irreducible(modulus, p):
            raise AlgebraError(f"modulus {list(modulus)} is reducible over Z_{p}")
        object.__setattr__(self, "modulus", modulus)

        q = p ** m
        powers = p ** np.arange(m)
        digits = (np.arange(q)[:, None] // powers) % p
        add = ((digits[:, None, :] + digits[None, :, :]) % p) @ powers
        # images of every element under multiplication by r**i, i < m
        shifted = np.empty((m, q, m), dtype=np.int64)
        cur = digits.copy()
        low = np.array(modulus[:m])
        for i in range(m):
            shifted[i] = cur
            top = cur[:, -1:].copy()
            cur = np.concatenate([np.zeros((q, 1), dtype=np.int64), cur[:, :-1]], axis=1)
            cur = (cur - top * low) % p
        mul_digits = np.einsum("iak,bi->abk", shifted, digits) % p
        mul = mul_digits @ powers
        neg = ((-digits) % p) @ powers
        inv = np.zeros(q, dtype=np.int64)
        rows, cols = np.nonzero(mul == 1)
        inv[rows] = cols
        for name, arr in (("add_table", add), ("mul_table", mul), ("neg_table", neg),
                          ("inv_table", inv), ("digits", digits)):
            arr = np.ascontiguousarray(arr, dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __str__(self):
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"

    @property
    def order(self) -> int:
        return self.p ** self.m

    q = order

    def elements(self) -> range:
        return range(self.order)

    @property
    def root(self) -> int:
        """The element represented by the indeterminate (a root of the modulus)."""
        if self.m > 1:
            return self.p
        return (-self.modulus[0]) % self.p

    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.add_table[a, self.neg_table[b]]

    def neg(self, a):
        return self.neg_table[a]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self.inv_table[a]

    def pow(self, a: int, e: int) -> int:
        result = 1
        for _ in range(e):
            result = int(self.mul_table[result, a])
        return result

    def coeffs(self, x: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.digits[x])

    def element(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.m:
            raise AlgebraError(f"expected {self.m} coordinates, got {len(coeffs)}")
        return sum((int(c) % self.p) * self.p ** i for i, c in enumerate(coeffs))

    def scalar(self, c: int) -> int:
        """The prime-subfield element ``c mod p``."""
        return int(c) % self.p

    def is_square(self, a: int) -> bool:
        return a == 0 or bool(np.any(self.mul_table.diagonal() == a))

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> "Field":
        return cls(int(data["p"]), int(data["m"]), tuple(data["modulus"]))


@functools.lru_cache(maxsize=None)
def build_field(p: int, m: int) -> Field:
    """GF(p**m) with the lexicographically smallest monic irreducible modulus.

    Candidates are ordered by the integer ``sum c_i p**i`` of their lower
    coefficients, i.e. compared from the highest non-leading coefficient down.
    """
    if not is_prime(p):
        raise AlgebraError(f"characteristic {p} is not prime")
    if m < 1:
        raise AlgebraError("extension degree must be >= 1")
    if p ** m > MAX_FIELD_ORDER:
        raise AlgebraError(f"field order {p}^{m} exceeds the limit {MAX_FIELD_ORDER}")
    for poly in _monic_polys(p, m):
        if is_irreducible(poly, p):
            return Field(p, m, tuple(poly))
    raise AlgebraError(f"no irreducible polynomial of degree {m} over Z_{p}")  # pragma: no cover


def _frob(K, x):
    result = np.ones_like(np.asarray(x))
    for _ in range(K.p):
        result = K.mul_table[result, x]
    return result


def absolute_trace(K: Field, x):
    """x + x^p + ... + x^(p^(m-1)), returned as an integer in [0, p)."""
    total = np.asarray(x)
    term = np.asarray(x)
    for _ in range(K.m - 1):
        term = _frob(K, term)
        total = K.add_table[total, term]
    # the trace lies in the prime subfield, whose elements are 0..p-1
    if np.any(total >= K.p):
        raise AlgebraError("trace left the prime subfield")  # pragma: no cover
    return int(total) if total.ndim == 0 else total


@dataclass(frozen=True)
class LinearFunctional:
    """A nonzero Z_p-linear map K -> Z_p, ``x -> sum w_i x_i mod p``."""

    field: Field
    weights: tuple[int, ...]
    table: np.ndarray = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        K = self.field
        weights = tuple(int(w) % K.p for w in self.weights)
        if len(weights) != K.m:
            raise AlgebraError(f"functional needs {K.m} weights")
        if not any(weights):
            raise AlgebraError("linear functional must be nonzero")
        object.__setattr__(self, "weights", weights)
        table = (K.digits @ np.array(weights)) % K.p
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def __call__(self, x):
        return self.table[x]


def trace_functional(K: Field) -> LinearFunctional:
    weights = [absolute_trace(K, K.p ** i) for i in range(K.m)]
    return LinearFunctional(K, tuple(weights))


def dot(K: Field, u: Sequence[int], v: Sequence[int]) -> int:
    """Standard K-valued dot product of two coordinate vectors."""
    if len(u) != len(v):
        raise AlgebraError(f"length mismatch: {len(u)} != {len(v)}")
    acc = 0
    for a, b in zip(u, v):
        acc = int(K.add_table[acc, K.mul_table[a, b]])
    return acc


def embed_subfield(K: Field, F: Field) -> np.ndarray:
    """Image of every element of K under a field embedding K -> F.

    The embedding sends K's root to F's root when the moduli agree, and to the
    smallest root of K's modulus in F otherwise.
    """
    if K.p != F.p or F.m % K.m:
        raise AlgebraError(f"{K} is not a subfield of {F}")
    if K.modulus == F.modulus:
        return np.arange(F.order)
    image = None
    for r in F.elements():
        val = 0
        for c in reversed(K.modulus):
            val = int(F.add_table[F.mul_table[val, r], c])
        if val == 0:
            image = r
            break
    if image is None:  # pragma: no cover
        raise AlgebraError(f"{K.modulus} has no root in {F}")
    powers = [1]
    for _ in range(K.m - 1):
        powers.append(int(F.mul_table[powers[-1], image]))
    emb = np.zeros(K.order, dtype=np.int64)
    for k in K.elements():
        acc = 0
        for c, rp in zip(K.coeffs(k), powers):
            acc = int(F.add_table[acc, F.mul_table[c, rp]])
        emb[k] = acc
    return emb


@dataclass(frozen=True)
class VectorSpace:
    """K**dim with element index ``sum c_i |K|**i`` (c_i the K-coordinates).

    Because K-addition is digitwise mod p, this indexing makes the additive
    group of the space the elementary abelian group on the base-p digits.
    """

    field: Field
    dim: int
    coords_table: np.ndarray = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, q = self.dim, self.field.order
        if n < 1:
            raise AlgebraError("dimension must be >= 1")
        if q ** n > 4096:
            raise AlgebraError(f"|V| = {q ** n} exceeds the verification limit 4096")
        idx = np.arange(q ** n)
        table = (idx[:, None] // q ** np.arange(n)) % q
        table.setflags(write=False)
        object.__setattr__(self, "coords_table", table)

    @property
    def order(self) -> int:
        return self.field.order ** self.dim

    def elements(self) -> range:
        return range(self.order)

    def coords(self, v: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coords_table[v])

    def element(self, coords: Sequence[int]) -> int:
        q = self.field.order
        if len(coords) != self.dim:
            raise AlgebraError(f"expected {self.dim} coordinates")
        return sum(int(c) * q ** i for i, c in enumerate(coords))

    def dot_rows(self, us=None, gram=None) -> np.ndarray:
        """Values ``u^T M v`` for every u in ``us`` (default: all) and every v.

        ``gram`` is an n x n matrix over K, the identity (standard dot
        product) when omitted.  Returns a ``len(us) x |V|`` array.
        """
        K = self.field
        C = self.coords_table
        n = self.dim
        us = np.arange(self.order) if us is None else np.atleast_1d(np.asarray(us))
        if gram is None:
            gram = np.eye(n, dtype=np.int64)
        gram = np.asarray(gram, dtype=np.int64)
        if gram.shape != (n, n):
            raise AlgebraError("gram matrix has the wrong shape")
        # (M v)_i for every v
        Mv = np.zeros((self.order, n), dtype=np.int64)
        for i in range(n):
            acc = np.zeros(self.order, dtype=np.int64)
            for j in range(n):
                acc = K.add_table[acc, K.mul_table[gram[i, j], C[:, j]]]
            Mv[:, i] = acc
        Cu = C[us]
        out = np.zeros((len(us), self.order), dtype=np.int64)
        for i in range(n):
            out = K.add_table[out, K.mul_table[Cu[:, i][:, None], Mv[:, i][None, :]]]
        return out

    def to_json(self) -> dict:
        return {"tag": "vector_space", "field": self.field.to_json(), "dim": self.dim}


def is_nondegenerate(K: Field, gram) -> bool:
    """True iff the square matrix over K is invertible (Gaussian elimination)."""
    M = [[int(x) for x in row] for row in gram]
    n = len(M)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return False
        M[col], M[piv] = M[piv], M[col]
        inv = int(K.inv_table[M[col][col]])
        for r in range(col + 1, n):
            if M[r][col]:
                f = int(K.mul_table[M[r][col], inv])
                M[r] = [int(K.sub(a, K.mul_table[f, b])) for a, b in zip(M[r], M[col])]
    return True


def relative_coordinates(F: Field, K: Field) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of F as a K-space in the basis 1, r, ..., r**(d-1) (r = F.root).

    Returns ``(to_coords, from_coords)``: ``to_coords[x]`` is the index of the
    coordinate vector of x in ``VectorSpace(K, d)`` and ``from_coords`` is its
    inverse permutation.
    """
    emb = embed_subfield(K, F)
    d = F.m // K.m
    basis = [1]
    for _ in range(d - 1):
        basis.append(int(F.mul_table[basis[-1], F.root]))
    from_coords = np.zeros(F.order, dtype=np.int64)
    for idx, cs in enumerate(itertools.product(range(K.order), repeat=d)):
        cs = cs[::-1]  # coordinate 0 varies fastest
        acc = 0
        for c, b in zip(cs, basis):
            acc = int(F.add_table[acc, F.mul_table[emb[c], b]])
        from_coords[idx] = acc
    if len(set(from_coords.tolist())) != F.order:  # pragma: no cover
        raise AlgebraError("power basis of the root is not a K-basis")
    to_coords = np.argsort(from_coords)
    return to_coords, from_coords


# -- cyclotomic integers ------------------------------------------------------------

class CyclotomicInt:
    """An element of Z[zeta_p] in the basis 1, zeta, ..., zeta**(p-2).

    For p = 2 the basis is just ``1`` and zeta = -1.
    """

    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords: Sequence[int]):
        rank = max(p - 1, 1)
        coords = tuple(int(c) for c in coords)
        if len(coords) > rank:
            coords = _reduce(p, coords)
        coords = coords + (0,) * (rank - len(coords))
        self.p = p
        self.coords = coords

    @classmethod
    def integer(cls, p: int, n: int) -> "CyclotomicInt":
        return cls(p, (n,))

    @classmethod
    def zeta_power(cls, p: int, j: int) -> "CyclotomicInt":
        full = [0] * p
        full[j % p] = 1
        return cls(p, _reduce(p, full))

    @classmethod
    def from_exponent_counts(cls, p: int, counts: Sequence[int]) -> "CyclotomicInt":
        """sum_j counts[j] * zeta**j for j in range(p)."""
        if len(counts) != p:
            raise AlgebraError(f"need {p} exponent counts")
        return cls(p, _reduce(p, counts))

    def _check(self, other):
        if not isinstance(other, CyclotomicInt):
            return NotImplemented
        if other.p != self.p:
            raise AlgebraError(f"mismatched cyclotomic orders {self.p} and {other.p}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return CyclotomicInt(self.p, [a + b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return CyclotomicInt(self.p, [-a for a in self.coords])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        other = self._check(other)
        return cyclo_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, CyclotomicInt):
            return NotImplemented
        return self.p == other.p and self.coords == other.coords

    def __hash__(self):
        return hash((self.p, self.coords))

    def __repr__(self):
        return f"CyclotomicInt(p={self.p}, coords={self.coords})"

    def conj(self) -> "CyclotomicInt":
        return cyclo_conj(self)

    def as_rational_integer(self):
        return cyclo_as_rational_integer(self)


def _reduce(p: int, full: Sequence[int]) -> tuple[int, ...]:
    """Reduce a coefficient vector in powers of zeta to the rank-(p-1) basis."""
    folded = [0] * p
    for j, c in enumerate(full):
        folded[j % p] += int(c)
    top = folded[p - 1]
    if p == 2:
        return (folded[0] - top,)
    return tuple(c - top for c in folded[: p - 1])


def cyclo_mul(a: CyclotomicInt, b: CyclotomicInt) -> CyclotomicInt:
    if a.p != b.p:
        raise AlgebraError(f"mismatched cyclotomic orders {a.p} and {b.p}")
    p = a.p
    full = [0] * p
    for i, x in enumerate(a.coords):
        if x:
            for j, y in enumerate(b.coords):
                full[(i + j) % p] += x * y
    return CyclotomicInt(p, _reduce(p, full))


def cyclo_conj(a: CyclotomicInt) -> CyclotomicInt:
    """Image under zeta -> zeta**(-1)."""
    p = a.p
    full = [0] * p
    for j, c in enumerate(a.coords):
        full[(-j) % p] += c
    return CyclotomicInt(p, _reduce(p, full))


def cyclo_as_rational_integer(a: CyclotomicInt):
    """The integer n if ``a == n``, else None."""
    if any(a.coords[1:]):
        return None
    return a.coords[0]
