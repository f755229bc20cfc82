"""Finite groups as numbered elements with vectorised multiplication.

Every group numbers its elements ``0 .. n-1`` with ``0`` the identity.
``mul`` and ``inv`` accept ints or numpy integer arrays.
"""
from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .algebra import Field, VectorSpace, is_prime

MAX_PRODUCT_ORDER = 65536
MAX_VERIFY_ORDER = 4096
EXHAUSTIVE_ASSOCIATIVITY = 128


class GroupError(ValueError):
    pass


class FiniteGroup:
    """Base class; subclasses provide ``order``, ``mul`` and ``inv``."""

    order: int
    tag: tuple = ("group",)
    identity = 0

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def elements(self) -> range:
        return range(self.order)

    def __len__(self):
        return self.order

    @cached_property
    def table(self) -> np.ndarray:
        if self.order > MAX_VERIFY_ORDER:
            raise GroupError(f"refusing to tabulate a group of order {self.order}")
        idx = np.arange(self.order)
        t = self.mul(idx[:, None], idx[None, :])
        t.setflags(write=False)
        return t

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = int(self.mul(x, a))
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = self.table
        return bool(np.array_equal(t, t.T))

    def name(self) -> str:
        return format_tag(self.tag)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name()} order={self.order}>"

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        if other.order != self.order:
            return False
        if self.tag == other.tag and self.tag[0] != "table":
            return True
        return bool(np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.order, self.tag))

    def to_json(self) -> dict:
        tag = self.tag
        if tag[0] == "elementary_abelian":
            return {"tag": "elementary_abelian", "p": tag[1], "k": tag[2]}
        if tag[0] == "direct_product":
            return {"tag": "direct_product", "order": self.order,
                    "factors": [self.factors[0].to_json(), self.factors[1].to_json()]}
        return {"tag": format_tag(tag), "order": self.order, "mul": self.table.tolist()}


class TableGroup(FiniteGroup):
    """A group given by its Cayley table, validated at construction."""

    def __init__(self, table, tag: tuple = ("table",), check: bool = True):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise GroupError("Cayley table must be square")
        self.order = t.shape[0]
        self.tag = tuple(tag)
        t = t.copy()
        t.setflags(write=False)
        self.__dict__["table"] = t
        if check:
            check_group_table(t)
        inv = np.argmax(t == 0, axis=1)
        inv.setflags(write=False)
        self._inv = inv

    def mul(self, a, b):
        return self.table[a, b]

    def inv(self, a):
        return self._inv[a]


def check_group_table(t: np.ndarray, seed: int = 0, samples: int = 200_000) -> None:
    """Raise GroupError unless ``t`` is a group table with identity 0."""
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise GroupError("table entries out of range")
    idx = np.arange(n)
    for axis in (0, 1):
        if not np.all(np.sort(t, axis=axis) == (idx[:, None] if axis == 0 else idx[None, :])):
            raise GroupError("table is not a Latin square")
    if not (np.array_equal(t[0], idx) and np.array_equal(t[:, 0], idx)):
        raise GroupError("element 0 is not the identity")
    inv = np.argmax(t == 0, axis=1)
    if not np.all(t[idx, inv] == 0) or not np.all(t[inv, idx] == 0):
        raise GroupError("left and right inverses differ")
    if n <= EXHAUSTIVE_ASSOCIATIVITY:
        left = t[t[:, :, None], idx[None, None, :]]   # (ab)c
        right = t[idx[:, None, None], t[None, :, :]]  # a(bc)
        bad = np.argwhere(left != right)
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, samples))
        bad = np.nonzero(t[t[a, b], c] != t[a, t[b, c]])[0]
        bad = [(a[i], b[i], c[i]) for i in bad]
    if len(bad):
        a, b, c = (int(x) for x in bad[0])
        raise GroupError(f"associativity fails at ({a}, {b}, {c})")


class ElementaryAbelianGroup(FiniteGroup):
    """Z_p**k; element index = sum of digits d_i * p**i, product = digitwise sum."""

    def __init__(self, p: int, k: int):
        if not is_prime(p) or k < 0:
            raise GroupError(f"bad elementary abelian parameters p={p}, k={k}")
        if p ** k > MAX_PRODUCT_ORDER:
            raise GroupError(f"group order {p}^{k} exceeds {MAX_PRODUCT_ORDER}")
        self.p, self.k = p, k
        self.order = p ** k
        self.tag = ("elementary_abelian", p, k)
        self._pw = p ** np.arange(k)

    def digits(self, a):
        a = np.asarray(a)
        return (a[..., None] // self._pw) % self.p

    def mul(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return ((self.digits(a) + self.digits(b)) % self.p) @ self._pw

    def inv(self, a):
        if self.p == 2:
            return a
        return ((-self.digits(a)) % self.p) @ self._pw


class ProductGroup(FiniteGroup):
    """A x B with (a, b) numbered ``a * |B| + b``."""

    def __init__(self, A: FiniteGroup, B: FiniteGroup):
        if A.order * B.order > MAX_PRODUCT_ORDER:
            raise GroupError(f"|A||B| = {A.order * B.order} exceeds {MAX_PRODUCT_ORDER}")
        self.factors = (A, B)
        self.order = A.order * B.order
        self.tag = ("direct_product", A.tag, B.tag)

    def pair(self, x: int, y: int) -> int:
        return x * self.factors[1].order + y

    def split(self, z):
        nb = self.factors[1].order
        return np.asarray(z) // nb, np.asarray(z) % nb

    def mul(self, a, b):
        A, B = self.factors
        nb = B.order
        a, b = np.asarray(a), np.asarray(b)
        return A.mul(a // nb, b // nb) * nb + B.mul(a % nb, b % nb)

    def inv(self, a):
        A, B = self.factors
        nb = B.order
        a = np.asarray(a)
        return A.inv(a // nb) * nb + B.inv(a % nb)


# -- catalog ------------------------------------------------------------------------

def cyclic(n: int) -> TableGroup:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    idx = np.arange(n)
    return TableGroup((idx[:, None] + idx[None, :]) % n, ("cyclic", n), check=False)


def dihedral(order: int) -> TableGroup:
    """Dihedral group of the given order 2n; r**i s**j is numbered i + n*j."""
    if order < 2 or order % 2:
        raise GroupError("dihedral group order must be even and >= 2")
    n = order // 2
    t = np.zeros((order, order), dtype=np.int64)
    for x, y in itertools.product(range(order), repeat=2):
        a, b = x % n, x // n
        c, d = y % n, y // n
        t[x, y] = (a + (-c if b else c)) % n + n * ((b + d) % 2)
    return TableGroup(t, ("dihedral", order))


def quaternion8() -> TableGroup:
    """Q8 numbered 1, -1, i, -i, j, -j, k, -k."""
    # unit products: (u, v) -> (sign, w) over units 1, i, j, k = 0..3
    unit = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    t = np.zeros((8, 8), dtype=np.int64)
    for x, y in itertools.product(range(8), repeat=2):
        s, w = unit[(x // 2, y // 2)]
        sign = s * (-1) ** (x % 2) * (-1) ** (y % 2)
        t[x, y] = 2 * w + (sign < 0)
    return TableGroup(t, ("quaternion8",))


def symmetric3() -> TableGroup:
    """S3 numbered in itertools.permutations order; (s t)(x) = s(t(x))."""
    perms = list(itertools.permutations(range(3)))
    pos = {p: i for i, p in enumerate(perms)}
    t = np.zeros((6, 6), dtype=np.int64)
    for (i, s), (j, u) in itertools.product(enumerate(perms), repeat=2):
        t[i, j] = pos[tuple(s[u[x]] for x in range(3))]
    return TableGroup(t, ("symmetric3",))


def elementary_abelian(p: int, k: int) -> ElementaryAbelianGroup:
    return ElementaryAbelianGroup(p, k)


def direct_product(A: FiniteGroup, B: FiniteGroup) -> ProductGroup:
    return ProductGroup(A, B)


CATALOG = {
    "cyclic": cyclic,
    "elementary_abelian": elementary_abelian,
    "dihedral": dihedral,
    "quaternion8": quaternion8,
    "symmetric3": symmetric3,
    "direct_product": direct_product,
}


def catalog_group(name: str, *params) -> FiniteGroup:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise GroupError(f"unknown group {name!r}; known: {sorted(CATALOG)}") from None
    try:
        return factory(*params)
    except TypeError as exc:
        raise GroupError(f"bad parameters for {name}: {exc}") from None


def format_tag(tag) -> str:
    name, *params = tag
    if not params:
        return name
    return f"{name}({','.join(format_tag(x) if isinstance(x, tuple) else str(x) for x in params)})"


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|\d+|[(),])")


def parse_group(text: str) -> FiniteGroup:
    """Parse names such as ``dihedral(8)`` or ``direct_product(cyclic(4),cyclic(2))``."""
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != re.sub(r"\s+", "", text):
        raise GroupError(f"cannot parse group {text!r}")
    pos = 0

    def expr():
        nonlocal pos
        if pos >= len(tokens):
            raise GroupError(f"cannot parse group {text!r}")
        tok = tokens[pos]
        pos += 1
        if tok.isdigit():
            return int(tok)
        args = []
        if pos < len(tokens) and tokens[pos] == "(":
            pos += 1
            while True:
                args.append(expr())
                if pos >= len(tokens):
                    raise GroupError(f"cannot parse group {text!r}")
                sep = tokens[pos]
                pos += 1
                if sep == ")":
                    break
                if sep != ",":
                    raise GroupError(f"cannot parse group {text!r}")
        return catalog_group(tok, *args)

    g = expr()
    if pos != len(tokens) or not isinstance(g, FiniteGroup):
        raise GroupError(f"cannot parse group {text!r}")
    return g


def group_from_json(data: dict) -> FiniteGroup:
    tag = data.get("tag")
    if tag == "elementary_abelian":
        return ElementaryAbelianGroup(int(data["p"]), int(data["k"]))
    if tag == "direct_product":
        A, B = (group_from_json(d) for d in data["factors"])
        return ProductGroup(A, B)
    if "mul" in data:
        g = TableGroup(data["mul"])
        if tag:
            try:
                named = parse_group(tag)
            except GroupError:
                return TableGroup(data["mul"], (str(tag),))
            if named.order == g.order and np.array_equal(named.table, g.table):
                return named
            g.tag = (str(tag),)
        return g
    if tag:
        return parse_group(tag)
    raise GroupError("group JSON needs a tag or a mul table")


def as_group(obj) -> FiniteGroup:
    """The (additive) group underlying a group, field or vector space."""
    if isinstance(obj, FiniteGroup):
        return obj
    if isinstance(obj, Field):
        return ElementaryAbelianGroup(obj.p, obj.m)
    if isinstance(obj, VectorSpace):
        return ElementaryAbelianGroup(obj.field.p, obj.field.m * obj.dim)
    raise GroupError(f"{obj!r} is not a group, field or vector space")


# -- subgroups ------------------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x) -> bool:
        return int(x) in self.member_set

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    def __len__(self):
        return len(self.members)


def subgroup_from_members(G: FiniteGroup, members: Iterable[int]) -> Subgroup:
    s = sorted({int(x) for x in members})
    if not s or s[0] != 0:
        raise GroupError("subgroup must contain the identity")
    if s[-1] >= G.order:
        raise GroupError("member out of range")
    arr = np.array(s)
    prods = np.asarray(G.mul(arr[:, None], arr[None, :]))
    if not np.all(np.isin(prods, arr)):
        a, b = np.argwhere(~np.isin(prods, arr))[0]
        raise GroupError(f"not closed: {s[a]} * {s[b]} = {int(prods[a, b])} is missing")
    if not np.all(np.isin(G.inv(arr), arr)):
        raise GroupError("not closed under inverses")
    return Subgroup(G, tuple(s))


def pairwise_trivial_intersections(subgroups: Sequence[Subgroup]) -> bool:
    if any(S.parent is not subgroups[0].parent and S.parent != subgroups[0].parent
           for S in subgroups):
        raise GroupError("subgroups have different parent groups")
    for X, Y in itertools.combinations(subgroups, 2):
        if len(X.member_set & Y.member_set) != 1:
            return False
    return True


def coset_difference_histogram(f, z: int) -> dict[int, int]:
    """Counts of ``f(x z) f(x)^-1`` over x in the domain, for every codomain element."""
    G, H = as_group(f.domain), as_group(f.codomain)
    if z == 0:
        raise GroupError("z must not be the identity")
    values = np.asarray(f.values)
    x = np.arange(G.order)
    diffs = H.mul(values[G.mul(x, z)], H.inv(values))
    counts = np.bincount(np.asarray(diffs), minlength=H.order)
    return {h: int(c) for h, c in enumerate(counts)}


def order_statistics(G: FiniteGroup) -> Counter:
    return Counter(G.element_order(a) for a in G.elements())
