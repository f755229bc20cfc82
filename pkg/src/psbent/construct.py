"""Partial spread bent functions G -> H and prequasifield bent functions V -> K."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import Field, VectorSpace, build_field, is_prime
from .groups import ElementaryAbelianGroup, FiniteGroup, as_group
from .spreads import PartialSpreadPartition, Prequasifield, kernel_check, pair_space


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """``values[x]`` is the codomain element assigned to domain element x."""

    domain: object      # FiniteGroup, Field or VectorSpace
    codomain: object    # FiniteGroup or Field
    values: np.ndarray
    provenance: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.int64)
        if vals.shape != (self.domain.order,):
            raise ConstructionError(f"need {self.domain.order} values, got {vals.shape}")
        if vals.size and (vals.min() < 0 or vals.max() >= self.codomain.order):
            raise ConstructionError("value outside the codomain")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, x):
        return self.values[x]

    def __eq__(self, other):
        if not isinstance(other, FunctionTable):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    __hash__ = None

    def with_values(self, values) -> "FunctionTable":
        return FunctionTable(self.domain, self.codomain, values)

    def fibers(self) -> dict[int, np.ndarray]:
        return {c: np.nonzero(self.values == c)[0] for c in range(self.codomain.order)}


@dataclass(frozen=True, eq=False)
class DSets:
    """A partition of G labelled by H: ``labels[x]`` is the i with x in D_i."""

    G: FiniteGroup
    H: FiniteGroup
    labels: np.ndarray

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64)
        if labels.shape != (self.G.order,) or labels.min() < 0 or labels.max() >= self.H.order:
            raise ConstructionError("labels must assign an H-element to every element of G")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def members(self, i: int) -> np.ndarray:
        return np.nonzero(self.labels == i)[0]

    def sizes(self) -> dict[int, int]:
        counts = np.bincount(self.labels, minlength=self.H.order)
        return {i: int(c) for i, c in enumerate(counts)}

    def label_of(self, x: int) -> int:
        return int(self.labels[x])


def build_d_sets(P: PartialSpreadPartition) -> DSets:
    """D_i = (union of block i) minus 1; D_1 is the rest of G."""
    labels = np.zeros(P.G.order, dtype=np.int64)
    for i, block in P.blocks.items():
        for S in block:
            members = np.array(S.members[1:])  # members[0] is the identity
            if np.any(labels[members] != 0):
                raise ConstructionError("blocks overlap outside the identity")
            labels[members] = i
    D = DSets(P.G, P.H, labels)
    q, N = P.q, P.N
    sizes = D.sizes()
    expected = {i: (q * N * N + q * N - N if i == 0 else N * (q * N - 1)) for i in range(q)}
    if sizes != expected:  # pragma: no cover - guaranteed by the partition invariants
        raise ConstructionError(f"D-set sizes {sizes} != {expected}")
    return D


def ps_bent(P: PartialSpreadPartition) -> FunctionTable:
    """f(D_i) = i."""
    D = build_d_sets(P)
    prov = {"q": P.q, "N": P.N, "H": P.H.name()}
    if P.labels is not None:
        prov["blocks"] = {str(h): [str(s) for s in v] for h, v in P.block_labels().items()}
    return FunctionTable(P.G, P.H, D.labels, prov)


def balanced_function(domain, codomain, method: str = "round-robin", seed: int = 0) -> FunctionTable:
    """Each codomain element taken |domain|/|codomain| times.

    "round-robin" deals values 0, 1, ..., |codomain|-1, 0, 1, ... in domain
    order; "seeded-shuffle" shuffles that list with ``random.Random(seed)``.
    """
    n, c = domain.order, codomain.order
    if n % c:
        raise ConstructionError(f"|codomain| = {c} does not divide |domain| = {n}")
    values = [x % c for x in range(n)]
    if method == "seeded-shuffle":
        random.Random(seed).shuffle(values)
    elif method != "round-robin":
        raise ConstructionError(f"unknown balanced-function method {method!r}")
    prov = {"method": method, "seed": seed} if method == "seeded-shuffle" else {"method": method}
    return FunctionTable(domain, codomain, values, prov)


def is_balanced(f: FunctionTable) -> bool:
    n, c = f.domain.order, f.codomain.order
    if n % c:
        return False
    counts = np.bincount(f.values, minlength=c)
    return bool(np.all(counts == n // c))


def qf_bent(Q: Prequasifield, K: Field, g: FunctionTable) -> FunctionTable:
    """f(0, y) = g(0); f(x, y) = g(m) where y = m*x, for x != 0.

    The domain is V = F + F as a K-space (see ``spreads.PairSpace``).
    """
    F = Q.field
    if g.domain.order != F.order or g.codomain.order != K.order:
        raise ConstructionError("g must map the prequasifield's field to K")
    if not is_balanced(g):
        raise ConstructionError("g is not balanced")
    if not kernel_check(Q, K):
        raise ConstructionError(f"{K} is not contained in the kernel of {Q.name}")
    ps = pair_space(F, K)
    x, y = ps.unpack(np.arange(ps.order))
    slopes = Q.slope_inv[x, y]
    values = np.where(x == 0, g.values[0], g.values[np.maximum(slopes, 0)])
    prov = {"prequasifield": Q.name, "K": K.to_json(), "g": [int(v) for v in g.values]}
    prov.update({k: v for k, v in g.provenance.items() if k in ("method", "seed")})
    return FunctionTable(ps.space, K, values, prov)


def to_vector_function(f: FunctionTable) -> FunctionTable:
    """View f as a map K**n -> K when its groups are elementary abelian.

    A domain Z_p**k becomes GF(p)**k and a codomain Z_p (cyclic or elementary
    abelian of rank 1) becomes GF(p); element numbering is unchanged.
    """
    dom, cod = f.domain, f.codomain
    if not isinstance(cod, Field):
        if isinstance(cod, ElementaryAbelianGroup) and cod.k == 1:
            cod = build_field(cod.p, 1)
        elif cod.tag[0] == "cyclic" and is_prime(cod.order):
            cod = build_field(cod.order, 1)
        else:
            raise ConstructionError(f"codomain {cod!r} is not a field of prime order")
    if isinstance(dom, Field):
        dom = VectorSpace(dom, 1)
    elif not isinstance(dom, VectorSpace):
        grp = as_group(dom)
        if not isinstance(grp, ElementaryAbelianGroup):
            raise ConstructionError(f"domain {dom!r} is not elementary abelian")
        if cod.m != 1 or grp.p != cod.p:
            raise ConstructionError("domain and codomain characteristics differ")
        dom = VectorSpace(cod, grp.k)
    if dom.field != cod:
        raise ConstructionError("domain is not a vector space over the codomain field")
    return FunctionTable(dom, cod, f.values, dict(f.provenance))


def fiber_sizes(f: FunctionTable) -> Counter:
    return Counter(int(v) for v in f.values)
