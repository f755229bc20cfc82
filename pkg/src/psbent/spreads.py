"""Prequasifields, their spreads of F + F, and partial-spread partitions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence, Union

import numpy as np

from .algebra import Field, VectorSpace, build_field, embed_subfield, relative_coordinates
from .groups import (
    FiniteGroup,
    Subgroup,
    as_group,
    pairwise_trivial_intersections,
)

INF = "inf"
Slope = Union[int, str]


class SpreadError(ValueError):
    pass


@dataclass(frozen=True)
class PrequasifieldViolation:
    """The first failed axiom and the elements witnessing it."""

    axiom: str
    witness: tuple
    message: str

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness), "message": self.message}


@dataclass(frozen=True, eq=False)
class Prequasifield:
    field: Field
    star: np.ndarray = dc_field(repr=False)
    slope_inv: np.ndarray = dc_field(repr=False)
    name: str = "custom"

    @property
    def order(self) -> int:
        return self.field.order

    def __call__(self, a, x):
        return self.star[a, x]

    def to_json(self) -> dict:
        return {"name": self.name, "field": self.field.to_json(), "star": self.star.tolist()}


def validate_prequasifield(star, F: Field, name: str = "custom"):
    """Exhaustively check the prequasifield axioms for ``a*x = star[a][x]``.

    Returns a Prequasifield, or a PrequasifieldViolation naming the first
    failed axiom.  Bijectivity of the differences is checked before left
    distributivity.
    """
    q = F.order
    star = np.array(star, dtype=np.int64)
    if star.shape != (q, q):
        return PrequasifieldViolation("shape", star.shape, f"table must be {q}x{q}")
    if star.min() < 0 or star.max() >= q:
        return PrequasifieldViolation("range", (), "table entries must be field elements")

    for a in range(q):
        diffs = F.sub(star[a][None, :], star)               # row b: z -> a*z - b*z
        for b in range(q):
            if b == a:
                continue
            row = diffs[b]
            if len(np.unique(row)) != q:
                z1, z2 = _first_collision(row)
                return PrequasifieldViolation(
                    "difference_bijective", (a, b, z1, z2),
                    f"z -> {a}*z - {b}*z takes the same value at z={z1} and z={z2}")

    add = F.add_table
    for a in range(q):
        lhs = star[a][add]                                  # a*(x+y)
        rhs = add[star[a][:, None], star[a][None, :]]       # a*x + a*y
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            x, y = (int(v) for v in bad[0])
            return PrequasifieldViolation(
                "left_distributivity", (a, x, y), f"{a}*({x}+{y}) != {a}*{x} + {a}*{y}")

    if np.any(star[:, 0] != 0):  # pragma: no cover - implied by distributivity
        a = int(np.nonzero(star[:, 0])[0][0])
        return PrequasifieldViolation("zero", (a,), f"{a}*0 != 0")

    slope_inv = np.full((q, q), -1, dtype=np.int64)
    for x in range(1, q):
        slope_inv[x, star[:, x]] = np.arange(q)
    star.setflags(write=False)
    slope_inv.setflags(write=False)
    return Prequasifield(F, star, slope_inv, name)


def _first_collision(row):
    seen = {}
    for z, v in enumerate(row.tolist()):
        if v in seen:
            return seen[v], z
        seen[v] = z
    raise AssertionError("no collision")  # pragma: no cover


def _require(result) -> Prequasifield:
    if isinstance(result, PrequasifieldViolation):
        raise SpreadError(result.message)
    return result


def field_prequasifield(F: Field) -> Prequasifield:
    """The field F itself, ``a*x = ax``."""
    return _require(validate_prequasifield(F.mul_table, F, name=f"field({F.p},{F.m})"))


def twisted_star_table(F: Field) -> np.ndarray:
    """``m*x = m x`` for square m (0 included), ``m x**p`` for nonsquare m."""
    q = F.order
    frob = np.array([F.pow(x, F.p) for x in range(q)])
    star = np.empty((q, q), dtype=np.int64)
    for m in range(q):
        xs = np.arange(q) if F.is_square(m) else frob
        star[m] = F.mul_table[m, xs]
    return star


def twisted_nearfield9() -> Prequasifield:
    """Order-9 prequasifield that is not a field (its kernel is GF(3))."""
    F = build_field(3, 2)
    return _require(validate_prequasifield(twisted_star_table(F), F, name="twisted9"))


PREQUASIFIELDS = {
    "twisted9": twisted_nearfield9,
}


def prequasifield_by_name(name: str) -> Prequasifield:
    """``twisted9`` or ``field(p,m)``."""
    if name in PREQUASIFIELDS:
        return PREQUASIFIELDS[name]()
    text = name.replace(" ", "")
    if text.startswith("field(") and text.endswith(")"):
        try:
            p, m = (int(v) for v in text[6:-1].split(","))
        except ValueError:
            raise SpreadError(f"bad field spec {name!r}") from None
        return field_prequasifield(build_field(p, m))
    raise SpreadError(f"unknown prequasifield {name!r}; known: field(p,m), {', '.join(PREQUASIFIELDS)}")


def prequasifield_from_json(data: Mapping):
    F = Field.from_json(data["field"])
    return validate_prequasifield(data["star"], F, name=data.get("name", "custom"))


def kernel_check(Q: Prequasifield, K: Field, action=None) -> bool:
    """True iff every k in K satisfies m*(k x) = k (m*x) for all m, x.

    ``action[k][x]`` is the scalar action of K on F; by default K is embedded
    in Q's field and acts by multiplication.
    """
    F = Q.field
    if action is None:
        emb = embed_subfield(K, F)
        action = F.mul_table[emb[:, None], np.arange(F.order)[None, :]]
    action = np.asarray(action, dtype=np.int64)
    if action.shape != (K.order, F.order):
        raise SpreadError("scalar action has the wrong shape")
    add = F.add_table
    for k in range(K.order):
        if np.any(action[k][add] != add[action[k][:, None], action[k][None, :]]):
            raise SpreadError(f"scalar action of {k} is not additive")
    for k in range(K.order):
        lhs = Q.star[:, action[k]]            # m*(k x)
        rhs = action[k][Q.star]               # k (m*x)
        if np.any(lhs != rhs):
            return False
    return True


def solve_slope(Q: Prequasifield, x: int, y: int) -> int:
    """The unique m with m*x = y."""
    if x == 0:
        raise SpreadError("x must be nonzero")
    return int(Q.slope_inv[x, y])


@dataclass(frozen=True, eq=False)
class PairSpace:
    """V = F + F as a K-space: (x, y) is numbered ``c(x) * |F| + c(y)``.

    ``c`` maps an element of F to the index of its coordinate vector in the
    K-basis 1, r, ..., r**(d-1); for K the prime field this is the identity.
    """

    F: Field
    K: Field
    space: VectorSpace
    to_coords: np.ndarray = dc_field(repr=False)
    from_coords: np.ndarray = dc_field(repr=False)

    @property
    def order(self) -> int:
        return self.space.order

    def pack(self, x, y):
        return self.to_coords[x] * self.F.order + self.to_coords[y]

    def unpack(self, v):
        v = np.asarray(v)
        return self.from_coords[v // self.F.order], self.from_coords[v % self.F.order]


def pair_space(F: Field, K: Field | None = None) -> PairSpace:
    if K is None:
        K = build_field(F.p, 1)
    to_c, from_c = relative_coordinates(F, K)
    return PairSpace(F, K, VectorSpace(K, 2 * (F.m // K.m)), to_c, from_c)


@dataclass(frozen=True, eq=False)
class Spread:
    prequasifield: Prequasifield
    space: PairSpace
    group: FiniteGroup
    components: dict  # slope -> Subgroup, slopes 0..|F|-1 then INF

    def select(self, slopes: Sequence[Slope]) -> list[Subgroup]:
        out = []
        for s in slopes:
            key = INF if s in (INF, "∞") else int(s)
            if key not in self.components:
                raise SpreadError(f"no component with slope {s!r}")
            out.append(self.components[key])
        return out


def build_spread(Q: Prequasifield, K: Field | None = None) -> Spread:
    """Components x = 0 (slope INF) and y = m*x for every m in F."""
    F = Q.field
    ps = pair_space(F, K)
    G = as_group(ps.space)
    xs = np.arange(F.order)
    comps = {}
    for m in range(F.order):
        members = ps.pack(xs, Q.star[m])
        comps[m] = Subgroup(G, tuple(sorted(int(v) for v in members)))
    comps[INF] = Subgroup(G, tuple(sorted(int(v) for v in ps.pack(np.zeros_like(xs), xs))))
    return Spread(Q, ps, G, comps)


def _slope_sort_key(s):
    return (1, 0) if s == INF else (0, int(s))


@dataclass(frozen=True, eq=False)
class PartialSpreadPartition:
    G: FiniteGroup
    H: FiniteGroup
    sigma: tuple[Subgroup, ...]
    blocks: dict  # nonidentity element of H -> tuple of Subgroup
    labels: tuple | None = None  # slope (or other name) for each member of sigma

    @property
    def q(self) -> int:
        return self.H.order

    @property
    def N(self) -> int:
        return len(self.sigma) // (self.q - 1)

    def block_labels(self) -> dict:
        """h -> labels of the subgroups in block h (requires ``labels``)."""
        index = {id(S): i for i, S in enumerate(self.sigma)}
        return {h: [self.labels[index[id(S)]] for S in block] for h, block in self.blocks.items()}


def make_partition(sigma: Sequence[Subgroup], H: FiniteGroup, assignment="round-robin",
                   labels: Sequence | None = None) -> PartialSpreadPartition:
    """Partition ``sigma`` into blocks keyed by the nonidentity elements of H.

    ``assignment`` is "round-robin" (sort by label, deal into q-1 blocks), a
    list of index lists (block t goes to element t+1 of H), or a mapping from
    H-elements to index lists.
    """
    sigma = tuple(sigma)
    q = H.order
    if q < 2:
        raise SpreadError("H must have order >= 2")
    if not sigma:
        raise SpreadError("sigma is empty")
    G = sigma[0].parent
    if len(sigma) % (q - 1):
        raise SpreadError(f"|sigma| = {len(sigma)} is not a multiple of q-1 = {q - 1}")
    N = len(sigma) // (q - 1)
    if (q * N) ** 2 != G.order:
        raise SpreadError(f"|G| = {G.order} != (qN)^2 = {(q * N) ** 2}")
    for i, S in enumerate(sigma):
        if S.parent is not G and S.parent != G:
            raise SpreadError("subgroups have different parent groups")
        if S.order != q * N:
            raise SpreadError(f"subgroup {i} has order {S.order}, expected qN = {q * N}")
    if not pairwise_trivial_intersections(list(sigma)):
        i, j = next((i, j) for i, j in itertools.combinations(range(len(sigma)), 2)
                    if len(sigma[i].member_set & sigma[j].member_set) != 1)
        raise SpreadError(f"subgroups {i} and {j} intersect nontrivially")
    if labels is not None and len(labels) != len(sigma):
        raise SpreadError("one label per subgroup required")

    keys = list(range(1, q))
    if isinstance(assignment, str):
        if assignment != "round-robin":
            raise SpreadError(f"unknown assignment {assignment!r}")
        order = list(range(len(sigma)))
        if labels is not None:
            order.sort(key=lambda t: _slope_sort_key(labels[t]))
        index_blocks = {h: [] for h in keys}
        for t, i in enumerate(order):
            index_blocks[keys[t % (q - 1)]].append(i)
    elif isinstance(assignment, Mapping):
        index_blocks = {int(h): list(v) for h, v in assignment.items()}
    else:
        assignment = list(assignment)
        if len(assignment) != q - 1:
            raise SpreadError(f"need {q - 1} blocks, got {len(assignment)}")
        index_blocks = dict(zip(keys, (list(b) for b in assignment)))

    if sorted(index_blocks) != keys:
        raise SpreadError("blocks must be keyed by exactly the nonidentity elements of H")
    used = sorted(i for b in index_blocks.values() for i in b)
    if used != list(range(len(sigma))):
        raise SpreadError("blocks must partition sigma")
    for h, b in index_blocks.items():
        if len(b) != N:
            raise SpreadError(f"block {h} has {len(b)} subgroups, expected N = {N}")
    blocks = {h: tuple(sigma[i] for i in index_blocks[h]) for h in keys}
    return PartialSpreadPartition(G, H, sigma, blocks, tuple(labels) if labels is not None else None)


def spread_partition(Q: Prequasifield, slopes: Sequence[Slope], H: FiniteGroup,
                     assignment="round-robin", K: Field | None = None) -> PartialSpreadPartition:
    """Partition the spread components with the given slopes (convenience)."""
    spread = build_spread(Q, K)
    labels = [INF if s in (INF, "∞") else int(s) for s in slopes]
    return make_partition(spread.select(labels), H, assignment, labels=labels)
