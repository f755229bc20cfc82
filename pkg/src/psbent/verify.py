"""Exact verifiers: bentness (two ways), counting formulas, RDSs, association schemes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .algebra import CyclotomicInt, Field, LinearFunctional, VectorSpace, is_nondegenerate, is_prime, trace_functional
from .construct import DSets, FunctionTable, to_vector_function
from .groups import MAX_VERIFY_ORDER, FiniteGroup, ProductGroup, Subgroup, as_group


class VerifyError(ValueError):
    pass


@dataclass
class BentReport:
    bent: bool
    method: str
    witnesses: list = dc_field(default_factory=list)
    details: dict = dc_field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "bent" if self.bent else "not-bent"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "method": self.method,
                "witnesses": self.witnesses, "params": self.details}


def _check_size(order):
    if order > MAX_VERIFY_ORDER:
        raise VerifyError(f"order {order} exceeds the exhaustive verification limit {MAX_VERIFY_ORDER}")


# -- combinatorial bentness ------------------------------------------------------------

def difference_histograms(f: FunctionTable):
    """Yield (z, counts) for z != 1, counts[h] = #{x : f(xz) f(x)^-1 = h}."""
    G, H = as_group(f.domain), as_group(f.codomain)
    x = np.arange(G.order)
    inv_vals = H.inv(f.values)
    for z in range(1, G.order):
        diffs = H.mul(f.values[G.mul(x, z)], inv_vals)
        yield z, np.bincount(np.asarray(diffs), minlength=H.order)


def verify_bent_combinatorial(f: FunctionTable) -> BentReport:
    """Every derivative x -> f(xz) f(x)^-1, z != 1, takes each value |G|/|H| times."""
    G, H = as_group(f.domain), as_group(f.codomain)
    _check_size(G.order)
    if G.order % H.order:
        raise VerifyError(f"|H| = {H.order} does not divide |G| = {G.order}")
    target = G.order // H.order
    for z, counts in difference_histograms(f):
        if np.any(counts != target):
            return BentReport(False, "combinatorial",
                              [{"z": z, "histogram": counts.tolist()}],
                              {"expected_count": target})
    return BentReport(True, "combinatorial", [],
                      {"expected_count": target, "derivatives_checked": G.order - 1})


# -- Fourier bentness -----------------------------------------------------------------

def _vector_function(f: FunctionTable) -> FunctionTable:
    if isinstance(f.domain, VectorSpace) and isinstance(f.codomain, Field):
        return f
    return to_vector_function(f)


def _setup(f, T, gram):
    f = _vector_function(f)
    V, K = f.domain, f.codomain
    if V.field != K:
        raise VerifyError("domain must be a vector space over the codomain field")
    if T is None:
        T = trace_functional(K)
    elif T.field != K:
        raise VerifyError("functional must be defined on the codomain field")
    if gram is not None and not is_nondegenerate(K, gram):
        raise VerifyError("dot product matrix is singular")
    return f, V, K, T


def walsh_spectrum(f: FunctionTable, k: int, T: LinearFunctional | None = None,
                   gram=None, us=None) -> list[CyclotomicInt]:
    """Exact sum_v zeta**T(u.v + k f(v)) for each u (default: all of V)."""
    f, V, K, T = _setup(f, T, gram)
    if k == 0:
        raise VerifyError("k must be nonzero")
    _check_size(V.order)
    p = K.p
    us = np.arange(V.order) if us is None else np.atleast_1d(np.asarray(us))
    kf = K.mul_table[k, f.values]
    out = []
    for start in range(0, len(us), 256):
        chunk = us[start:start + 256]
        expo = T.table[K.add_table[V.dot_rows(chunk, gram), kf[None, :]]]
        rows = np.arange(len(chunk))[:, None]
        counts = np.bincount((expo + p * rows).ravel(), minlength=p * len(chunk)).reshape(-1, p)
        out.extend(CyclotomicInt.from_exponent_counts(p, c.tolist()) for c in counts)
    return out


def walsh_transform(f: FunctionTable, k: int, u: int, T: LinearFunctional | None = None,
                    gram=None) -> CyclotomicInt:
    return walsh_spectrum(f, k, T, gram, us=[u])[0]


def norm_squared(c: CyclotomicInt):
    """|c|**2 as an int when rational, else the cyclotomic value itself."""
    n = (c * c.conj()).as_rational_integer()
    return n if n is not None else c * c.conj()


def verify_bent_fourier(f: FunctionTable, T: LinearFunctional | None = None, gram=None) -> BentReport:
    """|f_k^(u)|**2 == |V| exactly for every k in K* and u in V."""
    f, V, K, T = _setup(f, T, gram)
    _check_size(V.order)
    for k in range(1, K.order):
        for u, c in enumerate(walsh_spectrum(f, k, T, gram)):
            n2 = norm_squared(c)
            if n2 != V.order:
                shown = n2 if isinstance(n2, int) else list(n2.coords)
                return BentReport(False, "fourier",
                                  [{"k": k, "u": u, "norm_squared": shown,
                                    "value": list(c.coords)}],
                                  {"expected_norm_squared": V.order})
    details = {"expected_norm_squared": V.order, "coefficients_checked": (K.order - 1) * V.order}
    if K.p == 2 and K.order == 2:
        details["walsh_values"] = sorted({c.coords[0] for c in walsh_spectrum(f, 1, T, gram)})
    return BentReport(True, "fourier", [], details)


def parseval_sum(f: FunctionTable, k: int, T: LinearFunctional | None = None, gram=None) -> int:
    total = None
    for c in walsh_spectrum(f, k, T, gram):
        sq = c * c.conj()
        total = sq if total is None else total + sq
    n = total.as_rational_integer()
    if n is None:  # pragma: no cover - Parseval forbids this
        raise VerifyError("Parseval sum is not rational")
    return n


# -- counting formulas -----------------------------------------------------------------

def intersection_count_formula(i: int, j: int, k: int, q: int, N: int, identity: int = 0) -> int:
    """Predicted |(D_i z^-1) & D_j| when z lies in D_k."""
    if q < 2 or N < 1:
        raise VerifyError("need q >= 2 and N >= 1")

    def d(a, b):
        return int(a == b)

    one = identity
    if i != one and j != one:
        if i != j:
            return (N - d(i, k)) * (N - d(j, k))
        return (N - d(i, k)) * (N - d(i, k) - 1) + (q * N - 2) * d(i, k)
    if i == one and j == one:
        return (N + 1 - d(one, k)) * (N - d(one, k)) + d(one, k) * q * N
    other = j if i == one else i
    return (N + 1 - d(one, k)) * (N - d(other, k)) + d(other, k)


def count_matrix(D: DSets, z: int) -> np.ndarray:
    """M[i, j] = |(D_i z^-1) & D_j| = #{x in D_j : xz in D_i}."""
    if z == 0:
        raise VerifyError("z must not be the identity")
    q = D.H.order
    x = np.arange(D.G.order)
    codes = D.labels[D.G.mul(x, z)] * q + D.labels
    return np.bincount(codes, minlength=q * q).reshape(q, q)


def intersection_count_bruteforce(D: DSets, z: int, i: int, j: int) -> int:
    return int(count_matrix(D, z)[i, j])


def goal_sum(D: DSets, z: int, b: int) -> int:
    """Sum of |(D_c z^-1) & D_d| over c d^-1 = b."""
    H = D.H
    M = count_matrix(D, z)
    total = 0
    for c in range(H.order):
        for d in range(H.order):
            if int(H.mul(c, H.inv(d))) == b:
                total += int(M[c, d])
    return total


@dataclass
class CountReport:
    ok: bool
    q: int
    N: int
    cases_checked: int
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"verdict": "pass" if self.ok else "fail", "method": "counts",
                "witnesses": [self.witness] if self.witness else [],
                "params": {"q": self.q, "N": self.N, "cases_checked": self.cases_checked,
                           "goal": self.q * self.N ** 2}}


def verify_counts(D: DSets, q: int | None = None, N: int | None = None) -> CountReport:
    """Compare every formula prediction and goal sum with brute force."""
    G, H = D.G, D.H
    q = H.order if q is None else q
    if N is None:
        root = math.isqrt(G.order)
        if root * root != G.order or root % q:
            raise VerifyError(f"|G| = {G.order} is not (qN)^2 for q = {q}")
        N = root // q
    cases = 0
    goal = q * N * N
    for z in range(1, G.order):
        k = D.label_of(z)
        M = count_matrix(D, z)
        for i in range(q):
            for j in range(q):
                cases += 1
                predicted = intersection_count_formula(i, j, k, q, N)
                if predicted != M[i, j]:
                    return CountReport(False, q, N, cases, {
                        "z": z, "i": i, "j": j, "k": k,
                        "formula": predicted, "bruteforce": int(M[i, j])})
        for b in range(q):
            s = sum(int(M[c, d]) for c in range(q) for d in range(q)
                    if int(H.mul(c, H.inv(d))) == b)
            if s != goal:
                return CountReport(False, q, N, cases, {"z": z, "b": b, "goal_sum": s, "expected": goal})
    return CountReport(True, q, N, cases)


# -- relative difference sets ------------------------------------------------------------

@dataclass(frozen=True)
class RDSParams:
    m: int        # |ambient| / |forbidden|
    n: int        # |forbidden|
    k: int        # |D|
    lam: int

    def __post_init__(self):
        if self.k * (self.k - 1) != self.lam * (self.m * self.n - self.n):
            raise VerifyError(f"k(k-1) != lambda(mn - n) for {self.as_tuple()}")

    def as_tuple(self):
        return (self.m, self.n, self.k, self.lam)


@dataclass(frozen=True, eq=False)
class GraphSet:
    """{(x, f(x))} inside G x H, forbidden subgroup 1 x H."""

    ambient: ProductGroup
    members: tuple
    forbidden: Subgroup


@dataclass
class RDSReport:
    ok: bool
    params: RDSParams | None = None
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"verdict": "pass" if self.ok else "fail", "method": "rds",
                "witnesses": [self.witness] if self.witness else [],
                "params": list(self.params.as_tuple()) if self.params else None}


def build_relative_difference_set(f: FunctionTable) -> GraphSet:
    G, H = as_group(f.domain), as_group(f.codomain)
    amb = ProductGroup(G, H)
    members = tuple(int(amb.pair(x, int(f.values[x]))) for x in range(G.order))
    forbidden = Subgroup(amb, tuple(range(H.order)))  # (1, h) is numbered h
    return GraphSet(amb, members, forbidden)


def verify_rds(D, ambient: FiniteGroup, forbidden: Subgroup) -> RDSReport:
    """Count d1 d2^-1 over ordered pairs d1 != d2 of D."""
    D = np.array(sorted(set(int(d) for d in D)))
    n, N = forbidden.order, ambient.order
    if N % n:
        raise VerifyError("forbidden subgroup order must divide the ambient order")
    diffs = np.asarray(ambient.mul(D[:, None], ambient.inv(D)[None, :]))
    off_diag = ~np.eye(len(D), dtype=bool)
    counts = np.bincount(diffs[off_diag].ravel(), minlength=N)
    in_forb = np.zeros(N, dtype=bool)
    in_forb[list(forbidden.members)] = True
    in_forb[0] = False
    hits = np.nonzero(in_forb & (counts > 0))[0]
    if len(hits):
        g = int(hits[0])
        return RDSReport(False, witness={"element": g, "count": int(counts[g]), "reason": "forbidden"})
    outside = np.nonzero(~np.isin(np.arange(N), forbidden.members))[0]
    if not len(outside):
        return RDSReport(False, witness={"reason": "forbidden subgroup is the whole group"})
    lam = int(counts[outside[0]])
    bad = outside[counts[outside] != lam]
    if len(bad):
        g = int(bad[0])
        return RDSReport(False, witness={"element": g, "count": int(counts[g]), "expected": lam,
                                         "reason": "nonuniform"})
    return RDSReport(True, RDSParams(N // n, n, len(D), lam))


# -- association schemes ---------------------------------------------------------------

@dataclass
class SchemeReport:
    ok: bool
    classes: list                      # (name, number of pairs)
    intersection_numbers: list | None = None   # [i][j][k]
    transpose: list | None = None
    commutative: bool | None = None
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"verdict": "pass" if self.ok else "fail", "method": "scheme",
                "witnesses": [self.witness] if self.witness else [],
                "params": {"classes": self.classes,
                           "intersection_numbers": self.intersection_numbers,
                           "transpose": self.transpose,
                           "commutative": self.commutative}}


def relation_matrix(D: DSets) -> tuple[np.ndarray, list]:
    """L[x, y] = class of (x, y): 0 on the diagonal, else 1 + position of the
    nonempty D-set containing x y^-1."""
    G = D.G
    x = np.arange(G.order)
    quotient = np.asarray(G.mul(x[:, None], G.inv(x)[None, :]))
    lab = D.labels.copy()
    used = [h for h in range(D.H.order) if np.any(np.delete(lab, 0) == h)]
    position = {h: t + 1 for t, h in enumerate(used)}
    remap = np.array([position.get(h, -1) for h in range(D.H.order)])
    L = remap[lab[quotient]]
    np.fill_diagonal(L, 0)
    names = ["diagonal"] + [f"D_{h}" for h in used]
    return L, names


def verify_association_scheme(D: DSets, G: FiniteGroup | None = None) -> SchemeReport:
    if G is not None and G.order != D.G.order:
        raise VerifyError("D-sets do not partition G")
    _check_size(D.G.order)
    L, names = relation_matrix(D)
    r = len(names)
    classes = [[name, int(np.sum(L == c))] for c, name in enumerate(names)]
    transpose = []
    for c in range(r):
        images = np.unique(L.T[L == c])
        if len(images) != 1:
            xs, ys = np.nonzero(L == c)
            for x, y in zip(xs, ys):
                if L[y, x] != L[xs[0], ys[0]]:
                    return SchemeReport(False, classes, witness={
                        "reason": "transpose", "class": c,
                        "pairs": [[int(xs[0]), int(ys[0])], [int(x), int(y)]]})
        transpose.append(int(images[0]))
    A = [(L == c).astype(np.int64) for c in range(r)]
    tensor = [[[0] * r for _ in range(r)] for _ in range(r)]
    for i in range(r):
        for j in range(r):
            P = A[i] @ A[j]
            for k in range(r):
                vals = P[L == k]
                if np.any(vals != vals[0]):
                    xs, ys = np.nonzero(L == k)
                    t = int(np.nonzero(vals != vals[0])[0][0])
                    return SchemeReport(False, classes, witness={
                        "reason": "intersection_number", "i": i, "j": j, "k": k,
                        "pairs": [[int(xs[0]), int(ys[0])], [int(xs[t]), int(ys[t])]],
                        "counts": [int(vals[0]), int(vals[t])]})
                tensor[i][j][k] = int(vals[0])
    commutative = all(np.array_equal(A[i] @ A[j], A[j] @ A[i]) for i in range(r) for j in range(i))
    return SchemeReport(True, classes, tensor, transpose, commutative)


# -- counting bounds -----------------------------------------------------------------------

@dataclass
class InequivalenceBounds:
    p: int
    m: int
    s: int
    binomial: int
    power: int
    binomial_ge_power: bool
    corollary_exponent: int
    corollary: int | None
    remark4: int
    rds_params: tuple

    @property
    def corollary_vacuous(self) -> bool:
        return self.corollary is None

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "s": self.s,
                "binomial": self.binomial,
                "binomial_ge_power": self.binomial_ge_power,
                "power": self.power,
                "corollary": "vacuous" if self.corollary is None else self.corollary,
                "corollary_exponent": self.corollary_exponent,
                "remark4": self.remark4,
                "rds_params": list(self.rds_params)}


def remark4_bound(p: int, m: int, q: int | None = None) -> int:
    """floor(C(q^m+1, q^(m-1)) / (2 (q^m+1) q^m (q^m-1)^2 log_p q^m))."""
    q = p if q is None else q
    t = round(math.log(q, p))
    if p ** t != q:
        raise VerifyError(f"q = {q} is not a power of p = {p}")
    Q = q ** m
    value = Fraction(math.comb(Q + 1, q ** (m - 1)), 2 * (Q + 1) * Q * (Q - 1) ** 2 * m * t)
    return math.floor(value)


def inequivalence_bounds(p: int, m: int, s: int = 1) -> InequivalenceBounds:
    if not is_prime(p):
        raise VerifyError(f"{p} is not prime")
    if not m >= s >= 1:
        raise VerifyError("need m >= s >= 1")
    binomial = math.comb(p ** m + 1, p ** (m - 1))
    power = p ** (p ** (m - 1))
    exponent = p ** (m - 1) - 9 * m * m
    return InequivalenceBounds(
        p, m, s, binomial, power, binomial >= power, exponent,
        p ** exponent if exponent >= 0 else None,
        remark4_bound(p, m),
        (p ** (2 * m), p ** s, p ** (2 * m), p ** (2 * m - s)))
