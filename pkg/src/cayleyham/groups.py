"""Finite groups given by a cyclic normal subgroup extended by an abelian quotient.

A presentation consists of a distinguished cyclic subgroup ``<gamma>`` of
order ``m`` together with lifted quotient generators ``g_1..g_k`` subject to

    g_i^{e_i} = gamma^{t_i},   gamma^{g_i} = gamma^{r_i},
    [g_i, g_j] = gamma^{c_ij}   (i < j),

so every element has the unique normal form g_1^{a_1} .. g_k^{a_k} gamma^z.
The commutator subgroup always lies inside ``<gamma>``, which keeps derived
subgroups, quotients and cycle voltages exact integer arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from ._accel import assoc_all_triples, assoc_generator_triples


class InconsistentPresentation(ValueError):
    """The relations do not define a group (collection is not associative)."""


class UnknownSymbol(KeyError):
    """A walk step names a symbol absent from the generating set."""


class Element(NamedTuple):
    """Normal form: quotient exponent vector plus gamma exponent."""

    vec: tuple[int, ...]
    z: int

    def to_json(self) -> dict:
        return {"vec": list(self.vec), "z": self.z}

    @staticmethod
    def from_json(obj) -> "Element":
        return Element(tuple(int(x) for x in obj["vec"]), int(obj["z"]))


@dataclass(frozen=True)
class PcPresentation:
    """Relation data; see the module docstring for the relator shapes."""

    gamma_order: int
    quotient_orders: tuple[int, ...]
    power_tails: tuple[int, ...]
    action: tuple[int, ...]
    comm_tails: tuple[tuple[int, ...], ...]  # full k x k, entries used for i < j

    @staticmethod
    def make(m, orders, tails=None, action=None, comm=None) -> "PcPresentation":
        """comm may be a {(i, j): c_ij} dict (i < j) or a full k x k matrix."""
        k = len(orders)
        m = int(m)
        tails = tuple(int(t) for t in tails) if tails is not None else (0,) * k
        action = tuple(int(r) for r in action) if action is not None else (1,) * k
        cm = [[0] * k for _ in range(k)]
        if isinstance(comm, dict):
            for (i, j), v in comm.items():
                cm[i][j] = int(v) % max(m, 1)
        elif comm is not None:
            for i in range(k):
                for j in range(k):
                    cm[i][j] = int(comm[i][j]) % max(m, 1)
        return PcPresentation(
            m, tuple(int(e) for e in orders), tails, action,
            tuple(tuple(row) for row in cm),
        )

    def to_json(self) -> dict:
        return {
            "m": self.gamma_order,
            "e": list(self.quotient_orders),
            "t": list(self.power_tails),
            "r": list(self.action),
            "c": [list(row) for row in self.comm_tails],
        }

    @staticmethod
    def from_json(obj) -> "PcPresentation":
        return PcPresentation(
            int(obj["m"]),
            tuple(int(x) for x in obj["e"]),
            tuple(int(x) for x in obj["t"]),
            tuple(int(x) for x in obj["r"]),
            tuple(tuple(int(x) for x in row) for row in obj["c"]),
        )


def _structural_check(p: PcPresentation) -> None:
    m = p.gamma_order
    k = len(p.quotient_orders)
    if m < 1:
        raise InconsistentPresentation("gamma order must be positive")
    for e in p.quotient_orders:
        if e < 1:
            raise InconsistentPresentation("quotient orders must be positive")
    if not (len(p.power_tails) == len(p.action) == k):
        raise InconsistentPresentation("field lengths disagree")
    for t in p.power_tails:
        if not 0 <= t < max(m, 1):
            raise InconsistentPresentation("power tail out of range")
    for r in p.action:
        if math.gcd(r % m if m > 1 else 1, m) != 1:
            raise InconsistentPresentation("action must be a unit mod m")
    if len(p.comm_tails) != k or any(len(row) != k for row in p.comm_tails):
        raise InconsistentPresentation("comm matrix must be k x k")

    if m == 1:
        return
    e, t, r, c = p.quotient_orders, p.power_tails, p.action, p.comm_tails
    sig = [_geom_sums(r[i], e[i] + 1, m) for i in range(k)]
    for i in range(k):
        if pow(r[i], e[i], m) != 1:
            raise InconsistentPresentation(
                f"action {r[i]} has order not dividing {e[i]} mod {m}"
            )
        if (t[i] * (r[i] - 1)) % m:
            raise InconsistentPresentation("power tail not fixed by its own action")
    for i in range(k):
        for j in range(i + 1, k):
            if (t[i] * (r[j] - 1) - c[i][j] * sig[i][e[i]]) % m:
                raise InconsistentPresentation(f"power/comm overlap fails at ({i},{j})")
            if (t[j] * (r[i] - 1) + c[i][j] * sig[j][e[j]]) % m:
                raise InconsistentPresentation(f"power/comm overlap fails at ({j},{i})")
    for i in range(k):
        for j in range(i + 1, k):
            for l in range(j + 1, k):
                if (c[i][j] * (1 - r[l]) + c[i][l] * (r[j] - 1) + c[j][l] * (1 - r[i])) % m:
                    raise InconsistentPresentation(
                        f"comm relations incompatible at ({i},{j},{l})"
                    )


def _geom_sums(r: int, upto: int, m: int) -> list[int]:
    """sums[x] = 1 + r + ... + r^(x-1) mod m."""
    out = [0] * (upto + 1)
    p = 1
    for x in range(1, upto + 1):
        out[x] = (out[x - 1] + p) % m
        p = (p * r) % m
    return out


class PcGroup:
    """Group defined by a PcPresentation with collection-based multiplication."""

    def __init__(self, pres: PcPresentation):
        _structural_check(pres)
        self.pres = pres
        self.m = pres.gamma_order
        self.orders = pres.quotient_orders
        self.k = len(self.orders)
        self.order = self.m
        for e in self.orders:
            self.order *= e
        m = self.m
        lim = [2 * e + 1 for e in self.orders]
        self._pow = [
            [pow(pres.action[i], x, m) if m > 1 else 1 for x in range(lim[i])]
            for i in range(self.k)
        ]
        self._sig = [
            _geom_sums(pres.action[i], lim[i] - 1, m) if m > 1 else [0] * lim[i]
            for i in range(self.k)
        ]
        self.identity = Element((0,) * self.k, 0)
        self.gamma = Element((0,) * self.k, 1 % m) if m > 1 else self.identity
        self._table: np.ndarray | None = None
        self._center: tuple[Element, ...] | None = None

    # -- element arithmetic -------------------------------------------------

    def mul(self, x: Element, y: Element) -> Element:
        m = self.m
        v, zx = x
        w, zy = y
        if m == 1:
            return Element(
                tuple((v[i] + w[i]) % self.orders[i] for i in range(self.k)), 0
            )
        pres = self.pres
        Z = zx
        for l in range(self.k):
            if w[l]:
                Z = (Z * self._pow[l][w[l]]) % m
        Z = (Z + zy) % m
        s = []
        for i in range(self.k):
            if w[i] and i + 1 < self.k:
                D = 0
                mult = 1
                for j in range(self.k - 1, i, -1):
                    cij = pres.comm_tails[i][j]
                    if cij and v[j]:
                        D = (D + (m - cij) * self._sig[j][v[j]] % m * mult) % m
                    mult = (mult * self._pow[j][v[j]]) % m
                if D:
                    D = (D * self._sig[i][w[i]]) % m
                    rho = 1
                    for l in range(i + 1, self.k):
                        rho = (rho * self._pow[l][w[l]]) % m
                    Z = (Z + D * rho) % m
            si = v[i] + w[i]
            if si >= self.orders[i]:
                si -= self.orders[i]
                ti = pres.power_tails[i]
                if ti:
                    mult = 1
                    for l in range(i + 1, self.k):
                        mult = (mult * self._pow[l][v[l] + w[l]]) % m
                    Z = (Z + ti * mult) % m
            s.append(si)
        return Element(tuple(s), Z)

    def inv(self, x: Element) -> Element:
        w = tuple((-a) % e for a, e in zip(x.vec, self.orders))
        z0 = self.mul(x, Element(w, 0)).z
        return Element(w, (-z0) % self.m if self.m > 1 else 0)

    def pow(self, x: Element, n: int) -> Element:
        if n < 0:
            return self.pow(self.inv(x), -n)
        acc = self.identity
        base = x
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc

    def conj(self, x: Element, g: Element) -> Element:
        """g^-1 x g."""
        return self.mul(self.mul(self.inv(g), x), g)

    def comm(self, x: Element, y: Element) -> Element:
        """x^-1 y^-1 x y."""
        return self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))

    def element_order(self, x: Element) -> int:
        n = 1
        acc = x
        while acc != self.identity:
            acc = self.mul(acc, x)
            n += 1
        return n

    def gamma_power(self, j: int) -> Element:
        return Element((0,) * self.k, j % self.m if self.m > 1 else 0)

    # -- indexing and enumeration -------------------------------------------

    def index(self, x: Element) -> int:
        idx = 0
        for a, e in zip(x.vec, self.orders):
            idx = idx * e + a
        return idx * self.m + x.z

    def unindex(self, idx: int) -> Element:
        idx, z = divmod(idx, self.m)
        vec = [0] * self.k
        for i in range(self.k - 1, -1, -1):
            idx, vec[i] = divmod(idx, self.orders[i])
        return Element(tuple(vec), z)

    def elements(self) -> Iterator[Element]:
        for idx in range(self.order):
            yield self.unindex(idx)

    # -- bulk table construction (vectorised collection) ---------------------

    def mul_many(self, V, Zx, W, Zy):
        """Vectorised mul on integer arrays; V/W have trailing axis k."""
        m = self.m
        k = self.k
        if m == 1:
            s = (V + W) % np.array(self.orders, dtype=np.int64)
            return s, np.zeros(np.broadcast(Zx, Zy).shape, dtype=np.int64)
        pw = [np.array(p, dtype=np.int64) for p in self._pow]
        sg = [np.array(s, dtype=np.int64) for s in self._sig]
        t = self.pres.power_tails
        c = self.pres.comm_tails
        Z = Zx % m
        for l in range(k):
            Z = Z * pw[l][W[..., l]] % m
        Z = (Z + Zy) % m
        S = np.empty(np.broadcast(V[..., 0], W[..., 0]).shape + (k,), dtype=np.int64)
        for i in range(k):
            if i + 1 < k:
                D = np.zeros_like(Z)
                mult = np.ones_like(Z)
                for j in range(k - 1, i, -1):
                    if c[i][j]:
                        D = (D + (m - c[i][j]) * sg[j][V[..., j]] % m * mult) % m
                    mult = mult * pw[j][V[..., j]] % m
                D = D * sg[i][W[..., i]] % m
                rho = np.ones_like(Z)
                for l in range(i + 1, k):
                    rho = rho * pw[l][W[..., l]] % m
                Z = (Z + D * rho) % m
            si = V[..., i] + W[..., i]
            over = si >= self.orders[i]
            si = np.where(over, si - self.orders[i], si)
            if t[i]:
                mult = np.ones_like(Z)
                for l in range(i + 1, k):
                    mult = mult * pw[l][V[..., l] + W[..., l]] % m
                Z = np.where(over, (Z + t[i] * mult) % m, Z)
            S[..., i] = si
        return S, Z

    def _index_arrays(self, S, Z):
        idx = np.zeros_like(Z)
        for i in range(self.k):
            idx = idx * self.orders[i] + S[..., i]
        return idx * self.m + Z

    def table(self) -> np.ndarray:
        """Full multiplication table on element indices (built once)."""
        if self._table is None:
            n = self.order
            V = np.empty((n, self.k), dtype=np.int64)
            Zc = np.empty(n, dtype=np.int64)
            for idx in range(n):
                el = self.unindex(idx)
                V[idx] = el.vec
                Zc[idx] = el.z
            T = np.empty((n, n), dtype=np.int64)
            chunk = max(1, (1 << 22) // max(n, 1))
            for lo in range(0, n, chunk):
                hi = min(n, lo + chunk)
                S, Z = self.mul_many(
                    V[lo:hi, None, :], Zc[lo:hi, None], V[None, :, :], Zc[None, :]
                )
                T[lo:hi] = self._index_arrays(S, Z)
            self._table = T
        return self._table

    # -- structure ------------------------------------------------------------

    def derived_exponent(self) -> int:
        """d with [G,G] = <gamma^d> (d = m means trivial)."""
        if self.m == 1:
            return 1
        vals = [self.m]
        for r in self.pres.action:
            vals.append(r - 1)
        for i in range(self.k):
            for j in range(i + 1, self.k):
                vals.append(self.pres.comm_tails[i][j])
        return math.gcd(*vals) if len(vals) > 1 else self.m

    def derived_order(self) -> int:
        return self.m // self.derived_exponent()

    def is_nilpotent(self) -> bool:
        """Lower central series: [G, <gamma^x>] = <gamma^gcd(m, x*(r_i - 1))>."""
        if self.m == 1:
            return True
        gr = math.gcd(self.m, *[r - 1 for r in self.pres.action]) if self.k else self.m
        x = self.derived_exponent()
        while True:
            nxt = math.gcd(self.m, x * gr)
            if nxt == self.m:
                return True
            if nxt == x:
                return False
            x = nxt

    def center(self) -> tuple[Element, ...]:
        if self._center is None:
            gens = [Element(tuple(1 if j == i else 0 for j in range(self.k)), 0)
                    for i in range(self.k)]
            if self.m > 1:
                gens.append(self.gamma)
            out = []
            for x in self.elements():
                if all(self.mul(x, g) == self.mul(g, x) for g in gens):
                    out.append(x)
            self._center = tuple(out)
        return self._center

    def exponent(self) -> int:
        ex = 1
        for x in self.elements():
            ex = math.lcm(ex, self.element_order(x))
        return ex

    def quotient_by_gamma(self, j: int) -> tuple["PcGroup", int]:
        """Quotient by <gamma^j>; returns (G/N, d) where d = gcd(j, m) is the
        new gamma order and elements project by z -> z mod d."""
        d = math.gcd(j, self.m)
        p = self.pres
        q = PcPresentation(
            d,
            p.quotient_orders,
            tuple(t % d if d > 1 else 0 for t in p.power_tails),
            tuple(r % d if d > 1 else 1 for r in p.action),
            tuple(tuple(x % d if d > 1 else 0 for x in row) for row in p.comm_tails),
        )
        return PcGroup(q), d

    def project_mod_gamma(self, x: Element, d: int) -> Element:
        return Element(x.vec, x.z % d if d > 1 else 0)


def make_group(
    pres: PcPresentation,
    *,
    assoc_exhaustive_limit: int = 350,
    assoc_table_limit: int = 4000,
    random_triples: int = 512,
) -> PcGroup:
    """Build a PcGroup, rejecting inconsistent presentations.

    The closed-form relation checks are always run.  Below
    ``assoc_exhaustive_limit`` associativity is additionally verified on all
    |G|^3 triples; up to ``assoc_table_limit`` on all generator triples
    (Light's test, which is equivalent to full associativity); above that on
    ``random_triples`` deterministic samples.
    """
    G = PcGroup(pres)
    n = G.order
    if n <= assoc_table_limit:
        T = G.table()
        gcols = [G.index(Element(tuple(1 if j == i else 0 for j in range(G.k)), 0))
                 for i in range(G.k)]
        if G.m > 1:
            gcols.append(G.index(G.gamma))
        if n <= assoc_exhaustive_limit:
            ok = assoc_all_triples(T)
        else:
            ok = assoc_generator_triples(T, np.array(gcols, dtype=np.int64))
        if not ok:
            raise InconsistentPresentation("associativity check failed")
    else:
        rng = np.random.default_rng(n)
        for _ in range(random_triples):
            x, y, z = (G.unindex(int(i)) for i in rng.integers(0, n, 3))
            if G.mul(G.mul(x, y), z) != G.mul(x, G.mul(y, z)):
                raise InconsistentPresentation("associativity check failed (sampled)")
    return G


# -- generating sets ---------------------------------------------------------


class GenSet:
    """Named connection set; symbols resolve with either sign."""

    def __init__(self, group, mapping: dict[str, Element]):
        self.group = group
        self.names = tuple(mapping)
        self.elements = dict(mapping)
        self._inv = {n: group.inv(e) for n, e in mapping.items()}

    def resolve(self, name: str, sign: int = 1) -> Element:
        try:
            return self.elements[name] if sign >= 0 else self._inv[name]
        except KeyError:
            raise UnknownSymbol(name) from None

    def signed_symbols(self) -> list[tuple[str, int]]:
        out = []
        for n in self.names:
            out.append((n, 1))
        for n in self.names:
            out.append((n, -1))
        return out

    def subset(self, names: Iterable[str]) -> "GenSet":
        return GenSet(self.group, {n: self.elements[n] for n in names})

    def map_into(self, group, fn) -> "GenSet":
        """Same names, elements pushed through fn (e.g. a projection)."""
        return GenSet(group, {n: fn(e) for n, e in self.elements.items()})

    def to_json(self) -> dict:
        return {n: self.elements[n].to_json() for n in self.names}

    @staticmethod
    def from_json(group, obj) -> "GenSet":
        return GenSet(group, {n: Element.from_json(v) for n, v in obj.items()})


def closure(group, gens: Sequence[Element]) -> set[Element]:
    """Subgroup generated by gens (orbit of identity under right multiplication)."""
    seen = {group.identity}
    frontier = [group.identity]
    gens = list(gens) + [group.inv(g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def generates(group, gens: Sequence[Element]) -> bool:
    return len(closure(group, gens)) == group.order


class Subgroup:
    """Member set (sorted) plus the generators it was built from."""

    def __init__(self, members: Iterable[Element], gens: Sequence[Element]):
        self.members = tuple(sorted(set(members)))
        self.gens = tuple(gens)
        self._set = frozenset(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x: Element) -> bool:
        return x in self._set

    def issubset(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self._set == other._set

    def __hash__(self):
        return hash(self._set)


def subgroup(group, gens: Sequence[Element]) -> Subgroup:
    return Subgroup(closure(group, gens), tuple(gens))


def derived_subgroup(G: PcGroup) -> Subgroup:
    """[G, G] = <gamma^d> with d from the relation data."""
    d = G.derived_exponent()
    n = G.m // d
    members = tuple(sorted(G.gamma_power(d * j) for j in range(n)))
    return Subgroup(members, (G.gamma_power(d),))


# -- generic subquotients ----------------------------------------------------


class SubgroupView:
    """A subgroup of a parent group, reusing the parent's elements and mul."""

    def __init__(self, parent, members: Iterable[Element]):
        self._members = tuple(sorted(set(members)))
        self.parent = parent
        self.order = len(self._members)
        self.identity = parent.identity
        self.mul = parent.mul
        self.inv = parent.inv

    def elements(self):
        return iter(self._members)

    def conj(self, x, g):
        return self.parent.conj(x, g)

    def comm(self, x, y):
        return self.parent.comm(x, y)

    def element_order(self, x):
        return self.parent.element_order(x)


class CosetQuotient:
    """Quotient of a group by a normal subgroup, via canonical coset reps."""

    def __init__(self, parent, normal_members: Iterable[Element]):
        N = sorted(set(normal_members))
        self.parent = parent
        nset = frozenset(N)
        rep: dict[Element, Element] = {}
        for x in parent.elements():
            if x in rep:
                continue
            cos = sorted(parent.mul(x, h) for h in N)
            r = cos[0]
            for y in cos:
                rep[y] = r
        self._rep = rep
        self._members = tuple(sorted(set(rep.values())))
        self.order = len(self._members)
        self.identity = rep[parent.identity]
        # conjugating by coset reps suffices: N is closed under its own conjugation
        for h in N:
            for g in self._members:
                if parent.conj(h, g) not in nset:
                    raise ValueError("subgroup is not normal in parent")

    def project(self, x: Element) -> Element:
        return self._rep[x]

    def mul(self, x, y):
        return self._rep[self.parent.mul(x, y)]

    def inv(self, x):
        return self._rep[self.parent.inv(x)]

    def elements(self):
        return iter(self._members)

    def element_order(self, x):
        n = 1
        acc = x
        while acc != self.identity:
            acc = self.mul(acc, x)
            n += 1
        return n


# -- structural predicates ---------------------------------------------------


@dataclass(frozen=True)
class SymbolReport:
    name: str
    in_derived: bool
    derived_in_cyclic: bool
    centralizer_in_derived: int
    quotient_order: int


@dataclass(frozen=True)
class PredicateReport:
    order: int
    odd: bool
    derived_order: int
    derived_cyclic: bool
    derived_primes: tuple[tuple[int, int], ...]
    two_prime_power: bool
    nilpotent: bool
    exponent: int | None
    order27_nonabelian_quotient: bool
    symbols: tuple[SymbolReport, ...]


def factorize(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def structural_predicates(G: PcGroup, S: GenSet, *, exponent_limit: int = 2200) -> PredicateReport:
    Gp = derived_subgroup(G)
    d = G.derived_exponent()
    primes = factorize(Gp.order)
    # is G/(G')^3 the nonabelian group of order 27?
    o27 = False
    if Gp.order % 3 == 0:
        cubes = math.gcd(3 * d, G.m)
        Q, _ = G.quotient_by_gamma(cubes)
        if Q.order == 27 and Q.derived_order() > 1:
            o27 = True
    sym = []
    for name in S.names:
        s = S.elements[name]
        cyc = closure(G, [s])
        cent = sum(1 for h in Gp.members if G.mul(s, h) == G.mul(h, s))
        # order of the image of s in G/[G,G]
        qord = 1
        acc = s
        while acc not in Gp:
            acc = G.mul(acc, s)
            qord += 1
        sym.append(
            SymbolReport(
                name=name,
                in_derived=s in Gp,
                derived_in_cyclic=all(h in cyc for h in Gp.members),
                centralizer_in_derived=cent,
                quotient_order=qord,
            )
        )
    return PredicateReport(
        order=G.order,
        odd=G.order % 2 == 1,
        derived_order=Gp.order,
        derived_cyclic=True,
        derived_primes=primes,
        two_prime_power=len(primes) <= 2,
        nilpotent=G.is_nilpotent(),
        exponent=G.exponent() if G.order <= exponent_limit else None,
        order27_nonabelian_quotient=o27,
        symbols=tuple(sym),
    )


# -- instance (presentation + generating set) serialization ------------------


def instance_to_json(G: PcGroup, S: GenSet) -> dict:
    return {"presentation": G.pres.to_json(), "gens": S.to_json()}


def instance_from_json(obj, **make_kwargs) -> tuple[PcGroup, GenSet]:
    G = make_group(PcPresentation.from_json(obj["presentation"]), **make_kwargs)
    S = GenSet.from_json(G, obj["gens"])
    return G, S


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
