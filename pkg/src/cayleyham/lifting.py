"""Quotient machinery: cyclic-kernel quotient maps, the factor-group lift,
square-free voltage reduction, and assembly of full hamiltonian cycles from
families of quotient cycles with controllable voltages (Marusic's method)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .cayley import (
    CayleyGraph,
    NotAHamiltonianCycle,
    Step,
    WalkSpec,
    assert_hamiltonian,
    is_hamiltonian_cycle,
    run,
    seq,
    step_product,
    vertex_sequence,
    voltage,
)
from .groups import CosetQuotient, Element, GenSet, PcGroup, closure, factorize


class VoltageDoesNotGenerate(ValueError):
    """The quotient cycle's voltage generates a proper subgroup of the kernel."""


class NoCycleWorks(ValueError):
    """No cycle in the family has a generating corrected voltage."""


class WrongFamilySize(ValueError):
    pass


class AssemblyFailed(ValueError):
    """The coset-grid assembly could not produce a generating voltage."""


@dataclass(frozen=True)
class QuotientMap:
    """G -> G/N for N = <gamma^d>; projection drops gamma exponents mod d."""

    source: PcGroup
    gens_source: GenSet
    d: int  # N = <gamma^d>
    quotient: PcGroup
    gens_quotient: GenSet

    @property
    def n_order(self) -> int:
        return self.source.m // self.d

    @property
    def n_generator(self) -> Element:
        return self.source.gamma_power(self.d)

    @property
    def quotient_graph(self) -> CayleyGraph:
        return CayleyGraph(self.quotient, self.gens_quotient)

    def project(self, x: Element) -> Element:
        return self.source.project_mod_gamma(x, self.d)

    def lift(self, x: Element) -> Element:
        return Element(x.vec, x.z)

    def contains(self, x: Element) -> bool:
        """Membership in N."""
        return all(a == 0 for a in x.vec) and x.z % self.d == 0

    def generates_kernel(self, x: Element) -> bool:
        if not self.contains(x):
            return False
        if self.n_order == 1:
            return True
        return math.gcd(x.z if x.z else self.source.m, self.source.m) == self.d


def quotient_map(G: PcGroup, S: GenSet, n_exponent: int) -> QuotientMap:
    """Quotient by the cyclic normal subgroup <gamma^n_exponent>."""
    d = math.gcd(n_exponent, G.m)
    Q, _ = G.quotient_by_gamma(d)
    proj = lambda e: G.project_mod_gamma(e, d)
    Sq = S.map_into(Q, proj)
    # projection must be a homomorphism on generator pairs
    for a in S.names:
        for b in S.names:
            x = proj(G.mul(S.elements[a], S.elements[b]))
            y = Q.mul(Sq.elements[a], Sq.elements[b])
            if x != y:
                raise RuntimeError("projection is not a homomorphism")
    # N must be normal: conjugates of gamma^d stay inside <gamma^d>
    n_gen = G.gamma_power(d)
    for a in S.names:
        c = G.conj(n_gen, S.elements[a])
        if any(c.vec) or (G.m > 1 and c.z % d):
            raise RuntimeError("kernel subgroup is not normal")
    assert G.order == (G.m // d) * Q.order
    return QuotientMap(G, S, d, Q, Sq)


def derived_quotient_map(G: PcGroup, S: GenSet) -> QuotientMap:
    """G -> G/[G,G]."""
    return quotient_map(G, S, G.derived_exponent())


def factor_group_lift(qmap: QuotientMap, cycle: WalkSpec) -> WalkSpec:
    """Lift a quotient hamiltonian cycle whose voltage generates the kernel.

    The lifted walk repeats the cycle's steps n_order times and is verified
    hamiltonian in the source graph before being returned.
    """
    v = voltage(qmap, cycle)
    if not qmap.generates_kernel(v):
        raise VoltageDoesNotGenerate(
            f"voltage gamma^{v.z} generates a proper subgroup of the kernel"
        )
    lifted = WalkSpec(
        cycle.steps,
        qmap.lift(cycle.start) if cycle.start is not None else None,
        cycle.multiplicity * qmap.n_order,
    )
    assert_hamiltonian(CayleyGraph(qmap.source, qmap.gens_source), lifted, "lifted cycle")
    return lifted


def squarefree_reduce(qmap: QuotientMap) -> QuotientMap:
    """Replace the kernel N by its maximal square-free quotient.

    Returns the analogous map over G/Phi where Phi is the Frattini subgroup
    of N.  A cycle whose reduced voltage generates N/Phi has its original
    voltage generating N, so lifts may be certified on the reduction.
    """
    n = qmap.n_order
    if n == 1:
        return qmap
    rad = 1
    for p, _ in factorize(n):
        rad *= p
    if rad == n:
        return qmap
    phi_exp = qmap.d * rad  # Phi = <gamma^(d * rad)>
    G2, _ = qmap.source.quotient_by_gamma(phi_exp)
    proj = lambda e: qmap.source.project_mod_gamma(e, phi_exp)
    S2 = qmap.gens_source.map_into(G2, proj)
    return quotient_map(G2, S2, qmap.d)


@dataclass(frozen=True)
class CycleFamily:
    """Quotient hamiltonian cycles sharing one oriented edge.

    The cycles live in the quotient graph of ``qmap`` restricted to
    ``vertices`` (None for the whole quotient).  Voltages are step products
    in the source group.
    """

    qmap: QuotientMap
    cycles: tuple[WalkSpec, ...]
    voltages: tuple[Element, ...]
    shared_edge: tuple[Element, Step]
    vertices: tuple[Element, ...] | None = None

    @property
    def graph(self) -> CayleyGraph:
        return CayleyGraph(self.qmap.quotient, self.qmap.gens_quotient, self.vertices)


class FamilyCheckFailed(ValueError):
    """A constructed family fails its structural requirements (a bug)."""


def make_family(
    qmap: QuotientMap,
    cycles: Sequence[WalkSpec],
    shared_edge: tuple[Element, Step],
    vertices: Iterable[Element] | None = None,
) -> CycleFamily:
    verts = tuple(sorted(set(vertices))) if vertices is not None else None
    graph = CayleyGraph(qmap.quotient, qmap.gens_quotient, verts)
    volts = []
    v0, s0 = shared_edge
    for i, c in enumerate(cycles):
        assert_hamiltonian(graph, c, f"family cycle {i}")
        vs = vertex_sequence(graph, c, expand=False)
        edges = set(zip(vs[:-1], c.steps))
        if (v0, s0) not in edges:
            raise FamilyCheckFailed(f"cycle {i} misses the shared edge {shared_edge}")
        vol = step_product(qmap.source, qmap.gens_source, c.steps)
        if not qmap.contains(vol):
            raise FamilyCheckFailed(f"cycle {i} voltage lies outside the kernel")
        volts.append(vol)
    return CycleFamily(qmap, tuple(cycles), tuple(volts), (v0, s0), verts)


def marusic_select(family: CycleFamily, gamma: Element) -> int:
    """Least index i with <gamma * voltage_i> equal to the kernel subgroup."""
    G = family.qmap.source
    for i, v in enumerate(family.voltages):
        if family.qmap.generates_kernel(G.mul(gamma, v)):
            return i
    raise NoCycleWorks(f"no corrected voltage generates (gamma={gamma})")


def _kernel_prime_pair(qmap: QuotientMap) -> tuple[int, int]:
    primes = factorize(qmap.n_order)
    if len(primes) != 2:
        raise WrongFamilySize(
            f"variant check requires a two-prime kernel, got order {qmap.n_order}"
        )
    return primes[0][0], primes[1][0]


def _coord(qmap: QuotientMap, x: Element, p: int) -> int:
    """Image of a kernel element in the order-p quotient of its Sylow part."""
    return (x.z // qmap.d) % p


def marusic_family_check(family: CycleFamily, variant: str) -> bool:
    """Sufficient spread conditions on three or four voltages.

    three: every pairwise voltage difference generates the kernel.
    four:  difference(1,2) has nontrivial p-coordinate, and differences
    (1,3) and (2,4) are nontrivial exactly in the q-coordinate, for one of
    the two prime assignments.  A passing family satisfies the correction
    property for every kernel element (see marusic_select).
    """
    qmap = family.qmap
    G = qmap.source
    p, q = _kernel_prime_pair(qmap)
    vols = family.voltages
    if variant == "three":
        if len(vols) != 3:
            raise WrongFamilySize("variant three needs exactly 3 cycles")
        for i in range(3):
            for j in range(i + 1, 3):
                d = G.mul(G.inv(vols[i]), vols[j])
                if not qmap.generates_kernel(d):
                    return False
        return True
    if variant == "four":
        if len(vols) != 4:
            raise WrongFamilySize("variant four needs exactly 4 cycles")
        d12 = G.mul(G.inv(vols[0]), vols[1])
        d13 = G.mul(G.inv(vols[0]), vols[2])
        d24 = G.mul(G.inv(vols[1]), vols[3])
        for pp, qq in ((p, q), (q, p)):
            ok = _coord(qmap, d12, pp) != 0
            for d in (d13, d24):
                ok = ok and _coord(qmap, d, pp) == 0 and _coord(qmap, d, qq) != 0
            if ok:
                return True
        return False
    raise ValueError(f"unknown variant {variant!r}")


# -- hamiltonian paths and cycles in abelian groups ---------------------------


def _greedy_chain(group, gens: GenSet, names: Sequence[str]) -> list[tuple[str, int]]:
    """Subset of (name, relative order) whose members generate, added greedily."""
    chain = []
    members = {group.identity}
    for n in sorted(names):
        g = gens.resolve(n)
        if g in members:
            continue
        new = closure_with(group, members, g)
        chain.append((n, len(new) // len(members)))
        members = new
        if len(members) == group.order:
            break
    return chain


def closure_with(group, members: set, g: Element) -> set:
    """Closure of an existing subgroup together with one more generator."""
    out = set(members)
    frontier = list(members)
    gi = group.inv(g)
    while frontier:
        nxt = []
        for x in frontier:
            for h in (g, gi):
                y = group.mul(x, h)
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return out


def _rev_inv(steps: Sequence[Step]) -> list[Step]:
    return [(n, -s) for n, s in reversed(steps)]


def abelian_ham_path(group, gens: GenSet) -> list[Step]:
    """Boustrophedon hamiltonian path in the Cayley graph of an abelian group."""
    chain = _greedy_chain(group, gens, gens.names)
    path: list[Step] = []
    for name, d in chain:
        blocks = [path if i % 2 == 0 else _rev_inv(path) for i in range(d)]
        out: list[Step] = []
        for i, b in enumerate(blocks):
            if i:
                out.append((name, 1))
            out.extend(b)
        path = out
    covered = 1
    for _, d in chain:
        covered *= d
    if covered != group.order:
        raise RuntimeError("generators do not span the abelian group")
    return path


def grid_cycle(u_path: Sequence[Step], sigma_cycle: Sequence[Step]) -> list[Step]:
    """Hamiltonian cycle on a coset grid.

    u_path (length A-1) walks once through the A cosets of a subgroup; the
    closed walk sigma_cycle (length n) spans the subgroup.  Requires odd A.
    The u-steps are each used once forward and once backward, so the result
    closes exactly when sigma_cycle does.
    """
    A = len(u_path) + 1
    n = len(sigma_cycle)
    if A == 1:
        return list(sigma_cycle)
    if A % 2 == 0:
        raise ValueError("coset count must be odd")
    sig = list(sigma_cycle)
    out: list[Step] = list(u_path)
    out += sig[: n - 1]
    for i in range(1, (A - 1) // 2 + 1):
        ju, jd = A - 2 * i + 1, A - 2 * i  # 1-based indices into u_path
        name, s = u_path[ju - 1]
        out.append((name, -s))
        out += _rev_inv(sig[1 : n - 1])
        name, s = u_path[jd - 1]
        out.append((name, -s))
        out += sig[1 : n - 1]
    out.append(sig[n - 1])
    return out


def abelian_ham_cycle(group, gens: GenSet) -> list[Step]:
    """Hamiltonian cycle in the Cayley graph of an odd-order abelian group."""
    if group.order == 1:
        return []
    chain = _greedy_chain(group, gens, gens.names)
    name0, d0 = chain[0]
    cyc: list[Step] = run(name0, d0)
    for name, d in chain[1:]:
        cyc = grid_cycle(run(name, d - 1), cyc)
    covered = 1
    for _, d in chain:
        covered *= d
    if covered != group.order:
        raise RuntimeError("generators do not span the abelian group")
    return cyc


# -- assembly ------------------------------------------------------------------


def _rotate_shared_edge_last(family: CycleFamily) -> list[WalkSpec]:
    """Rotate each family cycle so the shared oriented edge is its final step."""
    out = []
    graph = family.graph
    v0, s0 = family.shared_edge
    for c in family.cycles:
        vs = vertex_sequence(graph, c, expand=False)
        pos = None
        for j, (v, st) in enumerate(zip(vs[:-1], c.steps)):
            if v == v0 and st == s0:
                pos = j
                break
        if pos is None:
            raise FamilyCheckFailed("shared edge missing after validation")
        out.append(c.rotated((pos + 1) % len(c.steps), family.qmap.quotient, family.qmap.gens_quotient))
    return out


def marusic_assemble(
    G: PcGroup,
    S: GenSet,
    s0_names: Sequence[str],
    family: CycleFamily,
) -> WalkSpec:
    """Assemble a hamiltonian cycle of Cay(G;S) from a quotient cycle family.

    The family lives on the subgroup generated by the s0 symbols inside the
    quotient by the kernel; the remaining symbols thread its cosets in a
    boustrophedon grid.  The swappable block and the correction element are
    chosen by marusic_select, and the result is lifted through the kernel.
    """
    qmap = family.qmap
    Q = qmap.quotient
    Sq = qmap.gens_quotient
    rotated = _rotate_shared_edge_last(family)
    u0 = vertex_sequence(family.graph, rotated[0], expand=False)[0]
    for c in rotated[1:]:
        if vertex_sequence(family.graph, c, expand=False)[0] != u0:
            raise FamilyCheckFailed("family cycles disagree after rotation alignment")

    sub = closure(Q, [Sq.elements[n] for n in s0_names])
    rest = [n for n in S.names if n not in set(s0_names)]
    if len(sub) == Q.order:
        u_path: list[Step] = []
    else:
        if Q.derived_order() != 1:
            raise AssemblyFailed("coset grid requires an abelian quotient")
        cosets = CosetQuotient(Q, sub)
        gens_rows = GenSet(cosets, {n: cosets.project(Sq.elements[n]) for n in rest})
        u_path = abelian_ham_path(cosets, gens_rows)

    # one grid skeleton; family members are swapped into the leading
    # sigma-path block only, so voltages differ by a fixed conjugate of the
    # family voltage differences
    n_len = len(rotated[0].steps)
    base = grid_cycle(u_path, list(rotated[0].steps))
    slot = len(u_path)

    def with_member(i: int) -> WalkSpec:
        steps = list(base)
        steps[slot : slot + n_len - 1] = list(rotated[i].steps[: n_len - 1])
        return WalkSpec(tuple(steps), u0)

    Gsrc, Ssrc = qmap.source, qmap.gens_source
    base_walk = with_member(0)
    vol_base = step_product(Gsrc, Ssrc, base_walk.steps)
    rest_prod = step_product(Gsrc, Ssrc, tuple(base[slot + n_len - 1 :]))
    s0_el = Ssrc.resolve(*family.shared_edge[1])
    h = Gsrc.mul(Gsrc.inv(s0_el), rest_prod)
    v0 = step_product(Gsrc, Ssrc, rotated[0].steps)
    gamma_frame = Gsrc.mul(Gsrc.conj(vol_base, Gsrc.inv(h)), Gsrc.inv(v0))
    if not qmap.contains(gamma_frame):
        raise AssemblyFailed("assembly frame element left the kernel")
    try:
        i_star = marusic_select(
            CycleFamily(
                qmap,
                tuple(rotated),
                tuple(step_product(Gsrc, Ssrc, c.steps) for c in rotated),
                family.shared_edge,
                family.vertices,
            ),
            gamma_frame,
        )
    except NoCycleWorks as exc:
        raise AssemblyFailed(str(exc)) from exc
    chosen = with_member(i_star)
    assert_hamiltonian(qmap.quotient_graph, chosen, "assembled quotient cycle")
    return factor_group_lift(qmap, chosen)
