"""Explicit cycle templates: edge alterations, ladder weaves, the per-case
quotient cycle families, and the special semidirect-product constructions.

Every template asserts its predicted voltage (a closed-form commutator
expression) against the blind step product, and every returned walk is
verified hamiltonian in its ambient graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

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
)
from .groups import (
    Element,
    GenSet,
    PcGroup,
    PcPresentation,
    closure,
    factorize,
    make_group,
)
from .lifting import (
    CycleFamily,
    QuotientMap,
    make_family,
    quotient_map,
    squarefree_reduce,
)


class PatternNotFound(ValueError):
    """The cycle does not contain the subpaths the alteration needs."""


class HypothesisViolated(ValueError):
    """The instance does not satisfy the construction's preconditions."""


class FamilyCheckFailed(ValueError):
    """A constructed family violates its own voltage claims (a bug)."""


class NotApplicable(ValueError):
    """The construction excludes this instance by hypothesis."""


class BadParameters(ValueError):
    pass


def _inv_step(s: Step) -> Step:
    return (s[0], -s[1])


# ---------------------------------------------------------------------------
# edge alteration: swap a chord edge against a detour through a-runs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlterationSpec:
    """One applicable alteration site on a quotient hamiltonian cycle.

    The cycle contains the oriented path [g a^-(k+1)](a^k, b, a^-k) and, at
    g, either the oriented edge (b) (variant "edge") or, at g b, the edge
    (b^-1) (variant "coedge").
    """

    cycle: WalkSpec
    a: Step
    b: Step
    g: Element
    k: int
    variant: str  # "edge" | "coedge"


def predicted_alteration_delta(G, S: GenSet, spec: AlterationSpec) -> Element:
    """Closed-form voltage change, conjugated to the identity base:
    [a^k, b^-1] [a^k, b^-1]^a for "edge", [b^-1, a^k] [a^k, b^-1]^a else."""
    a_el = S.resolve(*spec.a)
    b_el = S.resolve(*spec.b)
    ak = G.pow(a_el, spec.k)
    binv = G.inv(b_el)
    c1 = G.comm(ak, binv)
    c2 = G.conj(c1, a_el)
    if spec.variant == "edge":
        return G.mul(c1, c2)
    return G.mul(G.comm(binv, ak), c2)


def find_alterations(
    qmap: QuotientMap,
    cycle: WalkSpec,
    a: Step,
    b: Step,
    k: int,
    vertices=None,
) -> list[AlterationSpec]:
    """All alteration sites on the cycle for the signed symbols a, b."""
    graph = CayleyGraph(qmap.quotient, qmap.gens_quotient, vertices)
    verts = vertex_sequence(graph, cycle, expand=False)[:-1]
    steps = cycle.steps
    L = len(steps)
    Q = qmap.quotient
    Sq = qmap.gens_quotient
    a_el = Sq.resolve(*a)
    b_el = Sq.resolve(*b)
    pattern = tuple(run(a[0], k * a[1]) + [b] + run(a[0], -k * a[1]))
    edges = {}
    for i in range(L):
        edges.setdefault((verts[i], steps[i]), i)
    out = []
    for pos in range(L):
        if all(steps[(pos + t) % L] == pattern[t] for t in range(len(pattern))):
            anchor = verts[pos]
            g = anchor
            for _ in range(k + 1):
                g = Q.mul(g, a_el)
            # variant "edge": oriented edge [g](b), not part of the pattern
            ie = edges.get((g, b))
            if ie is not None and not _overlaps(pos, len(pattern), ie, 1, L):
                out.append(AlterationSpec(cycle, a, b, g, k, "edge"))
            gb = Q.mul(g, b_el)
            ic = edges.get((gb, _inv_step(b)))
            if ic is not None and not _overlaps(pos, len(pattern), ic, 1, L):
                out.append(AlterationSpec(cycle, a, b, g, k, "coedge"))
    return out


def _overlaps(p0: int, l0: int, p1: int, l1: int, L: int) -> bool:
    span0 = {(p0 + t) % L for t in range(l0)}
    span1 = {(p1 + t) % L for t in range(l1)}
    return bool(span0 & span1)


def apply_alteration(
    qmap: QuotientMap, spec: AlterationSpec, vertices=None
) -> tuple[WalkSpec, Element]:
    """Perform the rewiring; returns the altered cycle plus its exact voltage
    change, and checks the change against the commutator formula."""
    cycle = spec.cycle
    if spec.k == 0:
        return cycle, qmap.source.identity
    graph = CayleyGraph(qmap.quotient, qmap.gens_quotient, vertices)
    verts = vertex_sequence(graph, cycle, expand=False)[:-1]
    steps = list(cycle.steps)
    L = len(steps)
    Q = qmap.quotient
    Sq = qmap.gens_quotient
    a_el = Sq.resolve(*spec.a)
    b_el = Sq.resolve(*spec.b)
    k = spec.k
    pattern = tuple(run(spec.a[0], k * spec.a[1]) + [spec.b] + run(spec.a[0], -k * spec.a[1]))
    anchor = spec.g
    for _ in range(k + 1):
        anchor = Q.mul(anchor, Q.inv(a_el))
    pos = None
    for i in range(L):
        if verts[i] == anchor and all(steps[(i + t) % L] == pattern[t] for t in range(len(pattern))):
            pos = i
            break
    if pos is None:
        raise PatternNotFound(f"path pattern missing at {anchor}")
    if spec.variant == "edge":
        target = (spec.g, spec.b)
        detour = run(spec.a[0], -k * spec.a[1]) + [spec.b] + run(spec.a[0], k * spec.a[1])
    else:
        target = (Q.mul(spec.g, b_el), _inv_step(spec.b))
        detour = run(spec.a[0], -k * spec.a[1]) + [_inv_step(spec.b)] + run(spec.a[0], k * spec.a[1])
    ie = None
    for i in range(L):
        if (verts[i], steps[i]) == target and not _overlaps(pos, len(pattern), i, 1, L):
            ie = i
            break
    if ie is None:
        raise PatternNotFound(f"edge {target} missing")
    # rotate so the pattern starts at 0
    rot = cycle.rotated(pos, Q, Sq)
    rsteps = list(rot.steps)
    ie_r = (ie - pos) % L
    rsteps[ie_r : ie_r + 1] = detour
    rsteps[0 : len(pattern)] = [spec.b]
    altered = WalkSpec(tuple(rsteps), rot.start)
    assert_hamiltonian(graph, altered, "altered cycle")

    G, Ssrc = qmap.source, qmap.gens_source
    p_old = step_product(G, Ssrc, rot.steps)
    p_new = step_product(G, Ssrc, altered.steps)
    delta_written = G.mul(G.inv(p_old), p_new)
    pred = predicted_alteration_delta(G, Ssrc, spec)
    # written products are based at the walk start u: delta = pred^(g^-1 u)
    u = qmap.lift(rot.start if rot.start is not None else Q.identity)
    conjor = G.mul(G.inv(qmap.lift(spec.g)), u)
    if delta_written != G.conj(pred, conjor):
        raise FamilyCheckFailed("alteration voltage disagrees with its formula")
    return altered, delta_written


# ---------------------------------------------------------------------------
# ladder: weave a quotient-of-quotient cycle with runs of a single generator
# ---------------------------------------------------------------------------


def check_coset_cycle(Q, gens: GenSet, steps: Sequence[Step], sub_members) -> bool:
    """Do the steps trace a hamiltonian cycle on the cosets of a subgroup?"""
    sub = frozenset(sub_members)
    v = Q.identity
    seen = set()
    reps = {}

    def coset_key(x):
        if x not in reps:
            mem = frozenset(Q.mul(h, x) for h in sub)
            key = min(mem)
            for y in mem:
                reps[y] = key
        return reps[x]

    start_key = coset_key(v)
    seen.add(start_key)
    for i, (n, s) in enumerate(steps):
        v = Q.mul(v, gens.resolve(n, s))
        key = coset_key(v)
        if i == len(steps) - 1:
            break
        if key in seen:
            return False
        seen.add(key)
    return coset_key(v) == start_key and len(seen) * len(sub) == Q.order


def ladder_cycle(
    qmap: QuotientMap,
    a: Step,
    coset_steps: Sequence[Step],
    r: int,
    k: int,
) -> WalkSpec:
    """Weave runs of a through a hamiltonian cycle of the a-cosets.

    coset_steps is a hamiltonian cycle of the quotient by <a-image> with
    a^r * (product of steps) in the kernel, 0 <= r <= |a| - 2; the woven
    cycle C_k (0 <= k <= |a| - 3) is hamiltonian in the full quotient and
    satisfies voltage(C_k) = voltage(C_0) * [a^-k, s1^-1] [a^-k, s1^-1]^(a^-1).
    """
    Q = qmap.quotient
    Sq = qmap.gens_quotient
    a_el = Sq.resolve(*a)
    sub = sorted(closure(Q, [a_el]))
    n = len(sub)
    d = len(coset_steps)
    if n == Q.order:
        raise HypothesisViolated("a generates the whole quotient")
    if not check_coset_cycle(Q, Sq, coset_steps, sub):
        raise HypothesisViolated("steps are not a hamiltonian coset cycle")
    prod = step_product(Q, Sq, tuple(coset_steps))
    if Q.pow(a_el, r) != Q.inv(prod):
        raise HypothesisViolated("a^r does not close the coset cycle")
    if not (0 <= r <= n - 2):
        raise HypothesisViolated(f"r={r} out of range for |a|={n}")
    if not (0 <= k <= n - 3):
        raise HypothesisViolated(f"k={k} out of range for |a|={n}")
    if d % 2 == 0 or d < 3:
        raise HypothesisViolated("coset cycle length must be odd and >= 3")
    s = list(coset_steps)
    aname, asgn = a
    w: list[Step] = []
    w += run(aname, k * asgn)
    w.append(s[0])
    w += run(aname, -(k + 1) * asgn)
    for i in range(1, (d - 3) // 2 + 1):
        w.append(s[2 * i - 1])
        w += run(aname, (n - 2) * asgn)
        w.append(s[2 * i])
        w += run(aname, -(n - 2) * asgn)
    w.append(s[d - 2])
    w += run(aname, r * asgn)
    w.append(s[d - 1])
    w += run(aname, -(n - k - 2) * asgn)
    w.append(s[0])
    w += run(aname, (n - k - 3) * asgn)
    w += s[1 : d - 1]
    w += run(aname, -(n - r - 2) * asgn)
    w.append(s[d - 1])
    walk = WalkSpec(tuple(w))
    assert_hamiltonian(CayleyGraph(Q, Sq), walk, f"ladder cycle k={k}")
    return walk


def ladder_family(
    qmap: QuotientMap, a: Step, coset_steps: Sequence[Step], r: int, ks: Sequence[int]
) -> list[WalkSpec]:
    """Ladder cycles for several k, with the voltage recurrence asserted."""
    G, Ssrc = qmap.source, qmap.gens_source
    a_el = Ssrc.resolve(*a)
    s1_inv = G.inv(Ssrc.resolve(*coset_steps[0]))
    out = []
    base = ladder_cycle(qmap, a, coset_steps, r, 0)
    v0 = step_product(G, Ssrc, base.steps)
    for k in ks:
        ck = ladder_cycle(qmap, a, coset_steps, r, k) if k else base
        vk = step_product(G, Ssrc, ck.steps)
        am = G.pow(a_el, -k)
        c1 = G.comm(am, s1_inv)
        pred = G.mul(v0, G.mul(c1, G.conj(c1, G.inv(a_el))))
        if vk != pred:
            raise FamilyCheckFailed(f"ladder voltage formula fails at k={k}")
        out.append(ck)
    return out
