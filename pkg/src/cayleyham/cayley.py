"""Cayley graphs, walk tracing, hamiltonicity checking, and the search oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._accel import hamiltonian_backtrack, walk_visits_all
from .groups import Element, GenSet, PcGroup, UnknownSymbol


class NotAHamiltonianCycle(ValueError):
    """A walk claimed to be a hamiltonian cycle fails verification."""


Step = tuple[str, int]


def run(name: str, count: int) -> list[Step]:
    """count copies of a signed step; negative count means inverse steps."""
    sign = 1 if count >= 0 else -1
    return [(name, sign)] * abs(count)


def seq(*parts) -> list[Step]:
    """Flatten single steps and step lists into one step list."""
    out: list[Step] = []
    for p in parts:
        if isinstance(p, tuple) and len(p) == 2 and isinstance(p[0], str):
            out.append(p)
        else:
            out.extend(p)
    return out


@dataclass(frozen=True)
class WalkSpec:
    """A walk: signed generator symbols, optional start, repetition count."""

    steps: tuple[Step, ...]
    start: Element | None = None
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple((str(n), 1 if s >= 0 else -1) for n, s in self.steps))

    @property
    def length(self) -> int:
        return len(self.steps) * self.multiplicity

    def repeated(self, times: int) -> "WalkSpec":
        return WalkSpec(self.steps, self.start, self.multiplicity * times)

    def rotated(self, r: int, group, gens: GenSet) -> "WalkSpec":
        """Same closed walk, started r steps later (single-period rotation)."""
        m = len(self.steps)
        r %= m
        if r == 0:
            return self
        pref = group.identity if self.start is None else self.start
        for name, sign in self.steps[:r]:
            pref = group.mul(pref, gens.resolve(name, sign))
        return WalkSpec(self.steps[r:] + self.steps[:r], pref, self.multiplicity)

    def to_json(self) -> dict:
        return {
            "steps": [[n, s] for n, s in self.steps],
            "start": self.start.to_json() if self.start is not None else None,
            "multiplicity": self.multiplicity,
        }

    @staticmethod
    def from_json(obj) -> "WalkSpec":
        return WalkSpec(
            tuple((str(n), int(s)) for n, s in obj["steps"]),
            Element.from_json(obj["start"]) if obj.get("start") else None,
            int(obj.get("multiplicity", 1)),
        )


class CayleyGraph:
    """Cay(G; S), optionally restricted to a subgroup's vertex set."""

    def __init__(self, group, gens: GenSet, vertices: Iterable[Element] | None = None):
        self.group = group
        self.gens = gens
        if vertices is None:
            self.vertices = None
            self.vertex_count = group.order
        else:
            self.vertices = tuple(sorted(set(vertices)))
            self.vertex_count = len(self.vertices)

    def vertex_list(self) -> list[Element]:
        return list(self.group.elements()) if self.vertices is None else list(self.vertices)

    def neighbors(self, v: Element) -> list[Element]:
        out = []
        for name, sign in self.gens.signed_symbols():
            out.append(self.group.mul(v, self.gens.resolve(name, sign)))
        return out

    def is_connected(self) -> bool:
        verts = self.vertex_list()
        vset = set(verts)
        seen = {verts[0] if self.vertices else self.group.identity}
        frontier = list(seen)
        while frontier:
            nxt = []
            for v in frontier:
                for w in self.neighbors(v):
                    if w in vset and w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return len(seen) == len(vset)


def trace(graph: CayleyGraph, walk: WalkSpec) -> Element:
    """Endpoint of the walk: start * (step product)^multiplicity."""
    g = graph.group
    period = g.identity
    for name, sign in walk.steps:
        period = g.mul(period, graph.gens.resolve(name, sign))
    start = walk.start if walk.start is not None else g.identity
    acc = period
    if walk.multiplicity != 1:
        if hasattr(g, "pow"):
            acc = g.pow(period, walk.multiplicity)
        else:
            acc = g.identity
            for _ in range(walk.multiplicity):
                acc = g.mul(acc, period)
    return g.mul(start, acc)


def vertex_sequence(graph: CayleyGraph, walk: WalkSpec, expand: bool = True) -> list[Element]:
    """All visited vertices in order, start included (multiplicity expanded)."""
    g = graph.group
    v = walk.start if walk.start is not None else g.identity
    out = [v]
    reps = walk.multiplicity if expand else 1
    for _ in range(reps):
        for name, sign in walk.steps:
            v = g.mul(v, graph.gens.resolve(name, sign))
            out.append(v)
    return out


@dataclass(frozen=True)
class VerificationTranscript:
    vertex_count: int
    visited_count: int
    first_repeat: int | None
    endpoint: Element
    closed: bool
    left_vertex_set: int | None = None

    @property
    def hamiltonian(self) -> bool:
        return (
            self.closed
            and self.first_repeat is None
            and self.left_vertex_set is None
            and self.visited_count == self.vertex_count
        )

    def to_json(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "visited_count": self.visited_count,
            "first_repeat": self.first_repeat,
            "endpoint": self.endpoint.to_json(),
            "closed": self.closed,
            "left_vertex_set": self.left_vertex_set,
            "hamiltonian": self.hamiltonian,
        }


def is_hamiltonian_cycle(graph: CayleyGraph, walk: WalkSpec) -> VerificationTranscript:
    """Walk the expanded step sequence once, flagging the first defect seen."""
    g = graph.group
    start = walk.start if walk.start is not None else g.identity
    total = walk.length
    if isinstance(g, PcGroup) and graph.vertices is None and g.order <= 1 << 22:
        T = g.table()
        cols = np.array(
            [g.index(graph.gens.resolve(n, s)) for n, s in walk.steps], dtype=np.int64
        )
        if len(cols) == 0:
            return VerificationTranscript(g.order, 1, None, start, g.order == 1)
        cnt, rep, endp, closed = walk_visits_all(T, cols, g.index(start), walk.multiplicity, g.order)
        return VerificationTranscript(
            g.order, int(cnt), None if rep == -1 else int(rep), g.unindex(int(endp)), bool(closed)
        )
    vset = None if graph.vertices is None else frozenset(graph.vertices)
    if vset is not None and start not in vset:
        return VerificationTranscript(graph.vertex_count, 0, None, start, False, 0)
    visited = {start}
    v = start
    steps = [(graph.gens.resolve(n, s)) for n, s in walk.steps]
    if not steps:
        return VerificationTranscript(graph.vertex_count, 1, None, start, graph.vertex_count == 1)
    t = 0
    for _ in range(walk.multiplicity):
        for s in steps:
            t += 1
            v = g.mul(v, s)
            if t == total:
                break
            if vset is not None and v not in vset:
                return VerificationTranscript(graph.vertex_count, len(visited), None, v, False, t)
            if v in visited:
                return VerificationTranscript(graph.vertex_count, len(visited), t, v, False)
            visited.add(v)
    return VerificationTranscript(graph.vertex_count, len(visited), None, v, v == start)


def assert_hamiltonian(graph: CayleyGraph, walk: WalkSpec, what: str = "walk") -> VerificationTranscript:
    tr = is_hamiltonian_cycle(graph, walk)
    if not tr.hamiltonian:
        raise NotAHamiltonianCycle(
            f"{what}: visited {tr.visited_count}/{tr.vertex_count}, "
            f"repeat={tr.first_repeat}, closed={tr.closed}, left={tr.left_vertex_set}"
        )
    return tr


def canonical_rotation(walk: WalkSpec, group, gens: GenSet) -> WalkSpec:
    """Lexicographically minimal rotation of the period; start adjusted."""
    m = len(walk.steps)
    if m == 0:
        return walk
    best = min(range(m), key=lambda r: walk.steps[r:] + walk.steps[:r])
    return walk.rotated(best, group, gens)


def step_product(group, gens: GenSet, steps: Sequence[Step]) -> Element:
    acc = group.identity
    for name, sign in steps:
        acc = group.mul(acc, gens.resolve(name, sign))
    return acc


def voltage(qmap, walk: WalkSpec) -> Element:
    """Product in the source group of the steps of a quotient hamiltonian cycle.

    The walk must verify as a hamiltonian cycle in the quotient graph; the
    product then lies in the kernel subgroup N.
    """
    assert_hamiltonian(qmap.quotient_graph, walk, "quotient cycle")
    if walk.multiplicity != 1:
        raise NotAHamiltonianCycle("voltage expects an unexpanded quotient cycle")
    v = step_product(qmap.source, qmap.gens_source, walk.steps)
    if not qmap.contains(v):
        raise RuntimeError("voltage left the kernel subgroup; quotient map is broken")
    return v


def voltage_conjugate_check(qmap, walk: WalkSpec, g: Element) -> Element:
    """Product along the rotation of the cycle based at quotient vertex g.

    Verifies the rotation law: the based product equals (voltage)^lift(g).
    """
    verts = vertex_sequence(qmap.quotient_graph, walk, expand=False)
    try:
        r = verts.index(g)
    except ValueError:
        raise NotAHamiltonianCycle(f"base vertex {g} not on cycle") from None
    base = voltage(qmap, walk)
    rot = walk.steps[r:] + walk.steps[:r]
    prod = step_product(qmap.source, qmap.gens_source, rot)
    lift = qmap.lift(g)
    expect = qmap.source.conj(base, lift)
    if prod != expect:
        raise RuntimeError("rotation law violated; quotient map is broken")
    return prod


@dataclass(frozen=True)
class BruteForceResult:
    status: str  # found | exhausted | budget
    walk: WalkSpec | None

    @property
    def found(self) -> bool:
        return self.status == "found"


def brute_force_hamiltonian(
    group,
    gens: GenSet,
    budget: int = 10_000_000,
    directed: bool = False,
    vertices: Iterable[Element] | None = None,
) -> BruteForceResult:
    """Backtracking search for a hamiltonian cycle from the identity.

    Candidates are explored fewest-onward-options first with canonical tie
    breaks, so results are deterministic.  In directed mode only positive
    steps are used.
    """
    graph = CayleyGraph(group, gens, vertices)
    verts = graph.vertex_list()
    if graph.vertices is None:
        verts = sorted(verts)
    index = {v: i for i, v in enumerate(verts)}
    symbols = [(n, s) for n, s in gens.signed_symbols() if directed is False or s > 0]
    # drop duplicate columns pointing at the same element (e.g. involutions)
    adj = np.full((len(verts), len(symbols)), -1, dtype=np.int64)
    for i, v in enumerate(verts):
        for j, (n, s) in enumerate(symbols):
            w = group.mul(v, gens.resolve(n, s))
            adj[i, j] = index.get(w, -1)
    start = index[group.identity]
    status, cols = hamiltonian_backtrack(adj, int(budget), start)
    if status == 2:
        return BruteForceResult("budget", None)
    if status == 1:
        return BruteForceResult("exhausted", None)
    steps = tuple(symbols[int(c)] for c in cols)
    walk = WalkSpec(steps, None, 1)
    assert_hamiltonian(graph, walk, "oracle output")
    return BruteForceResult("found", walk)
