"""Numba-compiled inner loops (see _kernels_np for the reference semantics)."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def walk_visits_all(table, cols, start, reps, n):
    """Expand a walk given as table columns repeated ``reps`` times.

    Returns (visited_count, first_repeat, endpoint, closed) where
    first_repeat is the 1-based step index at which an already-visited
    vertex is re-entered before the final step (-1 if none) and closed
    reports whether the final vertex equals the start.
    """
    total = cols.shape[0] * reps
    visited = np.zeros(n, dtype=np.uint8)
    visited[start] = 1
    count = 1
    v = start
    m = cols.shape[0]
    for t in range(1, total + 1):
        v = table[v, cols[(t - 1) % m]]
        if t == total:
            closed = 1 if v == start else 0
            return count, -1, v, closed
        if visited[v]:
            return count, t, v, 0
        visited[v] = 1
        count += 1
    closed = 1 if v == start else 0
    return count, -1, v, closed


@njit(cache=True)
def hamiltonian_backtrack(adj, budget, start):
    """Depth-first search for a hamiltonian cycle through ``start``.

    adj[v, j] is the endpoint of the j-th edge out of v (-1 for padding).
    Candidates are ordered fewest-remaining-exits first with ties broken
    by column index, so the search is deterministic.  Returns
    (status, cols) with status 0 = found (cols holds the edge column used
    at each of the n steps), 1 = exhausted, 2 = budget exceeded.
    """
    n, deg = adj.shape
    out = np.full(n, -1, dtype=np.int64)
    if n == 1:
        return 1, out
    visited = np.zeros(n, dtype=np.uint8)
    path = np.full(n + 1, -1, dtype=np.int64)
    cand = np.full((n, deg), -1, dtype=np.int64)
    cand_len = np.zeros(n, dtype=np.int64)
    cand_pos = np.zeros(n, dtype=np.int64)
    scores = np.zeros(deg, dtype=np.int64)

    visited[start] = 1
    path[0] = start
    depth = 0
    nodes = 0

    # build candidate list for the current depth
    build = True
    while depth >= 0:
        v = path[depth]
        if build:
            k = 0
            for j in range(deg):
                w = adj[v, j]
                if w < 0:
                    continue
                if depth == n - 1:
                    if w == start:
                        cand[depth, k] = j
                        scores[k] = 0
                        k += 1
                elif visited[w] == 0:
                    sc = 0
                    for jj in range(deg):
                        u = adj[w, jj]
                        if u >= 0 and visited[u] == 0:
                            sc += 1
                    cand[depth, k] = j
                    scores[k] = sc
                    k += 1
            # insertion sort by (score, column)
            for a in range(1, k):
                cj = cand[depth, a]
                cs = scores[a]
                b = a - 1
                while b >= 0 and (scores[b] > cs or (scores[b] == cs and cand[depth, b] > cj)):
                    scores[b + 1] = scores[b]
                    cand[depth, b + 1] = cand[depth, b]
                    b -= 1
                scores[b + 1] = cs
                cand[depth, b + 1] = cj
            cand_len[depth] = k
            cand_pos[depth] = 0
            build = False

        if cand_pos[depth] >= cand_len[depth]:
            # backtrack
            depth -= 1
            if depth < 0:
                return 1, out
            w = path[depth + 1]
            visited[w] = 0
            path[depth + 1] = -1
            continue

        j = cand[depth, cand_pos[depth]]
        cand_pos[depth] += 1
        w = adj[v, j]
        nodes += 1
        if nodes > budget:
            return 2, out
        if depth == n - 1:
            out[depth] = j
            for d in range(n - 1):
                out[d] = cand[d, cand_pos[d] - 1]
            return 0, out
        visited[w] = 1
        path[depth + 1] = w
        depth += 1
        build = True
    return 1, out


@njit(cache=True)
def assoc_all_triples(T):
    n = T.shape[0]
    for x in range(n):
        for y in range(n):
            xy = T[x, y]
            for z in range(n):
                if T[xy, z] != T[x, T[y, z]]:
                    return False
    return True


@njit(cache=True)
def assoc_generator_triples(T, gcols):
    """Light's associativity test: full associativity follows from
    (x*g)*y == x*(g*y) for generators g when they generate the table."""
    n = T.shape[0]
    for gi in range(gcols.shape[0]):
        g = gcols[gi]
        for x in range(n):
            xg = T[x, g]
            for y in range(n):
                if T[xg, y] != T[x, T[g, y]]:
                    return False
    return True
