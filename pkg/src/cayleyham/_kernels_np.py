"""Pure numpy/python fallbacks for the compiled kernels.

Same signatures and semantics as _kernels; used when numba is missing or
``CAYLEYHAM_PURE_NUMPY=1`` is set.
"""

from __future__ import annotations

import numpy as np


def walk_visits_all(table, cols, start, reps, n):
    total = len(cols) * reps
    visited = np.zeros(n, dtype=np.uint8)
    visited[start] = 1
    count = 1
    v = int(start)
    m = len(cols)
    for t in range(1, total + 1):
        v = int(table[v, cols[(t - 1) % m]])
        if t == total:
            return count, -1, v, 1 if v == start else 0
        if visited[v]:
            return count, t, v, 0
        visited[v] = 1
        count += 1
    return count, -1, v, 1 if v == start else 0


def hamiltonian_backtrack(adj, budget, start):
    n, deg = adj.shape
    out = np.full(n, -1, dtype=np.int64)
    if n == 1:
        return 1, out
    visited = np.zeros(n, dtype=np.uint8)
    visited[start] = 1
    path = [int(start)]
    chosen = []
    cand_stack = []
    nodes = 0

    def candidates(depth, v):
        opts = []
        for j in range(deg):
            w = int(adj[v, j])
            if w < 0:
                continue
            if depth == n - 1:
                if w == start:
                    opts.append((0, j))
            elif not visited[w]:
                sc = sum(
                    1
                    for jj in range(deg)
                    if adj[w, jj] >= 0 and not visited[adj[w, jj]]
                )
                opts.append((sc, j))
        opts.sort()
        return [j for _, j in opts]

    cand_stack.append(candidates(0, path[0]))
    while path:
        depth = len(path) - 1
        v = path[-1]
        if not cand_stack[-1]:
            cand_stack.pop()
            path.pop()
            if chosen:
                chosen.pop()
            if path:
                visited[v] = 0
            continue
        j = cand_stack[-1].pop(0)
        w = int(adj[v, j])
        nodes += 1
        if nodes > budget:
            return 2, out
        if depth == n - 1:
            for d, c in enumerate(chosen):
                out[d] = c
            out[n - 1] = j
            return 0, out
        visited[w] = 1
        path.append(w)
        chosen.append(j)
        cand_stack.append(candidates(depth + 1, w))
    return 1, out


def assoc_all_triples(T):
    n = T.shape[0]
    # (x*y)*z vs x*(y*z), chunked over x to bound memory
    for x0 in range(0, n, 64):
        x1 = min(n, x0 + 64)
        lhs = T[T[x0:x1, :], :]
        rhs = T[x0:x1][:, T]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def assoc_generator_triples(T, gcols):
    for g in gcols:
        if not np.array_equal(T[T[:, g], :], T[:, T[g, :]]):
            return False
    return True
