"""Kernel selection: numba-compiled hot loops with a pure-numpy fallback.

Set ``CAYLEYHAM_PURE_NUMPY=1`` to force the fallback path (also used
automatically when numba is unavailable).  Both implementations expose the
same functions with identical semantics; ``benchmarks/bench_kernels.py``
compares them.
"""

from __future__ import annotations

import os

PURE_NUMPY = os.environ.get("CAYLEYHAM_PURE_NUMPY", "") not in ("", "0")

if not PURE_NUMPY:
    try:
        from . import _kernels as kernels

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - exercised only without numba
        from . import _kernels_np as kernels

        HAVE_NUMBA = False
else:
    from . import _kernels_np as kernels

    HAVE_NUMBA = False

hamiltonian_backtrack = kernels.hamiltonian_backtrack
walk_visits_all = kernels.walk_visits_all
assoc_all_triples = kernels.assoc_all_triples
assoc_generator_triples = kernels.assoc_generator_triples
