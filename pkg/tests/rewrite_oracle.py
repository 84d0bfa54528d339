"""Independent multiplication oracle: naive word rewriting over the relators.

Words are lists of letters ('g', i) and ('z', value); all generator letters
are positive (inverses are expanded via g_i^-1 = g_i^(e_i - 1) gamma^-t_i
before rewriting).  Normalisation repeatedly applies the leftmost applicable
rule until fixpoint:

    gamma^a gamma^b -> gamma^(a+b)
    gamma^a g_i     -> g_i gamma^(a * r_i)
    g_j g_i (j > i) -> g_i g_j gamma^(-c_ij)
    g_i^(e_i)       -> gamma^(t_i)

Deliberately shares no code with the collection algorithm in cayleyham.
"""

from __future__ import annotations

from cayleyham.groups import Element, PcPresentation


def normalize_word(pres: PcPresentation, word) -> Element:
    """word: iterable of ('g', i, exp) / ('z', exp); exponents may be negative."""
    m = pres.gamma_order
    k = len(pres.quotient_orders)
    letters: list = []
    for entry in word:
        if entry[0] == "z":
            if m > 1 and entry[1] % m:
                letters.append(("z", entry[1] % m))
        else:
            _, i, e = entry
            if e >= 0:
                letters.extend(("g", i) for _ in range(e))
            else:
                for _ in range(-e):
                    letters.extend(("g", i) for _ in range(pres.quotient_orders[i] - 1))
                    if m > 1 and pres.power_tails[i] % m:
                        letters.append(("z", (-pres.power_tails[i]) % m))

    while True:
        applied = False
        out = []
        for L in letters:
            if L[0] == "z" and out and out[-1][0] == "z":
                out[-1] = ("z", (out[-1][1] + L[1]) % m)
                applied = True
            else:
                out.append(L)
        letters = [L for L in out if not (L[0] == "z" and L[1] == 0)]
        if applied:
            continue

        for idx in range(len(letters) - 1):
            a, b = letters[idx], letters[idx + 1]
            if a[0] == "z" and b[0] == "g":
                i = b[1]
                letters[idx : idx + 2] = [b, ("z", (a[1] * pres.action[i]) % m)]
                applied = True
                break
            if a[0] == "g" and b[0] == "g" and a[1] > b[1]:
                i, j = b[1], a[1]
                c = pres.comm_tails[i][j]
                repl = [b, a]
                if m > 1 and c % m:
                    repl.append(("z", (-c) % m))
                letters[idx : idx + 2] = repl
                applied = True
                break
        if applied:
            continue

        # collapse the first full run g_i^(e_i)
        run_i = None
        run_start = 0
        run_len = 0
        for idx, L in enumerate(letters):
            if L[0] == "g":
                if run_i == L[1]:
                    run_len += 1
                else:
                    run_i, run_start, run_len = L[1], idx, 1
                if run_len == pres.quotient_orders[run_i]:
                    repl = []
                    if m > 1 and pres.power_tails[run_i] % m:
                        repl = [("z", pres.power_tails[run_i] % m)]
                    letters[run_start : run_start + run_len] = repl
                    applied = True
                    break
            else:
                run_i = None
        if not applied:
            break

    vec = [0] * k
    z = 0
    for L in letters:
        if L[0] == "g":
            vec[L[1]] += 1
        else:
            z = (z + L[1]) % m
    return Element(tuple(vec), z if m > 1 else 0)


def element_word(el: Element):
    word = [("g", i, a) for i, a in enumerate(el.vec)]
    word.append(("z", el.z))
    return word


def oracle_mul(pres: PcPresentation, x: Element, y: Element) -> Element:
    return normalize_word(pres, element_word(x) + element_word(y))


def oracle_inv(pres: PcPresentation, x: Element) -> Element:
    word = [("z", -x.z)]
    word.extend(("g", i, -x.vec[i]) for i in reversed(range(len(x.vec))))
    return normalize_word(pres, word)
