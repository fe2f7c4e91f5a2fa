"""Slow, independent reference computations used to check the library.

Nothing here imports the code under test except plain data types.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache


def named_graph(name: str) -> tuple[int, list[tuple[int, int]]]:
    if name == "K13":  # the star K_{1,3}, not the complete graph on 13 vertices
        return 4, [(0, 1), (0, 2), (0, 3)]
    if name.startswith("K") and name[1:].isdigit():
        n = int(name[1:])
        return n, list(itertools.combinations(range(n), 2))
    if name.startswith("C") and name[1:].isdigit():
        n = int(name[1:])
        return n, [(i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i) for i in range(n)]
    if name.startswith("P") and name[1:].isdigit():
        n = int(name[1:])
        return n, [(i, i + 1) for i in range(n - 1)]
    if name == "Petersen":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return 10, [tuple(sorted(e)) for e in outer + spokes + inner]
    raise KeyError(name)


def adjacency_sets(n: int, edges) -> list[set[int]]:
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def ordering_ok(n: int, edges, order) -> bool:
    """Direct check of the definition: the first n-2 vertices have even forward degree."""
    if sorted(order) != list(range(n)):
        return False
    adj = adjacency_sets(n, edges)
    pos = {v: i for i, v in enumerate(order)}
    for i, v in enumerate(order[:max(0, n - 2)]):
        if sum(1 for w in adj[v] if pos[w] > i) % 2:
            return False
    return True


def brute_even_degenerate(n: int, edges) -> bool:
    """Memoized search over remaining vertex sets, written with frozensets."""
    adj = adjacency_sets(n, edges)

    @lru_cache(maxsize=None)
    def ok(rest: frozenset) -> bool:
        if len(rest) <= 2:
            return True
        return any(len(adj[v] & rest) % 2 == 0 and ok(rest - {v}) for v in rest)

    return ok(frozenset(range(n)))


def brute_even_decomposable(n: int, edges) -> bool:
    adj = adjacency_sets(n, edges)

    def e_within(s):
        return sum(1 for u, v in edges if u in s and v in s)

    @lru_cache(maxsize=None)
    def ok(rest: frozenset) -> bool:
        if not rest:
            return True
        if e_within(rest) % 2:
            return False
        items = sorted(rest)
        for k in range(1, len(items) + 1):
            for sub in itertools.combinations(items, k):
                if all(b not in adj[a] for a, b in itertools.combinations(sub, 2)):
                    if ok(rest - frozenset(sub)):
                        return True
        return False

    return ok(frozenset(range(n)))


def parity_law_by_convolution(t: int, sets, p: float) -> list[float]:
    """Law of ``(sum_{i in A_j} X_i mod 2)_j`` by folding in one ground bit at a time.

    Each bit ``i`` toggles the outcome by the mask of sets containing ``i``;
    the law is the XOR-convolution of the per-bit two-point laws.
    """
    r = len(sets)
    law = [0.0] * (1 << r)
    law[0] = 1.0
    for i in range(t):
        m = sum(1 << j for j, s in enumerate(sets) if i in s)
        law = [(1 - p) * law[y] + p * law[y ^ m] for y in range(1 << r)]
    return law


def conditional_graph_law(n: int, p: float, A, H, deg_parity, edge_parity) -> dict[frozenset, float]:
    """Exhaustive law of G(n, p) given ``G[A] = H``, the degree parities of ``A`` and ``e(G) mod 2``."""
    pairs = list(itertools.combinations(range(n), 2))
    H = {tuple(sorted(e)) for e in H}
    out = {}
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        E = frozenset(e for e, b in zip(pairs, bits) if b)
        if {e for e in E if e[0] in A and e[1] in A} != H:
            continue
        if any(sum(1 for e in E if a in e) % 2 != deg_parity[a] for a in A):
            continue
        if len(E) % 2 != edge_parity:
            continue
        out[E] = p ** len(E) * (1 - p) ** (len(pairs) - len(E))
    z = math.fsum(out.values())
    return {k: v / z for k, v in out.items()}


def layering_by_sets(sets: list[set]) -> int:
    """``min_j |A_j minus the union of later sets|`` over ``j < r`` (``inf`` marker ``None`` when r < 2)."""
    if len(sets) < 2:
        return None
    best = None
    for j in range(len(sets) - 1):
        later = set().union(*sets[j + 1:])
        k = len(set(sets[j]) - later)
        best = k if best is None else min(best, k)
    return best


def naive_recurrence(K: float, alpha: float, c: float, base: dict[int, float], upto: int) -> dict[int, float]:
    """Plain-float iteration over the full window, no log space and no deque."""
    f = dict(base)
    b = 0.5 - alpha
    for n in range(max(base) + 1, upto + 1):
        lo, hi = math.ceil(n / 4 - c * n), math.floor(n / 4 + c * n)
        f[n] = math.exp(-K * n ** b) + max(f[m] for m in range(lo, hi + 1)) ** 2
    return f


def ratio_epsilon(scaled) -> float:
    """Least ``e`` in [0, 1] with every value in ``[1 - e, 1 / (1 - e)]``."""
    lo, hi = min(scaled), max(scaled)
    if lo <= 0:
        return 1.0
    return min(1.0, max(0.0, 1 - lo, 1 - 1 / hi))


def affectedness_by_enumeration(t: int, sets, k: int, p: float, variant: str = "Y"):
    """``(eps_Z, deviation)`` from a pure-Python walk over all ``2^t`` assignments."""
    r = len(sets)
    joint: dict[tuple[int, int], float] = {}
    zlaw = [0.0] * (1 << r)
    for bits in range(1 << t):
        w = 1.0
        for i in range(t):
            w *= p if (bits >> i) & 1 else 1 - p
        y = sum((sum((bits >> i) & 1 for i in s) % 2) << j for j, s in enumerate(sets))
        z = sum((sum((bits >> i) & 1 for i in s if i >= k) % 2) << j for j, s in enumerate(sets))
        x = bits & ((1 << k) - 1)
        joint[x, y] = joint.get((x, y), 0.0) + w
        zlaw[z] += w
    if variant == "Y":
        eps_z = ratio_epsilon([m * (1 << r) for m in zlaw])
    else:
        classes = {bin(z).count("1") % 2 for z in range(1 << r) if zlaw[z] > 0}
        if len(classes) != 1:
            eps_z = 1.0
        else:
            c = classes.pop()
            eps_z = ratio_epsilon([zlaw[z] * (1 << (r - 1)) for z in range(1 << r)
                                   if bin(z).count("1") % 2 == c])
    px = [sum(joint.get((x, y), 0.0) for y in range(1 << r)) for x in range(1 << k)]
    py = [sum(joint.get((x, y), 0.0) for x in range(1 << k)) for y in range(1 << r)]
    ratios = []
    for y in range(1 << r):
        if py[y] == 0:
            continue
        if variant == "Y":
            ref = px
        else:
            cls = bin(y).count("1") % 2
            same = [yy for yy in range(1 << r) if bin(yy).count("1") % 2 == cls]
            pw = sum(py[yy] for yy in same)
            ref = [sum(joint.get((x, yy), 0.0) for yy in same) / pw for x in range(1 << k)]
        for x in range(1 << k):
            cond = joint.get((x, y), 0.0) / py[y]
            if ref[x] == 0:
                if cond > 0:
                    return eps_z, 1.0
                continue
            ratios.append(cond / ref[x])
    return eps_z, max(0.0, 1 - min(ratios), 1 - 1 / max(ratios))


def gf2_rank_py(rows: list[list[int]]) -> int:
    rows = [list(r) for r in rows]
    rank, cols = 0, len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                rows[i] = [a ^ b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank
