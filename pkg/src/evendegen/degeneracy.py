"""Deciders for even-degeneracy and even-decomposability, and a prescribed witness graph."""

from __future__ import annotations

from collections.abc import Sequence

from .errors import CapacityError, InputError
from .graph import Graph, bits, mask_of
from .revelation import Revelation
from .rng import RandomSource

DP_LIMIT = 22
DECOMPOSE_LIMIT = 14
POLICIES = ("first-index", "random", "min-degree", "max-degree")


def verify_ordering(g: Graph, order: Sequence[int]) -> bool:
    """True iff each of the first ``n - 2`` vertices has an even number of later neighbours."""
    order = list(order)
    if sorted(order) != list(range(g.n)):
        raise InputError("ordering is not a permutation of the vertices")
    later = (1 << g.n) - 1
    for v in order[: max(0, g.n - 2)]:
        later &= ~(1 << v)
        if (g.rows[v] & later).bit_count() & 1:
            return False
    return True


def exact_even_degenerate(g: Graph, limit: int = DP_LIMIT) -> list[int] | None:
    """An even elimination ordering, or ``None`` if there is none.

    Depth-first search over remaining-vertex sets; a set from which the
    search failed is marked once in a ``2^n`` byte table and never revisited.
    """
    n = g.n
    if n > limit:
        raise CapacityError(f"n={n} exceeds the exact search limit {limit}")
    if n <= 2:
        return list(range(n))
    rows = g.rows
    dead = bytearray(1 << n)
    path: list[int] = []

    def search(mask: int) -> bool:
        if mask.bit_count() <= 2:
            return True
        if dead[mask]:
            return False
        for v in bits(mask):
            if not (rows[v] & mask).bit_count() & 1:
                path.append(v)
                if search(mask & ~(1 << v)):
                    return True
                path.pop()
        dead[mask] = 1
        return False

    full = (1 << n) - 1
    if not search(full):
        return None
    return path + list(bits(full & ~mask_of(path)))


def greedy_even_degenerate(g: Graph, policy: str = "first-index",
                           rng: RandomSource | None = None) -> list[int] | None:
    """Repeatedly delete an even-degree vertex picked by ``policy``; ``None`` if stuck."""
    if policy not in POLICIES:
        raise InputError(f"unknown policy {policy!r}; choose from {', '.join(POLICIES)}")
    if policy == "random" and rng is None:
        raise InputError("random policy needs an rng")
    rows = g.rows
    mask = (1 << g.n) - 1
    order: list[int] = []
    while mask.bit_count() > 2:
        even = [v for v in bits(mask) if not (rows[v] & mask).bit_count() & 1]
        if not even:
            return None
        if policy == "first-index":
            v = even[0]
        elif policy == "random":
            v = even[int(rng.integers(len(even)))]
        else:
            sign = 1 if policy == "min-degree" else -1
            v = min(even, key=lambda x: (sign * (rows[x] & mask).bit_count(), x))
        order.append(v)
        mask &= ~(1 << v)
    return order + list(bits(mask))


def _independent_subsets(rows: tuple[int, ...], mask: int):
    """Nonempty independent subsets of ``mask``, larger-inclusion branches first."""
    verts = list(bits(mask))

    def rec(i: int, chosen: int, blocked: int):
        if i == len(verts):
            if chosen:
                yield chosen
            return
        v = verts[i]
        if not (blocked >> v) & 1:
            yield from rec(i + 1, chosen | (1 << v), blocked | rows[v])
        yield from rec(i + 1, chosen, blocked)

    return rec(0, 0, 0)


def exact_even_decomposable(g: Graph, limit: int = DECOMPOSE_LIMIT) -> list[list[int]] | None:
    """A chain ``V = V_1 ⊇ ... ⊇ V_k = ∅`` with even induced edge counts and
    independent differences, or ``None``."""
    n = g.n
    if n > limit:
        raise CapacityError(f"n={n} exceeds the decomposition search limit {limit}")
    rows = g.rows
    dead = bytearray(1 << n)
    chain: list[int] = []

    def search(mask: int) -> bool:
        if mask == 0:
            return True
        if dead[mask]:
            return False
        for ind in _independent_subsets(rows, mask):
            nxt = mask & ~ind
            if g.edge_count_within(nxt) & 1:
                continue
            chain.append(nxt)
            if search(nxt):
                return True
            chain.pop()
        dead[mask] = 1
        return False

    full = (1 << n) - 1
    if g.m & 1:
        return None
    if not search(full):
        return None
    return [list(bits(m)) for m in [full] + chain]


def verify_decomposition(g: Graph, chain: Sequence[Sequence[int]]) -> bool:
    """Check a decomposition chain against the definition."""
    if not chain or sorted(chain[0]) != list(range(g.n)) or len(chain[-1]) != 0:
        return False
    masks = [mask_of(c) for c in chain]
    for cur, nxt in zip(masks, masks[1:]):
        if nxt & ~cur or nxt == cur:
            return False
        diff = cur & ~nxt
        if any(g.rows[v] & diff for v in bits(diff)):
            return False
    return all(g.edge_count_within(m) % 2 == 0 for m in masks)


def build_prescribed_witness(rev: Revelation, n: int) -> tuple[Graph, list[int]]:
    """A graph satisfying ``rev`` together with an even elimination ordering of it.

    Gadget labels are the lowest unused indices outside ``A``, taken in the
    order ``x_a`` (a ascending), ``y_a`` (a ascending), ``w``, ``t1``, ``t2``, ``b``.
    """
    A = sorted(rev.A)
    k = len(A)
    if n < 3 * k + 4:
        raise CapacityError(f"n={n} is below 3|A|+4={3 * k + 4}")
    if any(not 0 <= a < n for a in A):
        raise InputError("revealed vertex outside 0..n-1")
    aset = set(A)
    free = [v for v in range(n) if v not in aset]
    x = dict(zip(A, free[:k]))
    y = dict(zip(A, free[k:2 * k]))
    w, t1, t2, b = free[2 * k:2 * k + 4]
    edges = set(rev.H)
    for a in A:
        edges.add((min(a, x[a]), max(a, x[a])))
        if rev.deg_H(a) % 2 == rev.deg_parity[a]:
            edges.add((min(a, y[a]), max(a, y[a])))
        edges.add((min(w, x[a]), max(w, x[a])))
    edges |= {(min(w, t1), max(w, t1)), (min(w, t2), max(w, t2)), (min(t1, t2), max(t1, t2))}
    if len(edges) % 2 != rev.edge_parity:
        edges.add((min(b, w), max(b, w)))
    g = Graph.from_edges(n, edges)

    rows = g.rows
    mask = (1 << n) - 1
    order: list[int] = []

    def drop(v: int) -> None:
        nonlocal mask
        order.append(v)
        mask &= ~(1 << v)

    for a in A:
        if (rows[a] & mask).bit_count() & 1:
            drop(x[a])
        drop(a)
    if (rows[w] & mask).bit_count() & 1:
        drop(t1)
        drop(w)
        tail = []
    else:
        drop(w)
        tail = [t1, t2]
    order += [v for v in bits(mask) if v not in tail] + tail
    return g, order
