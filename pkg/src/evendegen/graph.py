"""Simple graphs stored as per-vertex bit rows, and sets of potential edges."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from pathlib import Path

import numpy as np

from .errors import InputError


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    ``rows[v]`` is an int whose bit ``u`` is set iff ``uv`` is an edge, so the
    parity of a star ``S(v, X)`` is ``(rows[v] & mask(X)).bit_count() & 1``.
    """

    __slots__ = ("n", "rows", "_adj", "_m")

    def __init__(self, n: int, rows: Iterable[int]):
        rows = tuple(int(r) for r in rows)
        if len(rows) != n:
            raise InputError(f"expected {n} rows, got {len(rows)}")
        full = (1 << n) - 1
        for v, r in enumerate(rows):
            if r & ~full:
                raise InputError(f"row {v} has neighbours outside 0..{n - 1}")
            if (r >> v) & 1:
                raise InputError(f"self-loop at {v}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_adj", None)
        object.__setattr__(self, "_m", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> "Graph":
        adj = np.asarray(adj, dtype=bool)
        n = adj.shape[0]
        if adj.shape != (n, n) or not np.array_equal(adj, adj.T):
            raise InputError("adjacency must be a symmetric square matrix")
        if n == 0:
            return cls(0, [])
        packed = np.packbits(adj, axis=1, bitorder="little")
        rows = [int.from_bytes(packed[v].tobytes(), "little") for v in range(n)]
        g = cls(n, rows)
        object.__setattr__(g, "_adj", adj.copy())
        return g

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def degree(self, v: int, within: int | None = None) -> int:
        r = self.rows[v] if within is None else self.rows[v] & within
        return r.bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.rows[v]))

    @property
    def m(self) -> int:
        if self._m is None:
            object.__setattr__(self, "_m", sum(r.bit_count() for r in self.rows) // 2)
        return self._m

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u, r in enumerate(self.rows):
            for v in bits(r >> (u + 1)):
                out.append((u, u + 1 + v))
        return out

    def edge_count_within(self, mask: int) -> int:
        return sum((self.rows[v] & mask).bit_count() for v in bits(mask)) // 2

    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix (cached, read-only)."""
        if self._adj is None:
            adj = np.zeros((self.n, self.n), dtype=bool)
            nbytes = (self.n + 7) // 8
            for v, r in enumerate(self.rows):
                if r:
                    row = np.frombuffer(r.to_bytes(nbytes, "little"), dtype=np.uint8)
                    adj[v] = np.unpackbits(row, bitorder="little")[: self.n].astype(bool)
            adj.setflags(write=False)
            object.__setattr__(self, "_adj", adj)
        return self._adj

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled ``0..k-1`` in increasing vertex order.

        Returns the subgraph and the list mapping new labels to old ones.
        """
        old = sorted(set(vertices))
        index = {v: i for i, v in enumerate(old)}
        rows = []
        for v in old:
            r = 0
            for u in bits(self.rows[v]):
                if u in index:
                    r |= 1 << index[u]
            rows.append(r)
        return Graph(len(old), rows), old

    def relabel(self, perm: list[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class PotentialEdgeSet:
    """A set of unordered vertex pairs, stored as sorted codes ``u*n + v`` (u < v)."""

    __slots__ = ("n", "codes")

    def __init__(self, n: int, codes: np.ndarray | Iterable[int] = ()):
        arr = np.unique(np.asarray(list(codes) if not isinstance(codes, np.ndarray) else codes,
                                   dtype=np.int64))
        self.n = n
        self.codes = arr
        self.codes.setflags(write=False)

    @classmethod
    def _trusted(cls, n: int, codes: np.ndarray) -> "PotentialEdgeSet":
        obj = cls.__new__(cls)
        obj.n = n
        obj.codes = codes
        codes.setflags(write=False)
        return obj

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "PotentialEdgeSet":
        codes = []
        for u, v in pairs:
            if u == v:
                raise InputError(f"pair ({u},{v}) is not a 2-set")
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"pair ({u},{v}) out of range for n={n}")
            if u > v:
                u, v = v, u
            codes.append(u * n + v)
        return cls(n, codes)

    @classmethod
    def between(cls, n: int, a: Iterable[int], b: Iterable[int]) -> "PotentialEdgeSet":
        """``S(A, B)``: all pairs ``{x, y}`` with ``x`` in A, ``y`` in B, ``x != y``."""
        a = np.asarray(sorted(set(a)), dtype=np.int64)
        b = np.asarray(sorted(set(b)), dtype=np.int64)
        _check_range(n, a)
        _check_range(n, b)
        if a.size == 0 or b.size == 0:
            return cls._trusted(n, np.zeros(0, dtype=np.int64))
        x = np.repeat(a, b.size)
        y = np.tile(b, a.size)
        keep = x != y
        lo = np.minimum(x[keep], y[keep])
        hi = np.maximum(x[keep], y[keep])
        return cls._trusted(n, np.unique(lo * n + hi))

    @classmethod
    def star(cls, n: int, center: int, others: Iterable[int]) -> "PotentialEdgeSet":
        """``S({center}, others)``."""
        if not 0 <= center < n:
            raise InputError(f"vertex {center} out of range for n={n}")
        o = np.unique(np.asarray(others if isinstance(others, np.ndarray) else list(others),
                                 dtype=np.int64))
        _check_range(n, o)
        lo, hi = o[o < center], o[o > center]
        # both halves are already increasing and every low code precedes every high one
        return cls._trusted(n, np.concatenate([lo * n + center, center * n + hi]))

    @classmethod
    def within(cls, n: int, a: Iterable[int]) -> "PotentialEdgeSet":
        """``binom(A, 2)``."""
        a = np.asarray(sorted(set(a)), dtype=np.int64)
        _check_range(n, a)
        if a.size < 2:
            return cls._trusted(n, np.zeros(0, dtype=np.int64))
        i, j = np.triu_indices(a.size, 1)
        return cls._trusted(n, np.sort(a[i] * n + a[j]))

    def pairs(self) -> Iterator[tuple[int, int]]:
        for c in self.codes.tolist():
            yield divmod(c, self.n)

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return self.codes // self.n, self.codes % self.n

    def _same_space(self, other: "PotentialEdgeSet") -> None:
        if self.n != other.n:
            raise InputError("potential edge sets over different vertex counts")

    def __or__(self, other: "PotentialEdgeSet") -> "PotentialEdgeSet":
        self._same_space(other)
        return PotentialEdgeSet._trusted(self.n, np.union1d(self.codes, other.codes))

    def __sub__(self, other: "PotentialEdgeSet") -> "PotentialEdgeSet":
        self._same_space(other)
        return PotentialEdgeSet._trusted(
            self.n, np.setdiff1d(self.codes, other.codes, assume_unique=True))

    def __and__(self, other: "PotentialEdgeSet") -> "PotentialEdgeSet":
        self._same_space(other)
        return PotentialEdgeSet._trusted(
            self.n, np.intersect1d(self.codes, other.codes, assume_unique=True))

    restrict = __and__

    def isdisjoint(self, other: "PotentialEdgeSet") -> bool:
        return len(self & other) == 0

    def __len__(self) -> int:
        return int(self.codes.size)

    def __contains__(self, pair) -> bool:
        u, v = pair
        if u > v:
            u, v = v, u
        c = u * self.n + v
        i = np.searchsorted(self.codes, c)
        return bool(i < self.codes.size and self.codes[i] == c)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PotentialEdgeSet) and self.n == other.n
                and np.array_equal(self.codes, other.codes))

    def __hash__(self) -> int:
        return hash((self.n, self.codes.tobytes()))

    def __repr__(self) -> str:
        return f"PotentialEdgeSet(n={self.n}, size={len(self)})"


def _check_range(n: int, arr: np.ndarray) -> None:
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise InputError(f"vertex out of range for n={n}")


def par(g: Graph, s: PotentialEdgeSet) -> int:
    """Parity of ``|E(g) ∩ s|``."""
    u, v = s.endpoints()
    if u.size and (u.max() >= g.n or v.max() >= g.n):
        raise InputError("potential edge endpoint outside the graph")
    if u.size < 64:
        rows = g.rows
        return sum((rows[a] >> b) & 1 for a, b in zip(u.tolist(), v.tolist())) & 1
    return int(g.adjacency()[u, v].sum()) & 1


def par_star(g: Graph, v: int, mask: int) -> int:
    """Parity of the star ``S(v, X)`` where ``X`` is given as a bitmask."""
    return (g.rows[v] & mask).bit_count() & 1


def read_graph(path: str | Path) -> Graph:
    """Parse the text format: ``n m`` then ``m`` lines ``u v`` with ``u < v``."""
    lines = Path(path).read_text().split("\n")
    tokens = [ln.split() for ln in lines if ln.strip()]
    if not tokens or len(tokens[0]) != 2:
        raise InputError(f"{path}: header must be 'n m'")
    try:
        n, m = int(tokens[0][0]), int(tokens[0][1])
        edges = [(int(a), int(b)) for a, b in tokens[1:]]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if len(edges) != m:
        raise InputError(f"{path}: header says {m} edges, found {len(edges)}")
    for u, v in edges:
        if not 0 <= u < v < n:
            raise InputError(f"{path}: edge line '{u} {v}' violates 0 <= u < v < n")
    g = Graph.from_edges(n, edges)
    if g.m != m:
        raise InputError(f"{path}: duplicate edges")
    return g


def format_graph(g: Graph) -> str:
    edges = g.edges()
    return "".join([f"{g.n} {len(edges)}\n"] + [f"{u} {v}\n" for u, v in edges])


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))
