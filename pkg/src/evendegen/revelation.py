"""Conditioning data of a partially revealed random graph."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError
from .graph import Graph, mask_of


@dataclass(frozen=True)
class Revelation:
    """Revealed part ``A`` (ordered), the induced graph ``H`` on it, the
    degree-parity targets of ``A`` and the parity of the total edge count."""

    A: tuple[int, ...] = ()
    H: frozenset[tuple[int, int]] = frozenset()
    deg_parity: dict[int, int] = field(default_factory=dict)
    edge_parity: int = 0
    alpha: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", tuple(int(a) for a in self.A))
        object.__setattr__(self, "H", frozenset((min(u, v), max(u, v)) for u, v in self.H))
        object.__setattr__(self, "deg_parity", {int(a): int(b) & 1 for a, b in self.deg_parity.items()})
        if len(set(self.A)) != len(self.A):
            raise InputError("revealed part has repeated vertices")
        aset = set(self.A)
        for u, v in self.H:
            if u == v or u not in aset or v not in aset:
                raise InputError(f"H edge ({u},{v}) not a pair inside A")
        if set(self.deg_parity) != aset:
            raise InputError("deg_parity must have exactly one entry per vertex of A")
        if self.edge_parity not in (0, 1):
            raise InputError("edge_parity must be 0 or 1")

    def deg_H(self, a: int) -> int:
        return sum(1 for e in self.H if a in e)

    def check_size(self, n: int) -> None:
        """Raise unless ``|A| <= n^(1 - 2 alpha)`` (only when alpha is set)."""
        if self.alpha is not None and len(self.A) > n ** (1 - 2 * self.alpha):
            raise InputError(f"|A|={len(self.A)} exceeds n^(1-2a)={n ** (1 - 2 * self.alpha):.2f}")

    @classmethod
    def of_graph(cls, g: Graph, A, within: set[int] | None = None, alpha: float | None = None) -> "Revelation":
        """The revelation that ``g`` (restricted to ``within``) actually satisfies."""
        within = set(range(g.n)) if within is None else set(within)
        wmask = mask_of(within)
        A = tuple(A)
        amask = mask_of(A)
        H = {(u, v) for u in A for v in A if u < v and g.has_edge(u, v)}
        dp = {a: g.degree(a, wmask) & 1 for a in A}
        return cls(A, frozenset(H), dp, g.edge_count_within(wmask) & 1, alpha)

    def to_json(self) -> dict:
        out = {
            "A": list(self.A),
            "H": [list(e) for e in sorted(self.H)],
            "deg_parity": {str(a): self.deg_parity[a] for a in self.A},
            "edge_parity": self.edge_parity,
        }
        if self.alpha is not None:
            out["alpha"] = self.alpha
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Revelation":
        try:
            return cls(
                A=tuple(data.get("A", [])),
                H=frozenset(tuple(e) for e in data.get("H", [])),
                deg_parity={int(k): int(v) for k, v in data.get("deg_parity", {}).items()},
                edge_parity=int(data.get("edge_parity", 0)),
                alpha=data.get("alpha"),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"bad revelation JSON: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "Revelation":
        return cls.from_json(json.loads(Path(path).read_text()))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True) + "\n")


def verify_revelation(g: Graph, rev: Revelation) -> bool:
    """True iff ``g[A] = H``, every ``deg(a)`` has its target parity and ``e(g)`` has parity ``s``."""
    if any(not 0 <= a < g.n for a in rev.A):
        raise InputError("revealed vertex outside the graph")
    A = rev.A
    for i, u in enumerate(A):
        for v in A[i + 1:]:
            if g.has_edge(u, v) != ((min(u, v), max(u, v)) in rev.H):
                return False
    if any(g.degree(a) & 1 != rev.deg_parity[a] for a in A):
        return False
    return g.m & 1 == rev.edge_parity
