"""Two interleaved (U, W)-removals over a balanced split ``B, C`` and the sets derived from them."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from ..errors import CapacityError, InputError
from ..graph import Graph, PotentialEdgeSet
from ..revelation import Revelation
from ..rng import RandomSource
from .uw import (RemovalConfig, RemovalOutcome, balanced_cuts, block_count, cyclic_block,
                 decreasing_blocks, uw_removal)

log = logging.getLogger(__name__)

DEFAULT_S_FACTOR = 0.1


def default_eta(n: int, alpha: float, s: int, max_block: int) -> int:
    """``max(1, floor(0.02 n^(1/2 - alpha)))``, kept within the size budget of the block unions."""
    eta = max(1, int(math.floor(0.02 * n ** (0.5 - alpha))))
    budget = 0.01 * n ** (1 - 2 * alpha)
    cap = int(math.floor(budget / max_block)) + 1 if max_block else eta
    return max(1, min(eta, cap, s))


@dataclass
class SideSets:
    """Sets derived on one side (``B`` or ``C``) after the removal that consumed it.

    ``removed`` lists the side's vertices in removal order; ``P``/``Q`` are its
    first and last ``eta`` entries, ``D_P``/``D_Q`` the matching block unions.
    """

    side: tuple[int, ...]
    remaining: tuple[int, ...]
    removed: tuple[int, ...]
    i: int
    i_prime: int
    eta: int
    P: frozenset[int]
    Q: frozenset[int]
    D_P: frozenset[int]
    D_Q: frozenset[int]
    A: frozenset[int]
    T_P: frozenset[int]
    T_Q: frozenset[int]
    degenerate: bool = False
    warnings: list[str] = field(default_factory=list)

    def sigma(self, n: int) -> PotentialEdgeSet:
        """``binom(side, 2)`` minus ``binom(V_side, 2)`` and the two guarded stars."""
        keep = (PotentialEdgeSet.within(n, self.remaining)
                | PotentialEdgeSet.between(n, self.P, self.T_P)
                | PotentialEdgeSet.between(n, self.Q, self.T_Q))
        return PotentialEdgeSet.within(n, self.side) - keep

    def sigma_parts(self, n: int) -> tuple[PotentialEdgeSet, PotentialEdgeSet, PotentialEdgeSet]:
        """The three pieces of the unrevealed part: inside ``V_side`` off ``A``, and the two stars."""
        return (PotentialEdgeSet.within(n, self.remaining) - PotentialEdgeSet.within(n, self.A),
                PotentialEdgeSet.between(n, self.P, self.T_P),
                PotentialEdgeSet.between(n, self.Q, self.T_Q))

    def to_json(self) -> dict:
        as_list = lambda xs: sorted(xs)  # noqa: E731
        return {
            "i": self.i, "i_prime": self.i_prime, "eta": self.eta, "degenerate": self.degenerate,
            "P": as_list(self.P), "Q": as_list(self.Q), "D_P": as_list(self.D_P),
            "D_Q": as_list(self.D_Q), "A": as_list(self.A), "T_P": as_list(self.T_P),
            "T_Q": as_list(self.T_Q), "remaining": list(self.remaining), "warnings": self.warnings,
        }


@dataclass
class DoubleRemovalPlan:
    n: int
    revelation: Revelation
    alpha: float
    B: tuple[int, ...]
    C: tuple[int, ...]
    s: int
    eta: int
    r_B: tuple[int, ...]
    r_C: tuple[int, ...]
    B_sharp: tuple[int, ...]
    B_blocks: tuple[tuple[int, ...], ...]
    C_sharp: tuple[int, ...]
    C_blocks: tuple[tuple[int, ...], ...]
    sets_B: SideSets | None = None
    sets_C: SideSets | None = None

    def config_BC(self) -> RemovalConfig:
        """Remove ``A`` then ``B``, pairing with the blocks of ``C``."""
        return RemovalConfig(self.n, self.revelation, self.B, self.C_sharp, self.C_blocks)

    def config_CB(self) -> RemovalConfig:
        return RemovalConfig(self.n, self.revelation, self.C, self.B_sharp, self.B_blocks)

    def to_json(self) -> dict:
        return {
            "n": self.n, "alpha": self.alpha, "s": self.s, "eta": self.eta,
            "revelation": self.revelation.to_json(),
            "B": list(self.B), "C": list(self.C), "r_B": list(self.r_B), "r_C": list(self.r_C),
            "sets_B": None if self.sets_B is None else self.sets_B.to_json(),
            "sets_C": None if self.sets_C is None else self.sets_C.to_json(),
        }


def make_double_plan(n: int, rev: Revelation, alpha: float, s: int | None = None,
                     eta: int | None = None, rng: RandomSource | None = None,
                     s_factor: float = DEFAULT_S_FACTOR,
                     enforce_reveal_bound: bool = True) -> DoubleRemovalPlan:
    """Split ``V \\ A`` into balanced halves and cut each into ``s + 1`` decreasing-order blocks.

    The minimum size is ``min(|B|, |C|) >= 4s + 2 eta``, which leaves room
    for more than ``2s + eta`` removals on each side. With
    ``enforce_reveal_bound`` the revealed part must satisfy
    ``|A| <= n^(1 - 2 alpha)``.
    """
    if any(not 0 <= a < n for a in rev.A):
        raise InputError("revealed vertex outside 0..n-1")
    if enforce_reveal_bound and len(rev.A) > n ** (1 - 2 * alpha):
        raise CapacityError(f"|A|={len(rev.A)} exceeds n^(1-2a)={n ** (1 - 2 * alpha):.2f}")
    aset = set(rev.A)
    rest = [v for v in range(n) if v not in aset]
    if rng is not None:
        rest = [rest[i] for i in rng.permutation(len(rest))]
    half = len(rest) // 2
    B, C = sorted(rest[:half]), sorted(rest[half:])
    if s is None:
        s = block_count(n, alpha, s_factor)
    if s < 1:
        raise InputError("s must be at least 1")
    max_block = -(-len(C) // (s + 1)) if C else 0
    if eta is None:
        eta = default_eta(n, alpha, s, max_block)
    if eta < 1:
        raise InputError("eta must be at least 1")
    need = 4 * s + 2 * eta
    if min(len(B), len(C)) < need:
        raise CapacityError(f"min(|B|,|C|)={min(len(B), len(C))} below 4s+2eta={need}")
    B_sharp, B_blocks = decreasing_blocks(B, s)
    C_sharp, C_blocks = decreasing_blocks(C, s)
    return DoubleRemovalPlan(
        n, rev, alpha, tuple(B), tuple(C), s, eta,
        tuple(balanced_cuts(len(B), s + 1)), tuple(balanced_cuts(len(C), s + 1)),
        B_sharp, tuple(B_blocks), C_sharp, tuple(C_blocks))


def derive_side_sets(side: tuple[int, ...], sharp: tuple[int, ...],
                     blocks: tuple[tuple[int, ...], ...], s: int, eta: int,
                     outcome: RemovalOutcome) -> SideSets:
    """Derived sets for the side whose vertices served as ``W`` in ``outcome``."""
    if not outcome.success:
        raise InputError("derived sets need a successful removal")
    members = set(side)
    removed = tuple(v for v in outcome.R if v in members)
    remaining = tuple(sorted(members.difference(removed)))
    i = len(removed)
    notes: list[str] = []
    if i == 0:
        D_P = frozenset().union(*blocks[:eta])
        A = (frozenset(sharp) | D_P) & frozenset(remaining)
        notes.append("no vertices removed from this side; P, Q and D_Q are empty")
        return SideSets(side, remaining, removed, 0, 0, eta, frozenset(), frozenset(), D_P,
                        frozenset(), A, frozenset(remaining) - A, frozenset(remaining) - A,
                        degenerate=True, warnings=notes)
    if i - eta + 1 <= 2 * s:
        clamped = max(1, i - 2 * s)
        msg = f"i={i}, eta={eta}, s={s}: i-eta+1 <= 2s, eta clamped to {clamped}"
        log.warning(msg)
        notes.append(msg)
        eta = clamped
    i_prime = cyclic_block(i, s)
    P = frozenset(removed[:eta])
    Q = frozenset(removed[max(0, i - eta):])
    D_P = frozenset().union(*blocks[:eta])
    # block indices i'-eta+1 .. i' taken cyclically in 1..s
    D_Q = frozenset().union(*(blocks[cyclic_block(i_prime - k, s) - 1] for k in range(eta)))
    V = frozenset(remaining)
    A = (frozenset(sharp) | D_P | D_Q) & V
    T_P = (V | Q) - (D_P | frozenset(sharp))
    T_Q = V - A
    return SideSets(side, remaining, removed, i, i_prime, eta, P, Q, D_P, D_Q, A, T_P, T_Q,
                    warnings=notes)


def double_removal(g: Graph, plan: DoubleRemovalPlan, policy: str = "lowest",
                   rng: RandomSource | None = None
                   ) -> tuple[RemovalOutcome, RemovalOutcome, DoubleRemovalPlan]:
    """Run the (B, C)- and (C, B)-removals on ``g`` and fill in the derived sets of each survivor."""
    if g.n != plan.n:
        raise InputError("plan built for a different vertex count")
    out_bc = uw_removal(g, plan.config_BC(), policy, rng)
    out_cb = uw_removal(g, plan.config_CB(), policy, rng)
    plan.sets_C = (derive_side_sets(plan.C, plan.C_sharp, plan.C_blocks, plan.s, plan.eta, out_bc)
                   if out_bc.success else None)
    plan.sets_B = (derive_side_sets(plan.B, plan.B_sharp, plan.B_blocks, plan.s, plan.eta, out_cb)
                   if out_cb.success else None)
    return out_bc, out_cb, plan
