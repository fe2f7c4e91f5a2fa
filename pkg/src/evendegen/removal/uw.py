"""The (U, W)-removal procedure and its transcript."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import CapacityError, InputError
from ..graph import Graph, bits, mask_of, par_star
from ..revelation import Revelation
from ..rng import RandomSource


def cyclic_block(q: int, s: int) -> int:
    """``q mod s`` with values in ``1..s``."""
    return (q - 1) % s + 1


def balanced_cuts(total: int, parts: int) -> list[int]:
    """Boundaries ``r_1 < ... < r_parts = total`` of a balanced split into ``parts`` runs."""
    base, extra = divmod(total, parts)
    cuts, acc = [], 0
    for i in range(parts):
        acc += base + (1 if i < extra else 0)
        cuts.append(acc)
    return cuts


def decreasing_blocks(seq: list[int], s: int) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    """Split ordered ``seq`` into ``s + 1`` balanced runs, highest run first.

    Returns ``(sharp, [block_1, ..., block_s])`` where ``sharp`` holds the
    highest positions of ``seq`` and ``block_s`` the lowest.
    """
    cuts = balanced_cuts(len(seq), s + 1)
    runs, prev = [], 0
    for c in cuts:
        runs.append(tuple(seq[prev:c]))
        prev = c
    # runs[0] = lowest positions -> block_s ; runs[s] -> sharp
    return runs[s], [runs[s - j] for j in range(1, s + 1)]


def block_count(n: int, alpha: float, s_factor: float) -> int:
    return max(1, int(math.floor(s_factor * n ** (0.5 + alpha) + 0.5)))


@dataclass(frozen=True)
class RemovalConfig:
    n: int
    revelation: Revelation
    U: tuple[int, ...]
    W_sharp: tuple[int, ...]
    W_blocks: tuple[tuple[int, ...], ...]

    @property
    def s(self) -> int:
        return len(self.W_blocks)

    @property
    def W(self) -> tuple[int, ...]:
        return tuple(sorted(self.W_sharp + sum(self.W_blocks, ())))

    def validate(self) -> None:
        A = self.revelation.A
        parts = list(A) + list(self.U) + list(self.W_sharp) + [w for b in self.W_blocks for w in b]
        if sorted(parts) != list(range(self.n)):
            raise InputError("A, U and the W blocks must partition 0..n-1")
        if self.s < 1:
            raise InputError("need at least one W block")
        sizes = [len(self.W_sharp)] + [len(b) for b in self.W_blocks]
        if max(sizes) - min(sizes) > 1:
            raise InputError("W blocks are not balanced")

    def block_of(self) -> dict[int, int]:
        """Map each W vertex to its block index (0 for the sharp block)."""
        out = {w: 0 for w in self.W_sharp}
        for j, b in enumerate(self.W_blocks, start=1):
            for w in b:
                out[w] = j
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "revelation": self.revelation.to_json(),
            "U": list(self.U),
            "W_sharp": list(self.W_sharp),
            "W_blocks": [list(b) for b in self.W_blocks],
        }


def make_uw_config(n: int, rev: Revelation, alpha: float, s_factor: float = 1.0,
                   rng: RandomSource | None = None) -> RemovalConfig:
    """Random balanced split of ``V \\ A`` into ``U`` and ``W``; ``W`` cut into ``s + 1`` blocks.

    ``s = max(1, round(s_factor * n^(1/2 + alpha)))``. Without ``rng`` the
    split alternates over ``V \\ A`` in index order.
    """
    rev.check_size(n)
    aset = set(rev.A)
    rest = [v for v in range(n) if v not in aset]
    if rng is not None:
        rest = [rest[i] for i in rng.permutation(len(rest))]
        half = len(rest) // 2
        U, W = sorted(rest[:half]), sorted(rest[half:])
    else:
        U, W = rest[0::2], rest[1::2]
        if len(U) > len(W):
            U, W = W, U
    s = block_count(n, alpha, s_factor)
    if len(W) < s + 1:
        raise CapacityError(f"|W|={len(W)} too small for s+1={s + 1} nonempty blocks")
    sharp, blocks = decreasing_blocks(W, s)
    return RemovalConfig(n, rev, tuple(U), sharp, tuple(blocks))


@dataclass
class RoundRecord:
    p: int
    center: int
    snapshot: int
    parity: int
    branch: str  # "even" | "paired" | "fail"
    block: int | None = None
    candidates: list[tuple[int, int, int]] = field(default_factory=list)
    chosen: int | None = None

    def to_json(self) -> dict:
        return {
            "p": self.p, "center": self.center, "snapshot": self.snapshot,
            "parity": self.parity, "branch": self.branch, "block": self.block,
            "candidates": [list(c) for c in self.candidates], "chosen": self.chosen,
        }


@dataclass
class RemovalTranscript:
    """Everything revealed by one run.

    Stars are stored as ``(center, k)`` meaning ``S(center, V \\ {R_1..R_k})``,
    i.e. ``k`` is the length of the removed prefix at reveal time; probed edge
    sets as ``(center, j, k)`` meaning ``S(center, W_j \\ {R_1..R_k})``.
    """

    rounds: list[RoundRecord] = field(default_factory=list)
    I_A: list[tuple[int, int]] = field(default_factory=list)
    I_U: list[tuple[int, int]] = field(default_factory=list)
    I_W: list[tuple[int, int]] = field(default_factory=list)
    I_e: list[tuple[int, int, int]] = field(default_factory=list)
    p_final: int = 0
    q_final: int = 1

    def to_json(self) -> dict:
        return {
            "rounds": [r.to_json() for r in self.rounds],
            "I_A": [list(x) for x in self.I_A],
            "I_U": [list(x) for x in self.I_U],
            "I_W": [list(x) for x in self.I_W],
            "I_e": [list(x) for x in self.I_e],
            "p_final": self.p_final,
            "q_final": self.q_final,
        }


@dataclass
class RemovalOutcome:
    success: bool
    R: tuple[int, ...]
    V_W: tuple[int, ...] | None
    transcript: RemovalTranscript
    fail_round: int | None = None

    @property
    def removed_from_W(self) -> int:
        return self.transcript.q_final - 1

    def to_json(self) -> dict:
        return {
            "status": "success" if self.success else "failure",
            "fail_round": self.fail_round,
            "R": list(self.R),
            "V_W": None if self.V_W is None else list(self.V_W),
            "transcript": self.transcript.to_json(),
        }


def uw_removal(g: Graph, cfg: RemovalConfig, policy: str = "lowest",
               rng: RandomSource | None = None) -> RemovalOutcome:
    """Run the (U, W)-removal on ``g``.

    ``policy`` picks among eligible ``w``: ``"lowest"`` index (default) or
    ``"random"`` (needs ``rng``).
    """
    if g.n != cfg.n:
        raise InputError("config built for a different vertex count")
    if policy not in ("lowest", "random"):
        raise InputError(f"unknown candidate policy {policy!r}")
    if policy == "random" and rng is None:
        raise InputError("random candidate policy needs an rng")
    s = cfg.s
    a_set = set(cfg.revelation.A)
    rows = g.rows
    remaining = (1 << g.n) - 1
    R: list[int] = []
    tr = RemovalTranscript()
    q = 1
    order = list(cfg.revelation.A) + list(cfg.U)
    for p_idx, u in enumerate(order, start=1):
        k = len(R)
        parity = (rows[u] & remaining).bit_count() & 1
        (tr.I_A if u in a_set else tr.I_U).append((u, k))
        tr.p_final = p_idx
        if parity == 0:
            tr.rounds.append(RoundRecord(p_idx, u, k, 0, "even"))
            R.append(u)
            remaining &= ~(1 << u)
            continue
        j = cyclic_block(q, s)
        tr.I_e.append((u, j, k))
        cands = []
        eligible = []
        for w in cfg.W_blocks[j - 1]:
            if not (remaining >> w) & 1:
                continue
            e = (rows[u] >> w) & 1
            pw = (rows[w] & remaining).bit_count() & 1
            tr.I_W.append((w, k))
            cands.append((w, e, pw))
            if e and not pw:
                eligible.append(w)
        if not eligible:
            tr.rounds.append(RoundRecord(p_idx, u, k, 1, "fail", j, cands))
            return RemovalOutcome(False, tuple(R), None, tr, fail_round=p_idx)
        if policy == "lowest":
            w = min(eligible)
        else:
            w = eligible[int(rng.integers(len(eligible)))]
        tr.rounds.append(RoundRecord(p_idx, u, k, 1, "paired", j, cands, w))
        R.extend((w, u))
        remaining &= ~((1 << w) | (1 << u))
        q += 1
        tr.q_final = q
    V_W = tuple(bits(remaining))
    return RemovalOutcome(True, tuple(R), V_W, tr)


def removal_prefix_valid(g: Graph, R: tuple[int, ...] | list[int]) -> bool:
    """True iff each ``R[i]`` has an even number of neighbours outside ``R[:i]``."""
    if len(set(R)) != len(R):
        return False
    remaining = (1 << g.n) - 1
    for v in R:
        if par_star(g, v, remaining):
            return False
        remaining &= ~(1 << v)
    return True


def verify_outcome(g: Graph, out: RemovalOutcome, cfg: RemovalConfig | None = None) -> bool:
    """Check the removal parities against ``g`` and the transcript's internal consistency.

    With ``cfg`` the block discipline and star families are also checked.
    """
    R = list(out.R)
    if not removal_prefix_valid(g, R):
        return False
    if out.success:
        if out.V_W is None or sorted(R + list(out.V_W)) != list(range(g.n)):
            return False
    tr = out.transcript
    pos = 0
    q = 1
    prefix: list[int] = []
    block_of = cfg.block_of() if cfg is not None else None
    order = (list(cfg.revelation.A) + list(cfg.U)) if cfg is not None else None
    iw = iter(tr.I_W)
    for i, rd in enumerate(tr.rounds, start=1):
        if rd.p != i or rd.snapshot != len(prefix):
            return False
        if order is not None and (i > len(order) or order[i - 1] != rd.center):
            return False
        if rd.parity != par_star(g, rd.center, _complement(g.n, prefix)):
            return False
        if rd.branch == "even":
            if rd.parity != 0 or pos >= len(R) or R[pos] != rd.center:
                return False
            prefix.append(rd.center)
            pos += 1
            continue
        if rd.parity != 1:
            return False
        if cfg is not None:
            if rd.block != cyclic_block(q, cfg.s):
                return False
            expected = [w for w in cfg.W_blocks[rd.block - 1] if w not in prefix]
            if [c[0] for c in rd.candidates] != expected:
                return False
        for w, _, _ in rd.candidates:
            if next(iw, None) != (w, rd.snapshot):
                return False
        if rd.branch == "fail":
            if any(e and not pw for _, e, pw in rd.candidates):
                return False
            return not out.success and out.fail_round == i and i == len(tr.rounds)
        w = rd.chosen
        if pos + 1 >= len(R) or R[pos] != w or R[pos + 1] != rd.center:
            return False
        if block_of is not None and block_of.get(w) != rd.block:
            return False
        if (w, 1, 0) not in [tuple(c) for c in rd.candidates]:
            return False
        prefix.extend((w, rd.center))
        pos += 2
        q += 1
    if next(iw, None) is not None:
        return False
    if pos != len(R) or q != tr.q_final:
        return False
    return out.success == (order is None or len(tr.rounds) == len(order))


def _complement(n: int, removed: list[int]) -> int:
    return ((1 << n) - 1) & ~mask_of(removed)
