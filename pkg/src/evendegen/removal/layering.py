"""Layering of the parities revealed by one (U, W)-removal, restricted to the hidden region."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..graph import PotentialEdgeSet
from .uw import RemovalConfig, RemovalTranscript


@dataclass
class LayeringReport:
    sequence_length: int
    sigma_size: int
    q0_count: int
    qt_count: int
    layering: int
    bound: int
    min_q_size: int | None

    @property
    def ok(self) -> bool:
        return self.layering >= self.bound

    def to_json(self) -> dict:
        return {**self.__dict__, "ok": self.ok}


def exclusive_counts(n: int, sets: list[PotentialEdgeSet]) -> np.ndarray:
    """``|A_j \\ (A_{j+1} ∪ ... ∪ A_r)|`` for every ``j``."""
    if not sets:
        return np.zeros(0, dtype=np.int64)
    codes = np.concatenate([s.codes for s in sets])
    owner = np.concatenate([np.full(len(s), j, dtype=np.int64) for j, s in enumerate(sets)])
    # a pair counts only for the last set that contains it
    order = np.lexsort((owner, codes))
    codes, owner = codes[order], owner[order]
    is_last = np.ones(codes.size, dtype=bool)
    is_last[:-1] = codes[1:] != codes[:-1]
    return np.bincount(owner[is_last], minlength=len(sets))


def layering_of(n: int, sets: list[PotentialEdgeSet]) -> int:
    """Largest ``eta`` for which the sequence is ``eta``-layered (``n*n`` when it has one set)."""
    if len(sets) <= 1:
        return n * n
    return int(exclusive_counts(n, sets)[:-1].min())


def _check_transcript(tr: RemovalTranscript, cfg: RemovalConfig) -> None:
    aset, uset = set(cfg.revelation.A), set(cfg.U)
    block_of = cfg.block_of()
    if any(c not in aset for c, _ in tr.I_A) or any(c not in uset for c, _ in tr.I_U):
        raise InputError("transcript centers do not match the config's A and U")
    if any(block_of.get(w, 0) == 0 for w, _ in tr.I_W):
        raise InputError("transcript probes a vertex outside the W blocks")
    removed_len = max((r.snapshot for r in tr.rounds), default=0)
    if any(k > removed_len for _, k in tr.I_W):
        raise InputError("transcript snapshot beyond the recorded removals")


def removed_sequence(tr: RemovalTranscript) -> list[int]:
    """The removal sequence reconstructed from the round records."""
    out: list[int] = []
    for rd in tr.rounds:
        if rd.branch == "even":
            out.append(rd.center)
        elif rd.branch == "paired":
            out.extend((rd.chosen, rd.center))
    return out


def analyze_transcript_layering(tr: RemovalTranscript, cfg: RemovalConfig) -> LayeringReport:
    """Order the revealed families as in the layering argument and measure the result.

    The sequence is: the hidden region ``binom(W, 2) ∪ S(A ∪ U, W_#)`` itself,
    the stars ``S(u, W_#)``, then every ``Q_0(w)``, then every ``Q_t(w)``
    with ``t >= 1``. Here ``Q'_0(w) ⊆ Q'_1(w) ⊆ ...`` are ``w``'s revealed
    stars inside ``binom(W, 2)`` from latest to earliest and
    ``Q_t = Q'_t \\ Q'_{t-1}``.
    """
    _check_transcript(tr, cfg)
    n = cfg.n
    W = cfg.W
    sharp = cfg.W_sharp
    R = removed_sequence(tr)
    W_arr = np.asarray(W, dtype=np.int64)
    removed_at = np.full(n, len(R) + 1, dtype=np.int64)
    removed_at[np.asarray(R, dtype=np.int64)] = np.arange(len(R))
    left_at = removed_at[W_arr]
    sigma = PotentialEdgeSet.within(n, W) | PotentialEdgeSet.between(
        n, list(cfg.revelation.A) + list(cfg.U), sharp)
    sharp_stars = [PotentialEdgeSet.star(n, u, sharp) for u in list(cfg.revelation.A) + list(cfg.U)]

    snapshots: dict[int, set[int]] = {}
    for w, k in tr.I_W:
        snapshots.setdefault(w, set()).add(k)
    q0, qt = [], []
    for w in sorted(snapshots):
        ks = sorted(snapshots[w], reverse=True)
        q0.append(PotentialEdgeSet.star(n, w, W_arr[left_at >= ks[0]]))
        # Q_t holds the W vertices that left between two consecutive reveals
        for later, earlier in zip(ks, ks[1:]):
            ring = W_arr[(left_at >= earlier) & (left_at < later)]
            if ring.size:
                qt.append(PotentialEdgeSet.star(n, w, ring))
    sequence = [sigma] + sharp_stars + q0 + qt
    layering = layering_of(n, sequence)
    s = cfg.s
    bound = min(s, len(sharp))
    sizes = [len(x) for x in qt]
    return LayeringReport(len(sequence), len(sigma), len(q0), len(qt), layering, bound,
                          min(sizes) if sizes else None)
