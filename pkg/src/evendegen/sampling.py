"""Samplers for G(n, p) and for G(n, p) conditioned on revealed information.

The conditional sampler is exact and never rejects. Conditioning a
partially revealed graph on ``G[A] = H``, on the parities of ``deg(a)`` and on
the parity of ``|E|`` splits into independent constraints on disjoint groups
of potential edges:

* ``binom(A, 2)`` is fixed to ``H``;
* each star ``S(a, V \\ A)`` must have parity ``s_a - deg_H(a)``;
* ``binom(V \\ A, 2)`` must have the residual parity
  ``s - e(H) - sum_a (s_a - deg_H(a))``.

Each group is then a block of iid Bernoulli(p) bits conditioned on its sum
parity, drawn bit by bit from
``P[parity of k bits = 0] = (1 + (1 - 2p)^k) / 2``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InfeasibleError, InputError
from .graph import Graph
from .revelation import Revelation
from .rng import RandomSource

_ROW_CHUNK = 256


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise InputError(f"p must lie in (0, 1), got {p}")


def sample_gnp(n: int, p: float, rng: RandomSource) -> Graph:
    """Erdos-Renyi graph: row ``i`` consumes ``n`` uniforms, entries ``j > i`` decide ``ij``."""
    _check_p(p)
    if n < 1:
        raise InputError("n must be at least 1")
    adj = np.zeros((n, n), dtype=bool)
    for start in range(0, n, _ROW_CHUNK):
        stop = min(n, start + _ROW_CHUNK)
        block = rng.random((stop - start, n)) < p
        adj[start:stop] = np.triu(block, k=1 + start)
    adj |= adj.T
    return Graph.from_adjacency(adj)


def parity_zero_prob(k: int, p: float) -> float:
    """``P[X_1 + ... + X_k is even]`` for iid Bernoulli(p)."""
    return 0.5 * (1.0 + (1.0 - 2.0 * p) ** k)


def _tail_length(t: int, p: float) -> int:
    # beyond this many remaining bits the conditional law equals p in float64
    q = abs(1.0 - 2.0 * p)
    if q == 0.0:
        return min(t, 1)
    return min(t, int(math.ceil(-64.0 * math.log(2.0) / math.log(q))) + 1)


def sample_parity_constrained_bits(t: int, p: float, target: int, rng: RandomSource,
                                   size: int | None = None) -> np.ndarray:
    """``t`` iid Bernoulli(p) bits conditioned on their sum having parity ``target``.

    Returns a ``uint8`` array of shape ``(t,)``, or ``(size, t)`` for a batch.
    """
    _check_p(p)
    if t < 0:
        raise InputError("t must be non-negative")
    target &= 1
    if t == 0:
        if target:
            raise InfeasibleError("odd parity requested over zero bits")
        return np.zeros((0,) if size is None else (size, 0), dtype=np.uint8)
    shape = (1 if size is None else size, t)
    u = rng.random(shape)
    tail = _tail_length(t, p)
    head = t - tail
    out = np.empty(shape, dtype=np.uint8)
    out[:, :head] = u[:, :head] < p
    need = (np.full(shape[0], target, dtype=np.uint8)
            ^ (out[:, :head].sum(axis=1, dtype=np.int64) & 1).astype(np.uint8))
    c = 1.0 - 2.0 * p
    for i in range(head, t):
        k = t - i
        # P[X_i = 1 | bits i..t-1 have parity `need`]
        q_rest = 0.5 * (1.0 + np.where(need == 1, 1.0, -1.0) * c ** (k - 1))
        q_here = 0.5 * (1.0 + np.where(need == 0, 1.0, -1.0) * c ** k)
        prob1 = p * q_rest / q_here
        x = (u[:, i] < prob1).astype(np.uint8)
        out[:, i] = x
        need ^= x
    return out[0] if size is None else out


def _revealed_groups(n: int, rev: Revelation):
    if any(not 0 <= a < n for a in rev.A):
        raise InputError("revealed part outside 0..n-1")
    aset = set(rev.A)
    rest = [v for v in range(n) if v not in aset]
    star_targets = [(rev.deg_parity[a] - rev.deg_H(a)) & 1 for a in rev.A]
    residual = (rev.edge_parity - len(rev.H) - sum(star_targets)) & 1
    return rest, star_targets, residual


def sample_partially_revealed_adjacency(n: int, p: float, rev: Revelation, rng: RandomSource,
                                        size: int | None = None) -> np.ndarray:
    """Exact conditional sample(s) as boolean adjacency matrices."""
    _check_p(p)
    rest, star_targets, residual = _revealed_groups(n, rev)
    batch = 1 if size is None else size
    adj = np.zeros((batch, n, n), dtype=bool)
    for u, v in rev.H:
        adj[:, u, v] = adj[:, v, u] = True
    rest_idx = np.asarray(rest, dtype=np.intp)
    for a, tgt in zip(rev.A, star_targets):
        if not rest and tgt:
            raise InfeasibleError(f"star of {a} is empty but needs odd parity")
        x = sample_parity_constrained_bits(len(rest), p, tgt, rng, size=batch).astype(bool)
        adj[:, a, rest_idx] = x
        adj[:, rest_idx, a] = x
    m = len(rest)
    npairs = m * (m - 1) // 2
    if npairs == 0 and residual:
        raise InfeasibleError("no free pairs outside A but odd residual parity")
    if npairs:
        x = sample_parity_constrained_bits(npairs, p, residual, rng, size=batch).astype(bool)
        i, j = np.triu_indices(m, 1)
        adj[:, rest_idx[i], rest_idx[j]] = x
        adj[:, rest_idx[j], rest_idx[i]] = x
    return adj[0] if size is None else adj


def sample_partially_revealed(n: int, p: float, rev: Revelation, rng: RandomSource) -> Graph:
    """Exact sample from G(n, p) conditioned on the information in ``rev``."""
    return Graph.from_adjacency(sample_partially_revealed_adjacency(n, p, rev, rng))
