"""Recursive even-degeneracy certifier built on the double removal."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..degeneracy import DP_LIMIT, exact_even_degenerate, greedy_even_degenerate
from ..errors import CapacityError
from ..graph import Graph
from ..revelation import Revelation
from ..rng import RandomSource
from .double import DEFAULT_S_FACTOR, double_removal, make_double_plan

log = logging.getLogger(__name__)


@dataclass
class CertifierParams:
    s_factor: float = DEFAULT_S_FACTOR
    eta: int | None = None
    dp_threshold: int = 20
    max_attempts: int = 3
    greedy_fallback_tries: int = 3
    # at desk scale the unremoved top block alone can exceed n^(1-2 alpha)
    enforce_reveal_bound: bool = False


@dataclass
class CertifierTrail:
    """What happened at each recursion level, for diagnostics."""

    events: list[dict] = field(default_factory=list)

    def note(self, **kw) -> None:
        self.events.append(kw)


def _recurse_on(g: Graph, prefix: tuple[int, ...], keep: tuple[int, ...], A_keep,
                alpha: float, params: CertifierParams, rng: RandomSource,
                trail: CertifierTrail, depth: int) -> list[int] | None:
    sub, old = g.induced(keep)
    new_index = {v: i for i, v in enumerate(old)}
    sub_rev = Revelation.of_graph(sub, [new_index[a] for a in sorted(A_keep)])
    tail = _certify(sub, sub_rev, alpha, params, rng, trail, depth + 1)
    if tail is None:
        return None
    return list(prefix) + [old[v] for v in tail]


def _certify(g: Graph, rev: Revelation, alpha: float, params: CertifierParams,
             rng: RandomSource, trail: CertifierTrail, depth: int) -> list[int] | None:
    n = g.n
    if n <= params.dp_threshold:
        order = exact_even_degenerate(g, limit=max(params.dp_threshold, DP_LIMIT))
        trail.note(depth=depth, n=n, step="dp", ok=order is not None)
        return order
    for attempt in range(params.max_attempts):
        try:
            plan = make_double_plan(n, rev, alpha, eta=params.eta, rng=rng,
                                    s_factor=params.s_factor,
                                    enforce_reveal_bound=params.enforce_reveal_bound)
        except CapacityError as exc:
            trail.note(depth=depth, n=n, step="plan", ok=False, reason=str(exc))
            break
        out_bc, out_cb, plan = double_removal(g, plan)
        trail.note(depth=depth, n=n, step="double", attempt=attempt, revealed=len(rev.A),
                   reveal_bound=n ** (1 - 2 * alpha), bc=out_bc.success, cb=out_cb.success)
        for out, sets in ((out_bc, plan.sets_C), (out_cb, plan.sets_B)):
            if not out.success:
                continue
            order = _recurse_on(g, out.R, out.V_W, sets.A, alpha, params, rng, trail, depth)
            if order is not None:
                return order
    if n <= DP_LIMIT:
        order = exact_even_degenerate(g)
        trail.note(depth=depth, n=n, step="dp-fallback", ok=order is not None)
        return order
    for _ in range(params.greedy_fallback_tries):
        order = greedy_even_degenerate(g, "random", rng)
        if order is not None:
            trail.note(depth=depth, n=n, step="greedy-fallback", ok=True)
            return order
    trail.note(depth=depth, n=n, step="greedy-fallback", ok=False)
    return None


def recursive_even_degenerate(g: Graph, rev: Revelation | None, alpha: float,
                              params: CertifierParams | None = None,
                              rng: RandomSource | None = None,
                              trail: CertifierTrail | None = None) -> list[int] | None:
    """Certify even-degeneracy by repeated double removal down to an exact search.

    Each level removes a verified prefix and recurses on what is left, which
    is revealed only through the sets the removal exposed. ``None`` means
    every attempt and fallback failed, not that no ordering exists.
    """
    params = params or CertifierParams()
    rng = rng or RandomSource(0)
    rev = rev or Revelation()
    trail = trail if trail is not None else CertifierTrail()
    return _certify(g, rev, alpha, params, rng, trail, 0)
