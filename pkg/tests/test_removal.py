from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evendegen.degeneracy import exact_even_degenerate, verify_ordering
from evendegen.errors import CapacityError, InputError
from evendegen.graph import Graph, PotentialEdgeSet
from evendegen.removal import (CertifierParams, CertifierTrail, RemovalConfig, double_removal,
                               make_double_plan, make_uw_config, recursive_even_degenerate,
                               uw_removal, verify_outcome)
from evendegen.removal.double import default_eta
from evendegen.removal.uw import block_count, cyclic_block, decreasing_blocks
from evendegen.revelation import Revelation
from evendegen.rng import RandomSource
from evendegen.sampling import sample_gnp, sample_partially_revealed

from oracles import named_graph


def six_vertex_config() -> RemovalConfig:
    return RemovalConfig(6, Revelation(), (0, 1, 2), (3,), ((4,), (5,)))


def test_block_count_and_cyclic_block():
    assert block_count(10_000, 0.1, 1.0) == 251
    assert [cyclic_block(q, 3) for q in range(1, 8)] == [1, 2, 3, 1, 2, 3, 1]


def test_balanced_uw_config():
    cfg = make_uw_config(100, Revelation(), 0.1, rng=RandomSource(1))
    cfg.validate()
    assert len(cfg.U) == len(cfg.W) == 50
    sizes = [len(cfg.W_sharp)] + [len(b) for b in cfg.W_blocks]
    assert len(sizes) == cfg.s + 1 and max(sizes) - min(sizes) <= 1
    assert make_uw_config(100, Revelation(), 0.1, rng=RandomSource(1)) == cfg


def test_decreasing_blocks_tile_in_order():
    seq = list(range(101))
    sharp, blocks = decreasing_blocks(seq, 10)
    assert sharp == tuple(range(92, 101))
    flat = [v for b in reversed(blocks) for v in b] + list(sharp)
    assert flat == seq
    sizes = [len(sharp)] + [len(b) for b in blocks]
    assert max(sizes) - min(sizes) <= 1
    # each block sits above the next one
    assert all(min(blocks[j]) > max(blocks[j + 1]) for j in range(9))


def test_hand_simulated_success():
    g = Graph.from_edges(6, [(0, 4), (4, 5)])
    cfg = six_vertex_config()
    out = uw_removal(g, cfg)
    assert out.success and out.R == (4, 0, 1, 2) and out.V_W == (3, 5)
    assert [r.branch for r in out.transcript.rounds] == ["paired", "even", "even"]
    assert verify_outcome(g, out, cfg)


def test_hand_simulated_failure():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2)])
    out = uw_removal(g, six_vertex_config())
    assert not out.success and out.fail_round == 2 and out.R == (0,)
    assert verify_outcome(g, out, six_vertex_config())


def test_empty_graph_removes_everything_in_order():
    rev = Revelation((7, 3), frozenset(), {7: 0, 3: 0}, 0)
    cfg = make_uw_config(40, rev, 0.1, rng=RandomSource(2))
    out = uw_removal(Graph.empty(40), cfg)
    assert out.success and out.R == (7, 3) + cfg.U and set(out.V_W) == set(cfg.W)
    assert verify_outcome(Graph.empty(40), out, cfg)


def test_tampered_outcome_rejected():
    g = Graph.from_edges(6, [(0, 4), (4, 5)])
    out = uw_removal(g, six_vertex_config())
    bad = type(out)(out.success, (0, 4, 1, 2), out.V_W, out.transcript)
    assert not verify_outcome(g, bad)


def test_capacity_error_for_tiny_w():
    with pytest.raises(CapacityError):
        make_uw_config(20, Revelation(), 0.1, s_factor=5.0)


@given(st.integers(12, 44), st.floats(0.2, 0.8), st.integers(0, 10**6), st.sampled_from([0.3, 1.0]))
@settings(max_examples=60, deadline=None)
def test_uw_properties(n, p, seed, sf):
    rng = RandomSource(seed)
    g = sample_gnp(n, p, rng)
    try:
        cfg = make_uw_config(n, Revelation(), 0.1, sf, rng)
    except CapacityError:
        return
    out = uw_removal(g, cfg)
    assert verify_outcome(g, out, cfg)
    # replay gives the identical transcript
    assert uw_removal(g, cfg).to_json() == out.to_json()
    # the q-th vertex taken from W lies in block q mod s
    block_of = cfg.block_of()
    taken = [r.chosen for r in out.transcript.rounds if r.branch == "paired"]
    assert [block_of[w] for w in taken] == [cyclic_block(q, cfg.s) for q in range(1, len(taken) + 1)]
    if out.success:
        tail = exact_even_degenerate(g.induced(out.V_W)[0])
        if tail is not None:
            assert verify_ordering(g, list(out.R) + [out.V_W[v] for v in tail])


def test_random_policy_is_seeded():
    g = sample_gnp(300, 0.5, RandomSource(1))
    cfg = make_uw_config(300, Revelation(), 0.1, 0.1, RandomSource(2))
    a = uw_removal(g, cfg, "random", RandomSource(3))
    b = uw_removal(g, cfg, "random", RandomSource(3))
    assert a.to_json() == b.to_json() and verify_outcome(g, a, cfg)


def test_removal_with_revealed_part():
    rng = RandomSource(8)
    n = 400
    rev = Revelation((0, 1, 2), frozenset({(0, 2)}), {0: 1, 1: 0, 2: 1}, 1)
    g = sample_partially_revealed(n, 0.5, rev, rng)
    cfg = make_uw_config(n, rev, 0.1, 0.1, rng)
    out = uw_removal(g, cfg)
    assert verify_outcome(g, out, cfg)
    assert [c for c, _ in out.transcript.I_A] == [0, 1, 2][:len(out.transcript.I_A)]


# double removal

def test_double_plan_partition_and_eta_budget():
    rng = RandomSource(4)
    for n in (400, 1000, 3000):
        plan = make_double_plan(n, Revelation(), 0.1, rng=rng)
        assert sorted(plan.B + plan.C) == list(range(n))
        for sharp, blocks in ((plan.B_sharp, plan.B_blocks), (plan.C_sharp, plan.C_blocks)):
            sizes = [len(sharp)] + [len(b) for b in blocks]
            assert max(sizes) - min(sizes) <= 1
        max_block = max(len(b) for b in plan.C_blocks + (plan.C_sharp,))
        assert plan.eta * max_block <= 0.01 * n ** 0.8 + max_block
        assert plan.eta == default_eta(n, 0.1, plan.s, -(-len(plan.C) // (plan.s + 1)))


def test_double_plan_capacity_guards():
    with pytest.raises(CapacityError):
        make_double_plan(10, Revelation(), 0.1, s=3)
    rev = Revelation(tuple(range(40)), frozenset(), {a: 0 for a in range(40)}, 0)
    with pytest.raises(CapacityError):
        make_double_plan(100, rev, 0.1)
    with pytest.raises(InputError):
        make_double_plan(100, Revelation(), 0.1, s=0)


def test_double_on_empty_graph_is_degenerate():
    n = 200
    plan = make_double_plan(n, Revelation(), 0.1, rng=RandomSource(1))
    out_bc, out_cb, plan = double_removal(Graph.empty(n), plan)
    assert out_bc.success and out_cb.success
    assert plan.sets_B.degenerate and plan.sets_C.degenerate
    assert plan.sets_B.i == plan.sets_C.i == 0


def _check_side(n, sets):
    V = set(sets.remaining)
    assert sets.A | sets.T_Q == V and not (sets.A & sets.T_Q)
    sigma = sets.sigma(n)
    keep = (PotentialEdgeSet.within(n, V) | PotentialEdgeSet.between(n, sets.P, sets.T_P)
            | PotentialEdgeSet.between(n, sets.Q, sets.T_Q))
    assert sigma.isdisjoint(keep)
    whole = PotentialEdgeSet.within(n, sets.side)
    s0, s1, s2 = sets.sigma_parts(n)
    assert (sigma | s0 | PotentialEdgeSet.within(n, sets.A) | s1 | s2) == whole
    assert len(sets.P) == len(sets.Q) == sets.eta


def test_double_dual_success_identities():
    n = 2000
    rng = RandomSource(12)
    g = sample_gnp(n, 0.5, rng)
    plan = make_double_plan(n, Revelation(), 0.1, rng=rng)
    out_bc, out_cb, plan = double_removal(g, plan)
    assert out_bc.success and out_cb.success
    assert verify_outcome(g, out_bc, plan.config_BC()) and verify_outcome(g, out_cb, plan.config_CB())
    V_B, V_C = set(plan.sets_B.remaining), set(plan.sets_C.remaining)
    assert not V_B & V_C
    assert 0.2 <= len(V_B) / n <= 0.3 and 0.2 <= len(V_C) / n <= 0.3
    _check_side(n, plan.sets_B)
    _check_side(n, plan.sets_C)


def test_eta_clamp_warns():
    n = 300
    rng = RandomSource(5)
    g = sample_gnp(n, 0.5, rng)
    plan = make_double_plan(n, Revelation(), 0.1, eta=40, rng=rng, s=3)
    _, _, plan = double_removal(g, plan)
    sets = plan.sets_C or plan.sets_B
    assert sets is not None
    if sets.i - 40 + 1 <= 2 * plan.s:
        assert sets.eta == max(1, sets.i - 2 * plan.s) and sets.warnings
    else:
        assert sets.eta == 40


# recursive certifier

def test_certifier_on_empty_graph():
    order = recursive_even_degenerate(Graph.empty(100), None, 0.1, rng=RandomSource(1))
    assert order is not None and verify_ordering(Graph.empty(100), order)


def test_certifier_delegates_small_graphs():
    assert recursive_even_degenerate(Graph.from_edges(*named_graph("K4")), None, 0.1) is None
    assert recursive_even_degenerate(Graph.from_edges(*named_graph("C5")), None, 0.1) is not None


def test_certifier_on_random_graph():
    rng = RandomSource(21)
    g = sample_gnp(300, 0.5, rng)
    trail = CertifierTrail()
    order = recursive_even_degenerate(g, None, 0.1, CertifierParams(), rng, trail)
    assert order is not None and verify_ordering(g, order)
    assert trail.events and trail.events[0]["step"] == "double"


def test_certifier_respects_revelation():
    rng = RandomSource(2)
    rev = Revelation((5, 9), frozenset({(5, 9)}), {5: 1, 9: 1}, 0)
    g = sample_partially_revealed(200, 0.5, rev, rng)
    order = recursive_even_degenerate(g, rev, 0.1, rng=rng)
    assert order is None or verify_ordering(g, order)


def test_eta_default_formula():
    assert default_eta(10_000, 0.1, 25, 80) == min(max(1, math.floor(0.02 * 10_000 ** 0.4)),
                                                   math.floor(0.01 * 10_000 ** 0.8 / 80) + 1, 25)
