"""Exact and sampled laws of parity vectors over iid Bernoulli bits, with uniformity diagnostics.

Ground elements are ``0..t-1``. An outcome ``(Y_1, ..., Y_r)`` is encoded as
the integer whose bit ``j`` is ``Y_{j+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta

from .errors import CapacityError, InputError
from .rng import RandomSource

ENUM_LIMIT = 24
AFFECT_LIMIT = 20
_CHUNK = 1 << 20


@dataclass(frozen=True)
class IndexSetFamily:
    t: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sets", tuple(frozenset(int(i) for i in s) for s in self.sets))
        if not self.sets:
            raise InputError("a family needs at least one set")
        for s in self.sets:
            if any(not 0 <= i < self.t for i in s):
                raise InputError(f"set element outside 0..{self.t - 1}")

    @property
    def r(self) -> int:
        return len(self.sets)

    def masks(self) -> list[int]:
        return [sum(1 << i for i in s) for s in self.sets]

    def membership(self) -> np.ndarray:
        """``r x t`` 0/1 matrix of set indicators."""
        m = np.zeros((self.r, self.t), dtype=np.uint8)
        for j, s in enumerate(self.sets):
            m[j, list(s)] = 1
        return m

    def to_json(self) -> dict:
        return {"t": self.t, "sets": [sorted(s) for s in self.sets]}


@dataclass(frozen=True)
class ParityDistribution:
    r: int
    mass: np.ndarray

    def __post_init__(self) -> None:
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != (1 << self.r,):
            raise InputError(f"expected {1 << self.r} masses, got {mass.shape}")
        if (mass < 0).any() or abs(math.fsum(mass.tolist()) - 1.0) > 1e-12:
            raise InputError("masses must be non-negative and sum to 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    def __getitem__(self, outcome) -> float:
        if not isinstance(outcome, int):
            outcome = sum(int(b) << j for j, b in enumerate(outcome))
        return float(self.mass[outcome])


@dataclass
class UniformityReport:
    epsilon: float
    fix_parity: tuple[int, float] | None = None
    method: str = "exact"
    samples: int | None = None
    confidence: float | None = None
    epsilon_interval: tuple[float, float] | None = None
    support_mismatch: int = 0
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "fix_parity": None if self.fix_parity is None else list(self.fix_parity),
            "method": self.method, "samples": self.samples, "confidence": self.confidence,
            "epsilon_interval": None if self.epsilon_interval is None else list(self.epsilon_interval),
            "support_mismatch": self.support_mismatch, "notes": self.notes,
        }


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise InputError(f"p must lie in (0, 1), got {p}")


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a)


def _outcome_codes(x: np.ndarray, masks: list[int]) -> np.ndarray:
    out = np.zeros(x.shape, dtype=np.int64)
    for j, m in enumerate(masks):
        out |= ((_popcount(x & np.uint64(m)) & 1).astype(np.int64)) << j
    return out


def _weights(t: int, p: float) -> np.ndarray:
    k = np.arange(t + 1)
    return np.exp(k * math.log(p) + (t - k) * math.log1p(-p))


def _joint_counts(t: int, key_fn, keys: int) -> np.ndarray:
    """``counts[key, k]``: assignments with the given key and ``k`` ones."""
    counts = np.zeros((keys, t + 1), dtype=np.int64)
    total = 1 << t
    for start in range(0, total, _CHUNK):
        x = np.arange(start, min(total, start + _CHUNK), dtype=np.uint64)
        key = key_fn(x)
        k = _popcount(x).astype(np.int64)
        counts += np.bincount(key * (t + 1) + k, minlength=keys * (t + 1)).reshape(keys, t + 1)
    return counts


def _masses(counts: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Row sums of ``counts * w`` with compensated summation."""
    wl = w.tolist()
    out = np.zeros(counts.shape[0])
    for i in np.flatnonzero(counts.any(axis=1)):
        out[i] = math.fsum(c * wk for c, wk in zip(counts[i].tolist(), wl) if c)
    return out


def exact_parity_distribution(fam: IndexSetFamily, p: float) -> ParityDistribution:
    """Law of the set parities by enumerating all ``2^t`` bit assignments."""
    _check_p(p)
    if fam.t > ENUM_LIMIT:
        raise CapacityError(f"t={fam.t} exceeds the enumeration limit {ENUM_LIMIT}")
    if fam.r > ENUM_LIMIT:
        raise CapacityError(f"r={fam.r} exceeds the enumeration limit {ENUM_LIMIT}")
    masks = fam.masks()
    counts = _joint_counts(fam.t, lambda x: _outcome_codes(x, masks), 1 << fam.r)
    mass = _masses(counts, _weights(fam.t, p))
    return ParityDistribution(fam.r, mass / math.fsum(mass.tolist()))


def _ratio_epsilon(scaled: np.ndarray) -> float:
    lo, hi = float(scaled.min()), float(scaled.max())
    if lo <= 0.0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - lo, 1.0 - 1.0 / hi))


def _parity_class(r: int) -> np.ndarray:
    return (_popcount(np.arange(1 << r, dtype=np.uint64)) & 1).astype(np.int64)


def epsilon_uniform_estimate(d: ParityDistribution) -> UniformityReport:
    """Least ``eps`` with every mass in ``[(1-eps) 2^-r, (1-eps)^-1 2^-r]`` (1 if none below 1)."""
    return UniformityReport(_ratio_epsilon(d.mass * (1 << d.r)))


def fix_parity_check(d: ParityDistribution) -> UniformityReport:
    """Uniformity on a single parity class, when the support allows it."""
    rep = epsilon_uniform_estimate(d)
    cls = _parity_class(d.r)
    occupied = {int(c) for c in cls[d.mass > 0]}
    if len(occupied) != 1:
        rep.notes.append("support meets both parity classes")
        return rep
    s = occupied.pop()
    cells = d.mass[cls == s] * (1 << (d.r - 1))
    rep.fix_parity = (s, _ratio_epsilon(cells))
    return rep


def single_parity_bias(p: float, eta: int) -> tuple[float, float]:
    """``(P[Y=0], P[Y=1])`` for the parity of ``eta`` iid Bernoulli(p) bits.

    Raises ``ArithmeticError`` if the decay ``|1-2p|^eta <= exp(-2 eta min(p, 1-p))`` fails.
    """
    _check_p(p)
    if eta < 1:
        raise InputError("eta must be at least 1")
    bias = abs(1.0 - 2.0 * p) ** eta
    if bias > math.exp(-2.0 * eta * min(p, 1.0 - p)) * (1 + 1e-12):
        raise ArithmeticError(f"parity decay bound violated at p={p}, eta={eta}")
    zero = 0.5 * (1.0 + (1.0 - 2.0 * p) ** eta)
    return zero, 1.0 - zero


def layering_number(fam: IndexSetFamily) -> int:
    """Largest ``eta`` for which the sequence is ``eta``-layered; ``t + 1`` for a single set."""
    if fam.r == 1:
        return fam.t + 1
    best = fam.t + 1
    later = set(fam.sets[-1])
    for s in reversed(fam.sets[:-1]):
        best = min(best, len(s - later))
        later |= s
    return best


def gf2_rank(rows: list[int]) -> int:
    """Rank over the two-element field of row bitmasks."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def _as_bit_matrix(T) -> np.ndarray:
    T = np.asarray(T, dtype=np.int64) & 1
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise InputError("transform must be a square matrix")
    return T.astype(np.uint8)


def gf2_inverse(T) -> np.ndarray:
    """Inverse over the two-element field; ``InputError`` if singular."""
    T = _as_bit_matrix(T)
    r = T.shape[0]
    aug = np.concatenate([T, np.eye(r, dtype=np.uint8)], axis=1)
    for col in range(r):
        piv = next((i for i in range(col, r) if aug[i, col]), None)
        if piv is None:
            raise InputError("transform is singular over GF(2)")
        aug[[col, piv]] = aug[[piv, col]]
        for i in range(r):
            if i != col and aug[i, col]:
                aug[i] ^= aug[col]
    return aug[:, r:]


def apply_f2_transform(fam: IndexSetFamily, T) -> IndexSetFamily:
    """Family whose per-element indicator vectors are ``T`` times the originals."""
    T = _as_bit_matrix(T)
    if T.shape[0] != fam.r:
        raise InputError(f"transform is {T.shape[0]}x{T.shape[0]} but the family has {fam.r} sets")
    if gf2_rank([int("".join(map(str, row[::-1])), 2) for row in T.tolist()]) != fam.r:
        raise InputError("transform is singular over GF(2)")
    new = (T.astype(np.int64) @ fam.membership().astype(np.int64)) & 1
    return IndexSetFamily(fam.t, tuple(frozenset(np.flatnonzero(row).tolist()) for row in new))


def transform_outcome(T, outcome: int) -> int:
    """Image of an encoded outcome vector under ``T``."""
    T = _as_bit_matrix(T)
    vec = np.array([(outcome >> j) & 1 for j in range(T.shape[0])], dtype=np.int64)
    img = (T.astype(np.int64) @ vec) & 1
    return int(sum(int(b) << j for j, b in enumerate(img)))


@dataclass
class LayeredCheck:
    applicable: bool
    eta: int
    bound: float
    epsilon: float | None
    ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def check_layered_uniformity(fam: IndexSetFamily, p: float, T=None) -> LayeredCheck:
    """Exact ``eps`` of the parity law against ``r * exp(-2 eta min(p, 1-p))``.

    ``eta`` is the layering number of ``fam``, capped by the size of the last
    set (which must itself carry ``eta`` fresh bits). With ``T`` the law
    checked is that of the transformed family.
    """
    _check_p(p)
    eta = min(layering_number(fam), len(fam.sets[-1]))
    bound = fam.r * math.exp(-2.0 * eta * min(p, 1.0 - p))
    if bound >= 1.0:
        return LayeredCheck(False, eta, bound, None, True)
    target = fam if T is None else apply_f2_transform(fam, T)
    eps = epsilon_uniform_estimate(exact_parity_distribution(target, p)).epsilon
    return LayeredCheck(True, eta, bound, eps, eps <= bound * (1 + 1e-9))


@dataclass
class AffectednessSetup:
    """Bits ``0..k-1`` form ``X``, bits ``k..t-1`` form ``X'``; all iid Bernoulli(p)."""

    fam: IndexSetFamily
    k: int
    p: float
    variant: str = "Y"  # "Y": compare (X|Y) to X; "evensum": compare (X|Y) to (X|W)

    def validate(self) -> None:
        _check_p(self.p)
        if not 1 <= self.k < self.fam.t:
            raise InputError("need 1 <= k < t")
        if self.fam.t > AFFECT_LIMIT:
            raise CapacityError(f"t={self.fam.t} exceeds the limit {AFFECT_LIMIT}")
        if self.k + self.fam.r > ENUM_LIMIT:
            raise CapacityError("k + r too large for the joint table")
        if self.variant not in ("Y", "evensum"):
            raise InputError(f"unknown variant {self.variant!r}")


@dataclass
class AffectednessReport:
    applicable: bool
    epsilon_Z: float
    bound: float | None
    deviation: float | None
    epsilon_Y: float | None
    ok: bool
    reason: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _ratio_deviation(ratio: np.ndarray) -> float:
    """Least ``d`` with all ratios in ``[1 - d, (1 - d)^-1]``."""
    return max(0.0, 1.0 - float(ratio.min()), 1.0 - 1.0 / float(ratio.max()))


def check_conditional_affectedness(setup: AffectednessSetup) -> AffectednessReport:
    """Exact check that conditioning on the parities moves ``X`` by at most ``2 eps_Z``.

    ``eps_Z`` is the uniformity (or fix-parity uniformity for ``evensum``) of
    the parities restricted to ``X'``. The lemma needs ``eps_Z < 1/2``.
    """
    setup.validate()
    fam, k, p = setup.fam, setup.k, setup.p
    t, r = fam.t, fam.r
    tail = ((1 << t) - 1) ^ ((1 << k) - 1)
    z_fam = IndexSetFamily(t, tuple(frozenset(i for i in s if i >= k) for s in fam.sets))
    z_law = exact_parity_distribution(z_fam, p)
    if setup.variant == "Y":
        eps_z = epsilon_uniform_estimate(z_law).epsilon
    else:
        fp = fix_parity_check(z_law).fix_parity
        eps_z = 1.0 if fp is None else fp[1]
    if eps_z >= 0.5:
        return AffectednessReport(False, eps_z, None, None, None, True,
                                  "eps_Z >= 1/2: hypothesis unmet")
    masks = fam.masks()
    head = (1 << k) - 1
    counts = _joint_counts(
        t, lambda x: ((x & np.uint64(head)).astype(np.int64) << r) | _outcome_codes(x, masks),
        1 << (k + r))
    joint = _masses(counts, _weights(t, p)).reshape(1 << k, 1 << r)
    joint /= joint.sum()
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    eps_y = _ratio_epsilon(py * (1 << r))
    bound = 2.0 * eps_z
    live = py > 0
    cond = joint[:, live] / py[live]
    if setup.variant == "Y":
        ref = np.broadcast_to(px[:, None], cond.shape)
    else:
        w_of_y = _parity_class(r)
        pw = np.array([py[w_of_y == c].sum() for c in (0, 1)])
        jw = np.stack([joint[:, w_of_y == c].sum(axis=1) for c in (0, 1)], axis=1)
        x_given_w = np.divide(jw, pw, out=np.zeros_like(jw), where=pw > 0)
        ref = x_given_w[:, w_of_y[live]]
    support = ref > 0
    if (cond[~support] > 0).any():
        return AffectednessReport(True, eps_z, bound, 1.0, eps_y, False, "support mismatch")
    dev = _ratio_deviation(cond[support] / ref[support])
    ok = dev <= bound * (1 + 1e-9) + 1e-12
    if setup.variant == "Y":
        ok = ok and eps_y <= eps_z * (1 + 1e-9) + 1e-12
    return AffectednessReport(True, eps_z, bound, dev, eps_y, ok)


def bipartite_family(a_size: int, b_size: int) -> IndexSetFamily:
    """Stars of a complete bipartite ground set: edge ``(i, j)`` is element ``i * b_size + j``."""
    rows = [frozenset(i * b_size + j for j in range(b_size)) for i in range(a_size)]
    cols = [frozenset(i * b_size + j for i in range(a_size)) for j in range(b_size)]
    return IndexSetFamily(a_size * b_size, tuple(rows + cols))


def bipartite_lemma_bound(a_size: int, b_size: int, p: float) -> float:
    """``exp(-eta p*^2 / 30)`` with ``eta = min(|A|, |B|)``."""
    return math.exp(-min(a_size, b_size) * min(p, 1 - p) ** 2 / 30.0)


def _clopper_pearson(k: np.ndarray, n: int, level: float) -> tuple[np.ndarray, np.ndarray]:
    a = level / 2
    lo = np.where(k > 0, beta.ppf(a, k, n - k + 1), 0.0)
    hi = np.where(k < n, beta.ppf(1 - a, k + 1, n - k), 1.0)
    return lo, hi


def bipartite_fix_parity_probe(a_size: int, b_size: int, p: float, mode: str = "exact",
                               trials: int = 100_000, rng: RandomSource | None = None,
                               level: float = 1e-3) -> UniformityReport:
    """Law of the degree-parity vector ``(par(a, B))_a, (par(b, A))_b`` of a p-random bipartite graph."""
    _check_p(p)
    if a_size < 1 or b_size < 1:
        raise InputError("both sides need at least one vertex")
    fam = bipartite_family(a_size, b_size)
    if mode == "exact":
        if a_size * b_size > ENUM_LIMIT:
            raise CapacityError(f"{a_size}x{b_size} exceeds the enumeration limit {ENUM_LIMIT}")
        rep = fix_parity_check(exact_parity_distribution(fam, p))
        rep.notes.append(f"lemma bound {bipartite_lemma_bound(a_size, b_size, p):.6g}")
        return rep
    if mode != "monte-carlo":
        raise InputError(f"unknown mode {mode!r}")
    if rng is None:
        raise InputError("monte-carlo mode needs an rng")
    r = a_size + b_size
    counts = np.zeros(1 << r, dtype=np.int64)
    weights_a = (1 << np.arange(a_size)).astype(np.int64)
    weights_b = (1 << np.arange(a_size, r)).astype(np.int64)
    batch = max(1, min(trials, (1 << 22) // (a_size * b_size)))
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        g = rng.random((m, a_size, b_size)) < p
        code = ((g.sum(axis=2) & 1) @ weights_a) + ((g.sum(axis=1) & 1) @ weights_b)
        counts += np.bincount(code, minlength=1 << r)
        done += m
    cls = _parity_class(r)
    freq = counts / trials
    rep = UniformityReport(_ratio_epsilon(freq * (1 << r)), method="monte-carlo",
                           samples=trials, confidence=1 - level)
    odd_hits = int(counts[cls == 1].sum())
    empty_even = int((counts[cls == 0] == 0).sum())
    rep.support_mismatch = odd_hits + empty_even
    if odd_hits:
        rep.notes.append(f"{odd_hits} samples in the odd class")
    if empty_even:
        rep.notes.append(f"{empty_even} even-class cells unsampled")
    cells = counts[cls == 0]
    if odd_hits == 0:
        scale = 1 << (r - 1)
        point = _ratio_epsilon(cells / trials * scale)
        lo, hi = _clopper_pearson(cells, trials, level / cells.size)
        # widest eps consistent with every per-cell interval, and the narrowest
        worst = max(1 - float(lo.min()) * scale, 1 - 1 / (float(hi.max()) * scale))
        best = max(0.0, 1 - float(hi.min()) * scale, 1 - 1 / max(float(lo.max()) * scale, 1e-300))
        rep.fix_parity = (0, point)
        rep.epsilon_interval = (min(point, max(0.0, best)), min(1.0, max(point, worst)))
    return rep


def switch_partner(adj: np.ndarray, i: int, parts: tuple[list[int], list[int]]) -> np.ndarray | None:
    """Swap the edges ``b_i a_k`` and ``b_{i+1} a_k`` at the first ``a_k`` of part ``i mod 2``
    that separates ``b_i`` from ``b_{i+1}``.

    ``adj`` is the ``|A| x |B|`` biadjacency matrix; ``i`` is 1-based. Returns
    ``None`` when no vertex of that part separates the two.
    """
    part = parts[i % 2]
    for a in part:
        if adj[a, i - 1] != adj[a, i]:
            out = adj.copy()
            out[a, i - 1], out[a, i] = adj[a, i], adj[a, i - 1]
            return out
    return None


def check_switch_involution(a_size: int, b_size: int) -> bool:
    """Exhaustively verify the switch maps on all bipartite graphs where every consecutive
    pair ``b_i, b_{i+1}`` is separated inside its part.

    Each map must keep the edge count, every ``par(a, B)`` and every other
    ``par(b, A)``, flip ``par(b_i, A)`` and ``par(b_{i+1}, A)``, stay in the
    domain, and be its own inverse.
    """
    if a_size * b_size > 16:
        raise CapacityError("switch check enumerates at most 2^16 graphs")
    if b_size < 2 or a_size < 2:
        raise InputError("need at least two vertices per side")
    half = a_size // 2
    parts = (list(range(half)), list(range(half, a_size)))

    def in_domain(adj) -> bool:
        return all(switch_partner(adj, i, parts) is not None for i in range(1, b_size))

    for code in range(1 << (a_size * b_size)):
        adj = np.array([(code >> e) & 1 for e in range(a_size * b_size)],
                       dtype=np.uint8).reshape(a_size, b_size)
        if not in_domain(adj):
            continue
        for i in range(1, b_size):
            img = switch_partner(adj, i, parts)
            if img.sum() != adj.sum() or not in_domain(img):
                return False
            if not np.array_equal(img.sum(axis=1) & 1, adj.sum(axis=1) & 1):
                return False
            flip = (img.sum(axis=0) & 1) ^ (adj.sum(axis=0) & 1)
            expect = np.zeros(b_size, dtype=flip.dtype)
            expect[[i - 1, i]] = 1
            if not np.array_equal(flip, expect):
                return False
            if not np.array_equal(switch_partner(img, i, parts), adj):
                return False
    return True
