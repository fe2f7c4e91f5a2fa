"""Seeded Monte Carlo sweeps and the bound recurrence."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import subprocess
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .degeneracy import DP_LIMIT, exact_even_degenerate, greedy_even_degenerate, verify_ordering
from .errors import CapacityError, InputError
from .removal.certifier import CertifierParams, recursive_even_degenerate
from .removal.double import DEFAULT_S_FACTOR
from .removal.uw import block_count, make_uw_config, uw_removal
from .revelation import Revelation
from .rng import RandomSource
from .sampling import sample_gnp

KINDS = ("removal-success", "degeneracy-rate", "remainder-size", "greedy-vs-exact")
CSV_COLUMNS = ("kind", "n", "p", "alpha", "s", "eta", "trials", "successes",
               "mean_remainder_frac", "stdev", "seconds")


@dataclass
class ExperimentSpec:
    kind: str
    n_grid: list[int]
    p_grid: list[float]
    trials: int
    master_seed: int
    alpha: float = 0.1
    s_factor: float | None = None
    eta: int | None = None
    time_budget: float | None = None

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InputError(f"unknown kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if not self.n_grid or not self.p_grid:
            raise InputError("grids must be nonempty")
        if any(n < 1 for n in self.n_grid) or any(not 0 < p < 1 for p in self.p_grid):
            raise InputError("grid values out of range")
        if self.master_seed < 0:
            raise InputError("masterSeed must be non-negative")

    @property
    def uw_s_factor(self) -> float:
        return 1.0 if self.s_factor is None else self.s_factor

    _KEYS = {"kind": "kind", "nGrid": "n_grid", "pGrid": "p_grid", "trials": "trials",
             "masterSeed": "master_seed", "alpha": "alpha", "sFactor": "s_factor",
             "eta": "eta", "timeBudget": "time_budget"}

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentSpec":
        unknown = set(data) - set(cls._KEYS)
        if unknown:
            raise InputError(f"unknown spec keys: {', '.join(sorted(unknown))}")
        try:
            spec = cls(**{cls._KEYS[k]: v for k, v in data.items()})
        except TypeError as exc:
            raise InputError(f"bad experiment spec: {exc}") from exc
        spec.validate()
        return spec

    def to_json(self) -> dict:
        return {k: getattr(self, attr) for k, attr in self._KEYS.items()}


@dataclass
class SummaryCell:
    kind: str
    n: int
    p: float
    alpha: float
    s: int | None
    eta: int | None
    trials: int
    successes: int
    failures: int
    mean_remainder_frac: float | None
    stdev: float | None
    seconds: float
    skipped: str | None = None
    extra: dict = field(default_factory=dict)

    def csv_row(self, timing: bool = False) -> list[str]:
        def num(x, fmt="{:.6f}"):
            return "" if x is None else fmt.format(x)

        return [self.kind, str(self.n), repr(self.p), repr(self.alpha), num(self.s, "{}"),
                num(self.eta, "{}"), str(self.trials),
                "" if self.skipped else str(self.successes),
                num(self.mean_remainder_frac), num(self.stdev),
                num(self.seconds, "{:.3f}") if timing else ""]


@dataclass
class _Trial:
    success: bool
    remainder: float | None = None
    exact: bool | None = None


def _run_trial(kind: str, n: int, p: float, spec: ExperimentSpec, stream: int) -> _Trial:
    rng = RandomSource(spec.master_seed, stream)
    g = sample_gnp(n, p, rng)
    if kind in ("removal-success", "remainder-size"):
        cfg = make_uw_config(n, Revelation(), spec.alpha, spec.uw_s_factor, rng)
        out = uw_removal(g, cfg)
        return _Trial(out.success, len(out.V_W) / n if out.success else None)
    if kind == "degeneracy-rate":
        if n <= DP_LIMIT:
            order = exact_even_degenerate(g)
        else:
            params = CertifierParams(s_factor=spec.s_factor or DEFAULT_S_FACTOR, eta=spec.eta)
            order = recursive_even_degenerate(g, None, spec.alpha, params, rng)
        if order is not None and not verify_ordering(g, order):
            raise AssertionError("decider returned an invalid ordering")
        return _Trial(order is not None)
    exact = exact_even_degenerate(g) is not None
    greedy = greedy_even_degenerate(g, "first-index") is not None
    return _Trial(greedy, exact=exact)


def _run_chunk(args) -> list[_Trial]:
    kind, n, p, spec, streams = args
    return [_run_trial(kind, n, p, spec, s) for s in streams]


def _cell_shape(spec: ExperimentSpec, n: int) -> tuple[int | None, int | None]:
    if spec.kind in ("removal-success", "remainder-size"):
        return block_count(n, spec.alpha, spec.uw_s_factor), None
    if spec.kind == "degeneracy-rate" and n > DP_LIMIT:
        return block_count(n, spec.alpha, spec.s_factor or DEFAULT_S_FACTOR), spec.eta
    return None, None


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[SummaryCell]:
    """One summary cell per ``(n, p)``; trial ``i`` of cell ``c`` uses stream ``c * trials + i``."""
    spec.validate()
    if spec.kind == "greedy-vs-exact" and max(spec.n_grid) > DP_LIMIT:
        raise InputError(f"greedy-vs-exact needs n <= {DP_LIMIT}")
    cells = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for ci, (n, p) in enumerate((n, p) for n in spec.n_grid for p in spec.p_grid):
            cells.append(_run_cell(spec, ci, n, p, pool, workers))
    finally:
        if pool is not None:
            pool.shutdown()
    return cells


def _run_cell(spec: ExperimentSpec, ci: int, n: int, p: float, pool, workers: int) -> SummaryCell:
    s, eta = _cell_shape(spec, n)
    start = time.perf_counter()
    base = ci * spec.trials
    results: list[_Trial] = []
    skipped = None
    try:
        if pool is None:
            for i in range(spec.trials):
                results.append(_run_trial(spec.kind, n, p, spec, base + i))
                if spec.time_budget is not None and time.perf_counter() - start > spec.time_budget:
                    if i + 1 < spec.trials:
                        skipped = f"time budget {spec.time_budget}s exceeded after {i + 1} trials"
                        break
        else:
            step = max(1, spec.trials // (4 * workers))
            chunks = [(spec.kind, n, p, spec, range(base + i, base + min(spec.trials, i + step)))
                      for i in range(0, spec.trials, step)]
            for part in pool.map(_run_chunk, chunks):
                results.extend(part)
    except CapacityError as exc:
        skipped = f"capacity: {exc}"
    seconds = time.perf_counter() - start
    wins = sum(r.success for r in results)
    fracs = [r.remainder for r in results if r.remainder is not None]
    if spec.kind in ("removal-success", "remainder-size"):
        mean = statistics.fmean(fracs) if fracs else None
        sd = statistics.stdev(fracs) if len(fracs) > 1 else None
    else:
        mean = None
        sd = statistics.pstdev([float(r.success) for r in results]) if results else None
    extra = {}
    if spec.kind == "greedy-vs-exact":
        extra = {"exact_successes": sum(bool(r.exact) for r in results),
                 "greedy_without_exact": sum(r.success and not r.exact for r in results)}
    return SummaryCell(spec.kind, n, p, spec.alpha, s, eta, spec.trials, wins,
                       len(results) - wins, mean, sd, seconds, skipped, extra)


def format_csv(cells: list[SummaryCell], timing: bool = False) -> str:
    """CSV text; ``seconds`` stays empty unless ``timing`` so reruns are byte-identical."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in cells:
        w.writerow(c.csv_row(timing))
    return buf.getvalue()


def emit_csv(cells: list[SummaryCell], path: str | Path, timing: bool = False) -> None:
    Path(path).write_text(format_csv(cells, timing))


def version_string() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def emit_report(cells: list[SummaryCell], spec: ExperimentSpec, path: str | Path | None = None) -> dict:
    report = {
        "version": version_string(),
        "masterSeed": spec.master_seed,
        "spec": spec.to_json(),
        "cells": [asdict(c) for c in cells],
    }
    if path is not None:
        Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


def emit_svg(cells: list[SummaryCell], path: str | Path) -> None:
    """Failure rate against ``n`` on log axes, one line per ``p``."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    floor = 0.5 / max((c.trials for c in cells), default=1)
    for p in sorted({c.p for c in cells}):
        row = sorted((c for c in cells if c.p == p and not c.skipped), key=lambda c: c.n)
        if row:
            ax.plot([c.n for c in row], [max(c.failures / c.trials, floor) for c in row],
                    marker="o", label=f"p={p:g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("failure rate")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


@dataclass
class RecurrenceParams:
    """Constants of the induction ``f(n) <= exp(-K n^b) + max f(n')^2`` with ``b = 1/2 - alpha``.

    ``epsilon`` bounds the base window. Unless given, ``M`` is the least
    integer with ``ln(1/epsilon) / M^b < K/2``, ``K0 = ln(1/epsilon) / M^b``
    and the window is ``[N0, M]`` with ``N0 = ceil((1/4 - c) M) - 1``.
    """

    K: float = 1.0
    alpha: float = 0.1
    c: float = 0.01
    epsilon: float = 1e-3
    K0: float | None = None
    M: int | None = None
    N0: int | None = None
    base_values: dict[int, float] | None = None

    @property
    def exponent(self) -> float:
        return 0.5 - self.alpha

    @property
    def zeta(self) -> float:
        return 2.0 * (0.25 - self.c) ** self.exponent - 1.0

    @classmethod
    def from_json(cls, data: dict) -> "RecurrenceParams":
        data = dict(data)
        if "baseValues" in data:
            data["base_values"] = {int(k): float(v) for k, v in data.pop("baseValues").items()}
        known = {"K", "alpha", "c", "epsilon", "K0", "M", "N0", "base_values"}
        if set(data) - known:
            raise InputError(f"unknown recurrence keys: {', '.join(sorted(set(data) - known))}")
        return cls(**data)


@dataclass
class RecurrenceResult:
    applicable: bool
    reason: str
    zeta: float
    K0: float | None
    M: int | None
    N0: int | None
    horizon: int
    exponent: float = 0.4
    violations: int = 0
    worst_margin: float | None = None
    n: np.ndarray | None = None
    log_f: np.ndarray | None = None

    @property
    def ok(self) -> bool:
        return self.applicable and self.violations == 0

    def summary(self) -> dict:
        return {"applicable": self.applicable, "reason": self.reason, "zeta": self.zeta,
                "K0": self.K0, "M": self.M, "N0": self.N0, "horizon": self.horizon,
                "violations": self.violations, "worst_margin": self.worst_margin, "ok": self.ok}


def _window(n: int, c: float) -> tuple[int, int]:
    return math.ceil(n / 4 - c * n), math.floor(n / 4 + c * n)


def solve_recurrence(params: RecurrenceParams, horizon: int) -> RecurrenceResult:
    """Iterate the recurrence in log space up to ``horizon`` and test the exponential bound."""
    b = params.exponent
    zeta = params.zeta
    if not 0 < params.c < 0.25 or zeta <= 0:
        raise InputError(f"need 0 < c < 1/4 with zeta > 0 (zeta={zeta:.4g})")
    if params.K <= 0:
        raise InputError("K must be positive")
    eps = params.epsilon
    if params.base_values:
        eps = max(eps, max(params.base_values.values()))
    if not 0 < eps < 1:
        raise InputError("base bound must lie in (0, 1)")
    log_inv = math.log(1 / eps)
    if params.K0 is not None:
        K0 = params.K0
        M = params.M if params.M is not None else math.ceil((log_inv / K0) ** (1 / b))
    else:
        M = params.M if params.M is not None else math.floor((2 * log_inv / params.K) ** (1 / b)) + 1
        while log_inv / M ** b >= params.K / 2:
            M += 1
        K0 = log_inv / M ** b
    N0 = params.N0 if params.N0 is not None else math.ceil((0.25 - params.c) * M) - 1
    res = RecurrenceResult(False, "", zeta, K0, M, N0, horizon, b)
    if (0.25 - params.c) * M <= N0:
        res.reason = "window start N0 must lie below (1/4 - c) M"
        return res
    if horizon < M:
        raise InputError(f"horizon {horizon} is below the base window end M={M}")
    reasons = []
    if K0 >= params.K / 2:
        reasons.append(f"K0={K0:.4g} is not below K/2={params.K / 2:.4g}")
    if eps + eps ** zeta >= 1:
        reasons.append(f"eps + eps^zeta = {eps + eps ** zeta:.4g} >= 1")
    # the table is still iterated when the induction does not apply
    res.reason = "; ".join(reasons)
    res.applicable = not reasons
    ns = np.arange(horizon + 1, dtype=np.float64)
    log_f = np.full(horizon + 1, np.nan)
    for n in range(N0, M + 1):
        v = params.base_values.get(n, eps) if params.base_values else eps
        log_f[n] = math.log(v)
    # sliding maximum over the window [ceil(n/4 - cn), floor(n/4 + cn)]
    dq: deque[int] = deque()
    nxt = N0
    for n in range(M + 1, horizon + 1):
        lo, hi = _window(n, params.c)
        while nxt <= hi:
            while dq and log_f[dq[-1]] <= log_f[nxt]:
                dq.pop()
            dq.append(nxt)
            nxt += 1
        while dq and dq[0] < lo:
            dq.popleft()
        # below n = 1/(2c) the window can miss every integer; use the one nearest n/4
        top = dq[0] if dq else max(N0, math.floor(n / 4 + 0.5))
        log_f[n] = np.logaddexp(-params.K * n ** b, 2 * log_f[top])
    span = slice(N0, horizon + 1)
    margin = -K0 * ns[span] ** b - log_f[span]
    res.violations = int((margin < -1e-9 * np.maximum(1.0, np.abs(log_f[span]))).sum())
    res.worst_margin = float(margin.min())
    res.n = ns[span].astype(np.int64)
    res.log_f = log_f[span]
    return res


def format_recurrence_csv(res: RecurrenceResult, points: int | None = 200) -> str:
    """``n, log_f, f, bound`` rows, log-spaced unless ``points`` is ``None``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("n", "log_f", "f", "bound"))
    if res.n is None:
        return buf.getvalue()
    idx = np.arange(res.n.size)
    if points is not None and res.n.size > points:
        idx = np.unique(np.geomspace(1, res.n.size, points).astype(np.int64) - 1)
    for i in idx.tolist():
        n = int(res.n[i])
        lf = float(res.log_f[i])
        bound = math.exp(-res.K0 * n ** res.exponent)
        w.writerow((n, f"{lf:.9g}", f"{math.exp(lf):.9g}", f"{bound:.9g}"))
    return buf.getvalue()
