"""Command-line entry point: gen, check, remove, stats, experiment, recurrence."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .degeneracy import (DP_LIMIT, exact_even_decomposable, exact_even_degenerate,
                         greedy_even_degenerate, verify_ordering)
from .errors import CapacityError, InputError
from .graph import format_graph, read_graph
from .revelation import Revelation, verify_revelation
from .rng import RandomSource

log = logging.getLogger("evendegen")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _need_seed(args) -> int:
    if args.seed is None:
        raise UsageError(f"'{args.command}' is randomized and needs --seed")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    return args.seed


def _load_json_arg(value: str) -> dict:
    """Inline JSON or a path to a JSON file."""
    path = Path(value)
    try:
        text = path.read_text() if path.is_file() else value
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON: {exc}") from exc


def _load_revelation(path: str | None) -> Revelation:
    return Revelation() if path is None else Revelation.load(path)


def cmd_gen(args) -> int:
    from .sampling import sample_gnp, sample_partially_revealed

    rng = RandomSource(_need_seed(args))
    if args.revelation:
        g = sample_partially_revealed(args.n, args.p, _load_revelation(args.revelation), rng)
    else:
        g = sample_gnp(args.n, args.p, rng)
    text = format_graph(g)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    g = read_graph(args.graph)
    method = args.method
    if method == "auto":
        method = "dp" if g.n <= DP_LIMIT else "greedy"
    if method == "dp":
        order = exact_even_degenerate(g)
    else:
        rng = RandomSource(_need_seed(args)) if args.policy == "random" else None
        order = greedy_even_degenerate(g, args.policy, rng)
    if order is not None and not verify_ordering(g, order):
        raise AssertionError("decider produced an invalid ordering")
    verdict = {"even_degenerate": order is not None, "order": order, "method": method}
    if method == "greedy" and order is None:
        verdict["note"] = "greedy failure is inconclusive"
    if args.decomposition:
        chain = exact_even_decomposable(g)
        verdict["even_decomposable"] = chain is not None
        verdict["chain"] = chain
    if args.revelation:
        verdict["revelation_consistent"] = verify_revelation(g, _load_revelation(args.revelation))
    _emit(verdict)
    if args.expect_degenerate and order is None:
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_remove(args) -> int:
    from .removal import (CertifierParams, CertifierTrail, DEFAULT_S_FACTOR, double_removal,
                          make_double_plan, make_uw_config, recursive_even_degenerate,
                          uw_removal, verify_outcome)

    g = read_graph(args.graph)
    rng = RandomSource(_need_seed(args))
    rev = _load_revelation(args.revelation)
    if args.mode == "uw":
        cfg = make_uw_config(g.n, rev, args.alpha, args.s_factor or 1.0, rng)
        out = uw_removal(g, cfg, args.policy, rng)
        ok = verify_outcome(g, out, cfg)
        summary = {"mode": "uw", "status": "success" if out.success else "failure",
                   "removed": len(out.R), "remainder": None if out.V_W is None else len(out.V_W),
                   "s": cfg.s, "verified": ok}
        full = {"config": cfg.to_json(), "outcome": out.to_json()}
        success = out.success
    elif args.mode == "double":
        plan = make_double_plan(g.n, rev, args.alpha, eta=args.eta, rng=rng,
                                s_factor=args.s_factor or DEFAULT_S_FACTOR,
                                enforce_reveal_bound=not args.no_reveal_bound)
        out_bc, out_cb, plan = double_removal(g, plan, args.policy, rng)
        summary = {"mode": "double", "s": plan.s, "eta": plan.eta,
                   "BC": "success" if out_bc.success else "failure",
                   "CB": "success" if out_cb.success else "failure"}
        full = {"plan": plan.to_json(), "BC": out_bc.to_json(), "CB": out_cb.to_json()}
        success = out_bc.success or out_cb.success
    else:
        params = CertifierParams(s_factor=args.s_factor or DEFAULT_S_FACTOR, eta=args.eta,
                                 max_attempts=args.max_attempts)
        trail = CertifierTrail()
        order = recursive_even_degenerate(g, rev, args.alpha, params, rng, trail)
        ok = order is not None and verify_ordering(g, order)
        summary = {"mode": "recursive", "status": "success" if ok else "failure",
                   "verified": ok, "order": order}
        full = {"order": order, "trail": trail.events}
        success = ok
    if args.transcript:
        _emit(full, args.transcript)
    _emit(summary)
    if args.expect_success and not success:
        return EXIT_DOMAIN
    return EXIT_OK


def _family(params: dict):
    from .parity_stats import IndexSetFamily

    try:
        return IndexSetFamily(int(params["t"]), tuple(frozenset(s) for s in params["sets"]))
    except KeyError as exc:
        raise UsageError(f"params need key {exc}") from exc


def cmd_stats(args) -> int:
    from . import parity_stats as ps

    params = _load_json_arg(args.params)
    try:
        p = float(params["p"])
    except KeyError as exc:
        raise UsageError("params need key 'p'") from exc
    lemma = args.lemma
    if lemma == "single-parity":
        if "eta" not in params:
            raise UsageError("params need key 'eta'")
        eta = int(params["eta"])
        try:
            bias, bound = ps.single_parity_bias(p, eta)
            report = {"bias": bias, "bound": bound, "ok": True}
        except ArithmeticError as exc:
            report = {"ok": False, "error": str(exc)}
    elif lemma in ("layered", "transformed"):
        T = params.get("T") if lemma == "transformed" else None
        if lemma == "transformed" and T is None:
            raise UsageError("transformed needs a matrix 'T'")
        report = ps.check_layered_uniformity(_family(params), p, T).to_json()
    elif lemma == "affected":
        setup = ps.AffectednessSetup(_family(params), int(params.get("k", 1)), p,
                                     params.get("variant", "Y"))
        report = ps.check_conditional_affectedness(setup).to_json()
    else:
        a, b = int(params.get("a", 2)), int(params.get("b", 2))
        if args.mode == "exact":
            rep = ps.bipartite_fix_parity_probe(a, b, p, "exact")
        else:
            rng = RandomSource(_need_seed(args))
            rep = ps.bipartite_fix_parity_probe(a, b, p, "monte-carlo",
                                                int(params.get("trials", 100_000)), rng)
        bound = ps.bipartite_lemma_bound(a, b, p)
        fixed = None if rep.fix_parity is None else rep.fix_parity[1]
        report = {**rep.to_json(), "lemma_bound": bound, "fix_parity_epsilon": fixed,
                  "ok": fixed is not None and fixed <= bound}
    report = {"lemma": lemma, "params": params, **report}
    _emit(report, args.out)
    if args.out:
        _emit({"lemma": lemma, "ok": report.get("ok")})
    return EXIT_OK if report.get("ok", True) else EXIT_DOMAIN


def cmd_experiment(args) -> int:
    from .experiments import ExperimentSpec, emit_report, emit_svg, format_csv, run_experiment

    data = _load_json_arg(args.spec)
    if args.seed is not None:
        data["masterSeed"] = _need_seed(args)
    if "masterSeed" not in data:
        raise UsageError("experiment needs masterSeed in the spec or --seed")
    spec = ExperimentSpec.from_json(data)
    cells = run_experiment(spec, workers=args.threads)
    text = format_csv(cells, timing=args.timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.report:
        emit_report(cells, spec, args.report)
    if args.svg:
        emit_svg(cells, args.svg)
    for c in cells:
        if c.skipped:
            log.warning("cell n=%d p=%g skipped: %s", c.n, c.p, c.skipped)
    return EXIT_OK


def cmd_recurrence(args) -> int:
    from .experiments import RecurrenceParams, format_recurrence_csv, solve_recurrence

    params = RecurrenceParams.from_json(_load_json_arg(args.params)) if args.params \
        else RecurrenceParams()
    res = solve_recurrence(params, args.horizon)
    if args.out:
        Path(args.out).write_text(format_recurrence_csv(res, None if args.all_rows else 200))
    _emit(res.summary())
    return EXIT_DOMAIN if res.applicable and not res.ok else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker processes (default: available CPUs)")
    common.add_argument("--log-level", default=argparse.SUPPRESS,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    ap = argparse.ArgumentParser(prog="evendegen", parents=[common],
                                 description="Even-degeneracy tools for random graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="sample G(n, p), optionally partially revealed")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--revelation", help="revelation JSON to condition on")
    g.add_argument("--out", help="graph file (default stdout)")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", parents=[common], help="decide even-degeneracy of a graph file")
    c.add_argument("--graph", required=True)
    c.add_argument("--method", choices=["auto", "dp", "greedy"], default="auto")
    c.add_argument("--policy", default="first-index",
                   choices=["first-index", "random", "min-degree", "max-degree"])
    c.add_argument("--decomposition", action="store_true", help="also decide even-decomposability")
    c.add_argument("--revelation", help="also check consistency with this revelation")
    c.add_argument("--expect-degenerate", action="store_true",
                   help="exit 1 when no ordering is found")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("remove", parents=[common], help="run a removal procedure")
    r.add_argument("--graph", required=True)
    r.add_argument("--mode", choices=["uw", "double", "recursive"], default="uw")
    r.add_argument("--alpha", type=float, default=0.1)
    r.add_argument("--s-factor", type=float, default=None,
                   help="block-count factor (default 1 for uw, 0.1 otherwise)")
    r.add_argument("--eta", type=int, default=None)
    r.add_argument("--policy", choices=["lowest", "random"], default="lowest")
    r.add_argument("--max-attempts", type=int, default=3)
    r.add_argument("--revelation")
    r.add_argument("--no-reveal-bound", action="store_true",
                   help="allow |A| above n^(1-2 alpha) in double mode")
    r.add_argument("--transcript", help="write the full run record as JSON")
    r.add_argument("--expect-success", action="store_true")
    r.set_defaults(func=cmd_remove)

    s = sub.add_parser("stats", parents=[common], help="exact or sampled parity-law checks")
    s.add_argument("--lemma", required=True,
                   choices=["single-parity", "layered", "transformed", "affected", "bipartite"])
    s.add_argument("--params", required=True, help="inline JSON or a JSON file")
    s.add_argument("--mode", choices=["exact", "mc"], default="exact")
    s.add_argument("--out", help="report JSON (default stdout)")
    s.set_defaults(func=cmd_stats)

    e = sub.add_parser("experiment", parents=[common], help="seeded Monte Carlo sweep")
    e.add_argument("--spec", required=True, help="inline JSON or a JSON file")
    e.add_argument("--out", help="results CSV (default stdout)")
    e.add_argument("--report", help="JSON report with timings and version")
    e.add_argument("--svg", help="failure-rate plot")
    e.add_argument("--timing", action="store_true", help="fill the seconds column")
    e.set_defaults(func=cmd_experiment)

    q = sub.add_parser("recurrence", parents=[common], help="iterate the failure-bound recurrence")
    q.add_argument("--params", help="inline JSON or a JSON file (default constants otherwise)")
    q.add_argument("--horizon", type=int, default=10**6)
    q.add_argument("--out", help="bound table CSV")
    q.add_argument("--all-rows", action="store_true", help="write every n, not a log-spaced sample")
    q.set_defaults(func=cmd_recurrence)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.seed = getattr(args, "seed", None)
    args.threads = max(1, getattr(args, "threads", None) or os.cpu_count() or 1)
    logging.basicConfig(stream=sys.stderr, level=getattr(args, "log_level", "WARNING"),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, CapacityError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
