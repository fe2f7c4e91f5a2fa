from __future__ import annotations

import json
import math

import pytest

from evendegen.errors import InputError
from evendegen.experiments import (CSV_COLUMNS, ExperimentSpec, RecurrenceParams, emit_csv,
                                   emit_report, format_csv, format_recurrence_csv, run_experiment,
                                   solve_recurrence)

from oracles import naive_recurrence


def test_zeta_example():
    assert math.isclose(RecurrenceParams(alpha=0.1, c=0.01).zeta, 2 * 0.24 ** 0.4 - 1)
    assert abs(RecurrenceParams(alpha=0.1, c=0.01).zeta - 0.130) < 1e-3


def test_zeta_nonpositive_is_input_error():
    with pytest.raises(InputError):
        solve_recurrence(RecurrenceParams(c=0.2), 1000)


def test_degenerate_k0_is_inapplicable():
    res = solve_recurrence(RecurrenceParams(K=1.0, K0=1.0, epsilon=1e-9), 10_000)
    assert not res.applicable and "K/2" in res.reason


def test_broken_base_is_inapplicable():
    res = solve_recurrence(RecurrenceParams(epsilon=0.9), 10_000)
    assert not res.applicable and "zeta" in res.reason


def test_construction_constants():
    res = solve_recurrence(RecurrenceParams(), 2000)
    # least M with ln(1000) / M^0.4 < 1/2
    assert res.M == 710 and math.log(1000) / 709 ** 0.4 >= 0.5
    assert math.isclose(res.K0, math.log(1000) / 710 ** 0.4)
    assert res.N0 == math.ceil(0.24 * 710) - 1
    assert res.ok


def test_matches_naive_iteration():
    params = RecurrenceParams(K=1.0, alpha=0.1, c=0.05, epsilon=0.2, M=40, N0=7)
    res = solve_recurrence(params, 45)
    assert not res.applicable and not res.ok
    base = {n: 0.2 for n in range(7, 41)}
    naive = naive_recurrence(1.0, 0.1, 0.05, base, 45)
    got = dict(zip(res.n.tolist(), res.log_f.tolist()))
    for n in range(41, 46):
        assert math.isclose(math.exp(got[n]), naive[n], rel_tol=1e-12)
    # hand value for the first step: window [ceil(41*0.2), floor(41*0.3)] = [9, 12]
    assert math.isclose(naive[41], math.exp(-41 ** 0.4) + 0.04)


def test_base_values_override():
    base = {n: 1e-4 for n in range(170, 711)}
    res = solve_recurrence(RecurrenceParams(base_values=base), 5000)
    assert res.ok and math.isclose(math.exp(res.log_f[0]), 1e-4)


def test_recurrence_csv_has_bound_column():
    res = solve_recurrence(RecurrenceParams(), 5000)
    lines = format_recurrence_csv(res, 20).splitlines()
    assert lines[0] == "n,log_f,f,bound" and 2 < len(lines) <= 21
    n, lf, f, bound = lines[-1].split(",")
    assert int(n) == 5000 and float(f) <= float(bound)


def test_spec_validation():
    with pytest.raises(InputError):
        ExperimentSpec.from_json({"kind": "nope", "nGrid": [10], "pGrid": [0.5], "trials": 1, "masterSeed": 0})
    with pytest.raises(InputError):
        ExperimentSpec.from_json({"kind": "removal-success", "nGrid": [], "pGrid": [0.5], "trials": 1,
                                  "masterSeed": 0})
    with pytest.raises(InputError):
        ExperimentSpec.from_json({"kind": "removal-success", "nGrid": [10], "pGrid": [0.5], "trials": 0,
                                  "masterSeed": 0})
    with pytest.raises(InputError):
        ExperimentSpec.from_json({"kind": "removal-success", "nGrid": [10], "pGrid": [0.5], "trials": 1,
                                  "masterSeed": 0, "extra": 1})


def test_csv_shapes(tmp_path):
    assert format_csv([]) == ",".join(CSV_COLUMNS) + "\n"
    spec = ExperimentSpec("removal-success", [200], [0.5], 4, 3, s_factor=0.1)
    cells = run_experiment(spec)
    emit_csv(cells, tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[0].split(",") == list(CSV_COLUMNS)
    row = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert row["kind"] == "removal-success" and row["n"] == "200" and row["seconds"] == ""
    assert cells[0].successes + cells[0].failures == cells[0].trials
    report = emit_report(cells, spec, tmp_path / "r.json")
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["masterSeed"] == 3 and data["spec"]["kind"] == "removal-success"
    assert report["version"] and data["cells"][0]["seconds"] >= 0


def test_same_seed_same_bytes():
    spec = ExperimentSpec("remainder-size", [150, 250], [0.5], 3, 11, s_factor=0.1)
    assert format_csv(run_experiment(spec)) == format_csv(run_experiment(spec))


def test_parallel_matches_serial():
    spec = ExperimentSpec("removal-success", [200], [0.4, 0.6], 6, 5, s_factor=0.1)
    assert format_csv(run_experiment(spec)) == format_csv(run_experiment(spec, workers=2))


def test_degeneracy_rate_decreases_in_n():
    rates = {}
    for n in (6, 8, 11):
        spec = ExperimentSpec("degeneracy-rate", [n], [0.5], 3000, 17)
        c = run_experiment(spec)[0]
        rates[n] = c.failures / c.trials
    assert rates[6] > rates[8] >= rates[11]


def test_greedy_vs_exact_cell():
    spec = ExperimentSpec("greedy-vs-exact", [10], [0.5], 200, 2)
    c = run_experiment(spec)[0]
    assert c.extra["greedy_without_exact"] == 0
    assert c.successes <= c.extra["exact_successes"]


def test_time_budget_marks_skipped():
    spec = ExperimentSpec("removal-success", [400], [0.5], 50, 1, s_factor=0.1, time_budget=0.0)
    c = run_experiment(spec)[0]
    assert c.skipped and "budget" in c.skipped
    assert format_csv([c]).splitlines()[1].split(",")[7] == ""


def test_capacity_marks_skipped():
    spec = ExperimentSpec("removal-success", [10], [0.5], 3, 1, s_factor=5.0)
    c = run_experiment(spec)[0]
    assert c.skipped and c.skipped.startswith("capacity")
