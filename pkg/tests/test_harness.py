import csv
import dataclasses
import json
from fractions import Fraction

import numpy as np
import pytest

from tetgluing.cli import main
from tetgluing.errors import ConservationViolation, InsufficientData
from tetgluing.harness import (
    AGGREGATE_COLUMNS,
    AggregateStats,
    ExperimentConfig,
    SampleRecord,
    Tolerances,
    check_record,
    compare_theory,
    exact_distribution,
    instance_distribution,
    read_records,
    record_statistics,
    run_sweep,
    run_trial,
    uniformity_test,
)
from tetgluing.model import omega_size

ALL = ("edges", "boundary", "homology", "dual", "peeling")


def _strip(rec):
    d = dataclasses.asdict(rec)
    d.pop("wall_time")
    return d


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig([], 1)
    with pytest.raises(ValueError):
        ExperimentConfig([10], 0)
    with pytest.raises(ValueError):
        ExperimentConfig([10], 1, panels=("edges", "volume"))
    with pytest.raises(ValueError):
        ExperimentConfig([10], 1, conditioning="weird")
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n_list": [3], "trials": 1, "bogus": 1})


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig([10, 20], 3, master_seed=4, panels=ALL, tolerances=Tolerances(ekl_max=0.3))
    path = tmp_path / "c.json"
    cfg.dump(path)
    back = ExperimentConfig.load(path)
    assert back.to_dict() == cfg.to_dict()
    assert back.tolerances.ekl_max == 0.3


def test_sweep_records_and_files(tmp_path):
    cfg = ExperimentConfig([12, 30], 2, panels=ALL, output_dir=str(tmp_path / "out"))
    res = run_sweep(cfg)
    assert len(res.records) == 4
    assert {(r.n, r.trial) for r in res.records} == {(12, 0), (12, 1), (30, 0), (30, 1)}
    out = tmp_path / "out"
    back = read_records(out / "records.jsonl")
    assert [_strip(r) for r in back] == [_strip(r) for r in res.records]
    rows = list(csv.reader(open(out / "aggregate.csv")))
    assert rows[0] == AGGREGATE_COLUMNS
    assert any(r[1] == "E_vs_ln_n_slope" for r in rows)
    assert json.load(open(out / "config.json"))["trials"] == 2
    for r in res.records:
        assert r.homology_skipped is False
        assert r.chi_double == 0
        assert r.peel_bound_violations == 0


def test_sweep_is_deterministic_and_worker_independent():
    cfg = ExperimentConfig([15, 25], 3, master_seed=9, panels=("edges", "boundary", "dual"))
    a = [_strip(r) for r in run_sweep(cfg).records]
    b = [_strip(r) for r in run_sweep(cfg).records]
    cfg2 = ExperimentConfig.from_dict({**cfg.to_dict(), "workers": 2})
    c = [_strip(r) for r in run_sweep(cfg2).records]
    assert a == b == c


def test_simple_conditioning_records():
    cfg = ExperimentConfig([20], 3, conditioning="simple", panels=("edges", "dual"))
    for r in run_sweep(cfg).records:
        assert r.dual_simple and r.generic_dual_simple
        assert r.conditioning == "simple"


def test_homology_skip_above_cap():
    cfg = ExperimentConfig([40], 1, panels=("homology",), homology_max_n=10)
    rec = run_trial(cfg, 40, 0)
    assert rec.homology_skipped is True and rec.b1_rel is None
    cfg = ExperimentConfig([40], 1, panels=("homology",), homology_max_nnz=10)
    rec = run_trial(cfg, 40, 0)
    assert rec.homology_skipped is True and "homology" in rec.errors


def test_check_record_catches_tampering():
    cfg = ExperimentConfig([20], 1, panels=("edges", "boundary", "homology"))
    rec = run_trial(cfg, 20, 0)
    check_record(rec)
    bad = dataclasses.replace(rec, chi_boundary=rec.chi_boundary + 2)
    with pytest.raises(ConservationViolation):
        check_record(bad)
    hist = [list(row) for row in rec.edge_histogram]
    hist[0][1] += 1
    with pytest.raises(ConservationViolation):
        check_record(dataclasses.replace(rec, edge_histogram=hist))
    with pytest.raises(ConservationViolation):
        check_record(dataclasses.replace(rec, chi_double=1))


def test_record_statistics_names():
    cfg = ExperimentConfig([20], 1, panels=ALL)
    stats = record_statistics(run_trial(cfg, 20, 0))
    for name in ("E", "V", "V_is_1", "E_1", "E_simple_10", "E_KL", "generic", "genus_over_n",
                 "b1_rel", "heegaard_lower", "dual_connected", "peel_E"):
        assert name in stats


def test_aggregate_summary_values():
    recs = [SampleRecord(n=5, trial=i, seed=i, E=e) for i, e in enumerate([1, 2, 3, 6])]
    st = AggregateStats.from_records(recs)
    s = st.summary(5, "E")
    assert s.count == 4 and s.mean == 3.0
    assert s.variance == pytest.approx(np.var([1, 2, 3, 6], ddof=1))
    assert s.median == 2.5
    assert st.regression is None


def test_regression_recovers_slope():
    recs = []
    for n in (10, 100, 1000):
        recs.append(SampleRecord(n=n, trial=0, seed=0, E=int(round(0.5 * np.log(n) * 1000))))
    st = AggregateStats.from_records(recs)
    assert st.regression.slope == pytest.approx(500, rel=1e-3)


def test_compare_theory_needs_enough_sizes():
    cfg = ExperimentConfig([10, 20], 2)
    st = run_sweep(cfg).stats
    with pytest.raises(InsufficientData):
        compare_theory(st)


def test_compare_theory_runs_on_small_sweep():
    cfg = ExperimentConfig([10, 30, 100], 5, panels=ALL)
    rep = compare_theory(run_sweep(cfg).stats)
    names = {c.law for c in rep.checks}
    assert "slope of mean E vs ln n" in names
    assert any(c.law.startswith("P[V=1] non-decreasing") for c in rep.checks)
    assert rep.text().count("\n") == len(rep.checks)
    assert json.loads(json.dumps(rep.to_dict()))["checks"]


def test_exact_distribution_n1():
    table = exact_distribution(1)
    assert sum(table.values()) == 1
    assert len(table) <= 27
    for (V, E, hist, shist, dual), p in table.items():
        assert sum(k * c for k, c in hist) == 6
        assert p.denominator in (1, 3, 9, 27)
    inst = instance_distribution(1)
    assert len(inst) == 27 and set(inst.values()) == {Fraction(1, 27)}


def test_exact_distribution_n2_total():
    table = exact_distribution(2)
    assert sum(table.values()) == 1
    assert all(p * omega_size(2) == int(p * omega_size(2)) for p in table.values())


def test_uniformity_small():
    res = uniformity_test(1, draws=2700, master_seed=3)
    assert res.dof == 26 and res.atoms == 27
    assert 0.0 <= res.p_value <= 1.0
    assert res.p_value > 1e-4


def test_cli_smoke(tmp_path, capsys):
    inst = tmp_path / "g.txt"
    assert main(["sample", "--n", "8", "--seed", "1", "--out", str(inst)]) == 0
    assert inst.read_text().strip()
    cfg = tmp_path / "cfg.json"
    ExperimentConfig([10, 30, 100], 3, panels=("edges", "boundary")).dump(cfg)
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "records.jsonl").exists()
    rep = tmp_path / "report.txt"
    assert main(["theory-report", "--in", str(out), "--out", str(rep)]) == 0
    assert rep.read_text().startswith(("PASS", "FAIL"))
    assert json.load(open(str(rep) + ".json"))["checks"]
    tr = tmp_path / "tr.csv"
    assert main(["peel", "--algorithm", "2", "--n", "20", "--trials", "3", "--trace-out", str(tr)]) == 0
    assert tr.exists()
    en = tmp_path / "e.json"
    assert main(["enumerate", "--n", "1", "--out", str(en)]) == 0
    assert json.load(open(en))["n"] == 1
    assert main(["homology", "--n", "15", "--trials", "2"]) == 0
    assert "b1(M,dM)" in capsys.readouterr().out


def test_cli_error_exit(tmp_path, capsys):
    assert main(["sweep", "--config", str(tmp_path / "missing.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_two_trials_give_two_records():
    res = run_sweep(ExperimentConfig([10], 2))
    assert len(res.records) == 2
    assert [r.trial for r in res.records] == [0, 1]
