import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmpc.experiments import (
    ATTACKS,
    Scenario,
    TrialRecord,
    build_report,
    compare_bounds,
    fit_polylog,
    fit_power,
    load_scenario,
    make_attack,
    permutation_uniformity,
    read_records,
    run_scenario,
    trial_seed,
)
from gmpc.experiments.cli import main

SCENARIOS = Path(__file__).parent.parent / "scenarios"

SHIPPED = ("block-lightest-bin", "inconsistent-commitment", "key-substitution", "wrong-evaluation",
           "input-blocking", "flood")


def record(event, **stats):
    return TrialRecord("s", "general", 255, 16, 0, 0, None, "output", "done", "ok", None, None, event, stats)


class TestScenario:
    """Scenario loading and validation."""

    def test_kappa_floor(self):
        with pytest.raises(ValueError, match="kappa"):
            Scenario("x", "main", 1024, 8)

    def test_kappa_factor_default(self):
        assert Scenario("x", "main", 1000).kappa_value == 2 * 10

    def test_unknown_protocol(self):
        with pytest.raises(ValueError):
            Scenario("x", "teleport", 64, 12)

    def test_alpha_limit(self):
        with pytest.raises(ValueError):
            Scenario("x", "main", 64, 12, alpha=1 / 6)

    def test_unknown_field(self):
        with pytest.raises(ValueError, match="unknown"):
            Scenario.from_dict({"name": "x", "protocol": "main", "n": 64, "kappa": 12, "colour": 1})

    def test_sweep_variants(self):
        s = Scenario("x", "election", 256, None, kappa_factor=3, sweep={"n": [256, 1024]})
        assert [(v.n, v.kappa_value) for v in s.variants()] == [(256, 24), (1024, 30)]

    def test_shipped_files_load(self):
        names = set()
        for path in sorted(SCENARIOS.glob("*.json")):
            scenario = load_scenario(path)
            names.add(scenario.name)
            assert scenario.name == path.stem
            for variant in scenario.variants():
                assert variant.kappa_value >= variant.kappa_factor * math.ceil(math.log2(variant.n))
        assert len(names) == len(list(SCENARIOS.glob("*.json")))

    def test_overrides(self):
        s = load_scenario(SCENARIOS / "quickstart.json", seed=5, trials=0)
        assert (s.seed, s.trials) == (5, 0)

    @given(st.integers(0, 2**32), st.integers(0, 10**6))
    def test_trial_seed_stable_and_bounded(self, seed, trial):
        value = trial_seed(seed, trial)
        assert value == trial_seed(seed, trial) and 0 <= value < 2**63

    def test_trial_seeds_distinct(self):
        seeds = {trial_seed(7, t) for t in range(2000)}
        assert len(seeds) == 2000


class TestRunner:
    """Deterministic trial execution."""

    def test_zero_trials(self):
        assert run_scenario(replace(load_scenario(SCENARIOS / "quickstart.json"), trials=0)) == []

    def test_repeatable(self):
        s = replace(load_scenario(SCENARIOS / "quickstart.json"), trials=2)
        first = [r.to_json() for r in run_scenario(s)]
        assert first == [r.to_json() for r in run_scenario(s)]
        assert len({json.loads(line)["output_digest"] for line in first}) == 2

    def test_honest_main_exact(self):
        records = run_scenario(replace(load_scenario(SCENARIOS / "quickstart.json"), trials=2))
        assert all(r.outcome == "output" and r.legal and not r.event for r in records)
        assert all(r.stats["ordered"] for r in records)

    def test_honest_election_committee_bounded(self):
        s = Scenario("e", "election", 256, 16, trials=10, record="off")
        records = run_scenario(s)
        assert len(records) == 10
        assert all(r.outcome == "output" and r.stats["committee_size"] <= 16 for r in records)

    def test_record_roundtrip(self):
        r = run_scenario(Scenario("d", "diameter", 256, 32, trials=1))[0]
        assert TrialRecord.from_json(r.to_json()) == r


class TestAttacks:
    """Every shipped attack ends in an abort or an ideal-world legal outcome."""

    def test_registry(self):
        assert set(SHIPPED) <= set(ATTACKS)
        with pytest.raises(KeyError):
            make_attack("teleport")

    @pytest.mark.parametrize("name,protocol,n,kappa,extra", [
        ("block-lightest-bin", "election", 256, 16, {}),
        ("inconsistent-commitment", "setup", 256, 16, {}),
        ("key-substitution", "many", 256, 16, {}),
        ("wrong-evaluation", "main", 128, 14, {"function": "sort", "attack_params": {"substitute": "concatenation"}}),
        ("input-blocking", "main", 128, 14, {"attack_params": {"fraction": 1.0}}),
        ("flood", "main", 128, 14, {"delta": 2, "function": "bit-sum"}),
        ("corrupt-encoding", "general", 63, 12, {}),
    ])
    def test_legal(self, name, protocol, n, kappa, extra):
        s = Scenario(name, protocol, n, kappa, attack=name, trials=3, seed=1, record="summary", **extra)
        records = run_scenario(s)
        assert all(r.outcome == "abort" or r.legal for r in records)
        assert all(r.legal is not False for r in records)

    def test_inconsistent_commitment_detected(self):
        s = Scenario("ic", "setup", 256, 16, attack="inconsistent-commitment", trials=2, record="off")
        assert all(r.stats["alive"] == 0 for r in run_scenario(s))

    def test_input_blocking_exactly_alpha_n(self):
        s = Scenario("ib", "main", 128, 14, attack="input-blocking", attack_params={"fraction": 1.0}, trials=2,
                     record="off")
        for r in run_scenario(s):
            assert r.stats["blocked"] == r.stats["targeted"] == 12 and r.outcome == "output"


class TestBounds:
    """Empirical rates against closed-form bounds."""

    def test_pass_within_three_sigma(self):
        records = [record(k < 3) for k in range(100)]
        out = compare_bounds(records, "encoding", Scenario("s", "general", 255, 16))
        assert out.bound == 1.0 and out.passed and out.note

    def test_zero_bound(self):
        scenario = Scenario("s", "general", 255, 16)
        assert compare_bounds([record(False)] * 50, "zero", scenario).passed
        assert not compare_bounds([record(False)] * 49 + [record(True)], "zero", scenario).passed

    def test_encoding_formula(self):
        stats = {"corrupted_slices": 63, "holders": 256, "rows": 160}
        out = compare_bounds([record(False, **stats)] * 10, "encoding", Scenario("s", "general", 255, 16))
        assert out.bound == pytest.approx((193 / 256) ** 160, rel=1e-12)

    def test_sigma_and_interval(self):
        scenario = Scenario("s", "general", 255, 16)
        out = compare_bounds([record(k < 5, corrupted_slices=1, holders=2, rows=1) for k in range(40)],
                             "encoding", scenario)
        assert out.bound == 0.5 and out.sigma == pytest.approx(math.sqrt(0.25 / 40))
        assert out.ci_low < 5 / 40 < out.ci_high and out.passed

    def test_uniformity(self):
        rng = np.random.default_rng(3)
        fair = [list(rng.permutation(4)) for _ in range(2400)]
        assert permutation_uniformity(fair, 4).passed
        skewed = fair[:1200] + [[0, 1, 2, 3]] * 1200
        assert not permutation_uniformity(skewed, 4).passed


class TestComplexity:
    """Growth fits."""

    @settings(max_examples=30)
    @given(st.floats(0.5, 6), st.floats(1, 1000))
    def test_polylog_recovers_exponent(self, b, a):
        ns = [256, 1024, 4096, 16384]
        fit = fit_polylog("m", ns, [a * math.log2(n) ** b for n in ns], cap=6.5)
        assert fit.exponent == pytest.approx(b, abs=1e-6) and fit.passed

    def test_power_growth_fails_polylog(self):
        ns = [256, 1024, 4096]
        assert not fit_polylog("m", ns, [n for n in ns]).passed
        assert fit_power("m", ns, [3 * n ** 1.5 for n in ns]).exponent == pytest.approx(1.5)


class TestCli:
    """Command-line verbs."""

    def test_run_and_report_pure(self, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["run", "--scenario", str(SCENARIOS / "quickstart.json"), "--out", str(out),
                     "--trials", "2", "--transcripts"]) == 0
        first = (out / "report.json").read_bytes()
        assert len(read_records(out)) == 2
        assert len((out / "records.csv").read_text().splitlines()) == 3
        assert len(list((out / "transcripts").glob("*.tsv"))) == 2
        (out / "report.json").unlink()
        assert main(["report", "--out", str(out)]) == 0
        assert (out / "report.json").read_bytes() == first
        assert "quickstart" in capsys.readouterr().out

    def test_zero_trials_succeeds(self, tmp_path):
        out = tmp_path / "zero"
        assert main(["run", "--scenario", str(SCENARIOS / "quickstart.json"), "--out", str(out),
                     "--trials", "0"]) == 0
        assert (out / "records.jsonl").read_text() == ""

    def test_sweep(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"name": "s", "protocol": "diameter", "n": 256, "kappa": 32, "trials": 1}))
        assert main(["run", "--scenario", str(path), "--out", str(tmp_path / "a")]) == 0
        assert main(["sweep", "--scenario", str(path), "--out", str(tmp_path / "b"), "--n", "256,512"]) == 0
        report = json.loads((tmp_path / "b" / "report.json").read_text())
        assert [v["n"] for v in report["variants"]] == [256, 512]

    def test_run_rejects_sweep(self, tmp_path):
        assert main(["run", "--scenario", str(SCENARIOS / "complexity-sweep.json"), "--out", str(tmp_path)]) == 2

    def test_attack_list(self, capsys):
        assert main(["attack-list"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "name,protocol,server_corrupted,description"
        assert {line.split(",")[0] for line in lines[1:]} >= set(SHIPPED)

    def test_build_report_shape(self):
        s = Scenario("d", "diameter", 256, 32, trials=2, bound="diameter")
        report = build_report(run_scenario(s), s)
        assert report["variants"][0]["bound"]["name"] == "diameter"
