"""Experiment runner: configs, admissibility, reports, emission, CLI."""

import json

import numpy as np
import pytest

from fracleib import cli, grid, harness

GS = grid.GridSpec(1, 128, 16.0)
GRID_DICT = {"n": 1, "N": 128, "L": 16.0}


def small_cfg(**over):
    data = {"kind": "kp-d", "grid": GRID_DICT, "family_size": 4, "seed": 1}
    data.update(over)
    return harness.ExperimentConfig.from_dict(data)


class TestExperimentConfig:
    def test_round_trip(self):
        cfg = small_cfg(s=1.5, weight_v={"kind": "power", "a": 0.5})
        again = harness.ExperimentConfig.from_dict(cfg.to_dict())
        assert again == cfg
        assert harness.config_hash(again) == harness.config_hash(cfg)

    def test_kind_required(self):
        with pytest.raises(harness.InadmissibleConfigError, match="'kind' field"):
            harness.ExperimentConfig.from_dict({"grid": GRID_DICT})

    def test_unknown_field_named(self):
        with pytest.raises(harness.InadmissibleConfigError, match="bandwidth"):
            harness.ExperimentConfig.from_dict({"kind": "kp-d", "bandwidth": 3})

    def test_unknown_kind(self):
        with pytest.raises(harness.InadmissibleConfigError, match="list-kinds"):
            harness.ExperimentConfig.from_dict({"kind": "kp-x"})

    def test_grid_forms(self):
        a = harness.ExperimentConfig.from_dict({"kind": "kp-d", "grid": [1, 128, 16]})
        b = harness.ExperimentConfig.from_dict({"kind": "kp-d", "grid": GRID_DICT})
        c = harness.ExperimentConfig(kind="kp-d", grid=GS)
        assert a.grid == b.grid == c.grid == GS
        default = harness.ExperimentConfig.from_dict({"kind": "kp-d"})
        assert default.grid == grid.GridSpec(1, 1024, 32.0)

    def test_validation(self):
        with pytest.raises(harness.InadmissibleConfigError, match="flavor"):
            small_cfg(flavor="periodic")
        with pytest.raises(harness.InadmissibleConfigError, match="family_size"):
            small_cfg(family_size=0)
        with pytest.raises(harness.InadmissibleConfigError, match="seed"):
            small_cfg(seed=-1)

    def test_hash_separates_seeds(self):
        h1 = harness.config_hash(small_cfg(seed=1))
        h2 = harness.config_hash(small_cfg(seed=2))
        assert h1 != h2
        assert len(h1) == 16
        int(h1, 16)


class TestAdmissibility:
    def test_order_below_scaling_line(self):
        # r = 2/3 makes the threshold n(1/r - 1) = 1/2
        cfg = small_cfg(s=0.4, p=4.0 / 3.0, q=4.0 / 3.0, r=2.0 / 3.0)
        with pytest.raises(
            harness.InadmissibleConfigError, match=r"violates s > max\(0, n\(1/r - 1\)\)"
        ):
            harness.run_experiment(cfg)

    def test_even_integer_order_exempt(self):
        cfg = small_cfg(
            s=2.0, p=4.0 / 3.0, q=4.0 / 3.0, family_size=2,
            weight_v={"kind": "ones"}, weight_w={"kind": "ones"},
        )
        report = harness.run_experiment(cfg)
        assert all(g.passed for g in report.gates)

    def test_power_weight_range(self):
        cfg = small_cfg(weight_v={"kind": "power", "a": 3.5})
        with pytest.raises(harness.InadmissibleConfigError, match="admissible range"):
            harness.run_experiment(cfg)

    def test_scaling_identity_enforced(self):
        cfg = small_cfg(r=0.9)
        with pytest.raises(harness.InadmissibleConfigError, match="scaling identity"):
            harness.run_experiment(cfg)

    def test_exit_code_classes(self):
        assert issubclass(harness.InadmissibleConfigError, harness.HarnessError)
        assert issubclass(harness.IdentityGateError, harness.HarnessError)


class TestRunExperiment:
    def test_report_shape(self):
        cfg = small_cfg(s=1.5, weight_v={"kind": "power", "a": 0.5})
        report = harness.run_experiment(cfg)
        assert len(report.rows) == cfg.family_size
        assert report.kind == "kp-d"
        assert all(g.passed for g in report.gates)
        ratios = [row.ratio for row in report.rows]
        assert report.max_ratio == max(ratios)
        assert report.min_ratio == min(ratios)
        assert abs(report.mean_ratio - sum(ratios) / len(ratios)) < 1e-15
        assert 0 < report.max_ratio < np.inf
        assert report.refinement_stability is None

    def test_deterministic(self):
        a = harness.run_experiment(small_cfg())
        b = harness.run_experiment(small_cfg())
        assert [r.lhs for r in a.rows] == [r.lhs for r in b.rows]
        c = harness.run_experiment(small_cfg(seed=7))
        assert [r.lhs for r in a.rows] != [r.lhs for r in c.rows]


class TestEmission:
    def test_csv_schema(self, tmp_path):
        report = harness.run_experiment(small_cfg())
        path = tmp_path / "rows.csv"
        harness.emit(report, "csv", path)
        lines = path.read_text().splitlines()
        assert lines[0] == "kind,sample_id,lhs,rhs,ratio,draw"
        assert len(lines) == 1 + len(report.rows)
        first = lines[1].split(",")
        assert first[0] == "kp-d"
        assert float(first[2]) == report.rows[0].lhs
        assert float(first[4]) == report.rows[0].ratio

    def test_json_schema(self, tmp_path):
        cfg = small_cfg()
        report = harness.run_experiment(cfg)
        path = tmp_path / "report.json"
        harness.emit(report, "json", path)
        payload = json.loads(path.read_text())
        assert set(payload) == {"kind", "config", "config_hash", "gates", "aggregates", "extras"}
        assert payload["config_hash"] == harness.config_hash(cfg)
        assert payload["aggregates"]["n_rows"] == len(report.rows)
        assert payload["aggregates"]["max_ratio"] == report.max_ratio
        assert all(g["passed"] for g in payload["gates"])

    def test_byte_stable(self, tmp_path):
        # runtime is informational only; two runs serialize identically
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        harness.emit(harness.run_experiment(small_cfg()), "json", p1)
        harness.emit(harness.run_experiment(small_cfg()), "json", p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_unknown_format(self, tmp_path):
        report = harness.run_experiment(small_cfg(family_size=1))
        with pytest.raises(ValueError, match="unknown emit format"):
            harness.emit(report, "yaml", tmp_path / "x")


class TestSweepRefinement:
    def test_stability_bookkeeping(self):
        cfg = small_cfg(s=1.5)
        report = harness.sweep_refinement(cfg)
        ex = report.extras
        assert ex["refined_N"] == 256
        assert ex["refinement_factor"] == 2
        want = abs(ex["refined_max_ratio"] - ex["base_max_ratio"]) / ex["base_max_ratio"]
        assert abs(report.refinement_stability - want) < 1e-15
        assert report.max_ratio == ex["base_max_ratio"]
        names = [g.name for g in report.gates]
        assert any("[N=256]" in name for name in names)
        assert all(g.passed for g in report.gates)


class TestTraceFamily:
    def test_steps_and_extras(self):
        reports = harness.run_trace_family(grid=GS, instances=4, seed=0, probes=8)
        assert len(reports) == 4
        names = [step.name for step in reports[0].steps]
        assert names == [
            "exponent split theta1 + theta2 = 1",
            "pointwise domination by the iterated majorants",
            "dual normalization of the split powers",
            "weighted hypothesis with the iterated weights",
            "final bound with the variable Hoelder constants",
        ]
        for rep in reports:
            assert rep.passed
            assert rep.steps[0].lhs <= 1e-12
            assert all(step.slack >= 0 for step in rep.steps)
            assert "finite" in rep.note
            assert set(rep.extras) >= {
                "tau_norm",
                "a1_certificate_v",
                "a1_certificate_w",
                "a1_bound_v",
                "a1_bound_w",
                "rubio_tail_v",
                "rubio_tail_w",
                "norm_v",
                "norm_w",
                "holder_constant_p",
                "holder_constant_q",
            }
            assert rep.extras["a1_certificate_v"] <= rep.extras["a1_bound_v"] * (1 + 1e-9)

    def test_trace_emission(self, tmp_path):
        reports = harness.run_trace_family(grid=GS, instances=2, seed=0, probes=8)
        path = tmp_path / "trace.csv"
        harness.emit_trace(reports, "csv", path)
        lines = path.read_text().splitlines()
        assert lines[0] == "instance,step,lhs,rhs,slack,passed"
        assert len(lines) == 1 + 2 * 5
        jpath = tmp_path / "trace.json"
        harness.emit_trace(reports, "json", jpath)
        payload = json.loads(jpath.read_text())
        assert [entry["instance"] for entry in payload] == [0, 1]
        assert all(entry["passed"] for entry in payload)
        assert len(payload[0]["steps"]) == 5


class TestCLI:
    def test_list_kinds(self, capfd):
        assert cli.main(["list-kinds"]) == 0
        out = capfd.readouterr().out
        for kind in harness.KINDS:
            assert kind in out

    def test_verify_ok(self, capfd):
        code = cli.main(
            ["verify", "kp-d", "--grid", "1,128,16", "--family-size", "3", "--seed", "1"]
        )
        out = capfd.readouterr().out
        assert code == 0
        assert "gate" in out and "pass" in out

    def test_unknown_kind_exit_3(self, capfd):
        assert cli.main(["verify", "kp-bogus", "--grid", "1,128,16"]) == 3
        assert "inadmissible configuration" in capfd.readouterr().err

    def test_inadmissible_config_exit_3(self, tmp_path, capfd):
        cfg = {
            "kind": "kp-d",
            "grid": GRID_DICT,
            "s": 0.4,
            "p": 4.0 / 3.0,
            "q": 4.0 / 3.0,
            "r": 2.0 / 3.0,
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        assert cli.main(["verify", "--config", str(path)]) == 3
        err = capfd.readouterr().err
        assert "violates s > max(0, n(1/r - 1))" in err

    def test_config_file_supplies_kind(self, tmp_path, capfd):
        path = tmp_path / "ok.json"
        path.write_text(json.dumps({"kind": "kp-d", "grid": GRID_DICT, "family_size": 2}))
        assert cli.main(["verify", "--config", str(path), "--seed", "3"]) == 0
        capfd.readouterr()

    def test_flag_overrides_config(self, tmp_path, capfd):
        path = tmp_path / "base.json"
        path.write_text(json.dumps({"kind": "kp-d", "grid": GRID_DICT, "family_size": 4}))
        out = tmp_path / "report.json"
        code = cli.main(
            ["verify", "--config", str(path), "--family-size", "2", "--out", str(out), "--format", "json"]
        )
        capfd.readouterr()
        assert code == 0
        assert json.loads(out.read_text())["config"]["family_size"] == 2

    def test_missing_kind_exit_3(self, capfd):
        assert cli.main(["verify"]) == 3
        assert "no experiment kind" in capfd.readouterr().err

    def test_usage_error_exit_3(self, capfd):
        assert cli.main(["frobnicate"]) == 3
        capfd.readouterr()

    def test_sweep_exit_codes(self, capfd):
        base = ["sweep", "kp-d", "--grid", "1,128,16", "--family-size", "3", "--seed", "1"]
        assert cli.main(base + ["--stability-tol", "1e6"]) == 0
        capfd.readouterr()
        # any genuine refinement drift exceeds an absurdly tight tolerance
        assert cli.main(base + ["--stability-tol", "1e-12"]) == 2
        assert "exceeds" in capfd.readouterr().err

    def test_trace_ok(self, capfd):
        code = cli.main(["trace", "--instances", "2", "--grid", "1,128,16"])
        out = capfd.readouterr().out
        assert code == 0
        assert "min slack" in out

    def test_outputs_deterministic(self, tmp_path, capfd):
        args = ["verify", "kp-d", "--grid", "1,128,16", "--family-size", "2", "--seed", "5"]
        p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        assert cli.main(args + ["--out", str(p1)]) == 0
        assert cli.main(args + ["--out", str(p2)]) == 0
        capfd.readouterr()
        assert p1.read_bytes() == p2.read_bytes()
