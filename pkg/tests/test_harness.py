# tests/test_harness.py

import json
import math
import os
import sys
from pathlib import Path

import pytest
import yaml

# Add the parent directory to the path so we can import from app
sys.path.append(str(Path(__file__).parent.parent))

from app.cli import main
from app.harness import (
    ExperimentConfig, RejectionCurve, RunRecord, curves_from_frame, emit_reports, read_curves_csv,
    render_curves, run_experiment, run_replications, write_curves_csv
)
from app.models import Verdict
from app.utils.config_loader import (
    get_baseline_config, get_ec2st_config, get_settings, load_experiment_config, parse_experiment_config
)
from app.utils.exceptions import ConfigError

TINY_TRAINING = {"max_epochs": 3, "patience": 1, "hidden_sizes": [4]}


def tiny_config(kind: str, **overrides) -> ExperimentConfig:
    """An experiment small enough to run in a unit test"""
    raw = {
        "kind": kind,
        "data": {"kind": "blob", "blob": {"sigma0": 1.0, "sigma1": 1.0}},
        "methods": [{"name": "ec2st", "ec2st": {"train_config": TINY_TRAINING}}],
        "batch_size": 10,
        "max_batches": 3,
        "replications": 2,
        "master_seed": 7,
        "jobs": 1,
    }
    raw.update(overrides)
    return parse_experiment_config(raw)


def msplit_power_config(**overrides) -> ExperimentConfig:
    raw = {
        "kind": "power",
        "data": {"kind": "gaussian_one_sample", "gaussian_one_sample": {"mean": 1.0}},
        "methods": [{"name": "msplit"}],
        "batch_size": 20,
        "max_batches": 10,
        "replications": 5,
        "master_seed": 3,
    }
    raw.update(overrides)
    return parse_experiment_config(raw)


def _square(payload, index):
    return payload * index * index


class TestSchema:
    def test_curve_from_rejections(self):
        curve = RejectionCurve.from_rejections("ec2st", [10, 20], [[True, False], [True, True]])
        assert curve.rejection_rates == [1.0, 0.5]
        assert curve.stderr == pytest.approx([0.0, math.sqrt(0.25 / 2)])
        assert curve.replications == 2

    def test_curve_alignment(self):
        with pytest.raises(ValueError):
            RejectionCurve(method="m", sample_sizes=[1, 2], rejection_rates=[0.1], stderr=[0.0], replications=1)

    def test_sequential_record_rejection(self):
        record = RunRecord(replication=0, seed=1, method="ec2st",
                           verdict=Verdict(rejected=True, at_batch=3, samples_consumed=270))
        assert not record.rejected_within(180, 0.05)
        assert record.rejected_within(270, 0.05)
        assert record.rejected_by_step(3, 0.05)
        assert not record.censored

    def test_fixed_horizon_record_rejection(self):
        record = RunRecord(replication=0, seed=1, method="sc2st", p_values=[(100, 0.2), (200, 0.01)])
        assert not record.rejected_within(100, 0.05)
        assert record.rejected_within(200, 0.05)
        assert record.rejected_by_step(250, 0.05)

    def test_default_grid(self):
        config = tiny_config("type1", max_batches=5)
        assert config.grid() == [30, 40, 50]
        assert config.grid(batch_size=4) == [12, 16, 20]
        assert tiny_config("type1", sample_sizes=[50, 20]).grid() == [20, 50]

    def test_method_alpha_follows_experiment(self):
        config = tiny_config("type1", alpha=0.01)
        assert config.methods[0].ec2st.alpha == 0.01
        assert config.methods[0].ec2st.batch_size == 10

    @pytest.mark.parametrize("overrides,key", [
        ({"alpha": 2.0}, "alpha"),
        ({"sample_sizes": []}, "sample_sizes"),
        ({"data": {"kind": "discrete"}}, "data"),
        ({"per_class_range": [5, 2]}, ""),
    ])
    def test_invalid_configs(self, overrides, key):
        with pytest.raises(ConfigError) as exc:
            tiny_config("type1", **overrides)
        assert key in str(exc.value)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            parse_experiment_config({"kind": "bogus"})


class TestConfigFiles:
    def test_yaml_file(self, tmp_path):
        path = tmp_path / "exp.yaml"
        path.write_text(yaml.safe_dump({"kind": "power", "alpha": 0.1, "batch_size": 20}))
        config = load_experiment_config(path)
        assert (config.kind, config.alpha, config.batch_size) == ("power", 0.1, 20)

    def test_json_file(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({"kind": "type1"}))
        assert load_experiment_config(path).kind == "type1"

    def test_unreadable_files(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment_config(tmp_path / "missing.yaml")
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_experiment_config(path)

    @pytest.mark.parametrize("name", sorted(p.name for p in (Path(__file__).parent.parent / "configs").glob("*.yaml")))
    def test_shipped_configs_validate(self, name):
        path = Path(__file__).parent.parent / "configs" / name
        config = load_experiment_config(path)
        assert config.kind in name.replace("-", "_")

    def test_settings_defaults(self):
        settings = get_settings()
        ec2st = get_ec2st_config()
        assert ec2st.alpha == settings.alpha
        assert ec2st.lambda_bounds == (settings.lambda_min, settings.lambda_max)
        assert ec2st.train_config.hidden_sizes == list(settings.hidden_sizes)
        assert sum(ec2st.first_batch_split) == pytest.approx(1.0)
        assert get_baseline_config().n_permutations == settings.n_permutations


class TestRunner:
    def test_inline_order(self):
        assert run_replications(_square, 2, 4, jobs=1) == [0, 2, 8, 18]

    def test_process_pool_keeps_order(self):
        assert run_replications(_square, 3, 6, jobs=2) == [3 * i * i for i in range(6)]


class TestExperiments:
    def test_type1_rates_are_replication_fractions(self):
        result = run_experiment(tiny_config("type1", replications=1))
        assert len(result.curves) == 1
        assert all(rate in (0.0, 1.0) for rate in result.curves[0].rejection_rates)
        assert len(result.runs) == 1
        assert result.runs[0].batches[0]["log_increment"] == 0.0

    def test_type1_refuses_alternative_data(self):
        with pytest.raises(ConfigError):
            run_experiment(tiny_config("type1", data={"kind": "blob", "blob": {"sigma0": 1.0, "sigma1": 2.0}}))

    def test_power_refuses_null_data(self):
        with pytest.raises(ConfigError):
            run_experiment(tiny_config("power"))

    def test_msplit_power(self):
        result = run_experiment(msplit_power_config())
        curve = result.curves[0]
        assert curve.method == "msplit"
        assert curve.sample_sizes == [20 * k for k in range(3, 11)]
        assert curve.rejection_rates[-1] == 1.0
        assert curve.rejection_rates == sorted(curve.rejection_rates)

    def test_fixed_horizon_baseline(self):
        config = tiny_config(
            "power",
            data={"kind": "blob", "blob": {"sigma0": 1.0, "sigma1": 3.0}},
            methods=[{"name": "sc2st", "baseline": {"n_permutations": 20, "train_config": TINY_TRAINING}}],
            sample_sizes=[28],
        )
        result = run_experiment(config)
        assert result.runs[0].p_values[0][0] == 28
        assert 0.0 < result.runs[0].p_values[0][1] <= 1.0

    def test_stopping_time_summary(self):
        config = tiny_config("stopping_time", batch_sizes=[10, 20], max_samples=40)
        result = run_experiment(config)
        summary = result.summary["stopping_times"]
        assert [s["batch_size"] for s in summary] == [10, 20]
        assert [s["budget_samples"] for s in summary] == [40, 40]
        assert all(s["rejected"] + s["censored"] == 2 for s in summary)
        assert all(s["mean_samples"] <= 40 for s in summary)
        assert result.curves[0].method == "ec2st[batch_size=10]"

    def test_lambda_ablation_labels(self):
        config = tiny_config("lambda_ablation", ablation_batch_size=10, initial_lambdas=[0.3])
        result = run_experiment(config)
        assert [c.method for c in result.curves] == ["ec2st[lambda=0.3]", "ec2st[lambda=0.3,fixed]"]
        fixed = [r for r in result.runs if r.method.endswith("fixed]")]
        assert all(row["lambda"] == 0.3 for r in fixed for row in r.batches)

    def test_lambda_ablation_rejects_out_of_bounds(self):
        with pytest.raises(ConfigError):
            run_experiment(tiny_config("lambda_ablation", initial_lambdas=[0.0]))

    def test_single_order_has_no_dispersion(self):
        result = run_experiment(tiny_config("batch_order", n_orders=1, replications=1))
        assert result.summary["max_deviation"] == 0.0
        assert [c.method for c in result.curves] == ["ec2st[order=0]", "ec2st[mean]"]

    def test_inflation_demo_is_cumulative(self):
        config = tiny_config(
            "inflation_demo",
            data={"kind": "gaussian"},
            inflation_tests=["ttest"],
            inflation_batches=10,
            per_class_range=[5, 10],
            replications=20,
        )
        result = run_experiment(config)
        rates = result.curves[0].rejection_rates
        assert result.curves[0].sample_sizes == list(range(1, 11))
        assert rates == sorted(rates)

    def test_repeated_ttest_inflates_type1_error(self):
        config = tiny_config(
            "inflation_demo",
            data={"kind": "gaussian"},
            inflation_tests=["ttest"],
            inflation_batches=50,
            per_class_range=[32, 64],
            replications=100,
        )
        rates = run_experiment(config).curves[0].rejection_rates
        assert rates[-1] > 0.2
        assert rates[-1] > config.alpha

    def test_growth_rate_stays_below_mutual_information(self):
        config = tiny_config(
            "growth_rate",
            data={"kind": "discrete", "discrete": {"table": [[0.5, 0.0], [0.0, 0.5]]}},
            batch_size=20,
            max_batches=5,
            replications=3,
        )
        result = run_experiment(config)
        raw, bounded = result.summary["growth"]
        assert result.summary["learner"] == "oracle"
        assert raw["mutual_information"] == pytest.approx(math.log(2))
        assert raw["within_bound"] and bounded["within_bound"]
        assert bounded["estimate"] <= raw["estimate"] + 1e-12

    def test_growth_rate_needs_discrete_data(self):
        with pytest.raises(ConfigError):
            run_experiment(tiny_config("growth_rate"))


class TestReports:
    def test_header_only_csv(self, tmp_path):
        path = write_curves_csv([], tmp_path / "curves.csv")
        assert path.read_bytes() == b"method,sample_size,rate,stderr\n"

    def test_csv_round_trip(self, tmp_path):
        curve = RejectionCurve.from_rejections("ec2st", [30, 60], [[False, True], [False, False], [True, True]])
        frame = read_curves_csv(write_curves_csv([curve], tmp_path / "curves.csv"))
        assert curves_from_frame(frame, 3) == [curve]

    def test_reports_are_byte_identical(self, tmp_path):
        config = msplit_power_config(replications=3)
        first = emit_reports(run_experiment(config), tmp_path / "a", svg=True)
        second = emit_reports(run_experiment(config), tmp_path / "b", svg=True)
        assert set(first) == {"curves", "runs", "config", "svg"}
        for kind in first:
            assert first[kind].read_bytes() == second[kind].read_bytes()

    def test_runs_jsonl(self, tmp_path):
        files = emit_reports(run_experiment(msplit_power_config(replications=2)), tmp_path)
        lines = files["runs"].read_text().splitlines()
        assert len(lines) == 2
        record = json.loads(lines[0])
        assert list(record) == sorted(record)
        assert record["batches"][0]["lambda"] is None

    def test_svg_contains_every_curve(self):
        curves = [RejectionCurve.from_rejections(name, [10, 20], [[False, True]]) for name in ("a", "b")]
        chart = render_curves(curves, title="power", alpha=0.05)
        assert chart.startswith("<svg")
        assert chart.count("<polyline") == 2


class TestCli:
    def _write(self, tmp_path, config: ExperimentConfig) -> Path:
        path = tmp_path / "exp.yaml"
        path.write_text(yaml.safe_dump(config.model_dump(mode="json")))
        return path

    def test_success(self, tmp_path, capsys):
        path = self._write(tmp_path, msplit_power_config(replications=2))
        out = tmp_path / "out"
        assert main(["power", "--config", str(path), "--out", str(out), "--seed", "11"]) == 0
        written = json.loads(capsys.readouterr().out)
        assert Path(written["curves"]).exists()
        assert json.loads((out / "config.json").read_text())["master_seed"] == 11

    def test_kind_mismatch(self, tmp_path, capsys):
        path = self._write(tmp_path, msplit_power_config())
        assert main(["type1", "--config", str(path)]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "ConfigError"

    def test_invalid_experiment(self, tmp_path):
        config = tiny_config("type1", data={"kind": "blob", "blob": {"sigma0": 1.0, "sigma1": 2.0}})
        assert main(["type1", "--config", str(self._write(tmp_path, config)), "--out", str(tmp_path)]) == 2

    @pytest.fixture
    def restore_settings(self):
        get_settings.cache_clear()
        yield
        os.environ.pop("EC2ST_MASTER_SEED", None)
        get_settings.cache_clear()

    def test_env_file_supplies_defaults(self, tmp_path, restore_settings):
        env_file = tmp_path / "local.env"
        env_file.write_text("EC2ST_MASTER_SEED=23\n")
        raw = msplit_power_config(replications=2).model_dump(mode="json")
        del raw["master_seed"]
        path = tmp_path / "exp.yaml"
        path.write_text(yaml.safe_dump(raw))
        out = tmp_path / "out"
        assert main(["--env-file", str(env_file), "power", "--config", str(path), "--out", str(out)]) == 0
        assert json.loads((out / "config.json").read_text())["master_seed"] == 23

    def test_missing_env_file(self, tmp_path, capsys):
        path = self._write(tmp_path, msplit_power_config())
        assert main(["--env-file", str(tmp_path / "absent.env"), "power", "--config", str(path)]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "ConfigError"

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            main(["bogus"])


@pytest.mark.slow
class TestMonteCarlo:
    def test_type1_error_is_controlled(self):
        config = tiny_config("type1", replications=100, batch_size=40, max_batches=10,
                             methods=[{"name": "ec2st", "ec2st": {"train_config": {"max_epochs": 30, "patience": 5}}}])
        result = run_experiment(config)
        bound = 0.05 + 2 * math.sqrt(0.05 * 0.95 / 100)
        assert max(result.curves[0].rejection_rates) <= bound

    def test_type1_error_at_full_size(self):
        config = tiny_config("type1", replications=100, batch_size=90, max_batches=20, jobs=4,
                             methods=[{"name": "ec2st"}])
        result = run_experiment(config)
        bound = 0.05 + 2 * math.sqrt(0.05 * 0.95 / 100)
        assert max(result.curves[0].rejection_rates) <= bound

    def test_blob_power_reaches_full_within_ten_batches(self):
        config = parse_experiment_config({
            "kind": "power",
            "data": {"kind": "blob"},
            "methods": [{"name": "ec2st"}],
            "batch_size": 90,
            "max_batches": 10,
            "replications": 100,
            "master_seed": 0,
            "jobs": 4,
        })
        rates = run_experiment(config).curves[0].rejection_rates
        for before, after in zip(rates, rates[1:]):
            assert after >= before - 0.1
        assert rates[-1] >= 0.9

    def test_ec2st_stays_valid_where_repeated_ttest_inflates(self):
        config = tiny_config(
            "inflation_demo",
            data={"kind": "gaussian"},
            methods=[{"name": "ec2st", "ec2st": {"train_config": {"max_epochs": 30, "patience": 5}}}],
            inflation_tests=["ttest", "ec2st"],
            inflation_batches=50,
            per_class_range=[32, 64],
            replications=100,
            jobs=4,
        )
        curves = {curve.method: curve for curve in run_experiment(config).curves}
        assert curves["ttest"].rejection_rates[-1] > 0.2
        assert max(curves["ec2st"].rejection_rates) <= 0.05 + 2 * math.sqrt(0.05 * 0.95 / 100)
