# tests/test_ec2st.py

import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

# Add the parent directory to the path so we can import from app
sys.path.append(str(Path(__file__).parent.parent))

from app.data import BlobConfig, BlobSource, stream_batches
from app.ec2st import (
    Ec2stConfig, PointEValue, batch_log_evalue, bounded_log_evalue, bounded_point_log_evalues,
    ec2st_run, ec2st_step, lambda_derivative, lambda_objective, load_checkpoint, new_ec2st_state,
    optimize_lambda, save_checkpoint
)
from app.ec2st.sequential import split_first_batch
from app.models import LabeledSet, TrainConfig
from app.utils.exceptions import CheckpointError, UsageError


class ConstantClassifier:
    def __init__(self, p: float):
        self.p = p

    def predict_proba(self, x):
        return np.full(len(x), self.p)


class SignClassifier:
    """Confident classifier for labels given by the sign of the first feature"""

    def predict_proba(self, x):
        return np.where(np.asarray(x)[:, 0] > 0, 0.95, 0.05)


def constant_learner(train, val, config):
    return ConstantClassifier(0.5)


def sign_learner(train, val, config):
    return SignClassifier()


def sign_batches(n_batches: int, size: int = 20, seed: int = 0):
    rng = np.random.default_rng(seed)
    batches = []
    for _ in range(n_batches):
        y = np.tile([0, 1], size // 2)
        x = np.where(y == 1, 1.0, -1.0)[:, None] * rng.uniform(0.5, 2.0, size=(size, 1))
        batches.append(LabeledSet(x, y))
    return batches


class TestBatchEValue:
    def test_oracle_null_probabilities_give_zero(self):
        labels = [1, 0, 1, 1]
        log_e, points = batch_log_evalue([0.75] * 4, labels)
        assert log_e == pytest.approx(0.0, abs=1e-15)
        assert len(points) == 4

    def test_informative_classifier(self):
        log_e, points = batch_log_evalue([0.9, 0.1], [1, 0])
        assert log_e == pytest.approx(2 * math.log(1.8), rel=1e-12)
        assert points.log_e == pytest.approx([math.log(1.8)] * 2, rel=1e-12)

    def test_bounded_mixture(self):
        _, points = batch_log_evalue([0.9, 0.1], [1, 0])
        assert bounded_log_evalue(points, 0.5) == pytest.approx(2 * math.log(1.4), rel=1e-12)

    def test_bounded_point_values_stay_in_range(self):
        rng = np.random.default_rng(7)
        labels = rng.integers(0, 2, size=200)
        labels[:2] = [0, 1]
        _, points = batch_log_evalue(rng.uniform(0.01, 0.99, size=200), labels)
        for lam in (0.1, 0.5, 0.9):
            bounded = bounded_point_log_evalues(points, lam)
            assert np.all(bounded >= math.log(lam) - 1e-12)
            upper = np.log(lam + (1 - lam) * np.exp(points.log_e))
            assert np.allclose(bounded, upper, rtol=1e-12, atol=1e-12)

    def test_bounded_point_values_stay_in_range_across_batches(self):
        rng = np.random.default_rng(17)
        violations = 0
        for _ in range(10_000):
            n = int(rng.integers(2, 129))
            labels = rng.integers(0, 2, size=n)
            probs = rng.uniform(1e-6, 1 - 1e-6, size=n)
            lam = float(rng.uniform(1e-6, 1 - 1e-6))
            _, points = batch_log_evalue(probs, labels)
            bounded = bounded_point_log_evalues(points, lam)
            lower = math.log(lam) - 1e-12
            upper = math.log(lam + (1 - lam) * n) + 1e-12
            violations += int(np.sum((bounded < lower) | (bounded > upper)))
        assert violations == 0

    def test_points_expose_records(self):
        _, points = batch_log_evalue([0.9, 0.2], [1, 1])
        records = list(points)
        assert all(isinstance(r, PointEValue) for r in records)
        assert records[0].log_e == pytest.approx(records[0].log_p_alt - records[0].log_p_null)

    def test_point_consistency_enforced(self):
        with pytest.raises(ValidationError):
            PointEValue(log_p_alt=-0.1, log_p_null=-0.2, log_e=1.0)

    @pytest.mark.parametrize("probs,labels", [
        ([], []),
        ([0.5, 0.5], [1]),
        ([0.0, 0.5], [1, 0]),
        ([1.0, 0.5], [1, 0]),
    ])
    def test_invalid_batches(self, probs, labels):
        with pytest.raises(UsageError):
            batch_log_evalue(probs, labels)

    @pytest.mark.parametrize("lam", [0.0, 1.0])
    def test_lambda_must_be_interior(self, lam):
        _, points = batch_log_evalue([0.6, 0.4], [1, 0])
        with pytest.raises(UsageError):
            bounded_log_evalue(points, lam)


class TestLambdaFit:
    @pytest.fixture
    def mixed_points(self):
        rng = np.random.default_rng(5)
        labels = np.tile([0, 1], 50)
        probs = np.clip(0.5 + 0.3 * (2 * labels - 1) + rng.normal(0, 0.25, size=100), 0.02, 0.98)
        return batch_log_evalue(probs, labels)[1]

    def test_matches_grid_maximum(self, mixed_points):
        lam = optimize_lambda(mixed_points)
        grid = np.linspace(1e-6, 1 - 1e-6, 2001)
        best = max(lambda_objective(mixed_points, g) for g in grid)
        assert lambda_objective(mixed_points, lam) >= best - 1e-9

    def test_matches_fine_grid_on_random_batches(self):
        rng = np.random.default_rng(23)
        grid = np.linspace(1e-6, 1 - 1e-6, 100_000)
        log_grid, log_rest = np.log(grid)[:, None], np.log1p(-grid)[:, None]
        for _ in range(100):
            n = int(rng.integers(10, 41))
            labels = np.tile([0, 1], n)[:n]
            signal = rng.uniform(-0.2, 0.4)
            probs = np.clip(0.5 + signal * (2 * labels - 1) + rng.normal(0, 0.2, size=n), 0.02, 0.98)
            _, points = batch_log_evalue(probs, labels)
            objective = np.logaddexp(log_grid, log_rest + points.log_e[None, :]).sum(axis=1)
            best = int(np.argmax(objective))
            lam = optimize_lambda(points)
            assert abs(lam - grid[best]) <= 1e-4
            assert objective[best] - lambda_objective(points, lam) <= 1e-8

    def test_lbfgsb_agrees_with_bisection(self, mixed_points):
        a = optimize_lambda(mixed_points, method="bisection")
        b = optimize_lambda(mixed_points, method="lbfgsb")
        assert lambda_objective(mixed_points, b) == pytest.approx(lambda_objective(mixed_points, a), abs=1e-6)

    def test_good_classifier_pushes_lambda_to_lower_bound(self):
        _, points = batch_log_evalue([0.9, 0.1, 0.8], [1, 0, 1])
        assert optimize_lambda(points, (0.01, 0.99)) == 0.01

    def test_bad_classifier_pushes_lambda_to_upper_bound(self):
        _, points = batch_log_evalue([0.1, 0.9], [1, 0])
        assert optimize_lambda(points, (0.01, 0.99)) == 0.99

    def test_flat_objective_returns_lower_bound(self):
        _, points = batch_log_evalue([0.5, 0.5], [1, 0])
        assert lambda_derivative(points, 0.3) == 0.0
        assert optimize_lambda(points, (0.2, 0.8)) == 0.2

    @pytest.mark.parametrize("bounds", [(0.0, 0.5), (0.6, 0.4), (0.1, 1.0)])
    def test_invalid_bounds(self, mixed_points, bounds):
        with pytest.raises(UsageError):
            optimize_lambda(mixed_points, bounds)


class TestSequential:
    def test_first_batch_split(self):
        config = Ec2stConfig()
        batch = LabeledSet(np.arange(10.0), np.tile([0, 1], 5))
        train, val = split_first_batch(batch, config)
        assert (len(train), len(val)) == (8, 2)
        assert sorted(np.r_[train.x[:, 0], val.x[:, 0]].tolist()) == list(np.arange(10.0))

    def test_uninformative_classifier_never_rejects(self):
        config = Ec2stConfig(alpha=0.05)
        verdict = ec2st_run(sign_batches(6), config, max_batches=6, learner=constant_learner)
        assert not verdict.rejected
        assert verdict.final_log_e == pytest.approx(0.0, abs=1e-12)
        assert verdict.samples_consumed == 120

    def test_first_batch_carries_no_evidence(self):
        config = Ec2stConfig()
        state = new_ec2st_state(config)
        _, verdict = ec2st_step(state, sign_batches(1)[0], config, learner=sign_learner)
        assert state.history[0].log_increment == 0.0
        assert verdict.final_log_e == 0.0

    def test_informative_classifier_rejects_and_stops(self):
        config = Ec2stConfig(alpha=0.05, initial_lambda=0.5)
        state = new_ec2st_state(config)
        verdict = ec2st_run(sign_batches(10), config, max_batches=10, state=state, learner=sign_learner)
        assert verdict.rejected
        # 20 points with E_n = 1.9 each: the second batch alone clears log 20
        assert verdict.at_batch == 2
        assert state.batch_index == 2
        assert state.history[-1].rejected

    def test_lambda_is_fitted_on_the_previous_batch(self):
        config = Ec2stConfig(initial_lambda=0.5, lambda_bounds=(0.01, 0.99))
        state = new_ec2st_state(config)
        for batch in sign_batches(3):
            ec2st_step(state, batch, config, learner=sign_learner)
        assert [r.lam for r in state.history] == [0.5, 0.5, 0.01]

    def test_fixed_lambda(self):
        config = Ec2stConfig(initial_lambda=0.3, adapt_lambda=False)
        state = new_ec2st_state(config)
        for batch in sign_batches(3):
            ec2st_step(state, batch, config, learner=sign_learner)
        assert {r.lam for r in state.history} == {0.3}

    def test_learner_never_sees_the_scored_batch(self):
        seen = []

        def recording_learner(train, val, config):
            seen.append(len(train) + len(val))
            return ConstantClassifier(0.5)

        config = Ec2stConfig()
        ec2st_run(sign_batches(4), config, max_batches=4, learner=recording_learner)
        assert seen == [20, 40, 60]

    def test_unbounded_increment_is_raw_evalue(self):
        config = Ec2stConfig(bounded=False, alpha=1e-12)
        state = new_ec2st_state(config)
        for batch in sign_batches(2):
            ec2st_step(state, batch, config, learner=sign_learner)
        assert state.history[1].log_increment == pytest.approx(20 * math.log(1.9), rel=1e-12)

    def test_empty_batch(self):
        config = Ec2stConfig()
        with pytest.raises(UsageError):
            ec2st_step(new_ec2st_state(config), LabeledSet.empty(1), config)

    def test_rows(self):
        config = Ec2stConfig()
        state = new_ec2st_state(config)
        ec2st_step(state, sign_batches(1)[0], config)
        assert list(state.history[0].to_row()) == ["batch", "samples", "lambda", "log_increment", "log_e", "rejected"]

    def test_initial_lambda_within_bounds(self):
        with pytest.raises(ValidationError):
            Ec2stConfig(initial_lambda=0.5, lambda_bounds=(0.6, 0.9))


class TestCheckpoint:
    @pytest.fixture
    def config(self):
        return Ec2stConfig(train_config=TrainConfig(max_epochs=5, patience=2, hidden_sizes=[4], seed=11))

    def _stream(self):
        return stream_batches(BlobSource(BlobConfig(sigma0=1.0, sigma1=1.0)), 20, seed=3)

    def test_resume_matches_uninterrupted_run(self, config, tmp_path):
        full = new_ec2st_state(config)
        ec2st_run(self._stream(), config, max_batches=4, state=full)

        partial = new_ec2st_state(config)
        stream = self._stream()
        ec2st_run(stream, config, max_batches=2, state=partial)
        path = save_checkpoint(partial, tmp_path / "run.json", stream_cursor=stream.cursor)

        resumed, cursor = load_checkpoint(path)
        assert cursor == 2
        ec2st_run(self._stream().seek(cursor), config, max_batches=4, state=resumed)

        assert [r.to_row() for r in resumed.history] == [r.to_row() for r in full.history]
        assert resumed.lambda_m == full.lambda_m

    def test_model_survives_checkpoint(self, config, tmp_path):
        state = new_ec2st_state(config)
        ec2st_run(self._stream(), config, max_batches=2, state=state)
        restored, _ = load_checkpoint(save_checkpoint(state, tmp_path / "ckpt.json"))
        x = np.random.default_rng(0).normal(size=(5, 2))
        assert np.array_equal(restored.model.logits(x), state.model.logits(x))

    def test_unknown_version(self, config, tmp_path):
        path = save_checkpoint(new_ec2st_state(config), tmp_path / "ckpt.json")
        payload = json.loads(path.read_text())
        payload["format_version"] = 42
        path.write_text(json.dumps(payload))
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_unreadable_checkpoint(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(CheckpointError):
            load_checkpoint(path)
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "missing.json")
