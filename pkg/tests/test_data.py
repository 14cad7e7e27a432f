# tests/test_data.py

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

# Add the parent directory to the path so we can import from app
sys.path.append(str(Path(__file__).parent.parent))

from app.data import (
    BlobConfig, BlobSource, DatasetSource, DiscreteToyConfig, GaussianOneSampleConfig, GaussianOneSampleSource,
    GaussianTwoSampleConfig, GaussianTwoSampleSource, PreDrawnSource, BatchStream, blob_sample,
    discrete_toy_stream, load_csv, mutual_information, plugin_mutual_information, pool_and_label,
    stream_batches, write_csv
)
from app.data.streams import TwoSampleSource
from app.models import LabeledSet
from app.utils.exceptions import SchemaError, UsageError


class TestGenerators:
    def test_pool_and_label_counts(self):
        pooled = pool_and_label(np.zeros((3, 2)), np.ones((5, 2)), seed=1)
        assert pooled.class_counts == (3, 5)
        # labels follow their points through the shuffle
        assert np.all(pooled.x[pooled.y == 1] == 1.0)

    def test_blob_sample(self):
        config = BlobConfig()
        points = blob_sample(config, 50, 1, np.random.default_rng(0))
        assert points.shape == (50, 2)
        assert len(config.centers) == 9
        assert not config.is_null
        assert BlobConfig(sigma0=1.5, sigma1=1.5).is_null

    def test_blob_modes_and_covariance(self):
        # wide spacing makes the nearest centre the generating mode
        config = BlobConfig(spacing=100.0)
        n = 90_000
        expected = n / 9
        tolerance = 3 * math.sqrt(n * (1 / 9) * (8 / 9))
        for label in (0, 1):
            points = blob_sample(config, n, label, np.random.default_rng(11 + label))
            distances = ((points[:, None, :] - config.centers[None, :, :]) ** 2).sum(axis=2)
            modes = distances.argmin(axis=1)
            counts = np.bincount(modes, minlength=9)
            assert np.all(np.abs(counts - expected) <= tolerance)
            variance = config.sigma(label) ** 2
            for mode in range(9):
                residuals = points[modes == mode] - config.centers[mode]
                covariance = np.cov(residuals, rowvar=False)
                assert np.allclose(covariance, variance * np.eye(2), atol=0.05 * variance)

    def test_sources_must_implement_sampling(self):
        with pytest.raises(TypeError):
            TwoSampleSource()

    def test_blob_rejects_bad_class(self):
        with pytest.raises(UsageError):
            blob_sample(BlobConfig(), 5, 2)

    def test_gaussian_configs(self):
        config = GaussianTwoSampleConfig(mean1=1.0, dim=3)
        assert config.sample(4, 1, np.random.default_rng(0)).shape == (4, 3)
        assert not config.is_null
        assert GaussianOneSampleConfig().sample(6, np.random.default_rng(0)).shape == (6, 1)


class TestDiscreteToy:
    def test_perfectly_dependent_table(self):
        config = DiscreteToyConfig(table=[[0.5, 0.0], [0.0, 0.5]])
        assert config.mutual_information == pytest.approx(math.log(2), rel=1e-12)
        assert not config.is_null

    def test_independent_table(self):
        config = DiscreteToyConfig(table=[[0.25, 0.25], [0.25, 0.25]])
        assert config.mutual_information == pytest.approx(0.0, abs=1e-15)
        assert config.is_null

    def test_bayes_posterior(self):
        config = DiscreteToyConfig(table=[[0.3, 0.1], [0.2, 0.4]])
        assert config.bayes_posterior() == pytest.approx([0.25, 2 / 3])

    def test_table_validation(self):
        with pytest.raises(ValidationError):
            DiscreteToyConfig(table=[[0.5, 0.6]])
        with pytest.raises(ValidationError):
            DiscreteToyConfig(table=[[0.5, 0.2, 0.3]])

    def test_plugin_estimate_converges(self):
        config = DiscreteToyConfig(table=[[0.4, 0.1], [0.1, 0.4]])
        x, y = config.sample(20000, np.random.default_rng(3))
        estimate = plugin_mutual_information(np.argmax(x, axis=1), y, config.n_values)
        assert estimate == pytest.approx(config.mutual_information, abs=0.01)

    def test_stream_carries_mutual_information(self):
        config = DiscreteToyConfig(table=[[0.5, 0.0], [0.0, 0.5]])
        stream = discrete_toy_stream(config, batch_size=10, seed=2)
        batch = next(stream)
        assert batch.dim == 2
        assert stream.mutual_information == pytest.approx(math.log(2))
        # X determines Y exactly
        assert np.array_equal(np.argmax(batch.x, axis=1), batch.y)

    def test_mutual_information_of_counts(self):
        assert mutual_information(np.array([[1.0, 0.0], [0.0, 0.0]])) == 0.0


class TestStreams:
    @pytest.fixture
    def source(self):
        return BlobSource(BlobConfig())

    def test_same_seed_same_batches(self, source):
        a = [next(stream_batches(source, 10, seed=4).seek(k)) for k in range(3)]
        b = list(zip(range(3), stream_batches(source, 10, seed=4)))
        for left, (_, right) in zip(a, b):
            assert np.array_equal(left.x, right.x)
            assert np.array_equal(left.y, right.y)

    def test_different_seeds_differ(self, source):
        a = stream_batches(source, 10, seed=1).batch_at(0)
        b = stream_batches(source, 10, seed=2).batch_at(0)
        assert not np.array_equal(a.x, b.x)

    def test_balanced_batches(self, source):
        batch = stream_batches(source, 12, seed=0).batch_at(5)
        assert batch.class_counts == (6, 6)

    def test_unbalanced_batches_keep_size(self, source):
        batch = stream_batches(source, 11, balanced=False, seed=0).batch_at(0)
        assert len(batch) == 11

    def test_odd_balanced_batch_size(self, source):
        with pytest.raises(UsageError):
            stream_batches(source, 7)

    def test_per_class_range(self, source):
        stream = BatchStream(source, 0, seed=9, per_class_range=(3, 5))
        for k in range(10):
            n0, n1 = stream.batch_at(k).class_counts
            assert n0 == n1 and 3 <= n0 <= 5

    def test_dataset_source_drops_partial_batch(self):
        data = LabeledSet(np.arange(25.0), np.tile([0, 1], 13)[:25])
        batches = list(stream_batches(data, 10, balanced=False, seed=0))
        assert len(batches) == 2
        assert len(np.unique(np.r_[batches[0].x[:, 0], batches[1].x[:, 0]])) == 20

    def test_dataset_source_balanced(self):
        data = LabeledSet(np.arange(20.0), np.tile([0, 1], 10))
        stream = BatchStream(DatasetSource(data, seed=1), 4, seed=1)
        batches = list(stream)
        assert len(batches) == 5
        assert all(b.class_counts == (2, 2) for b in batches)

    def test_predrawn_order(self):
        parts = [LabeledSet(np.full(2, float(i)), [0, 1]) for i in range(3)]
        stream = BatchStream(PreDrawnSource(parts, order=[2, 0, 1]), 2, seed=0)
        assert [b.x[0, 0] for b in stream] == [2.0, 0.0, 1.0]

    def test_one_sample_stream(self):
        stream = BatchStream(GaussianOneSampleSource(GaussianOneSampleConfig(mean=1.0)), 5, balanced=False)
        batch = next(stream)
        assert batch.class_counts == (5, 0)
        with pytest.raises(UsageError):
            BatchStream(GaussianOneSampleSource(GaussianOneSampleConfig()), 6).batch_at(0)

    def test_gaussian_two_sample_source(self):
        stream = stream_batches(GaussianTwoSampleSource(GaussianTwoSampleConfig(dim=4)), 8, seed=0)
        assert stream.dim == 4
        assert next(stream).x.shape == (8, 4)


class TestCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        data = LabeledSet(rng.normal(size=(6, 3)), [0, 1, 1, 0, 1, 0])
        loaded = load_csv(write_csv(data, tmp_path / "data.csv"))
        assert np.array_equal(loaded.x, data.x)
        assert np.array_equal(loaded.y, data.y)

    def test_selected_features(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("a,b,cls\n1,2,0\n3,4,1\n")
        data = load_csv(path, feature_columns=["b"], label_column="cls")
        assert data.x[:, 0].tolist() == [2.0, 4.0]

    def test_bad_label_reports_line(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,label\n1.0,0\n2.0,2\n")
        with pytest.raises(SchemaError) as exc:
            load_csv(path)
        assert exc.value.line == 3
        assert exc.value.column == "label"

    def test_non_numeric_feature(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,label\n1.0,0\nabc,1\n")
        with pytest.raises(SchemaError) as exc:
            load_csv(path)
        assert exc.value.line == 3

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("x,y\n1.0,0\n")
        with pytest.raises(SchemaError):
            load_csv(path)
        with pytest.raises(SchemaError):
            load_csv(path, feature_columns=["z"], label_column="y")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaError):
            load_csv(path)
