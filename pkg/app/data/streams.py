# app/data/streams.py
"""
Deterministic batch streams.

Batch k of a stream depends only on (source, seed, k): generator sources draw
it from a generator seeded by derive_seed(seed, k, "batch"), dataset sources
slice a seed-shuffled copy of the data. Streams can therefore be re-positioned
with ``seek`` after a checkpoint.
"""
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from app.data.blob import BlobConfig, blob_sample
from app.data.discrete import DiscreteToyConfig
from app.data.gaussian import GaussianOneSampleConfig, GaussianTwoSampleConfig
from app.data.pooling import pool_and_label
from app.models.sample import LabeledSet
from app.utils.exceptions import UsageError
from app.utils.seeding import derive_rng, make_rng


class BatchSource(ABC):
    """Something batches can be drawn from"""

    dim: int = 1

    @abstractmethod
    def draw(self, cursor: int, batch_size: int, rng: np.random.Generator) -> Optional[LabeledSet]:
        """Unbalanced batch; None when the source is exhausted"""

    @abstractmethod
    def draw_balanced(self, cursor: int, per_class: int, rng: np.random.Generator) -> Optional[LabeledSet]:
        """Batch with exactly per_class samples of each class"""


class TwoSampleSource(BatchSource):
    """Generator source built from a per-class sampler(n, label, rng)"""

    @abstractmethod
    def _sample(self, n: int, label: int, rng: np.random.Generator) -> np.ndarray:
        """n points of one class"""

    def draw(self, cursor, batch_size, rng):
        n1 = int(rng.binomial(batch_size, 0.5))
        return pool_and_label(self._sample(batch_size - n1, 0, rng), self._sample(n1, 1, rng), rng)

    def draw_balanced(self, cursor, per_class, rng):
        return pool_and_label(self._sample(per_class, 0, rng), self._sample(per_class, 1, rng), rng)


class BlobSource(TwoSampleSource):
    def __init__(self, config: BlobConfig):
        self.config = config
        self.dim = 2

    def _sample(self, n, label, rng):
        return blob_sample(self.config, n, label, rng)


class GaussianTwoSampleSource(TwoSampleSource):
    def __init__(self, config: GaussianTwoSampleConfig):
        self.config = config
        self.dim = config.dim

    def _sample(self, n, label, rng):
        return self.config.sample(n, label, rng)


class GaussianOneSampleSource(BatchSource):
    """Unlabeled one-sample stream; labels are all 0"""

    def __init__(self, config: GaussianOneSampleConfig):
        self.config = config
        self.dim = 1

    def draw(self, cursor, batch_size, rng):
        return LabeledSet(self.config.sample(batch_size, rng), np.zeros(batch_size, dtype=np.int64))

    def draw_balanced(self, cursor, per_class, rng):
        raise UsageError("a one-sample stream has no classes to balance")


class DiscreteToySource(BatchSource):
    def __init__(self, config: DiscreteToyConfig):
        self.config = config
        self.dim = config.n_values
        self.mutual_information = config.mutual_information

    def draw(self, cursor, batch_size, rng):
        x, y = self.config.sample(batch_size, rng)
        return LabeledSet(x, y)

    def draw_balanced(self, cursor, per_class, rng):
        return pool_and_label(
            self.config.sample_class(per_class, 0, rng), self.config.sample_class(per_class, 1, rng), rng
        )


class DatasetSource(BatchSource):
    """Slices of a fixed dataset; the trailing partial batch is dropped"""

    def __init__(self, dataset: LabeledSet, seed: int = 0, shuffle: bool = True):
        self.dataset = dataset.shuffled(make_rng(seed)) if shuffle else dataset
        self.dim = dataset.dim
        self._pools = [self.dataset.take(np.flatnonzero(self.dataset.y == c)) for c in (0, 1)]

    def draw(self, cursor, batch_size, rng):
        start = cursor * batch_size
        if start + batch_size > len(self.dataset):
            return None
        return self.dataset.take(slice(start, start + batch_size))

    def draw_balanced(self, cursor, per_class, rng):
        start = cursor * per_class
        if any(start + per_class > len(pool) for pool in self._pools):
            return None
        parts = [pool.take(slice(start, start + per_class)) for pool in self._pools]
        return LabeledSet.concat(parts).shuffled(rng)


class PreDrawnSource(BatchSource):
    """Fixed list of batches replayed in a given order"""

    def __init__(self, batches: Sequence[LabeledSet], order: Optional[Sequence[int]] = None):
        if not batches:
            raise UsageError("no batches to replay")
        self.batches = list(batches)
        self.order = list(range(len(batches))) if order is None else list(order)
        self.dim = batches[0].dim

    def _get(self, cursor):
        return self.batches[self.order[cursor]] if cursor < len(self.order) else None

    def draw(self, cursor, batch_size, rng):
        return self._get(cursor)

    def draw_balanced(self, cursor, per_class, rng):
        return self._get(cursor)


class BatchStream:
    """Single-consumer iterator over batches of a source"""

    def __init__(self, source: BatchSource, batch_size: int, balanced: bool = True, seed: int = 0,
                 cursor: int = 0, per_class_range: Optional[Tuple[int, int]] = None):
        if per_class_range is not None:
            lo, hi = per_class_range
            if not 1 <= lo <= hi:
                raise UsageError(f"invalid per-class size range {per_class_range}")
            balanced = True
        elif batch_size < 2:
            raise UsageError(f"batch size must be at least 2, got {batch_size}")
        elif balanced and batch_size % 2:
            raise UsageError(f"balanced batches need an even batch size, got {batch_size}")
        self.source = source
        self.batch_size = batch_size
        self.balanced = balanced
        self.seed = seed
        self.cursor = cursor
        self.per_class_range = per_class_range

    def __iter__(self):
        return self

    def __next__(self) -> LabeledSet:
        batch = self.batch_at(self.cursor)
        if batch is None:
            raise StopIteration
        self.cursor += 1
        return batch

    def per_class_size(self, cursor: int) -> int:
        if self.per_class_range is None:
            return self.batch_size // 2
        lo, hi = self.per_class_range
        return int(derive_rng(self.seed, cursor, "size").integers(lo, hi + 1))

    def batch_at(self, cursor: int) -> Optional[LabeledSet]:
        rng = derive_rng(self.seed, cursor, "batch")
        if self.balanced:
            return self.source.draw_balanced(cursor, self.per_class_size(cursor), rng)
        return self.source.draw(cursor, self.batch_size, rng)

    def seek(self, cursor: int) -> "BatchStream":
        self.cursor = cursor
        return self

    @property
    def dim(self) -> int:
        return self.source.dim

    @property
    def mutual_information(self) -> Optional[float]:
        return getattr(self.source, "mutual_information", None)


def stream_batches(source: Union[BatchSource, LabeledSet], batch_size: int, balanced: bool = True,
                   seed: int = 0, **kwargs) -> BatchStream:
    """Wrap a dataset or generator source into a deterministic batch stream"""
    if isinstance(source, LabeledSet):
        source = DatasetSource(source, seed=seed)
    return BatchStream(source, batch_size, balanced=balanced, seed=seed, **kwargs)


def discrete_toy_stream(config: DiscreteToyConfig, batch_size: int, seed: int = 0,
                        balanced: bool = False) -> BatchStream:
    """i.i.d. stream from a joint table; ``stream.mutual_information`` carries I(X;Y)"""
    return BatchStream(DiscreteToySource(config), batch_size, balanced=balanced, seed=seed)
