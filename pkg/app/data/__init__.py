from .blob import BlobConfig, blob_sample
from .gaussian import GaussianTwoSampleConfig, GaussianOneSampleConfig
from .discrete import DiscreteToyConfig, mutual_information, plugin_mutual_information
from .pooling import pool_and_label
from .streams import (
    BatchSource, BlobSource, GaussianTwoSampleSource, GaussianOneSampleSource, DiscreteToySource,
    DatasetSource, PreDrawnSource, BatchStream, stream_batches, discrete_toy_stream
)
from .csv_io import load_csv, write_csv

__all__ = [
    "BlobConfig", "blob_sample", "GaussianTwoSampleConfig", "GaussianOneSampleConfig",
    "DiscreteToyConfig", "mutual_information", "plugin_mutual_information", "pool_and_label",
    "BatchSource", "BlobSource", "GaussianTwoSampleSource", "GaussianOneSampleSource",
    "DiscreteToySource", "DatasetSource", "PreDrawnSource", "BatchStream", "stream_batches",
    "discrete_toy_stream", "load_csv", "write_csv"
]
