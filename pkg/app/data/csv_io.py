# app/data/csv_io.py
"""
CSV ingestion of user data.

Schema: a header row, numeric feature columns and an integer label column whose
values are 0 or 1. Line numbers in errors count the header as line 1.
"""
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from app.models.sample import LabeledSet
from app.utils.exceptions import SchemaError
from app.utils.logger import get_logger

logger = get_logger()

PathLike = Union[str, Path]


def load_csv(path: PathLike, feature_columns: Optional[Sequence[str]] = None,
             label_column: str = "label") -> LabeledSet:
    """Read a labeled dataset; all non-label columns are features unless named"""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, on_bad_lines="error")
    except pd.errors.ParserError as e:
        raise SchemaError(f"Malformed CSV {path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise SchemaError(f"CSV {path} has no header row") from e

    if label_column not in frame.columns:
        raise SchemaError(f"Missing label column '{label_column}'", column=label_column)
    if feature_columns is None:
        feature_columns = [c for c in frame.columns if c != label_column]
    for column in feature_columns:
        if column not in frame.columns:
            raise SchemaError(f"Missing feature column '{column}'", column=column)
    if not feature_columns:
        raise SchemaError("CSV has no feature columns")

    features = frame[list(feature_columns)].apply(pd.to_numeric, errors="coerce")
    bad = ~np.isfinite(features.to_numpy(dtype=float)).all(axis=1)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise SchemaError(f"Malformed row at line {row + 2}: non-numeric feature value", line=row + 2)

    labels = pd.to_numeric(frame[label_column], errors="coerce")
    not_binary = ~labels.isin([0, 1])
    if not_binary.any():
        row = int(np.flatnonzero(not_binary.to_numpy())[0])
        raise SchemaError(
            f"Label at line {row + 2} is '{frame[label_column].iloc[row]}', expected 0 or 1",
            line=row + 2, column=label_column,
        )

    dataset = LabeledSet(features.to_numpy(dtype=float), labels.to_numpy(dtype=np.int64))
    logger.info(f"Loaded {len(dataset)} samples with {dataset.dim} features from {path}")
    return dataset


def write_csv(dataset: LabeledSet, path: PathLike, feature_columns: Optional[Sequence[str]] = None,
              label_column: str = "label") -> Path:
    """Write a labeled dataset with 17 significant digits per feature"""
    if feature_columns is None:
        feature_columns = [f"x{i}" for i in range(dataset.dim)]
    frame = pd.DataFrame(dataset.x, columns=list(feature_columns))
    frame[label_column] = dataset.y
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path
