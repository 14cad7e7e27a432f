# app/ec2st/checkpoint.py
"""
Versioned JSON checkpoints of a sequential E-C2ST run.

Floats are written with their shortest round-trip repr, so a resumed run
continues bit-for-bit like an uninterrupted one.
"""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from app.ec2st.sequential import BatchRecord, Ec2stState
from app.models.evidence import EProcess
from app.models.mlp import MlpModel
from app.models.sample import LabeledSet
from app.utils.exceptions import CheckpointError
from app.utils.logger import get_logger

logger = get_logger()

CHECKPOINT_FORMAT_VERSION = 1


def _set_payload(data: Optional[LabeledSet]) -> Optional[Dict[str, Any]]:
    if data is None:
        return None
    return {"x": data.x.tolist(), "y": data.y.tolist(), "dim": data.dim}


def _set_from_payload(payload: Optional[Dict[str, Any]]) -> Optional[LabeledSet]:
    if payload is None:
        return None
    x = np.asarray(payload["x"], dtype=float).reshape(-1, payload["dim"])
    return LabeledSet(x, np.asarray(payload["y"], dtype=np.int64))


def state_to_payload(state: Ec2stState, stream_cursor: Optional[int] = None) -> Dict[str, Any]:
    return {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "batch_index": state.batch_index,
        "samples_consumed": state.samples_consumed,
        "lambda_m": state.lambda_m,
        "process": state.process.model_dump(),
        "train_set": _set_payload(state.train_set),
        "val_set": _set_payload(state.val_set),
        "model": None if state.model is None else state.model.to_payload(),
        "history": [record.model_dump() for record in state.history],
        "stream_cursor": stream_cursor,
    }


def state_from_payload(payload: Dict[str, Any]) -> Tuple[Ec2stState, Optional[int]]:
    version = payload.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(f"Unsupported checkpoint format version: {version}")
    state = Ec2stState(
        process=EProcess(**payload["process"]),
        lambda_m=payload["lambda_m"],
        train_set=_set_from_payload(payload["train_set"]),
        val_set=_set_from_payload(payload["val_set"]),
        batch_index=payload["batch_index"],
        samples_consumed=payload["samples_consumed"],
        model=None if payload["model"] is None else MlpModel.from_payload(payload["model"]),
        history=[BatchRecord(**record) for record in payload["history"]],
    )
    return state, payload.get("stream_cursor")


def save_checkpoint(state: Ec2stState, path: Union[str, Path], stream_cursor: Optional[int] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(state_to_payload(state, stream_cursor)), encoding="utf-8")
    logger.info(f"Saved E-C2ST checkpoint at batch {state.batch_index} to {path}")
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[Ec2stState, Optional[int]]:
    """State plus the stream cursor stored with it"""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e
    if not isinstance(payload, dict):
        raise CheckpointError(f"Checkpoint {path} is not a JSON object")
    return state_from_payload(payload)
