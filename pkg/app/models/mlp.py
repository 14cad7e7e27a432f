# app/models/mlp.py
"""
Small feed-forward binary classifier.

Hidden layers are Linear -> LayerNorm (optional) -> ReLU; the output layer is a
single logit, so the model is Bern(sigmoid(g(x))).
"""
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.special import expit

from app.utils.exceptions import CheckpointError, UsageError

MODEL_FORMAT_VERSION = 1
PROB_CLAMP = 1e-7


class DenseLayer(BaseModel):
    """Affine map with optional layer normalization (gain, shift)"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weight: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    gain: Optional[np.ndarray] = None
    shift: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def validate_shapes(self):
        out_dim = self.weight.shape[0]
        if self.weight.ndim != 2 or self.bias.shape != (out_dim,):
            raise ValueError("bias must match the weight's output dimension")
        if (self.gain is None) != (self.shift is None):
            raise ValueError("layer norm needs both gain and shift")
        if self.gain is not None and (self.gain.shape != (out_dim,) or self.shift.shape != (out_dim,)):
            raise ValueError("layer norm parameters must match the output dimension")
        return self

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def has_layer_norm(self) -> bool:
        return self.gain is not None

    def parameters(self) -> List[np.ndarray]:
        params = [self.weight, self.bias]
        if self.has_layer_norm:
            params += [self.gain, self.shift]
        return params


class MlpModel(BaseModel):
    """Parameters of the classifier; immutable once training returns it"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    layers: List[DenseLayer]
    layer_norm_eps: float = 1e-10

    @model_validator(mode="after")
    def validate_layers(self):
        if not self.layers:
            raise ValueError("a model needs at least one layer")
        for prev, nxt in zip(self.layers[:-1], self.layers[1:]):
            if prev.out_dim != nxt.in_dim:
                raise ValueError(f"layer shapes do not chain: {prev.out_dim} -> {nxt.in_dim}")
        if self.layers[-1].out_dim != 1:
            raise ValueError("the output layer must produce a single logit")
        if self.layers[-1].has_layer_norm:
            raise ValueError("the output layer takes no layer normalization")
        if not all(np.all(np.isfinite(p)) for p in self.parameters()):
            raise ValueError("model parameters must be finite")
        return self

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def hidden_sizes(self) -> List[int]:
        return [layer.out_dim for layer in self.layers[:-1]]

    @property
    def feature_dim(self) -> int:
        """Width of the last hidden layer (input width for a linear model)"""
        return self.layers[-1].in_dim

    def parameters(self) -> List[np.ndarray]:
        return [p for layer in self.layers for p in layer.parameters()]

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.input_dim:
            raise UsageError(f"expected {self.input_dim} features, got {x.shape[1]}")
        return x

    def forward_cache(self, x: np.ndarray) -> Tuple[np.ndarray, List[Dict[str, np.ndarray]]]:
        """Logits plus the per-layer intermediates backpropagation needs"""
        a = self._check_input(x)
        caches = []
        for layer in self.layers[:-1]:
            cache = {"input": a}
            h = a @ layer.weight.T + layer.bias
            if layer.has_layer_norm:
                mu = h.mean(axis=1, keepdims=True)
                var = h.var(axis=1, keepdims=True)
                inv_std = 1.0 / np.sqrt(var + self.layer_norm_eps)
                xhat = (h - mu) * inv_std
                cache.update(xhat=xhat, inv_std=inv_std)
                h = layer.gain * xhat + layer.shift
            cache["pre_relu"] = h
            a = np.maximum(h, 0.0)
            caches.append(cache)
        out = self.layers[-1]
        caches.append({"input": a})
        logits = (a @ out.weight.T + out.bias).reshape(-1)
        return logits, caches

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self.forward_cache(x)[0]

    def hidden_features(self, x: np.ndarray) -> np.ndarray:
        """Activations feeding the output layer"""
        return self.forward_cache(x)[1][-1]["input"]

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return np.clip(expit(self.logits(x)), PROB_CLAMP, 1.0 - PROB_CLAMP)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "layer_norm_eps": self.layer_norm_eps,
            "layers": [
                {
                    "weight": layer.weight.tolist(),
                    "bias": layer.bias.tolist(),
                    "gain": None if layer.gain is None else layer.gain.tolist(),
                    "shift": None if layer.shift is None else layer.shift.tolist(),
                }
                for layer in self.layers
            ],
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "MlpModel":
        version = payload.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise CheckpointError(f"Unsupported model format version: {version}")

        def arr(v):
            return None if v is None else np.asarray(v, dtype=float)

        layers = [
            DenseLayer(
                weight=arr(item["weight"]).reshape(len(item["bias"]), -1),
                bias=arr(item["bias"]),
                gain=arr(item["gain"]),
                shift=arr(item["shift"]),
            )
            for item in payload["layers"]
        ]
        return cls(layers=layers, layer_norm_eps=payload["layer_norm_eps"])


def init_mlp(input_dim: int, hidden_sizes: Sequence[int], layer_norm: bool,
             rng: np.random.Generator) -> MlpModel:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases; unit gain, zero shift"""
    if input_dim < 1:
        raise UsageError("input dimension must be positive")
    sizes = [input_dim, *hidden_sizes, 1]
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        bound = 1.0 / np.sqrt(fan_in)
        hidden = i < len(sizes) - 2
        layers.append(DenseLayer(
            weight=rng.uniform(-bound, bound, size=(fan_out, fan_in)),
            bias=rng.uniform(-bound, bound, size=fan_out),
            gain=np.ones(fan_out) if (hidden and layer_norm) else None,
            shift=np.zeros(fan_out) if (hidden and layer_norm) else None,
        ))
    return MlpModel(layers=layers)


def mlp_forward(model: MlpModel, x: Sequence[float]) -> float:
    """Logit for a single feature vector"""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise UsageError("mlp_forward takes a single feature vector")
    return float(model.logits(x)[0])


def predict_prob(model: MlpModel, x: Sequence[float]) -> float:
    """sigmoid(logit) clamped to [1e-7, 1 - 1e-7]"""
    return float(np.clip(expit(mlp_forward(model, x)), PROB_CLAMP, 1.0 - PROB_CLAMP))
