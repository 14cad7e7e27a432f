# app/models/trainer.py
"""
Gradient-descent training of MlpModel: binary cross-entropy on logits,
hand-written backpropagation, Adam, early stopping on validation loss.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.special import expit

from app.models.mlp import DenseLayer, MlpModel, init_mlp
from app.models.sample import LabeledSet
from app.utils.exceptions import TrainingError, UsageError
from app.utils.logger import get_logger
from app.utils.seeding import make_rng

logger = get_logger()


class TrainConfig(BaseModel):
    """Optimizer and early-stopping settings for one training call"""
    learning_rate: float = Field(default=5e-4, gt=0.0)
    max_epochs: int = Field(default=200, ge=1)
    patience: int = Field(default=20, ge=0)
    minibatch_size: int = Field(default=64, ge=1)
    full_batch_threshold: int = Field(default=512, ge=1)
    seed: int = 0
    adam_betas: Tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    hidden_sizes: List[int] = Field(default_factory=lambda: [30, 30])
    layer_norm: bool = True

    @model_validator(mode="after")
    def validate_patience(self):
        if self.patience > self.max_epochs:
            raise ValueError("patience cannot exceed max_epochs")
        return self


@dataclass
class TrainResult:
    model: MlpModel
    train_losses: List[float] = field(default_factory=list)  # mean minibatch loss per epoch
    val_losses: List[float] = field(default_factory=list)
    best_epoch: int = 0


def bce_with_logits(logits: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy, log(1 + e^z) - y*z"""
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def loss_and_gradients(model: MlpModel, x: np.ndarray, y: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """Cross-entropy loss and its gradient, ordered like model.parameters()"""
    logits, caches = model.forward_cache(x)
    y = np.asarray(y, dtype=float)
    n = len(y)
    loss = bce_with_logits(logits, y)

    dz = ((expit(logits) - y) / n).reshape(-1, 1)
    out = model.layers[-1]
    a = caches[-1]["input"]
    grads_by_layer: List[List[np.ndarray]] = [[dz.T @ a, dz.sum(axis=0)]]
    da = dz @ out.weight

    for layer, cache in zip(reversed(model.layers[:-1]), reversed(caches[:-1])):
        dh = da * (cache["pre_relu"] > 0)
        layer_grads = []
        if layer.has_layer_norm:
            xhat = cache["xhat"]
            dgain = (dh * xhat).sum(axis=0)
            dshift = dh.sum(axis=0)
            dxhat = dh * layer.gain
            dh = cache["inv_std"] * (
                dxhat - dxhat.mean(axis=1, keepdims=True)
                - xhat * (dxhat * xhat).mean(axis=1, keepdims=True)
            )
            layer_grads = [dgain, dshift]
        dw = dh.T @ cache["input"]
        db = dh.sum(axis=0)
        grads_by_layer.append([dw, db, *layer_grads])
        da = dh @ layer.weight

    grads = [g for layer_grads in reversed(grads_by_layer) for g in layer_grads]
    return loss, grads


class AdamOptimizer:
    """Adam with bias correction, updating parameter arrays in place"""

    def __init__(self, params: List[np.ndarray], lr: float, betas=(0.9, 0.999), eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: List[np.ndarray]):
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def _snapshot(model: MlpModel) -> MlpModel:
    layers = [
        DenseLayer(
            weight=layer.weight.copy(),
            bias=layer.bias.copy(),
            gain=None if layer.gain is None else layer.gain.copy(),
            shift=None if layer.shift is None else layer.shift.copy(),
        )
        for layer in model.layers
    ]
    return MlpModel(layers=layers, layer_norm_eps=model.layer_norm_eps)


def _validate_set(data: LabeledSet, name: str):
    if len(data) == 0:
        raise UsageError(f"{name} set is empty")
    if not np.isin(data.y, (0, 1)).all():
        raise UsageError(f"{name} labels must be 0 or 1")


def fit_mlp(train: LabeledSet, val: LabeledSet, config: TrainConfig,
            model: Optional[MlpModel] = None) -> TrainResult:
    """Train with Adam and early stopping; returns the best-validation parameters"""
    _validate_set(train, "training")
    _validate_set(val, "validation")
    if train.dim != val.dim:
        raise UsageError("training and validation features differ in dimension")

    rng = make_rng(config.seed)
    if model is None:
        model = init_mlp(train.dim, config.hidden_sizes, config.layer_norm, rng)
    else:
        model = _snapshot(model)

    params = model.parameters()
    optimizer = AdamOptimizer(params, config.learning_rate, config.adam_betas, config.adam_eps)
    n = len(train)
    full_batch = n <= config.full_batch_threshold

    result = TrainResult(model=_snapshot(model))
    best_val = bce_with_logits(model.logits(val.x), val.y)
    wait = 0

    for epoch in range(1, config.max_epochs + 1):
        if full_batch:
            batches = [np.arange(n)]
        else:
            order = rng.permutation(n)
            batches = [order[i:i + config.minibatch_size] for i in range(0, n, config.minibatch_size)]

        epoch_losses = []
        for idx in batches:
            loss, grads = loss_and_gradients(model, train.x[idx], train.y[idx])
            if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in grads):
                raise TrainingError(
                    "Non-finite training loss",
                    {"epoch": epoch, "loss": loss,
                     "param_norm": float(np.sqrt(sum(np.sum(p * p) for p in params)))},
                )
            epoch_losses.append(loss)
            optimizer.step(grads)

        val_loss = bce_with_logits(model.logits(val.x), val.y)
        if not np.isfinite(val_loss):
            raise TrainingError("Non-finite validation loss", {"epoch": epoch, "loss": val_loss})
        result.train_losses.append(float(np.mean(epoch_losses)))
        result.val_losses.append(val_loss)

        if val_loss < best_val:
            best_val = val_loss
            result.model = _snapshot(model)
            result.best_epoch = epoch
            wait = 0
        else:
            wait += 1
            if wait > config.patience:
                break

    logger.debug(
        f"Trained classifier for {len(result.val_losses)} epochs on {n} points; "
        f"best validation loss {best_val:.4f} at epoch {result.best_epoch}"
    )
    return result


def mlp_train(train: LabeledSet, val: LabeledSet, config: TrainConfig) -> MlpModel:
    """Best-validation model from fit_mlp"""
    return fit_mlp(train, val, config).model
