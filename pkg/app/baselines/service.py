# app/baselines/service.py
from typing import Callable, Optional, Tuple

from pydantic import BaseModel, Field

from app.models.mlp import MlpModel
from app.models.sample import LabeledSet
from app.models.trainer import TrainConfig, mlp_train
from app.utils.seeding import derive_rng, derive_seed
from .c2st import lc2st, sc2st
from .mmd import FeatureExtractor, mc2st
from .permutation import PermutationResult

BASELINES = ("sc2st", "lc2st", "mc2st")


class BaselineConfig(BaseModel):
    """Fixed-horizon baseline settings"""
    n_permutations: int = Field(default=500, ge=1)
    split: Tuple[int, int, int] = (5, 1, 1)
    train_config: TrainConfig = Field(default_factory=TrainConfig)
    bandwidth: Optional[float] = Field(default=None, gt=0.0)


def _mmd_on_features(model: MlpModel, test: LabeledSet, n_permutations: int, seed: int,
                     bandwidth: Optional[float] = None) -> PermutationResult:
    features = FeatureExtractor(model)(test.x)
    return mc2st(features[test.y == 0], features[test.y == 1], bandwidth, n_permutations, seed)


def get_baseline(name: str) -> Callable[..., PermutationResult]:
    """Get the permutation test (model, test, n_permutations, seed, ...) based on its name."""
    if name == "sc2st":
        return sc2st
    elif name == "lc2st":
        return lc2st
    elif name == "mc2st":
        return _mmd_on_features
    else:
        raise ValueError(f"Unsupported baseline: {name}")


def run_baseline(name: str, data: LabeledSet, config: BaselineConfig, seed: int = 0) -> PermutationResult:
    """Train on the train/val folds of a stratified split, then test on the test fold"""
    test_fn = get_baseline(name)
    train, val, test = data.stratified_split(config.split, derive_rng(seed, 0, "baseline-split"))
    train_config = config.train_config.model_copy(update={"seed": derive_seed(seed, 0, "baseline-train")})
    model = mlp_train(train, val, train_config)
    permutation_seed = derive_seed(seed, 0, "baseline-permutation")
    if name == "mc2st":
        return test_fn(model, test, config.n_permutations, permutation_seed, config.bandwidth)
    return test_fn(model, test, config.n_permutations, permutation_seed)
