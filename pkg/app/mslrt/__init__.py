from .families import (
    NullFamily, GaussianMeanFamily, SingletonGaussianFamily, BernoulliFamily,
    StratifiedBernoulliFamily, StratifiedBernoulliNull, LogisticOnZFamily, LogisticNull
)
from .learners import (
    AltLearner, FittedDensity, GaussianDensity, FixedGaussianLearner, GaussianRunningMeanLearner,
    ConditionalClassifier, StaticClassifier, LookupClassifier, ClassifierLearner, oracle_learner
)
from .msplit import MsplitState, msplit_batch_log_evalue, msplit_step, msplit_run
from .pcit import pcit_batch_log_evalue
from .service import get_null_family, get_alt_learner

__all__ = [
    "NullFamily", "GaussianMeanFamily", "SingletonGaussianFamily", "BernoulliFamily",
    "StratifiedBernoulliFamily", "StratifiedBernoulliNull", "LogisticOnZFamily", "LogisticNull",
    "AltLearner", "FittedDensity", "GaussianDensity", "FixedGaussianLearner",
    "GaussianRunningMeanLearner", "ConditionalClassifier", "StaticClassifier", "LookupClassifier",
    "ClassifierLearner", "oracle_learner", "MsplitState", "msplit_batch_log_evalue", "msplit_step",
    "msplit_run", "pcit_batch_log_evalue", "get_null_family", "get_alt_learner"
]
