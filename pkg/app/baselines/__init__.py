from .permutation import PermutationResult, permutation_pvalue, permutation_test, label_arrangements
from .c2st import sc2st, lc2st, mean_logit_difference
from .mmd import FeatureExtractor, median_heuristic, gaussian_kernel, mmd2_biased, mc2st
from .service import BASELINES, BaselineConfig, get_baseline, run_baseline

__all__ = [
    "PermutationResult", "permutation_pvalue", "permutation_test", "label_arrangements",
    "sc2st", "lc2st", "mean_logit_difference", "FeatureExtractor", "median_heuristic",
    "gaussian_kernel", "mmd2_biased", "mc2st", "BASELINES", "BaselineConfig", "get_baseline",
    "run_baseline"
]
