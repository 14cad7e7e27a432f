from .algebra import (
    ev_product, ev_convex_combine, ev_average, ev_to_pvalue, decide_fixed, validate_alpha
)
from .process import new_process, ep_update, ep_extend, to_verdict

__all__ = [
    "ev_product", "ev_convex_combine", "ev_average", "ev_to_pvalue", "decide_fixed",
    "validate_alpha", "new_process", "ep_update", "ep_extend", "to_verdict"
]
