from .moments import MomentState, bias_corrected, raw_moments, update_shadow_moments
from .optimizers import Optimizer, adam_step, sgd_step

__all__ = ["MomentState", "Optimizer", "adam_step", "bias_corrected", "raw_moments", "sgd_step", "update_shadow_moments"]
