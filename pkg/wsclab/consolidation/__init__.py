from .averaging import is_average_epoch, update_running_average
from .baselines import replay_train_task, scratch_train
from .checkpoint import Checkpoint, decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from .dormant import IndexSet, eligible_mask, find_dormant_params, reset_quota
from .importance import (
    ImportanceVector,
    ScoringContext,
    compute_importance,
    hutchinson_diagonal,
    score_fisher,
    score_first_moment,
    score_hessian_hutchinson,
    score_inter_task_drift,
    score_intra_task_drift,
    score_moment,
    score_param_drift,
    score_second_moment,
)
from .reset import alt_reset, apply_reset, continual_backprop, random_reinit, revert, shrink_perturb, soft_reset, unit_utilities
from .trainer import ResetEvent, TaskLoop, TaskTrainReport, wsc_train_task

__all__ = [
    "Checkpoint",
    "ImportanceVector",
    "IndexSet",
    "ResetEvent",
    "ScoringContext",
    "TaskLoop",
    "TaskTrainReport",
    "alt_reset",
    "apply_reset",
    "compute_importance",
    "continual_backprop",
    "decode_checkpoint",
    "eligible_mask",
    "encode_checkpoint",
    "find_dormant_params",
    "hutchinson_diagonal",
    "is_average_epoch",
    "load_checkpoint",
    "random_reinit",
    "replay_train_task",
    "reset_quota",
    "revert",
    "save_checkpoint",
    "scratch_train",
    "score_fisher",
    "score_first_moment",
    "score_hessian_hutchinson",
    "score_inter_task_drift",
    "score_intra_task_drift",
    "score_moment",
    "score_param_drift",
    "score_second_moment",
    "shrink_perturb",
    "soft_reset",
    "unit_utilities",
    "update_running_average",
    "wsc_train_task",
]
