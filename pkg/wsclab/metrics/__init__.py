from .accuracy import AccuracyMatrix, average_final_accuracy, average_incremental_accuracy, eval_accuracy_row, forgetting, plasticity
from .alignment import AlignmentRecord, cosine_alignment, gradient_alignment
from .cost import CostRecord, total_cost
from .drift import DriftRecord, drift_record

__all__ = [
    "AccuracyMatrix",
    "AlignmentRecord",
    "CostRecord",
    "DriftRecord",
    "average_final_accuracy",
    "average_incremental_accuracy",
    "cosine_alignment",
    "drift_record",
    "eval_accuracy_row",
    "forgetting",
    "gradient_alignment",
    "plasticity",
    "total_cost",
]
