from .folds import Fold, loso_folds
from .metrics import (DEFAULT_TRIM, ConfusionMatrix, aggregate_segment,
                      confusion_and_accuracy, roc_auc, trapezoid_area)
from .pipeline import (PipelineConfig, PipelineError, auc_vs_m_sweep,
                       classical_threshold, loso_scores_classical,
                       run_pipeline, run_sweep)
from .report import (read_report, report_fingerprint, write_report,
                     write_roc_csv, write_segment_csv)

__all__ = [
    "DEFAULT_TRIM",
    "ConfusionMatrix",
    "Fold",
    "PipelineConfig",
    "PipelineError",
    "aggregate_segment",
    "auc_vs_m_sweep",
    "classical_threshold",
    "confusion_and_accuracy",
    "loso_folds",
    "loso_scores_classical",
    "read_report",
    "report_fingerprint",
    "roc_auc",
    "run_pipeline",
    "run_sweep",
    "trapezoid_area",
    "write_report",
    "write_roc_csv",
    "write_segment_csv",
]
