"""Classical classifiers: SMO SVM, kNN, random forest, grid search."""

from .forest import ForestConfig, ForestModel, forest_predict, train_random_forest
from .grid import (grid_search, grouped_folds, knn_default_grid,
                   svm_default_grid)
from .kernels import KernelSpec, kernel_matrix, resolve_gamma
from .neighbors import knn_predict, knn_scores
from .svm import (KKT_TOL, SvmModel, dual_objective, kkt_violation, svm_decision,
                  svm_from_dict, svm_load, svm_predict, svm_save, svm_to_dict,
                  train_svm)

__all__ = [
    "KKT_TOL", "ForestConfig", "ForestModel", "KernelSpec", "SvmModel",
    "dual_objective", "forest_predict", "grid_search", "grouped_folds",
    "kernel_matrix", "kkt_violation", "knn_default_grid", "knn_predict",
    "knn_scores", "resolve_gamma", "svm_decision", "svm_from_dict",
    "svm_load", "svm_predict", "svm_save", "svm_to_dict",
    "svm_default_grid", "train_random_forest", "train_svm",
]
