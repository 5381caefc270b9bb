"""Kernel functions for the SVM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("linear", "polynomial", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus parameters.

    gamma may be the string "scale" (resolved against the training
    matrix as 1 / (n_features * variance of the flattened matrix)), a
    positive float, or None meaning "scale".
    """

    kind: str = "rbf"
    degree: int = 3
    gamma: object = "scale"
    coef0: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kernel kind must be one of {KINDS}")
        if self.kind == "polynomial" and self.degree < 2:
            raise ValueError("polynomial degree must be >= 2")
        if isinstance(self.gamma, str):
            if self.gamma != "scale":
                raise ValueError("gamma must be 'scale', a positive number, or None")
        elif self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")


def resolve_gamma(spec: KernelSpec, X) -> float:
    """Concrete gamma for a training matrix."""
    if isinstance(spec.gamma, (int, float)) and not isinstance(spec.gamma, bool):
        return float(spec.gamma)
    X = np.asarray(X, dtype=np.float64)
    var = X.var()
    return 1.0 / (X.shape[1] * max(var, 1e-12))


def kernel_matrix(spec: KernelSpec, A, B, gamma: float) -> np.ndarray:
    """K[i, j] = k(A[i], B[j])."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[1]:
        raise ValueError("dimension mismatch between kernel arguments")
    if spec.kind == "linear":
        return A @ B.T
    if spec.kind == "polynomial":
        return (gamma * (A @ B.T) + spec.coef0) ** spec.degree
    sq = (np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :]
          - 2.0 * (A @ B.T))
    return np.exp(-gamma * np.maximum(sq, 0.0))
