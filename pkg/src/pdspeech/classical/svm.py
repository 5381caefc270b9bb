"""Support vector machine trained by sequential minimal optimization.

Two-loop SMO: the outer loop alternates full sweeps with sweeps over
non-bound multipliers, the inner loop picks the partner maximizing
|E1 - E2| with randomized fallbacks.  The kernel matrix is computed
once up front; training sets here are at most a few thousand rows.
Labels are {0, 1} externally and {-1, +1} internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, kernel_matrix, resolve_gamma

KKT_TOL = 1e-3
_STEP_EPS = 1e-10
# multipliers within this relative distance of 0 or C count as AT the
# bound: pair updates leave one-ulp dust on the recomputed partner, and
# strict comparisons would misread such a point as a margin vector
_BOUND_EPS = 1e-8


@dataclass
class SvmModel:
    kernel: KernelSpec
    C: float
    gamma_value: float
    bias: float
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i for the support vectors
    # full training-set view, kept for KKT diagnostics
    alpha: np.ndarray
    train_X: np.ndarray
    train_y: np.ndarray  # in {-1, +1}


class _Smo:
    def __init__(self, K, y, C, tol, rng):
        self.K = K
        self.y = y
        self.C = C
        self.tol = tol
        self.rng = rng
        self.n = y.size
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        self.E = -y.astype(np.float64)  # f(x)=0 initially
        self.snap = _BOUND_EPS * C

    def _non_bound(self):
        return np.flatnonzero((self.alpha > self.snap)
                              & (self.alpha < self.C - self.snap))

    def take_step(self, i1, i2):
        if i1 == i2:
            return False
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        E1, E2 = self.E[i1], self.E[i2]
        s = y1 * y2
        if s < 0:
            L, H = max(0.0, a2 - a1), min(self.C, self.C + a2 - a1)
        else:
            L, H = max(0.0, a1 + a2 - self.C), min(self.C, a1 + a2)
        if L >= H:
            return False
        k11 = self.K[i1, i1]
        k22 = self.K[i2, i2]
        k12 = self.K[i1, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = a2 + y2 * (E1 - E2) / eta
            a2_new = min(max(a2_new, L), H)
            # pin near-bound results to the segment ends so most updates
            # land exactly on 0 or C
            if a2_new - L < self.snap:
                a2_new = L
            elif H - a2_new < self.snap:
                a2_new = H
        else:
            # flat or concave direction: test both ends of the segment
            w1 = self.E[i1] + y1  # f(x1)
            w2 = self.E[i2] + y2
            g1 = y1 * (w1 - self.b) - a1 * k11 - s * a2 * k12
            g2 = y2 * (w2 - self.b) - s * a1 * k12 - a2 * k22

            def seg_obj(a2c):
                a1c = a1 + s * (a2 - a2c)
                return (a1c + a2c - 0.5 * k11 * a1c * a1c
                        - 0.5 * k22 * a2c * a2c - s * k12 * a1c * a2c
                        - a1c * g1 - a2c * g2)

            lo, hi = seg_obj(L), seg_obj(H)
            if lo > hi + _STEP_EPS:
                a2_new = L
            elif hi > lo + _STEP_EPS:
                a2_new = H
            else:
                return False
        if abs(a2_new - a2) < _STEP_EPS * (a2_new + a2 + _STEP_EPS):
            return False
        a1_new = a1 + s * (a2 - a2_new)
        # the recompute above can leak one rounding error past a bound
        a1_new = min(max(a1_new, 0.0), self.C)

        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        b_old = self.b
        b1 = self.b - self.E[i1] - d1 * k11 - d2 * k12
        b2 = self.b - self.E[i2] - d1 * k12 - d2 * k22
        if self.snap < a1_new < self.C - self.snap:
            self.b = b1
        elif self.snap < a2_new < self.C - self.snap:
            self.b = b2
        else:
            self.b = 0.5 * (b1 + b2)

        self.alpha[i1] = a1_new
        self.alpha[i2] = a2_new
        self.E += d1 * self.K[i1] + d2 * self.K[i2] + (self.b - b_old)
        return True

    def examine(self, i2):
        y2 = self.y[i2]
        a2 = self.alpha[i2]
        r2 = self.E[i2] * y2
        if not ((r2 < -self.tol and a2 < self.C - self.snap)
                or (r2 > self.tol and a2 > self.snap)):
            return False
        nb = self._non_bound()
        if nb.size > 1:
            i1 = nb[np.argmax(np.abs(self.E[nb] - self.E[i2]))]
            if self.take_step(int(i1), i2):
                return True
        if nb.size:
            start = self.rng.integers(nb.size)
            for j in np.roll(nb, -start):
                if self.take_step(int(j), i2):
                    return True
        start = self.rng.integers(self.n)
        for j in np.roll(np.arange(self.n), -start):
            if self.take_step(int(j), i2):
                return True
        return False

    def solve(self, max_sweeps=10000):
        examine_all = True
        changed = 0
        for _ in range(max_sweeps):
            changed = 0
            idx = np.arange(self.n) if examine_all else self._non_bound()
            for i2 in idx:
                changed += self.examine(int(i2))
            if examine_all:
                examine_all = False
                if changed == 0:
                    return
            elif changed == 0:
                examine_all = True
        import warnings
        warnings.warn("SMO hit the sweep limit before satisfying KKT")


def train_svm(X, y, kernel: KernelSpec = KernelSpec(), C: float = 1.0,
              tol: float = KKT_TOL, seed: int = 0) -> SvmModel:
    """Fit the dual SVM on labels in {0, 1} (1 = PD)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be N x d with matching labels")
    if np.unique(y).size != 2:
        raise ValueError("both classes must be present")
    if C <= 0:
        raise ValueError("C must be positive")
    ypm = np.where(y == np.unique(y).max(), 1.0, -1.0)

    gamma = resolve_gamma(kernel, X)
    K = kernel_matrix(kernel, X, X, gamma)
    smo = _Smo(K, ypm, float(C), tol, np.random.default_rng(seed))
    smo.solve()

    sv = np.flatnonzero(smo.alpha > 0)
    return SvmModel(kernel=kernel, C=float(C), gamma_value=gamma,
                    bias=float(smo.b),
                    support_vectors=X[sv].copy(),
                    dual_coef=(smo.alpha * ypm)[sv].copy(),
                    alpha=smo.alpha, train_X=X, train_y=ypm)


def svm_decision(model: SvmModel, X) -> np.ndarray:
    """Raw margin scores Sum_i alpha_i y_i k(x_i, x) + b."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.support_vectors.shape[1]:
        raise ValueError("dimension mismatch with the trained model")
    if model.support_vectors.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    K = kernel_matrix(model.kernel, X, model.support_vectors,
                      model.gamma_value)
    return K @ model.dual_coef + model.bias


def svm_predict(model: SvmModel, X) -> np.ndarray:
    """1 (PD) where the margin is positive, else 0."""
    return (svm_decision(model, X) > 0).astype(np.int64)


def kkt_violation(model: SvmModel, tol: float = KKT_TOL) -> float:
    """Largest violation of the stationarity conditions, for diagnostics.

    alpha=0 rows need y*f >= 1 - tol, interior rows |y*f - 1| <= tol,
    alpha=C rows y*f <= 1 + tol; returns max(excess beyond tol, 0).
    """
    f = svm_decision(model, model.train_X)
    yf = model.train_y * f
    a = model.alpha
    C = model.C
    viol = np.zeros_like(a)
    at_zero = a <= 0
    at_c = a >= C
    interior = ~(at_zero | at_c)
    viol[at_zero] = np.maximum(0.0, (1.0 - tol) - yf[at_zero])
    viol[interior] = np.maximum(0.0, np.abs(yf[interior] - 1.0) - tol)
    viol[at_c] = np.maximum(0.0, yf[at_c] - (1.0 + tol))
    return float(viol.max()) if viol.size else 0.0


def dual_objective(model: SvmModel) -> float:
    """Sum alpha - 0.5 * alpha^T (yy^T * K) alpha on the training set."""
    K = kernel_matrix(model.kernel, model.train_X, model.train_X,
                      model.gamma_value)
    ay = model.alpha * model.train_y
    return float(model.alpha.sum() - 0.5 * ay @ K @ ay)


def svm_to_dict(model: SvmModel) -> dict:
    """JSON-serializable model document."""
    return {
        "format_version": 1,
        "kernel": {"kind": model.kernel.kind, "degree": model.kernel.degree,
                   "gamma": model.kernel.gamma, "coef0": model.kernel.coef0},
        "C": model.C,
        "gamma_value": model.gamma_value,
        "bias": model.bias,
        "support_vectors": model.support_vectors.tolist(),
        "dual_coef": model.dual_coef.tolist(),
    }


def svm_from_dict(doc: dict) -> SvmModel:
    if doc.get("format_version") != 1:
        raise ValueError("unsupported model document version")
    k = doc["kernel"]
    sv = np.asarray(doc["support_vectors"], dtype=np.float64)
    return SvmModel(
        kernel=KernelSpec(kind=k["kind"], degree=k["degree"],
                          gamma=k["gamma"], coef0=k["coef0"]),
        C=doc["C"], gamma_value=doc["gamma_value"], bias=doc["bias"],
        support_vectors=sv,
        dual_coef=np.asarray(doc["dual_coef"], dtype=np.float64),
        alpha=np.zeros(0), train_X=np.zeros((0, sv.shape[1] if sv.size else 0)),
        train_y=np.zeros(0))


def svm_save(model: SvmModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(svm_to_dict(model), fh)


def svm_load(path) -> SvmModel:
    with open(path, encoding="utf-8") as fh:
        return svm_from_dict(json.load(fh))
