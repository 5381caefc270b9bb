"""Sparse-learning rankers: least-squares, logistic, and joint-l21 loss,
each with an l2,1 row-sparsity regularizer.

Feature i's score is the Euclidean norm of row i of the solved weight
matrix W (d x 2, one column per class).  least_squares and logistic are
solved by a monotone accelerated proximal-gradient method with
backtracking line search; the joint formulation (l2,1 residual + l2,1
regularizer) by iteratively reweighted least squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = 1e-10

LOSSES = ("least_squares", "logistic", "rfs")


@dataclass
class SparseResult:
    scores: np.ndarray
    W: np.ndarray
    objective: np.ndarray  # objective value per iteration, post-update
    converged: bool


def one_hot_targets(y) -> np.ndarray:
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size != 2:
        raise ValueError("need exactly two classes present")
    Y = np.zeros((y.size, 2))
    Y[np.arange(y.size), (y == classes.max()).astype(int)] = 1.0
    return Y


def row_norms(W) -> np.ndarray:
    return np.sqrt((np.asarray(W) ** 2).sum(axis=1))


def l21_norm(W) -> float:
    return float(row_norms(W).sum())


def _prox_l21(W, tau):
    """Row-wise shrinkage: argmin_Z 0.5||Z-W||^2 + tau*||Z||_2,1."""
    norms = row_norms(W)
    scale = np.maximum(0.0, 1.0 - tau / np.maximum(norms, _EPS))
    scale[norms == 0.0] = 0.0
    return W * scale[:, None]


def _fista_l21(f_grad, f_val, shape, gamma, max_iter, tol):
    """Monotone FISTA on f(W) + gamma*||W||_2,1 from W = 0.

    Returns (W_best, objective history, converged).  The history is of
    accepted iterates, so it never increases.  Convergence is declared
    on the prox-gradient fixed point ||U - Z|| <= tol * max(1, ||U||),
    which the objective plateau cannot fake.
    """
    W = np.zeros(shape)
    Z = W.copy()
    t = 1.0
    L = 1.0
    best = f_val(W) + gamma * l21_norm(W)
    history = [best]
    converged = False
    for _ in range(max_iter):
        fZ = f_val(Z)
        gZ = f_grad(Z)
        while True:  # backtracking on the majorization at Z
            U = _prox_l21(Z - gZ / L, gamma / L)
            diff = U - Z
            quad = fZ + np.sum(gZ * diff) + 0.5 * L * np.sum(diff * diff)
            if f_val(U) <= quad + 1e-12 * max(1.0, abs(quad)):
                break
            L *= 2.0
        step = np.linalg.norm(U - Z)
        FU = f_val(U) + gamma * l21_norm(U)
        W_prev = W
        if FU <= best:  # monotone step: keep the better of U and W
            W, best = U, FU
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        Z = W + (t / t_next) * (U - W) + ((t - 1.0) / t_next) * (W - W_prev)
        t = t_next
        history.append(best)
        if step <= tol * max(1.0, np.linalg.norm(U)):
            converged = True
            break
    return W, np.array(history), converged


def ls_l21_solve(X, Y, gamma, max_iter=200, tol=1e-6):
    """min_W 0.5*||XW - Y||_F^2 + gamma*||W||_2,1."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)

    def f_val(W):
        r = X @ W - Y
        return 0.5 * float(np.sum(r * r))

    def f_grad(W):
        return X.T @ (X @ W - Y)

    return _fista_l21(f_grad, f_val, (X.shape[1], Y.shape[1]),
                      gamma, max_iter, tol)


def _softmax(S):
    S = S - S.max(axis=1, keepdims=True)
    e = np.exp(S)
    return e / e.sum(axis=1, keepdims=True)


def ll_l21_solve(X, Y, gamma, max_iter=200, tol=1e-6):
    """min_W softmax cross-entropy(XW, Y) + gamma*||W||_2,1."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)

    def f_val(W):
        S = X @ W
        S = S - S.max(axis=1, keepdims=True)
        log_z = np.log(np.exp(S).sum(axis=1))
        return float((log_z - (S * Y).sum(axis=1)).sum())

    def f_grad(W):
        return X.T @ (_softmax(X @ W) - Y)

    return _fista_l21(f_grad, f_val, (X.shape[1], Y.shape[1]),
                      gamma, max_iter, tol)


def rfs_solve(X, Y, gamma, max_iter=200, tol=1e-6):
    """min_W ||XW - Y||_2,1 + gamma*||W||_2,1 by iterative reweighting.

    Each pass solves the weighted ridge system
    (X^T E X + gamma D) W = X^T E Y with E, D the half-inverse residual
    row norms and weight row norms of the previous iterate, which
    majorizes the joint objective and cannot increase it.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    n, d = X.shape

    def objective(W):
        return float(row_norms(X @ W - Y).sum()) + gamma * l21_norm(W)

    e = np.ones(n)  # first pass is a plain ridge solve
    dw = np.ones(d)
    W = np.zeros((d, Y.shape[1]))
    # the reweighting guarantee (each pass cannot increase the
    # objective) starts at the first solved iterate, so the history
    # starts there too, not at W = 0
    history = []
    converged = False
    for _ in range(max_iter):
        XtE = X.T * e
        W = np.linalg.solve(XtE @ X + gamma * np.diag(dw), XtE @ Y)
        J = objective(W)
        history.append(J)
        if len(history) > 1 and abs(history[-2] - J) <= tol * max(
                1.0, abs(history[-2])):
            converged = True
            break
        e = 0.5 / np.maximum(row_norms(X @ W - Y), _EPS)
        dw = 0.5 / np.maximum(row_norms(W), _EPS)
    return W, np.array(history), converged


_SOLVERS = {"least_squares": ls_l21_solve,
            "logistic": ll_l21_solve,
            "rfs": rfs_solve}


def sparse_l21_rank(X, y, loss: str = "least_squares", gamma: float = 0.1,
                    max_iter: int = 200, tol: float = 1e-6) -> SparseResult:
    if loss not in _SOLVERS:
        raise ValueError(f"loss must be one of {LOSSES}")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    W, history, converged = _SOLVERS[loss](X, one_hot_targets(y),
                                           gamma, max_iter, tol)
    return SparseResult(scores=row_norms(W), W=W, objective=history,
                        converged=converged)
