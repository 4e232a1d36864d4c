"""Reference implementations that share no code with the package.

The dual SVM optimum is found by enumerating every assignment of the
multipliers to {0, free, C}. On each face the concave objective restricted to
the equality constraint has a stationary point given by a small linear system;
the best feasible stationary point over all faces is the global optimum.
"""

import itertools

import numpy as np


def linear_gram(X, scale=1.0):
    return X @ X.T / scale**2


def gaussian_gram(X, scale=1.0):
    n = len(X)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            d = X[i] - X[j]
            K[i, j] = np.exp(-(d @ d) / (2.0 * scale**2))
    return K


def dual_value(alpha, K, y):
    v = alpha * y
    return alpha.sum() - 0.5 * v @ K @ v


def brute_force_dual(K, y, C, feas_tol=1e-10):
    """Optimal dual objective and multipliers for labels y in {-1, +1}."""
    n = len(y)
    Q = np.outer(y, y) * K
    patterns = np.array(list(itertools.product((0, 1, 2), repeat=n)))
    best_val, best_alpha = -np.inf, None
    # faces with the same number of free multipliers are solved as one batch
    n_free = (patterns == 1).sum(axis=1)
    for m in range(n + 1):
        group = patterns[n_free == m]
        alpha = np.where(group == 2, float(C), 0.0)
        if m:
            free = np.array([np.flatnonzero(p == 1) for p in group])
            rows = np.arange(len(group))[:, None]
            # stationarity on the face:  Q_FF a_F + b y_F = 1 - Q_F,bound a_bound
            #                           y_F . a_F = -y_bound . a_bound
            A = np.zeros((len(group), m + 1, m + 1))
            A[:, :m, :m] = Q[free[:, :, None], free[:, None, :]]
            A[:, :m, m] = y[free]
            A[:, m, :m] = y[free]
            rhs = np.empty((len(group), m + 1))
            rhs[:, :m] = 1.0 - np.einsum("gij,gj->gi", Q[free], alpha)
            rhs[:, m] = -(alpha @ y)
            sol = np.einsum("gij,gj->gi", np.linalg.pinv(A, rcond=1e-12), rhs)
            consistent = np.abs(np.einsum("gij,gj->gi", A, sol) - rhs).max(axis=1) <= 1e-8
            alpha[rows, free] = sol[:, :m]
            alpha, group = alpha[consistent], group[consistent]
        ok = (alpha.min(axis=1) >= -feas_tol) & (alpha.max(axis=1) <= C + feas_tol) & (np.abs(alpha @ y) <= 1e-8)
        if ok.any():
            v = alpha[ok] * y
            vals = alpha[ok].sum(axis=1) - 0.5 * np.einsum("gi,ij,gj->g", v, K, v)
            g = int(np.argmax(vals))
            if vals[g] > best_val:
                best_val, best_alpha = float(vals[g]), alpha[ok][g]
    return best_val, best_alpha


def cvxopt_dual(K, y, C):
    """Interior-point cross-check (only used when cvxopt is installed)."""
    from cvxopt import matrix, solvers

    n = len(y)
    solvers.options["show_progress"] = False
    solvers.options["abstol"] = 1e-12
    solvers.options["reltol"] = 1e-12
    solvers.options["feastol"] = 1e-12
    P = matrix(np.outer(y, y) * K + 1e-12 * np.eye(n))
    q = matrix(-np.ones(n))
    G = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.hstack([np.zeros(n), C * np.ones(n)]))
    A = matrix(y.reshape(1, -1).astype(float))
    sol = solvers.qp(P, q, G, h, A, matrix(0.0))
    alpha = np.clip(np.array(sol["x"]).ravel(), 0.0, C)
    return dual_value(alpha, K, y), alpha


def percentile_linear(values, q):
    """Percentile by interpolating between order statistics at rank q/100*(n-1)."""
    v = sorted(values)
    pos = q / 100.0 * (len(v) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (pos - lo) * (v[hi] - v[lo])


def random_dataset(rng, n_max=8):
    """Two features, both classes present."""
    while True:
        n = int(rng.integers(4, n_max + 1))
        X = rng.normal(size=(n, 2))
        y = rng.integers(0, 2, size=n)
        if 0 < y.sum() < n:
            return X, y
