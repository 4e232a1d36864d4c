"""Compiled SMO inner loop (second-order working-set selection).

Solves   min_a  0.5 a'Qa - e'a   s.t.  y'a = 0,  0 <= a <= C
with Q_ij = y_i y_j K_ij, y in {-1, +1}. The loop tracks v = -y * grad
rather than the gradient itself.
"""

import numpy as np
from numba import njit

TAU = 1e-12


@njit(cache=True)
def gradient(K, y, alpha):
    n = y.shape[0]
    G = -np.ones(n)
    for j in range(n):
        if alpha[j] != 0.0:
            for k in range(n):
                G[k] += y[k] * y[j] * K[j, k] * alpha[j]
    return G


@njit(cache=True)
def violation_bounds(y, alpha, G, C):
    """(m, M): max of -y G over I_up, min over I_low."""
    m = -np.inf
    M = np.inf
    for t in range(y.shape[0]):
        v = -y[t] * G[t]
        up = (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0.0)
        low = (y[t] > 0 and alpha[t] > 0.0) or (y[t] < 0 and alpha[t] < C)
        if up and v > m:
            m = v
        if low and v < M:
            M = v
    return m, M


@njit(cache=True)
def _flags(y, a, C, up, low, t):
    up[t] = (y[t] > 0 and a[t] < C) or (y[t] < 0 and a[t] > 0.0)
    low[t] = (y[t] > 0 and a[t] > 0.0) or (y[t] < 0 and a[t] < C)


@njit(cache=True)
def solve(K, y, C, tol, max_iter, alpha0):
    n = y.shape[0]
    alpha = alpha0.copy()
    v = -y * gradient(K, y, alpha)
    up = np.empty(n, dtype=np.bool_)
    low = np.empty(n, dtype=np.bool_)
    for t in range(n):
        _flags(y, alpha, C, up, low, t)
    it = 0
    converged = False
    refreshed = False
    while it < max_iter:
        gmax = -np.inf
        i = -1
        for t in range(n):
            if up[t] and v[t] >= gmax:
                gmax = v[t]
                i = t
        gmin = np.inf
        j = -1
        best = np.inf
        if i >= 0:
            Kii = K[i, i]
            Ki = K[i]
            for t in range(n):
                if low[t]:
                    vt = v[t]
                    if vt < gmin:
                        gmin = vt
                    b = gmax - vt
                    if b > 0.0:
                        a = Kii + K[t, t] - 2.0 * Ki[t]
                        if a <= 0.0:
                            a = TAU
                        obj = -(b * b) / a
                        if obj <= best:
                            best = obj
                            j = t
        if j < 0 or gmax - gmin < tol:
            # the incrementally updated gradient drifts; confirm on a fresh one
            if refreshed:
                converged = True
                break
            v = -y * gradient(K, y, alpha)
            refreshed = True
            continue
        refreshed = False
        it += 1

        yi = y[i]
        yj = y[j]
        ai_old = alpha[i]
        aj_old = alpha[j]
        Gi = -yi * v[i]
        Gj = -yj * v[j]
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0.0:
            quad = TAU
        if yi != yj:
            delta = (-Gi - Gj) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0.0:
                if alpha[j] < 0.0:
                    alpha[j] = 0.0
                    alpha[i] = diff
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            delta = (Gi - Gj) / quad
            s = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if s > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = s - C
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = s - C
            else:
                if alpha[j] < 0.0:
                    alpha[j] = 0.0
                    alpha[i] = s
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                    alpha[j] = s
        ci = yi * (alpha[i] - ai_old)
        cj = yj * (alpha[j] - aj_old)
        Ki = K[i]
        Kj = K[j]
        for k in range(n):
            v[k] -= Ki[k] * ci + Kj[k] * cj
        _flags(y, alpha, C, up, low, i)
        _flags(y, alpha, C, up, low, j)
    return alpha, -y * v, converged, it
