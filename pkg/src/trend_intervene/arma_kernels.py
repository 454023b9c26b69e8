"""Compiled kernels for ARMA evaluation.

The exact Gaussian likelihood is evaluated through the innovations recursion
on the model autocovariances: one-step predictors and their scaled MSEs come
out of a single O(n * m^2 / n * q^2) pass, with m = max(p, q). Everything is
computed with unit innovation variance; sigma^2 enters the likelihood in
closed form afterwards.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_BREAKDOWN = 1


@njit(cache=True)
def arma_psi(phi, theta, nout):
    """First ``nout`` MA(infinity) weights psi_0..psi_{nout-1}."""
    p = phi.size
    q = theta.size
    psi = np.zeros(nout)
    if nout == 0:
        return psi
    psi[0] = 1.0
    for j in range(1, nout):
        acc = theta[j - 1] if j - 1 < q else 0.0
        kmax = min(j, p)
        for k in range(1, kmax + 1):
            acc += phi[k - 1] * psi[j - k]
        psi[j] = acc
    return psi


@njit(cache=True)
def arma_autocov(phi, theta, nlags):
    """Autocovariances gamma(0..nlags) for unit innovation variance."""
    p = phi.size
    q = theta.size
    psi = arma_psi(phi, theta, q + 1)
    # c_k = sum_{j=k}^{q} theta_j * psi_{j-k}, with theta_0 = 1
    c = np.zeros(q + 1)
    for k in range(q + 1):
        acc = 0.0
        for j in range(k, q + 1):
            tj = 1.0 if j == 0 else theta[j - 1]
            acc += tj * psi[j - k]
        c[k] = acc

    gam = np.zeros(nlags + 1)
    if p == 0:
        for h in range(min(q, nlags) + 1):
            gam[h] = c[h]
        return gam

    # cross-moment equations for gamma(0..p), then the pure AR recursion
    A = np.zeros((p + 1, p + 1))
    b = np.zeros(p + 1)
    for k in range(p + 1):
        A[k, k] += 1.0
        for i in range(1, p + 1):
            l = abs(k - i)
            A[k, l] -= phi[i - 1]
        b[k] = c[k] if k <= q else 0.0
    g_head = np.linalg.solve(A, b)
    for h in range(min(p, nlags) + 1):
        gam[h] = g_head[h]
    for h in range(p + 1, nlags + 1):
        acc = c[h] if h <= q else 0.0
        for i in range(1, p + 1):
            acc += phi[i - 1] * gam[h - i]
        gam[h] = acc
    return gam


@njit(cache=True)
def _kappa(i, j, m, q, phi, theta, gam):
    """Covariance kernel of the rescaled process used by the recursion.

    Requires i >= j >= 1 and gam = autocovariances up to lag m.
    """
    if i <= m:
        return gam[i - j]
    h = i - j
    if h > q:
        return 0.0
    if j <= m:
        acc = gam[h]
        for r in range(1, phi.size + 1):
            acc -= phi[r - 1] * gam[abs(r - h)]
        return acc
    acc = 0.0
    for r in range(q - h + 1):
        tr = 1.0 if r == 0 else theta[r - 1]
        trh = 1.0 if r + h == 0 else theta[r + h - 1]
        acc += tr * trh
    return acc


@njit(cache=True)
def innovations_filter(x, phi, theta):
    """One-step predictors and scaled prediction variances for a zero-mean ARMA.

    Returns (preds, v, status): preds[t] is E[x_t | x_0..x_{t-1}], and the
    prediction MSE is sigma^2 * v[t]. Computed for unit innovation variance,
    so the result is independent of sigma^2. status != 0 signals a
    non-positive prediction variance (numerical breakdown).
    """
    n = x.size
    p = phi.size
    q = theta.size
    m = max(p, q)
    preds = np.zeros(n)
    v = np.ones(n)
    if n == 0:
        return preds, v, STATUS_OK

    if p == 0 and q == 0:
        return preds, v, STATUS_OK

    gam = arma_autocov(phi, theta, m)
    TH = np.zeros((n, m + 1))

    v[0] = gam[0]
    if v[0] <= 0.0 or not np.isfinite(v[0]):
        return preds, v, STATUS_BREAKDOWN

    for t in range(1, n):
        k_lo = 0 if t < m else t - q
        for k in range(k_lo, t):
            acc = _kappa(t + 1, k + 1, m, q, phi, theta, gam)
            row_lo = 0 if k < m else k - q
            start = row_lo if row_lo > k_lo else k_lo
            for i in range(start, k):
                acc -= TH[k, k - i] * TH[t, t - i] * v[i]
            TH[t, t - k] = acc / v[k]
        acc = _kappa(t + 1, t + 1, m, q, phi, theta, gam)
        for i in range(k_lo, t):
            acc -= TH[t, t - i] * TH[t, t - i] * v[i]
        v[t] = acc
        if v[t] <= 0.0 or not np.isfinite(v[t]):
            return preds, v, STATUS_BREAKDOWN

    for t in range(1, n):
        acc = 0.0
        if t < m:
            for j in range(1, t + 1):
                acc += TH[t, j] * (x[t - j] - preds[t - j])
        else:
            for i in range(1, p + 1):
                acc += phi[i - 1] * x[t - i]
            for j in range(1, min(q, t) + 1):
                acc += TH[t, j] * (x[t - j] - preds[t - j])
        preds[t] = acc

    return preds, v, STATUS_OK


@njit(cache=True)
def css_residuals(w, phi, theta):
    """Conditional-sum-of-squares residuals with zero start-up values."""
    n = w.size
    p = phi.size
    q = theta.size
    e = np.zeros(n)
    for t in range(n):
        acc = w[t]
        for i in range(min(t, p)):
            acc -= phi[i] * w[t - 1 - i]
        for j in range(min(t, q)):
            acc -= theta[j] * e[t - 1 - j]
        e[t] = acc
    return e
