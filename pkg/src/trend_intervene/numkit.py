"""Small numeric kernel: simplex minimizer, numerical Hessian, OLS, periodogram.

Everything here is generic plumbing used by the statistical modules. The
minimizer is a plain Nelder-Mead with best-so-far semantics: it never returns
a point worse than the start, and declares convergence when either the simplex
diameter or the objective spread collapses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteEvaluation, NonFiniteObjectiveAtStart, RankDeficient, TooShort


@dataclass
class MinimizeOptions:
    max_iters: int = 4000
    x_tol: float = 1e-8
    f_tol: float = 1e-10
    step: float = 0.25  # initial simplex edge length (scaled by max(1, |x0_i|))


@dataclass
class OptimResult:
    argmin: np.ndarray
    objective_value: float
    iterations: int
    converged: bool


@dataclass
class OlsResult:
    coefficients: np.ndarray
    residuals: np.ndarray
    sse: float
    degrees_of_freedom: int


def _safe_eval(f, x):
    v = f(np.asarray(x, dtype=float))
    v = float(v)
    return v if np.isfinite(v) else np.inf


def minimize(objective, x0, options: MinimizeOptions | None = None) -> OptimResult:
    """Nelder-Mead simplex descent.

    Converged when simplex diameter < x_tol or objective spread < f_tol;
    otherwise returns the best point seen with converged=False.
    """
    opts = options or MinimizeOptions()
    x0 = np.asarray(x0, dtype=float)
    f0 = float(objective(x0))
    if not np.isfinite(f0):
        raise NonFiniteObjectiveAtStart(f"objective is {f0} at x0")

    n = x0.size
    if n == 0:
        return OptimResult(argmin=x0.copy(), objective_value=f0, iterations=0, converged=True)

    # initial simplex: x0 plus one perturbed vertex per coordinate
    verts = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += opts.step * max(1.0, abs(x0[i]))
        verts.append(v)
    simplex = np.array(verts)
    fvals = np.array([f0] + [_safe_eval(objective, v) for v in verts[1:]])

    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    iters = 0
    converged = False
    while iters < opts.max_iters:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]

        diameter = np.max(np.abs(simplex[1:] - simplex[0]))
        spread = fvals[-1] - fvals[0]
        if diameter < opts.x_tol or (np.isfinite(spread) and spread < opts.f_tol):
            converged = True
            break
        iters += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = _safe_eval(objective, xr)
        if fvals[0] <= fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = _safe_eval(objective, xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        else:
            xc = centroid + rho * (worst - centroid)
            fc = _safe_eval(objective, xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
            else:  # shrink toward the best vertex
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
                    fvals[i] = _safe_eval(objective, simplex[i])

    best = int(np.argmin(fvals))
    return OptimResult(argmin=simplex[best].copy(), objective_value=float(fvals[best]),
                       iterations=iters, converged=converged)


def numerical_hessian(f, x) -> np.ndarray:
    """Central-difference Hessian with per-coordinate step max(1e-4, 1e-4*|x_i|)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    h = np.maximum(1e-4, 1e-4 * np.abs(x))

    def ev(point):
        v = float(f(point))
        if not np.isfinite(v):
            raise NonFiniteEvaluation(f"objective not finite at {point}")
        return v

    f_x = ev(x)
    H = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        H[i, i] = (ev(x + ei) - 2.0 * f_x + ev(x - ei)) / h[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (
                ev(x + ei + ej) - ev(x + ei - ej) - ev(x - ei + ej) + ev(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return (H + H.T) / 2.0


def ols_fit(X, y) -> OlsResult:
    """Least squares via SVD with a condition-number guard at 1e10."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    rows, cols = X.shape
    if rows != y.size:
        raise ValueError("X and y have mismatched lengths")
    if rows <= cols:
        raise TooShort(f"need more rows ({rows}) than columns ({cols})")

    u, s, vt = np.linalg.svd(X, full_matrices=False)
    if s[-1] <= 0 or s[0] / s[-1] > 1e10:
        raise RankDeficient(f"design condition number {s[0] / max(s[-1], 1e-300):.3g}")
    coef = vt.T @ ((u.T @ y) / s)
    resid = y - X @ coef
    return OlsResult(coefficients=coef, residuals=resid,
                     sse=float(resid @ resid), degrees_of_freedom=rows - cols)


def periodogram(series) -> list[tuple[float, float]]:
    """Mean-removed periodogram at Fourier frequencies k/n, k=1..n//2.

    Ordinate I(f_k) = |sum_t x_t exp(-2*pi*i*f_k*t)|^2 / n.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 4:
        raise TooShort(f"periodogram needs n >= 4, got {n}")
    x = x - x.mean()
    spec = np.fft.rfft(x)
    out = []
    for k in range(1, n // 2 + 1):
        out.append((k / n, float(abs(spec[k]) ** 2) / n))
    return out
