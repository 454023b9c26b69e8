"""Seasonal ARIMA models: representation, exact Gaussian ML, simulation,
and automatic order search.

Estimation maximizes the exact likelihood (innovations recursion on the
expanded ARMA(p+12P, q+12Q)) over an unconstrained parameterization:
partial-autocorrelation transforms keep the AR/MA sides stationary and
invertible, and sigma^2 is optimized on the log scale. The order search
screens the whole grid with a cheap conditional-sum-of-squares objective and
then refines the best cells by full ML, ranking by AICc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arma_kernels import STATUS_OK, css_residuals, innovations_filter
from .errors import (
    AllFitsFailed,
    DegenerateVariance,
    NonStationaryParams,
    NumericalBreakdown,
    OptimizerFailed,
    TooShort,
)
from .gt_ingest import MonthlySeries
from .numkit import MinimizeOptions, minimize

SEASON = 12

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SarimaSpec:
    """Model orders (p,d,q)(P,D,Q) with season length fixed at 12."""

    p: int = 0
    d: int = 0
    q: int = 0
    P: int = 0
    D: int = 0
    Q: int = 0
    s: int = SEASON

    def __post_init__(self):
        if self.s != SEASON:
            raise ValueError("season length is fixed at 12")
        if min(self.p, self.d, self.q, self.P, self.D, self.Q) < 0:
            raise ValueError("orders must be non-negative")
        if self.p > 5 or self.q > 5 or self.P > 2 or self.Q > 2:
            raise ValueError(f"orders out of range: {self}")
        if self.d + self.D > 2:
            raise ValueError("d + D must be at most 2")

    @property
    def n_coef(self) -> int:
        return self.p + self.q + self.P + self.Q

    @property
    def n_params(self) -> int:
        """Estimated parameters: coefficients + mean term + sigma^2."""
        return self.n_coef + 2

    @property
    def warmup(self) -> int:
        return self.d + SEASON * self.D

    def label(self) -> str:
        base = f"({self.p},{self.d},{self.q})"
        if self.P or self.D or self.Q:
            return base + f"({self.P},{self.D},{self.Q})12"
        return base


@dataclass
class SarimaParams:
    phi: np.ndarray
    theta: np.ndarray
    sphi: np.ndarray
    stheta: np.ndarray
    sigma2: float
    mean_term: float = 0.0

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        self.sphi = np.asarray(self.sphi, dtype=float)
        self.stheta = np.asarray(self.stheta, dtype=float)


@dataclass
class SarimaFit:
    spec: SarimaSpec
    params: SarimaParams
    loglik: float
    aicc: float
    adj_r2: float
    one_step_preds: np.ndarray
    residuals: np.ndarray
    n_params: int


# ---------------------------------------------------------------------------
# stationarity transform (partial autocorrelations <-> AR coefficients)
# ---------------------------------------------------------------------------


def pacf_to_ar(r: np.ndarray) -> np.ndarray:
    """Levinson-Durbin step-up: partial autocorrelations in (-1,1) to a
    stationary AR coefficient vector."""
    r = np.asarray(r, dtype=float)
    a = np.zeros(r.size)
    for k in range(r.size):
        prev = a[:k].copy()
        a[k] = r[k]
        for j in range(k):
            a[j] = prev[j] - r[k] * prev[k - 1 - j]
    return a


def ar_to_pacf(phi: np.ndarray) -> np.ndarray:
    """Inverse Levinson-Durbin; requires a stationary coefficient vector."""
    a = np.asarray(phi, dtype=float).copy()
    p = a.size
    r = np.zeros(p)
    for k in range(p - 1, -1, -1):
        r[k] = a[k]
        denom = 1.0 - r[k] * r[k]
        if denom <= 0.0:
            raise NonStationaryParams("partial autocorrelation at or beyond 1 in magnitude")
        prev = a[: k + 1].copy()
        for j in range(k):
            a[j] = (prev[j] + r[k] * prev[k - 1 - j]) / denom
    return r


def unconstrained_to_ar(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return pacf_to_ar(z / np.sqrt(1.0 + z * z))


def ar_to_unconstrained(phi: np.ndarray) -> np.ndarray:
    r = ar_to_pacf(phi)
    return r / np.sqrt(1.0 - r * r)


def unconstrained_to_ma(z: np.ndarray) -> np.ndarray:
    # theta(B) = 1 + sum theta_j B^j is invertible iff 1 - sum(-theta_j) B^j
    # is a stationary AR polynomial
    return -unconstrained_to_ar(z)


def ma_to_unconstrained(theta: np.ndarray) -> np.ndarray:
    return ar_to_unconstrained(-np.asarray(theta, dtype=float))


def _ar_stationary(phi: np.ndarray) -> bool:
    """All characteristic roots strictly inside the unit circle."""
    phi = np.asarray(phi, dtype=float)
    if phi.size == 0:
        return True
    roots = np.roots(np.concatenate(([1.0], -phi)))
    return bool(np.all(np.abs(roots) < 1.0))


def _ma_invertible(theta: np.ndarray) -> bool:
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        return True
    roots = np.roots(np.concatenate(([1.0], theta)))
    return bool(np.all(np.abs(roots) < 1.0))


# ---------------------------------------------------------------------------
# polynomial expansion and differencing
# ---------------------------------------------------------------------------


def expand_polynomials(spec: SarimaSpec, params: SarimaParams) -> tuple[np.ndarray, np.ndarray]:
    """Multiply the seasonal and non-seasonal lag polynomials out to plain
    coefficient vectors of lengths p+12P and q+12Q.

    AR coefficients follow the (1 - sum phi_i B^i) sign convention; MA
    coefficients follow (1 + sum theta_j B^j).
    """
    ar = np.concatenate(([1.0], -params.phi)) if spec.p else np.array([1.0])
    sar = np.array([1.0])
    if spec.P:
        sar = np.zeros(SEASON * spec.P + 1)
        sar[0] = 1.0
        sar[SEASON::SEASON] = -params.sphi
    ar_full = np.convolve(ar, sar)

    ma = np.concatenate(([1.0], params.theta)) if spec.q else np.array([1.0])
    sma = np.array([1.0])
    if spec.Q:
        sma = np.zeros(SEASON * spec.Q + 1)
        sma[0] = 1.0
        sma[SEASON::SEASON] = params.stheta
    ma_full = np.convolve(ma, sma)

    return -ar_full[1:], ma_full[1:]


def difference(series, d: int, D: int, s: int = SEASON) -> np.ndarray:
    """Apply (1-B)^d then (1-B^s)^D."""
    x = np.asarray(series, dtype=float)
    if x.size <= d + s * D:
        raise TooShort(f"series of length {x.size} cannot be differenced d={d}, D={D}")
    for _ in range(d):
        x = x[1:] - x[:-1]
    for _ in range(D):
        x = x[s:] - x[:-s]
    return x


def diff_polynomial(d: int, D: int, s: int = SEASON) -> np.ndarray:
    """Coefficients of (1-B)^d (1-B^s)^D, constant term first."""
    poly = np.array([1.0])
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    seas = np.zeros(s + 1)
    seas[0], seas[s] = 1.0, -1.0
    for _ in range(D):
        poly = np.convolve(poly, seas)
    return poly


def undifference(diffed, head, d: int, D: int, s: int = SEASON) -> np.ndarray:
    """Rebuild the original series from its differences and the first
    d + s*D retained original values."""
    dp = diff_polynomial(d, D, s)
    k = dp.size - 1
    head = np.asarray(head, dtype=float)
    if head.size != k:
        raise ValueError(f"need exactly {k} initial values, got {head.size}")
    y = list(head)
    for wv in np.asarray(diffed, dtype=float):
        t = len(y)
        acc = wv
        for j in range(1, k + 1):
            acc -= dp[j] * y[t - j]
        y.append(acc)
    return np.array(y)


# ---------------------------------------------------------------------------
# likelihood
# ---------------------------------------------------------------------------


def _loglik_filtered(x: np.ndarray, ar: np.ndarray, ma: np.ndarray, sigma2: float):
    """Exact log-likelihood plus the filter outputs, no stationarity check."""
    if sigma2 <= 0.0 or not np.isfinite(sigma2):
        return -np.inf, None, None
    preds, v, status = innovations_filter(
        np.ascontiguousarray(x, dtype=float),
        np.ascontiguousarray(ar, dtype=float),
        np.ascontiguousarray(ma, dtype=float),
    )
    if status != STATUS_OK:
        return -np.inf, None, None
    n = x.size
    resid2 = (x - preds) ** 2 / v
    ll = -0.5 * (n * (_LOG_2PI + math.log(sigma2)) + np.sum(np.log(v)) + resid2.sum() / sigma2)
    if not np.isfinite(ll):
        return -np.inf, None, None
    return float(ll), preds, v


def gaussian_loglik(spec: SarimaSpec, params: SarimaParams, diff_series) -> float:
    """Exact Gaussian log-likelihood of a differenced, mean-adjusted series."""
    ar, ma = expand_polynomials(spec, params)
    if not _ar_stationary(ar):
        raise NonStationaryParams("AR polynomial has a root on or inside the unit circle")
    if not _ma_invertible(ma):
        raise NonStationaryParams("MA polynomial has a root on or inside the unit circle")
    ll, _, _ = _loglik_filtered(np.asarray(diff_series, dtype=float), ar, ma, params.sigma2)
    if not np.isfinite(ll):
        raise NumericalBreakdown("non-positive prediction variance in the filter")
    return ll


def aicc_from_loglik(loglik: float, k: int, n: int) -> float:
    if n - k - 1 <= 0:
        return np.inf
    return -2.0 * loglik + 2.0 * k + 2.0 * k * (k + 1) / (n - k - 1)


def adjusted_r2(predictions, observed, n_params: int) -> float:
    """Degrees-of-freedom-adjusted R^2 of one-step predictions.

    ``observed`` may be a MonthlySeries (its trailing window is used) or an
    aligned array of the same length as ``predictions``.
    """
    preds = np.asarray(predictions, dtype=float)
    if isinstance(observed, MonthlySeries):
        obs = observed.values[-preds.size:]
    else:
        obs = np.asarray(observed, dtype=float)
    if obs.size != preds.size:
        raise ValueError("predictions and observations are not aligned")
    n = obs.size
    sst = float(np.sum((obs - obs.mean()) ** 2))
    if sst <= 0.0:
        raise DegenerateVariance("observations have zero variance in the R^2 window")
    sse = float(np.sum((obs - preds) ** 2))
    r2 = 1.0 - sse / sst
    return 1.0 - (1.0 - r2) * (n - 1) / (n - n_params - 1)


# ---------------------------------------------------------------------------
# parameter packing for the optimizer
# ---------------------------------------------------------------------------


def pack_params(spec: SarimaSpec, params: SarimaParams) -> np.ndarray:
    """Natural parameters -> unconstrained optimizer vector."""
    return np.concatenate([
        ar_to_unconstrained(params.phi) if spec.p else [],
        ma_to_unconstrained(params.theta) if spec.q else [],
        ar_to_unconstrained(params.sphi) if spec.P else [],
        ma_to_unconstrained(params.stheta) if spec.Q else [],
        [params.mean_term, math.log(max(params.sigma2, 1e-300))],
    ])


def unpack_params(spec: SarimaSpec, u: np.ndarray) -> SarimaParams:
    u = np.asarray(u, dtype=float)
    i = 0
    phi = unconstrained_to_ar(u[i:i + spec.p]); i += spec.p
    theta = unconstrained_to_ma(u[i:i + spec.q]); i += spec.q
    sphi = unconstrained_to_ar(u[i:i + spec.P]); i += spec.P
    stheta = unconstrained_to_ma(u[i:i + spec.Q]); i += spec.Q
    mean_term = float(u[i]); i += 1
    sigma2 = float(math.exp(min(u[i], 700.0)))
    return SarimaParams(phi=phi, theta=theta, sphi=sphi, stheta=stheta,
                        sigma2=sigma2, mean_term=mean_term)


def _neg_loglik(spec: SarimaSpec, w: np.ndarray):
    def nll(u):
        params = unpack_params(spec, u)
        ar, ma = expand_polynomials(spec, params)
        ll, _, _ = _loglik_filtered(w - params.mean_term, ar, ma, params.sigma2)
        return -ll
    return nll


def _optimize(objective, u0, dim_budget: int = 500):
    """Minimize with one restart from the incumbent on non-convergence."""
    n = len(u0)
    opts = MinimizeOptions(max_iters=dim_budget * max(n, 1), x_tol=1e-7, f_tol=1e-10)
    res = minimize(objective, u0, opts)
    if not res.converged:
        opts2 = MinimizeOptions(max_iters=dim_budget * max(n, 1),
                                x_tol=1e-7, f_tol=1e-10, step=0.05)
        res = minimize(objective, res.argmin, opts2)
    return res


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------


def _preds_original_scale(y: np.ndarray, w_preds: np.ndarray, spec: SarimaSpec) -> np.ndarray:
    """One-step predictions of y from predictions of the differenced series."""
    dp = diff_polynomial(spec.d, spec.D)
    k = dp.size - 1
    preds = np.empty(y.size - k)
    for idx in range(preds.size):
        t = k + idx
        acc = w_preds[idx]
        for j in range(1, k + 1):
            acc -= dp[j] * y[t - j]
        preds[idx] = acc
    return preds


def fit_sarima(series: MonthlySeries, spec: SarimaSpec,
               start: SarimaParams | None = None) -> SarimaFit:
    """Maximum-likelihood fit of a SARIMA spec to a rescaled monthly series."""
    y = np.asarray(series.values, dtype=float)
    min_len = spec.n_params + spec.warmup + 10
    if y.size < min_len:
        raise TooShort(f"need at least {min_len} observations for {spec.label()}, got {y.size}")
    w = difference(y, spec.d, spec.D)
    var_w = float(np.var(w))
    if var_w < 1e-10:
        raise DegenerateVariance("differenced series is (numerically) constant")

    if start is not None:
        u0 = pack_params(spec, start)
    else:
        u0 = np.zeros(spec.n_coef + 2)
        u0[-2] = w.mean()
        u0[-1] = math.log(var_w)

    nll = _neg_loglik(spec, w)
    res = _optimize(nll, u0)
    if not res.converged:
        raise OptimizerFailed(f"likelihood optimization did not converge for {spec.label()}")

    params = unpack_params(spec, res.argmin)
    ar, ma = expand_polynomials(spec, params)
    ll, w_preds, _ = _loglik_filtered(w - params.mean_term, ar, ma, params.sigma2)
    if not np.isfinite(ll):
        raise NumericalBreakdown("filter failed at the optimum")

    one_step_w = w_preds + params.mean_term
    preds = _preds_original_scale(y, one_step_w, spec)
    obs = y[spec.warmup:]
    k = spec.n_params
    return SarimaFit(
        spec=spec,
        params=params,
        loglik=ll,
        aicc=aicc_from_loglik(ll, k, w.size),
        adj_r2=adjusted_r2(preds, obs, k),
        one_step_preds=preds,
        residuals=obs - preds,
        n_params=k,
    )


def simulate_sarima(spec: SarimaSpec, params: SarimaParams, n: int, seed: int) -> np.ndarray:
    """Simulate n observations; deterministic for a given seed."""
    from scipy.signal import lfilter

    if n < 1:
        raise ValueError("n must be at least 1")
    ar, ma = expand_polynomials(spec, params)
    if not _ar_stationary(ar):
        raise NonStationaryParams("cannot simulate a non-stationary AR side")
    if not _ma_invertible(ma):
        raise NonStationaryParams("cannot simulate a non-invertible MA side")

    burn = 10 * (spec.p + spec.q + SEASON * spec.P + SEASON * spec.Q + 1)
    rng = np.random.default_rng(seed)
    eps = rng.normal(0.0, math.sqrt(params.sigma2), size=n + burn)
    x = lfilter(np.concatenate(([1.0], ma)), np.concatenate(([1.0], -ar)), eps)
    x = x[burn:] + params.mean_term

    for _ in range(spec.D):
        out = x.copy()
        for t in range(SEASON, x.size):
            out[t] = x[t] + out[t - SEASON]
        x = out
    for _ in range(spec.d):
        x = np.cumsum(x)
    return x


# ---------------------------------------------------------------------------
# automatic order selection
# ---------------------------------------------------------------------------


def _shrink_stationary(coefs: np.ndarray, check) -> np.ndarray:
    """Pull a coefficient vector toward 0 (scaling roots) until it passes."""
    coefs = np.asarray(coefs, dtype=float)
    if coefs.size == 0 or check(coefs):
        return coefs
    powers = np.arange(1, coefs.size + 1)
    for _ in range(80):
        coefs = coefs * 0.93 ** powers
        if check(coefs):
            return coefs
    return np.zeros(coefs.size)


def _lag_matrix(x: np.ndarray, lags: list[int], t_min: int):
    rows = x.size - t_min
    X = np.empty((rows, len(lags)))
    for j, lag in enumerate(lags):
        X[:, j] = x[t_min - lag: x.size - lag]
    return X


def _longar_residuals(x: np.ndarray, order: int, lag_step: int = 1) -> np.ndarray:
    """Residuals of a long autoregression, aligned to x (leading zeros)."""
    h = order * lag_step
    if x.size - h < order + 5:
        return np.zeros(x.size)
    lags = [lag_step * (i + 1) for i in range(order)]
    X = _lag_matrix(x, lags, h)
    target = x[h:]
    coef, *_ = np.linalg.lstsq(X, target, rcond=None)
    out = np.zeros(x.size)
    out[h:] = target - X @ coef
    return out


def _hr_coefs(x: np.ndarray, eps: np.ndarray, n_ar: int, n_ma: int, lag_step: int):
    """One-shot regression estimate of AR/MA coefficients at multiples of
    lag_step, projected into the stationary/invertible region."""
    if n_ar == 0 and n_ma == 0:
        return np.zeros(0), np.zeros(0)
    ar_lags = [lag_step * (i + 1) for i in range(n_ar)]
    ma_lags = [lag_step * (j + 1) for j in range(n_ma)]
    t_min = max(ar_lags + ma_lags)
    if x.size - t_min < n_ar + n_ma + 5:
        return np.zeros(n_ar), np.zeros(n_ma)
    X = np.hstack([_lag_matrix(x, ar_lags, t_min) if n_ar else np.empty((x.size - t_min, 0)),
                   _lag_matrix(eps, ma_lags, t_min) if n_ma else np.empty((x.size - t_min, 0))])
    coef, *_ = np.linalg.lstsq(X, x[t_min:], rcond=None)
    phi = _shrink_stationary(coef[:n_ar], _ar_stationary)
    theta = _shrink_stationary(coef[n_ar:], _ma_invertible)
    return phi, theta


def _css_aicc(w: np.ndarray, spec: SarimaSpec, params: SarimaParams):
    ar, ma = expand_polynomials(spec, params)
    e = css_residuals(np.ascontiguousarray(w - params.mean_term),
                      np.ascontiguousarray(ar), np.ascontiguousarray(ma))
    sse = float(e @ e)
    if not np.isfinite(sse) or sse <= 0.0:
        return None
    n = w.size
    sigma2 = sse / n
    ll_css = -0.5 * n * (_LOG_2PI + math.log(sigma2) + 1.0)
    params.sigma2 = sigma2
    return aicc_from_loglik(ll_css, spec.n_params, n)


def search_orders(series: MonthlySeries, seasonal: bool, n_refine: int = 10) -> SarimaFit:
    """Grid search over p,q in 0..5 and d in 0..1 (plus P,Q in 0..2, D in 0..1
    when seasonal): a fast conditional-sum-of-squares screen ranks every cell,
    then the best cells are refined by full ML and the lowest AICc wins.

    The screen estimates each cell by layered long-AR regressions (the
    classical ARMA initializer) and scores the CSS at that estimate; the same
    estimates warm-start the ML refinements.
    """
    y = np.asarray(series.values, dtype=float)
    if y.size < 60:
        raise TooShort(f"order search needs at least 60 observations, got {y.size}")

    d_grid = (0, 1)
    sD_grid = (0, 1) if seasonal else (0,)
    sPQ_grid = [(P, Q) for P in range(3) for Q in range(3)] if seasonal else [(0, 0)]

    screened = []
    for d in d_grid:
        for D in sD_grid:
            try:
                w = difference(y, d, D)
            except TooShort:
                continue
            if float(np.var(w)) < 1e-10:
                continue
            wc = w - w.mean()
            eps = _longar_residuals(wc, min(20, w.size // 4))
            for p in range(6):
                for q in range(6):
                    phi, theta = _hr_coefs(wc, eps, p, q, 1)
                    if seasonal:
                        ar_ns = np.concatenate(([1.0], -phi))
                        ma_ns = np.concatenate(([1.0], theta))
                        u = css_residuals(np.ascontiguousarray(wc),
                                          np.ascontiguousarray(-ar_ns[1:]),
                                          np.ascontiguousarray(ma_ns[1:]))
                        eta = _longar_residuals(u, 3, SEASON)
                    for P, Q in sPQ_grid:
                        spec = SarimaSpec(p=p, d=d, q=q, P=P, D=D, Q=Q)
                        if w.size < spec.n_params + 10:
                            continue
                        if P or Q:
                            sphi, stheta = _hr_coefs(u, eta, P, Q, SEASON)
                        else:
                            sphi, stheta = np.zeros(0), np.zeros(0)
                        params = SarimaParams(phi=phi[:p], theta=theta[:q],
                                              sphi=sphi, stheta=stheta,
                                              sigma2=1.0, mean_term=float(w.mean()))
                        score = _css_aicc(w, spec, params)
                        if score is not None:
                            screened.append((score, spec, params))

    if not screened:
        raise AllFitsFailed("no grid cell produced a usable screening fit")

    screened.sort(key=lambda item: item[0])
    best_fit = None
    for _, spec, start in screened[:n_refine]:
        try:
            fit = fit_sarima(series, spec, start=start)
        except (OptimizerFailed, NumericalBreakdown, DegenerateVariance, TooShort,
                NonStationaryParams):
            continue
        if best_fit is None or fit.aicc < best_fit.aicc:
            best_fit = fit
    if best_fit is None:
        raise AllFitsFailed("all refinement fits failed")
    return best_fit
