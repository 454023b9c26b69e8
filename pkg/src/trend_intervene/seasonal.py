"""Seasonality detection by majority vote of three tests.

All three operate at the annual period: a Fisher-g periodogram test restricted
to seasonal frequencies, a lag-12 autocorrelation test, and an F-test of month
dummies on top of a linear trend. The periodogram and autocorrelation tests
run on the first-differenced series so a trend cannot leak into them; the
linear-model test carries an explicit trend regressor instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DegenerateVariance, TooShort
from .gt_ingest import MonthlySeries
from .numkit import ols_fit, periodogram

MIN_LENGTH = 36
SEASON = 12


@dataclass
class SeasonalityVote:
    periodogram_test: bool
    acf_test: bool
    lm_test: bool
    seasonal: bool
    notes: str = ""


def _check_length(series: MonthlySeries):
    if len(series) < MIN_LENGTH:
        raise TooShort(f"seasonality tests need >= {MIN_LENGTH} months, got {len(series)}")


def test_periodogram(series: MonthlySeries) -> bool:
    """Fisher g-test on the differenced series, gated to annual harmonics.

    Significant only if the dominant ordinate is both unusually large
    (p < 0.05 under the white-noise null) and located at a multiple of 1/12
    within half a Fourier bin.
    """
    _check_length(series)
    x = np.diff(series.values)
    pgram = periodogram(x)
    ordinates = np.array([o for _, o in pgram])
    total = ordinates.sum()
    if total <= 1e-12:
        return False
    g = float(ordinates.max() / total)
    m = len(ordinates)
    p = min(1.0, m * (1.0 - g) ** (m - 1))
    if p >= 0.05:
        return False
    f_max = pgram[int(np.argmax(ordinates))][0]
    half_bin = 1.0 / (2.0 * x.size)
    return any(abs(f_max - k / 12.0) <= half_bin for k in range(1, 7))


def test_acf(series: MonthlySeries) -> bool:
    """|r_12| of the differenced series against the 1.96/sqrt(n) band."""
    _check_length(series)
    x = np.diff(series.values)
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom <= 0.0:
        raise DegenerateVariance("differenced series has zero variance")
    r12 = float(xc[SEASON:] @ xc[:-SEASON]) / denom
    return abs(r12) > 1.96 / np.sqrt(x.size)


def test_lm(series: MonthlySeries) -> bool:
    """F-test of 11 month dummies added to an intercept + linear trend model."""
    _check_length(series)
    y = series.values
    n = y.size
    t = np.arange(n, dtype=float)
    reduced = np.column_stack([np.ones(n), t])
    dummies = np.zeros((n, SEASON - 1))
    for i in range(n):
        m = series.month_of(i)
        if m < SEASON:  # December is the baseline month
            dummies[i, m - 1] = 1.0
    full = np.column_stack([reduced, dummies])

    fit_r = ols_fit(reduced, y)
    fit_f = ols_fit(full, y)
    df_f = fit_f.degrees_of_freedom
    if fit_f.sse <= 0.0:
        # month dummies fit exactly; significant iff they explain anything
        return fit_r.sse > 1e-12
    f_stat = ((fit_r.sse - fit_f.sse) / (SEASON - 1)) / (fit_f.sse / df_f)
    p = float(stats.f.sf(f_stat, SEASON - 1, df_f))
    return p < 0.05


def detect_seasonality(series: MonthlySeries) -> SeasonalityVote:
    """Run all three tests; a test that errors counts as a no-seasonality vote."""
    flags = []
    notes = []
    for name, test in (("periodogram", test_periodogram),
                       ("acf", test_acf),
                       ("lm", test_lm)):
        try:
            flags.append(bool(test(series)))
        except Exception as exc:  # noqa: BLE001 - degenerate series must not abort a batch
            flags.append(False)
            notes.append(f"{name}: {type(exc).__name__}: {exc}")
    return SeasonalityVote(
        periodogram_test=flags[0],
        acf_test=flags[1],
        lm_test=flags[2],
        seasonal=sum(flags) >= 2,
        notes="; ".join(notes),
    )
