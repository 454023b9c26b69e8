"""Nonparametric evidence: Wilcoxon rank-sum for event vs non-event months,
and binomial inference on how often the event month is the yearly peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import rankdata

from .errors import BadArgs, BadMonth, DegenerateTies, EmptyGroup, EmptySeries, NoCompleteYear
from .gt_ingest import MonthlySeries
from .intervention import METHOD_PEAK_COUNT, METHOD_RANK_SUM, MethodVerdict

EXACT = "exact"
NORMAL_APPROX = "normal_approx"

EXACT_MAX_N = 20


@dataclass
class WilcoxonResult:
    u_x: float
    u_y: float
    u_min: float
    pvalue: float
    method: str
    direction_ok: bool


@dataclass
class PeakCount:
    per_year_peak_month: list[tuple[int, int, bool]]  # (year, peak month, tied)
    k: int
    n_years: int
    pmf_at_k: float
    tail_p: float


def split_by_event_month(series: MonthlySeries, event_month: int):
    """Partition observations into (event-month values, all other values)."""
    if len(series) == 0:
        raise EmptySeries("cannot split an empty series")
    if not 1 <= int(event_month) <= 12:
        raise BadMonth(f"event_month must be 1-12, got {event_month!r}")
    months = np.array([series.month_of(i) for i in range(len(series))])
    event_values = series.values[months == event_month]
    other_values = series.values[months != event_month]
    if event_values.size == 0:
        raise EmptyGroup(f"span contains no month {event_month}")
    return event_values, other_values


def _exact_greater_pvalue(rank_sum_x: float, n_x: int, n: int) -> float:
    """P(rank sum of a size-n_x subset of {1..n} >= observed), by counting."""
    target = int(round(rank_sum_x))
    max_sum = n * (n + 1) // 2
    # dp[k][s] = number of k-subsets of {1..i} with rank sum s
    dp = np.zeros((n_x + 1, max_sum + 1), dtype=np.int64)
    dp[0, 0] = 1
    for rank in range(1, n + 1):
        for k in range(min(rank, n_x), 0, -1):
            dp[k, rank:] += dp[k - 1, :-rank] if rank > 0 else dp[k - 1, :]
    counts = dp[n_x]
    total = counts.sum()
    return float(counts[target:].sum() / total)


def wilcoxon_rank_sum(x, y, alternative: str = "greater") -> WilcoxonResult:
    """One-sided rank-sum test that the x group is stochastically larger.

    Midranks are used for ties. Small tie-free samples (pooled n <= 20) get an
    exact p-value by enumerating the rank-sum distribution; otherwise a normal
    approximation with tie-corrected variance and a 0.5 continuity correction.
    """
    if alternative != "greater":
        raise BadArgs(f"only the 'greater' alternative is supported, got {alternative!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n_x, n_y = x.size, y.size
    if n_x == 0 or n_y == 0:
        raise EmptyGroup("both samples must be non-empty")

    pooled = np.concatenate([x, y])
    n = n_x + n_y
    ranks = rankdata(pooled, method="average")
    rank_sum_x = float(ranks[:n_x].sum())
    rank_sum_y = float(ranks[n_x:].sum())

    u_x = n_x * n_y + n_x * (n_x + 1) / 2.0 - rank_sum_x
    u_y = n_x * n_y + n_y * (n_y + 1) / 2.0 - rank_sum_y
    u_min = min(u_x, u_y)
    direction_ok = (rank_sum_x / n_x) > (rank_sum_y / n_y)

    _, tie_counts = np.unique(pooled, return_counts=True)
    has_ties = bool(np.any(tie_counts > 1))
    tie_term = float(np.sum(tie_counts.astype(float) ** 3 - tie_counts))
    var_u = n_x * n_y / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var_u <= 0.0:
        raise DegenerateTies("all pooled values are identical")

    if not has_ties and n <= EXACT_MAX_N:
        p = _exact_greater_pvalue(rank_sum_x, n_x, n)
        method = EXACT
    else:
        # x larger <=> U_x small; continuity-corrected left tail
        mu = n_x * n_y / 2.0
        z = (u_x + 0.5 - mu) / math.sqrt(var_u)
        p = 0.5 * math.erfc(-z / math.sqrt(2.0))
        p = min(max(p, 0.0), 1.0)
        method = NORMAL_APPROX

    return WilcoxonResult(u_x=u_x, u_y=u_y, u_min=u_min, pvalue=p,
                          method=method, direction_ok=bool(direction_ok))


def binomial_pmf(k: int, n: int, p: float = 1.0 / 12.0) -> float:
    """Exact binomial mass; rational arithmetic when p is the 1/12 null."""
    if n < 0 or k < 0 or k > n:
        raise BadArgs(f"need 0 <= k <= n, got k={k}, n={n}")
    if not 0.0 < p < 1.0:
        raise BadArgs(f"p must be in (0,1), got {p}")
    if abs(p - 1.0 / 12.0) < 1e-15:
        frac = Fraction(math.comb(n, k)) * Fraction(1, 12) ** k * Fraction(11, 12) ** (n - k)
        return float(frac)
    return math.comb(n, k) * p ** k * (1.0 - p) ** (n - k)


def binomial_tail(k: int, n: int, p: float = 1.0 / 12.0) -> float:
    """P(X >= k) for X ~ B(n, p)."""
    return float(sum(binomial_pmf(j, n, p) for j in range(k, n + 1)))


def peak_threshold(n_years: int, alpha: float = 0.05) -> int:
    """Smallest count k whose mass (and every larger count's mass) is below
    alpha under the uniform 1/12 null. Equals 4 for 14 years."""
    pmf = [binomial_pmf(k, n_years) for k in range(n_years + 1)]
    running_max = 0.0
    threshold = n_years + 1
    for k in range(n_years, -1, -1):
        running_max = max(running_max, pmf[k])
        if running_max < alpha:
            threshold = k
    return threshold


def count_event_peaks(series: MonthlySeries, event_month: int) -> PeakCount:
    """Count, over complete calendar years, how often the event month attains
    the yearly maximum (ties count and are flagged)."""
    if not 1 <= int(event_month) <= 12:
        raise BadMonth(f"event_month must be 1-12, got {event_month!r}")
    n = len(series)
    # first index that is a January, then whole 12-month blocks
    offset = (12 - (series.start[1] - 1)) % 12
    per_year = []
    k = 0
    i = offset
    while i + 12 <= n:
        block = series.values[i:i + 12]
        year = series.year_of(i)
        peak_val = block.max()
        peak_month = int(np.argmax(block)) + 1
        tied = int(np.sum(block == peak_val)) > 1
        per_year.append((year, peak_month, tied))
        if block[event_month - 1] == peak_val:
            k += 1
        i += 12
    if not per_year:
        raise NoCompleteYear("series does not span a complete calendar year")
    n_years = len(per_year)
    return PeakCount(
        per_year_peak_month=per_year,
        k=k,
        n_years=n_years,
        pmf_at_k=binomial_pmf(k, n_years),
        tail_p=binomial_tail(k, n_years),
    )


def peak_verdict(pc: PeakCount) -> MethodVerdict:
    threshold = peak_threshold(pc.n_years)
    significant = pc.k >= threshold
    detail = (
        f"k={pc.k}; n_years={pc.n_years}; threshold={threshold}; "
        f"pmf_at_k={pc.pmf_at_k:.6g}; tail_p={pc.tail_p:.6g}"
    )
    return MethodVerdict(method=METHOD_PEAK_COUNT, significant=bool(significant),
                         statistic=pc.pmf_at_k, pvalue_or_count=float(pc.k),
                         detail=detail)


def ranksum_verdict(result: WilcoxonResult, alpha: float = 0.05) -> MethodVerdict:
    detail = (
        f"u_x={result.u_x:.1f}; u_y={result.u_y:.1f}; p={result.pvalue:.6g}; "
        f"method={result.method}; direction_ok={result.direction_ok}"
    )
    return MethodVerdict(method=METHOD_RANK_SUM,
                         significant=bool(result.pvalue < alpha),
                         statistic=result.u_min, pvalue_or_count=result.pvalue,
                         detail=detail)
