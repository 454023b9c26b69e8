"""Does a monthly awareness event measurably raise search interest?

Library + batch CLI: SARIMA / intervention modeling of monthly
search-frequency series, corroborated by a Wilcoxon rank-sum test and a
binomial yearly-peak test, with a triple-agreement classification.
"""

from .gt_ingest import ImpulseSeries, MonthlySeries, build_impulse, parse_gt_csv, rescale_months
from .intervention import (
    InterventionFit,
    MethodVerdict,
    fit_tfn,
    intervention_verdict,
    replace_event_months,
    select_tfn,
)
from .pipeline import BatchConfig, analyze_csv_file, run_batch, run_single
from .rankstats import (
    PeakCount,
    WilcoxonResult,
    binomial_pmf,
    count_event_peaks,
    peak_verdict,
    split_by_event_month,
    wilcoxon_rank_sum,
)
from .sarima import (
    SarimaFit,
    SarimaParams,
    SarimaSpec,
    adjusted_r2,
    difference,
    expand_polynomials,
    fit_sarima,
    gaussian_loglik,
    search_orders,
    simulate_sarima,
)
from .seasonal import SeasonalityVote, detect_seasonality
from .verdict import EventClassification, classify_event, render_report, verdicts_from_evidence

__version__ = "0.1.0"

__all__ = [
    "BatchConfig",
    "EventClassification",
    "ImpulseSeries",
    "InterventionFit",
    "MethodVerdict",
    "MonthlySeries",
    "PeakCount",
    "SarimaFit",
    "SarimaParams",
    "SarimaSpec",
    "SeasonalityVote",
    "WilcoxonResult",
    "adjusted_r2",
    "analyze_csv_file",
    "binomial_pmf",
    "build_impulse",
    "classify_event",
    "count_event_peaks",
    "detect_seasonality",
    "difference",
    "expand_polynomials",
    "fit_sarima",
    "fit_tfn",
    "gaussian_loglik",
    "intervention_verdict",
    "parse_gt_csv",
    "peak_verdict",
    "render_report",
    "replace_event_months",
    "rescale_months",
    "run_batch",
    "run_single",
    "search_orders",
    "select_tfn",
    "simulate_sarima",
    "split_by_event_month",
    "verdicts_from_evidence",
    "wilcoxon_rank_sum",
]
