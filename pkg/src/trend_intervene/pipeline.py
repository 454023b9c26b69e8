"""Batch pipeline: per-query analysis, diagnostics, and report emission.

Each query runs seasonality detection, the base order search, the two-attempt
intervention fit, and the two nonparametric tests, then classifies the event.
A failing stage downgrades that method's verdict to not-significant with the
error recorded; it never aborts the batch.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInput, NoEntries
from .gt_ingest import MonthlySeries, build_impulse, parse_gt_csv, rescale_months
from .intervention import (
    METHOD_INTERVENTION,
    METHOD_PEAK_COUNT,
    METHOD_RANK_SUM,
    MethodVerdict,
    intervention_verdict,
    select_tfn,
)
from .rankstats import count_event_peaks, peak_verdict, ranksum_verdict, split_by_event_month, wilcoxon_rank_sum
from .sarima import search_orders
from .seasonal import detect_seasonality
from .verdict import EventClassification, classify_event, render_report


@dataclass
class BatchConfig:
    entries: list[tuple[str, int, str]]  # (csv_path, event_month, label)
    alpha: float = 0.05
    output_dir: str = "out"
    seed: int = 0
    parallelism: int = 1
    svg: bool = False

    def __post_init__(self):
        if not self.entries:
            raise NoEntries("batch config has no entries")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0,1), got {self.alpha}")


def _failed_verdict(method: str, exc: Exception) -> MethodVerdict:
    return MethodVerdict(method=method, significant=False, statistic=float("nan"),
                         pvalue_or_count=float("nan"),
                         detail=f"error: {type(exc).__name__}: {exc}")


def run_single(series: MonthlySeries, event_month: int, alpha: float = 0.05):
    """Full pipeline for one rescaled series.

    Returns (EventClassification, diagnostics dict). Diagnostics include both
    model fits, the seasonality vote, one-step predictions, and any per-stage
    errors.
    """
    diag: dict = {"query": series.query_name, "event_month": int(event_month),
                  "alpha": alpha, "errors": {}}

    vote = detect_seasonality(series)
    diag["seasonality"] = {
        "periodogram": vote.periodogram_test, "acf": vote.acf_test,
        "lm": vote.lm_test, "seasonal": vote.seasonal, "notes": vote.notes,
    }

    base_fit = tfn = None
    try:
        base_fit = search_orders(series, vote.seasonal)
        diag["base_fit"] = _fit_summary(base_fit)
    except Exception as exc:  # noqa: BLE001 - stage fault isolation
        diag["errors"]["base_fit"] = f"{type(exc).__name__}: {exc}"

    if base_fit is not None:
        try:
            impulse = build_impulse(series, event_month)
            tfn = select_tfn(series, impulse, base_fit, vote.seasonal)
            diag["tfn_fit"] = _tfn_summary(tfn)
            v_int = intervention_verdict(base_fit, tfn, alpha)
        except Exception as exc:  # noqa: BLE001
            diag["errors"]["intervention"] = f"{type(exc).__name__}: {exc}"
            v_int = _failed_verdict(METHOD_INTERVENTION, exc)
    else:
        v_int = MethodVerdict(method=METHOD_INTERVENTION, significant=False,
                              statistic=float("nan"), pvalue_or_count=float("nan"),
                              detail="error: base fit unavailable")

    try:
        event_vals, other_vals = split_by_event_month(series, event_month)
        v_rank = ranksum_verdict(wilcoxon_rank_sum(event_vals, other_vals), alpha)
    except Exception as exc:  # noqa: BLE001
        diag["errors"]["rank_sum"] = f"{type(exc).__name__}: {exc}"
        v_rank = _failed_verdict(METHOD_RANK_SUM, exc)

    try:
        if float(np.ptp(series.values)) == 0.0:
            raise DegenerateInput("constant series carries no peak information")
        v_peak = peak_verdict(count_event_peaks(series, event_month))
    except Exception as exc:  # noqa: BLE001
        diag["errors"]["peak_count"] = f"{type(exc).__name__}: {exc}"
        v_peak = _failed_verdict(METHOD_PEAK_COUNT, exc)

    classification = classify_event(v_int, v_rank, v_peak,
                                    query_name=series.query_name,
                                    event_month=event_month)
    diag["verdicts"] = {
        v.method: {"significant": v.significant, "statistic": _jsonsafe(v.statistic),
                   "pvalue_or_count": _jsonsafe(v.pvalue_or_count), "detail": v.detail}
        for v in classification.verdicts
    }
    diag["conclusion"] = classification.conclusion
    diag["evidence"] = {
        "wilcoxon_p": _jsonsafe(classification.evidence.wilcoxon_p),
        "peak_count": classification.evidence.peak_count,
        "tfn_better": classification.evidence.tfn_better,
        "w0_p": _jsonsafe(classification.evidence.w0_p),
    }
    diag["predictions"] = {
        "months": series.month_labels(),
        "actual": [float(v) for v in series.values],
        "arima_pred": _padded(base_fit.one_step_preds, len(series)) if base_fit else None,
        "tfn_pred": _padded(tfn.one_step_preds, len(series)) if tfn else None,
    }
    return classification, diag


def _jsonsafe(x: float):
    x = float(x)
    return None if math.isnan(x) else x


def _padded(preds: np.ndarray, n: int) -> list:
    pad = [None] * (n - preds.size)
    return pad + [float(v) for v in preds]


def _fit_summary(fit) -> dict:
    return {
        "orders": [fit.spec.p, fit.spec.d, fit.spec.q, fit.spec.P, fit.spec.D, fit.spec.Q],
        "label": fit.spec.label(),
        "loglik": float(fit.loglik),
        "aicc": float(fit.aicc),
        "adj_r2": float(fit.adj_r2),
        "n_params": fit.n_params,
        "phi": list(map(float, fit.params.phi)),
        "theta": list(map(float, fit.params.theta)),
        "sphi": list(map(float, fit.params.sphi)),
        "stheta": list(map(float, fit.params.stheta)),
        "sigma2": float(fit.params.sigma2),
        "mean_term": float(fit.params.mean_term),
    }


def _tfn_summary(tfn) -> dict:
    return {
        "orders": [tfn.noise_spec.p, tfn.noise_spec.d, tfn.noise_spec.q,
                   tfn.noise_spec.P, tfn.noise_spec.D, tfn.noise_spec.Q],
        "label": tfn.noise_spec.label(),
        "c": float(tfn.c),
        "w0": float(tfn.w0),
        "w0_se": float(tfn.w0_se),
        "w0_pvalue": float(tfn.w0_pvalue),
        "adj_r2": float(tfn.adj_r2),
        "aicc": float(tfn.aicc),
        "attempt": tfn.attempt,
        "detail": tfn.detail,
    }


def analyze_csv_file(csv_path: str, event_month: int, label: str, alpha: float = 0.05) -> dict:
    """Load one GT export, run the pipeline, and return a JSON-ready bundle.

    On unreadable/unparseable input the bundle carries only the error.
    """
    try:
        text = Path(csv_path).read_text(encoding="utf-8")
        series = rescale_months(parse_gt_csv(text))
    except Exception as exc:  # noqa: BLE001 - entry fault isolation
        return {"label": label, "csv_path": str(csv_path),
                "error": f"{type(exc).__name__}: {exc}"}
    series.query_name = label or series.query_name
    classification, diag = run_single(series, event_month, alpha)
    diag["label"] = label
    diag["csv_path"] = str(csv_path)
    return diag


def _verdict_from_diag(diag: dict, method: str) -> MethodVerdict:
    v = diag["verdicts"][method]
    return MethodVerdict(
        method=method, significant=bool(v["significant"]),
        statistic=float("nan") if v["statistic"] is None else v["statistic"],
        pvalue_or_count=float("nan") if v["pvalue_or_count"] is None else v["pvalue_or_count"],
        detail=v["detail"],
    )


def classification_from_diag(diag: dict) -> EventClassification:
    """Rebuild the classification recorded in a diagnostics bundle."""
    return classify_event(
        _verdict_from_diag(diag, METHOD_INTERVENTION),
        _verdict_from_diag(diag, METHOD_RANK_SUM),
        _verdict_from_diag(diag, METHOD_PEAK_COUNT),
        query_name=diag.get("label") or diag["query"],
        event_month=diag["event_month"],
    )


def _entry_worker(args) -> dict:
    csv_path, event_month, label, alpha = args
    return analyze_csv_file(csv_path, event_month, label, alpha)


def run_batch(config: BatchConfig) -> int:
    """Run every entry, write report.csv / diag/ / plots/, return exit status
    (0 only if every entry produced a classification)."""
    out = Path(config.output_dir)
    (out / "diag").mkdir(parents=True, exist_ok=True)
    (out / "plots").mkdir(parents=True, exist_ok=True)

    jobs = [(path, month, label, config.alpha) for path, month, label in config.entries]
    if config.parallelism > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            diags = list(pool.map(_entry_worker, jobs))
    else:
        diags = [_entry_worker(j) for j in jobs]

    classifications = []
    failures = 0
    for diag in diags:
        label = diag["label"]
        diag["seed"] = config.seed
        with open(out / "diag" / f"{_slug(label)}.json", "w", encoding="utf-8") as fh:
            json.dump(diag, fh, indent=2)
        if "error" in diag:
            failures += 1
            continue
        classifications.append(classification_from_diag(diag))
        _write_plot_data(out / "plots", diag, svg=config.svg)

    (out / "report.csv").write_text(render_report(classifications), encoding="utf-8")
    return 0 if failures == 0 else 1


def _slug(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in label.strip()) or "entry"


def _write_plot_data(plots_dir: Path, diag: dict, svg: bool = False):
    preds = diag["predictions"]
    months, actual = preds["months"], preds["actual"]
    arima = preds["arima_pred"] or [None] * len(months)
    tfn = preds["tfn_pred"] or [None] * len(months)
    lines = ["month,actual,arima_pred,tfn_pred"]
    for mo, a, b, c in zip(months, actual, arima, tfn):
        cell = lambda v: "" if v is None else f"{v:.6g}"
        lines.append(f"{mo},{cell(a)},{cell(b)},{cell(c)}")
    path = plots_dir / f"{_slug(diag['label'])}.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if svg:
        _write_svg(plots_dir / f"{_slug(diag['label'])}.svg", months, actual,
                   tfn if preds["tfn_pred"] else arima)


def _write_svg(path: Path, months: list[str], actual: list, fitted: list):
    """Two polylines (actual and fitted) with x-axis ticks at Januaries."""
    width, height, pad = 960, 320, 40
    pairs = [(i, a) for i, a in enumerate(actual) if a is not None]
    ys = [a for _, a in pairs] + [f for f in fitted if f is not None]
    if not ys:
        return
    y_min, y_max = min(ys), max(ys)
    span = (y_max - y_min) or 1.0
    n = len(months)

    def sx(i):
        return pad + (width - 2 * pad) * i / max(n - 1, 1)

    def sy(v):
        return height - pad - (height - 2 * pad) * (v - y_min) / span

    def polyline(values, color):
        pts = " ".join(f"{sx(i):.1f},{sy(v):.1f}" for i, v in enumerate(values) if v is not None)
        return f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'

    ticks = []
    for i, mo in enumerate(months):
        if mo.endswith("-01"):
            x = sx(i)
            ticks.append(f'<line x1="{x:.1f}" y1="{height - pad}" x2="{x:.1f}" '
                         f'y2="{height - pad + 5}" stroke="black"/>')
            ticks.append(f'<text x="{x:.1f}" y="{height - pad + 18}" font-size="9" '
                         f'text-anchor="middle">{mo[:4]}</text>')
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<rect width="{width}" height="{height}" fill="white"/>'
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>'
        + polyline(actual, "#1f77b4") + polyline(fitted, "#d62728")
        + "".join(ticks)
        + "</svg>"
    )
    path.write_text(svg, encoding="utf-8")
