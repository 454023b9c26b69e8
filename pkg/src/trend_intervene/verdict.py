"""Combine the three method verdicts into the final event classification and
render the batch report."""

from __future__ import annotations

import io
import re
from dataclasses import dataclass

from .intervention import (
    METHOD_INTERVENTION,
    METHOD_PEAK_COUNT,
    METHOD_RANK_SUM,
    MethodVerdict,
)

EFFECTIVE = "Effective"
INEFFECTIVE = "Ineffective"
UNCLEAR = "Unclear"

_CONCLUSION_ORDER = {EFFECTIVE: 0, UNCLEAR: 1, INEFFECTIVE: 2}

_TFN_BETTER_RE = re.compile(r"tfn_better=(yes|no)")

REPORT_COLUMNS = [
    "Event",
    "Wilcoxon p",
    "Peaks at Event Months",
    "TFN Fits Better",
    "Input Series Coefficient p",
    "Conclusion",
]


@dataclass
class EvidenceRow:
    """The four report columns backing a classification."""

    wilcoxon_p: float
    peak_count: int
    tfn_better: bool
    w0_p: float


@dataclass
class EventClassification:
    query_name: str
    event_month: int
    verdicts: tuple[MethodVerdict, MethodVerdict, MethodVerdict]
    conclusion: str
    evidence: EvidenceRow


def _extract_evidence(v_intervention: MethodVerdict, v_ranksum: MethodVerdict,
                      v_peak: MethodVerdict) -> EvidenceRow:
    m = _TFN_BETTER_RE.search(v_intervention.detail)
    tfn_better = bool(m and m.group(1) == "yes")
    return EvidenceRow(
        wilcoxon_p=float(v_ranksum.pvalue_or_count),
        peak_count=int(round(v_peak.pvalue_or_count)),
        tfn_better=tfn_better,
        w0_p=float(v_intervention.pvalue_or_count),
    )


def classify_event(v_intervention: MethodVerdict, v_ranksum: MethodVerdict,
                   v_peak: MethodVerdict, query_name: str = "",
                   event_month: int = 0) -> EventClassification:
    """Triple-agreement rule: Effective iff all three methods are significant,
    Ineffective iff none is, Unclear otherwise."""
    flags = [v_intervention.significant, v_ranksum.significant, v_peak.significant]
    if all(flags):
        conclusion = EFFECTIVE
    elif not any(flags):
        conclusion = INEFFECTIVE
    else:
        conclusion = UNCLEAR
    return EventClassification(
        query_name=query_name,
        event_month=event_month,
        verdicts=(v_intervention, v_ranksum, v_peak),
        conclusion=conclusion,
        evidence=_extract_evidence(v_intervention, v_ranksum, v_peak),
    )


def verdicts_from_evidence(wilcoxon_p: float, peak_count: int, tfn_better: bool,
                           w0_p: float, w0_positive: bool = True,
                           n_years: int = 14, alpha: float = 0.05):
    """Rebuild the three method verdicts from recorded evidence columns,
    applying the same fixed gates the pipeline uses."""
    from .rankstats import peak_threshold

    v_int = MethodVerdict(
        method=METHOD_INTERVENTION,
        significant=bool(tfn_better and w0_p < alpha and w0_positive),
        statistic=float("nan"),
        pvalue_or_count=w0_p,
        detail=f"tfn_better={'yes' if tfn_better else 'no'}; w0_p={w0_p}; replayed",
    )
    v_rank = MethodVerdict(
        method=METHOD_RANK_SUM,
        significant=bool(wilcoxon_p < alpha),
        statistic=float("nan"),
        pvalue_or_count=wilcoxon_p,
        detail="replayed",
    )
    v_peak = MethodVerdict(
        method=METHOD_PEAK_COUNT,
        significant=bool(peak_count >= peak_threshold(n_years)),
        statistic=float("nan"),
        pvalue_or_count=float(peak_count),
        detail="replayed",
    )
    return v_int, v_rank, v_peak


def _fmt_p(p: float) -> str:
    text = f"{p:.4f}"
    return text + "*" if p < 0.05 else text


def render_report(classifications: list[EventClassification]) -> str:
    """CSV report, one row per event, sorted Effective -> Unclear ->
    Ineffective and alphabetically within each group."""
    rows = sorted(
        classifications,
        key=lambda c: (_CONCLUSION_ORDER.get(c.conclusion, 3), c.query_name.lower()),
    )
    buf = io.StringIO()
    buf.write(",".join(REPORT_COLUMNS) + "\n")
    for c in rows:
        ev = c.evidence
        buf.write(",".join([
            c.query_name,
            _fmt_p(ev.wilcoxon_p),
            str(ev.peak_count),
            "Yes" if ev.tfn_better else "No",
            _fmt_p(ev.w0_p),
            c.conclusion,
        ]) + "\n")
    return buf.getvalue()
