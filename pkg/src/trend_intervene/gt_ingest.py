"""Ingest Google-Trends-style monthly CSV exports and derive model inputs.

The expected file layout is the standard GT download: optional banner lines
(anything not starting with ``Month,``), a header ``Month,<query>: (<region>)``,
then rows ``YYYY-MM,<value>`` in ascending month order. Values are integers
0-100 except the literal ``<1``, which we map to 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .errors import (
    AlreadyRescaled,
    BadMonth,
    BadValue,
    EmptySeries,
    GapInMonths,
    MissingHeader,
)

# days-in-month correction: every month is stretched/shrunk to 30 days.
# February uses 30/28 in every year, leap or not.
MONTH_FACTORS = {m: Fraction(30, 31) for m in (1, 3, 5, 7, 8, 10, 12)}
MONTH_FACTORS[2] = Fraction(30, 28)
for _m in (4, 6, 9, 11):
    MONTH_FACTORS[_m] = Fraction(1)

_HEADER_RE = re.compile(r"^Month,(.+?)(?::\s*\(.*\))?\s*$")
_ROW_RE = re.compile(r"^(\d{4})-(\d{2}),(.+)$")


@dataclass
class MonthlySeries:
    """A gap-free monthly series of search-frequency values.

    ``start`` is the (year, month) of the first observation; observation i
    falls ``i`` calendar months later.
    """

    query_name: str
    start: tuple[int, int]
    values: np.ndarray
    rescaled: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise EmptySeries(f"series {self.query_name!r} has no observations")
        if np.any(self.values < 0):
            raise BadValue("negative search-frequency value")

    def __len__(self) -> int:
        return int(self.values.size)

    def month_of(self, i: int) -> int:
        """Calendar month (1-12) of observation i."""
        return (self.start[1] - 1 + i) % 12 + 1

    def year_of(self, i: int) -> int:
        return self.start[0] + (self.start[1] - 1 + i) // 12

    def month_label(self, i: int) -> str:
        return f"{self.year_of(i):04d}-{self.month_of(i):02d}"

    def month_labels(self) -> list[str]:
        return [self.month_label(i) for i in range(len(self))]


@dataclass
class ImpulseSeries:
    """0/1 indicator aligned to a MonthlySeries, 1 exactly on event months."""

    values: np.ndarray
    event_month: int
    aligned_start: tuple[int, int]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


def parse_gt_csv(text: str) -> MonthlySeries:
    """Parse raw GT CSV contents into an (un-rescaled) MonthlySeries."""
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    header_idx = None
    for i, line in enumerate(lines):
        if line.startswith("Month,"):
            header_idx = i
            break
    if header_idx is None:
        raise MissingHeader("no 'Month,' header row found")
    m = _HEADER_RE.match(lines[header_idx])
    query_name = m.group(1).strip() if m else lines[header_idx][len("Month,"):].strip()

    months: list[tuple[int, int]] = []
    values: list[float] = []
    for line in lines[header_idx + 1:]:
        if not line.strip():
            continue
        row = _ROW_RE.match(line.strip())
        if row is None:
            raise BadValue(f"unparseable data row: {line!r}")
        year, month = int(row.group(1)), int(row.group(2))
        if not 1 <= month <= 12:
            raise BadValue(f"bad month in row: {line!r}")
        cell = row.group(3).strip()
        if cell == "<1":
            val = 0.0
        else:
            try:
                val = float(int(cell))
            except ValueError:
                raise BadValue(f"non-integer, non-'<1' cell: {cell!r}") from None
        if val < 0 or val > 100:
            raise BadValue(f"value out of GT range 0-100: {cell!r}")
        months.append((year, month))
        values.append(val)

    if not values:
        raise EmptySeries("header found but no data rows")

    for (y0, m0), (y1, m1) in zip(months, months[1:]):
        if (y1 * 12 + m1) - (y0 * 12 + m0) != 1:
            raise GapInMonths(f"non-consecutive months {y0}-{m0:02d} -> {y1}-{m1:02d}")

    return MonthlySeries(query_name=query_name, start=months[0],
                         values=np.array(values), rescaled=False)


def rescale_months(series: MonthlySeries) -> MonthlySeries:
    """Normalize every month to a 30-day length (Feb always by 30/28)."""
    if series.rescaled:
        raise AlreadyRescaled(f"series {series.query_name!r} already rescaled")
    factors = np.array(
        [float(MONTH_FACTORS[series.month_of(i)]) for i in range(len(series))]
    )
    return replace(series, values=series.values * factors, rescaled=True)


def build_impulse(series: MonthlySeries, event_month: int) -> ImpulseSeries:
    """0/1 input marking every occurrence of ``event_month`` in the span."""
    if len(series) == 0:
        raise EmptySeries("cannot build an impulse for an empty series")
    if not isinstance(event_month, (int, np.integer)) or not 1 <= event_month <= 12:
        raise BadMonth(f"event_month must be 1-12, got {event_month!r}")
    values = np.array(
        [1.0 if series.month_of(i) == event_month else 0.0 for i in range(len(series))]
    )
    return ImpulseSeries(values=values, event_month=int(event_month),
                         aligned_start=series.start)
