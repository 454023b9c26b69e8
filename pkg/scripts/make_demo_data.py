#!/usr/bin/env python3
"""Regenerate the bundled demo snapshots in data/.

Two deterministic monthly series in the Google-Trends export format,
2004-01..2017-12, US/Health style header, integer values 0..100 with the
series maximum at 100:

* breast_cancer_us_2004_2017.csv -- gently declining level with a pronounced
  October spike every year (the event month is always the yearly peak).
* stroke_us_2004_2017.csv -- decline until 2011 then recovery, a winter-peaked
  seasonal cycle, and a single one-off May spike in 2010.

Run from the repository root:  python3 scripts/make_demo_data.py
"""

from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).resolve().parent.parent / "data"

N_MONTHS = 168  # 2004-01 .. 2017-12
START_YEAR = 2004


def month_labels():
    return [f"{START_YEAR + t // 12:04d}-{t % 12 + 1:02d}" for t in range(N_MONTHS)]


def ar1_noise(rng, n, phi, sigma):
    eps = rng.normal(0.0, sigma, n + 50)
    x = np.zeros(n + 50)
    for t in range(1, n + 50):
        x[t] = phi * x[t - 1] + eps[t]
    return x[50:]


def breast_cancer_series(seed=20040110):
    rng = np.random.default_rng(seed)
    t = np.arange(N_MONTHS)
    base = 78.0 - 0.12 * t
    values = base + ar1_noise(rng, N_MONTHS, phi=0.5, sigma=2.4)
    spike = rng.uniform(16.0, 26.0, size=N_MONTHS // 12)
    for year in range(N_MONTHS // 12):
        values[year * 12 + 9] += spike[year]  # October
    return values


def stroke_series(seed=20040505):
    rng = np.random.default_rng(seed)
    t = np.arange(N_MONTHS)
    turn = 84  # 2011-01
    base = np.where(t < turn, 62.0 - 0.22 * t, 62.0 - 0.22 * turn + 0.28 * (t - turn))
    month = t % 12  # 0 = January
    seasonal = 6.0 * np.cos(2.0 * np.pi * (month - 0.5) / 12.0)
    values = base + seasonal + ar1_noise(rng, N_MONTHS, phi=0.4, sigma=2.0)
    values[76] += 16.0  # one-off May 2010 burst
    return values


def to_gt_integers(values):
    values = np.asarray(values, dtype=float)
    scaled = values * (100.0 / values.max())
    return np.clip(np.rint(scaled), 0, 100).astype(int)


def write_csv(path, query, values):
    lines = ["Category: Health", "", f"Month,{query}: (United States)"]
    lines += [f"{label},{v}" for label, v in zip(month_labels(), values)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(values)} rows, max={values.max()}, min={values.min()})")


def check_yearly_peaks(values, event_month_idx):
    """Which complete years have their maximum at the event month (0-based)?"""
    hits = []
    for year in range(N_MONTHS // 12):
        block = values[year * 12:(year + 1) * 12]
        hits.append(block[event_month_idx] == block.max())
    return hits


def main():
    OUT_DIR.mkdir(exist_ok=True)

    bc = to_gt_integers(breast_cancer_series())
    oct_hits = check_yearly_peaks(bc, 9)
    assert all(oct_hits), f"October must top every year, got {oct_hits}"
    write_csv(OUT_DIR / "breast_cancer_us_2004_2017.csv", "breast cancer", bc)

    st = to_gt_integers(stroke_series())
    may_hits = check_yearly_peaks(st, 4)
    assert sum(may_hits) == 1, f"exactly one May peak expected, got {sum(may_hits)}"
    write_csv(OUT_DIR / "stroke_us_2004_2017.csv", "stroke", st)

    config = OUT_DIR / "case_studies.csv"
    config.write_text(
        "csv_path,event_month,label\n"
        "breast_cancer_us_2004_2017.csv,10,Breast Cancer\n"
        "stroke_us_2004_2017.csv,5,Stroke\n",
        encoding="utf-8",
    )
    print(f"wrote {config}")


if __name__ == "__main__":
    main()
