"""One-shot probe: pick the red/green resize-invariant cases and margins.

Measures band statistics for red noise downscaled 2x and for candidate
green sigma pairs at full resolution and after a 2x downscale, then
evaluates candidate classification margins against all constraints at
once.  Run from the repo root; prints a summary table.
"""

import numpy as np

from noisemask import SigmaPolicy, color_noise, radial_profile
from noisemask.bank import resize_multilinear
from noisemask.spectrum import _interior_peak

SEEDS = range(50)


def band_stats(values_iter):
    rows = []
    for values in values_iter:
        prof = radial_profile(values)
        low, mid, high = prof.band_energy
        flat = prof.flat_proportions
        rows.append(
            {
                "low_excess": low - flat[0],
                "high_excess": high - flat[2],
                "mid_minus_low": mid - low,
                "mid_minus_high": mid - high,
                "interior_peak": bool(_interior_peak(prof)),
            }
        )
    return rows


def summarize(name, rows):
    def agg(key):
        vals = np.array([r[key] for r in rows], dtype=float)
        return f"{key}: mean {vals.mean():+.4f} min {vals.min():+.4f} max {vals.max():+.4f}"

    peak_rate = np.mean([r["interior_peak"] for r in rows])
    print(f"  {name}")
    for key in ("low_excess", "high_excess", "mid_minus_low", "mid_minus_high"):
        print(f"    {agg(key)}")
    print(f"    interior_peak rate {peak_rate:.2f}")
    return rows


def green_verdict_rate(rows, red_margin, blue_margin):
    ok = 0
    for r in rows:
        if r["low_excess"] >= red_margin:
            continue
        if r["high_excess"] >= blue_margin:
            continue
        if r["mid_minus_low"] > 0 and r["mid_minus_high"] > 0 and r["interior_peak"]:
            ok += 1
    return ok / len(rows)


def red_verdict_rate(rows, red_margin):
    return np.mean([r["low_excess"] >= red_margin for r in rows])


def main():
    rng_policy = SigmaPolicy.fixed(2.0)

    print("red 64x64 -> 32x32 (2x downscale), 50 seeds")
    rows_red = band_stats(
        resize_multilinear(
            color_noise((64, 64), "red", rng_policy, seed=s).values, (32, 32)
        )
        for s in SEEDS
    )
    summarize("red_2x", rows_red)
    for m in (0.04, 0.06, 0.08, 0.10, 0.12):
        print(f"    red rate @ margin {m:.2f}: {red_verdict_rate(rows_red, m):.2f}")

    pairs = [(1.0, 2.0), (1.1, 2.2), (1.25, 2.5), (1.4, 2.8), (1.5, 3.0)]
    for pair in pairs:
        policy = SigmaPolicy.fixed(*pair)
        print(f"green {pair} full res 64x64")
        rows_full = band_stats(
            color_noise((64, 64), "green", policy, seed=s).values for s in SEEDS
        )
        summarize(f"green{pair}_full", rows_full)
        print(f"green {pair} -> 32x32")
        rows_half = band_stats(
            resize_multilinear(
                color_noise((64, 64), "green", policy, seed=s).values, (32, 32)
            )
            for s in SEEDS
        )
        summarize(f"green{pair}_2x", rows_half)
        for rm in (0.04, 0.06, 0.08):
            full = green_verdict_rate(rows_full, rm, 0.024)
            half = green_verdict_rate(rows_half, rm, 0.024)
            print(f"    green rate @ red_margin {rm:.2f}: full {full:.2f} half {half:.2f}")


if __name__ == "__main__":
    main()
