"""Calibration oracle for the spectral classifier and centroid separation.

Measures, with the production code paths, the band-fraction and centroid
distributions that back every pinned threshold in noisemask.spectrum and in
the acceptance suite: per-color classification rates at sigma = 2, centroid
ordering gaps, resize-invariance cases, 3D green/white behavior, and the
verdict on Alg.-1 style optimized masks.  Writes docs/calibration.json;
docs/calibration.md narrates the numbers.

Run from the repo root with the package installed:

    python3 scripts/calibrate_spectrum.py
"""

import json
import pathlib

import numpy as np

from noisemask import (
    OptimBlueConfig,
    SigmaPolicy,
    classify_color,
    color_noise,
    export_mask,
    optimize_blue,
    radial_profile,
    resize_multilinear,
    sigma_preset,
)
from noisemask.spectrum import BLUE_HIGH_MARGIN, RED_LOW_MARGIN, WHITE_BAND_DELTA

GRID = (64, 64)
SIGMA = 2.0
GREEN_PAIR = (0.5, 2.0)
SEEDS_2D = 100
SEEDS_RESIZE = 50
SEEDS_3D = 30

# Pinned by this calibration run; the acceptance suite and the classifier
# margins must quote exactly these values.
PINNED = {
    "centroid_gap_thresholds": {
        "red->green": 0.02,
        "green->white": 0.02,
        "white->blue": 0.015,
    },
    "classify_margins": {
        "RED_LOW_MARGIN": {str(k): v for k, v in RED_LOW_MARGIN.items()},
        "BLUE_HIGH_MARGIN": {str(k): v for k, v in BLUE_HIGH_MARGIN.items()},
        "WHITE_BAND_DELTA": {str(k): v for k, v in WHITE_BAND_DELTA.items()},
    },
    "resize_cases": {
        "blue": {"sigma": [SIGMA], "from": [64, 64], "to": [32, 32]},
        "red": {"sigma": [SIGMA], "from": [64, 64], "to": [32, 32]},
        "green": {"sigma": [1.0, 2.0], "from": [64, 64], "to": [44, 44]},
    },
}


def stats(values):
    arr = np.asarray(values, dtype=float)
    return {
        "mean": float(arr.mean()),
        "std": float(arr.std()),
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


def policy_for(color):
    if color == "white":
        return None
    if color == "green":
        return SigmaPolicy.fixed(*GREEN_PAIR)
    return SigmaPolicy.fixed(SIGMA)


def collect_2d():
    out = {}
    flat = None
    for color in ("white", "red", "blue", "green"):
        policy = policy_for(color)
        centroids, lows, mids, highs, verdicts = [], [], [], [], []
        for seed in range(SEEDS_2D):
            prof = radial_profile(color_noise(GRID, color, policy, seed=seed))
            centroids.append(prof.centroid)
            low, mid, high = prof.band_energy
            lows.append(low)
            mids.append(mid)
            highs.append(high)
            verdicts.append(classify_color(prof))
            flat = prof.flat_proportions
        out[color] = {
            "centroid": stats(centroids),
            "low": stats(lows),
            "mid": stats(mids),
            "high": stats(highs),
            "classify_rate": float(np.mean([v == color for v in verdicts])),
        }
    out["flat_proportions"] = [float(f) for f in flat]
    return out


def centroid_section(colors):
    order = ["red", "green", "white", "blue"]
    means = {c: colors[c]["centroid"]["mean"] for c in order}
    gaps = {
        "red->green": means["green"] - means["red"],
        "green->white": means["white"] - means["green"],
        "white->blue": means["blue"] - means["white"],
    }
    meets = {
        key: gaps[key] > PINNED["centroid_gap_thresholds"][key] for key in gaps
    }
    return {"means": means, "gaps": gaps, "meets_pinned_thresholds": meets}


def margin_support(colors):
    flat = colors["flat_proportions"]
    return {
        "red_low_excess_min": colors["red"]["low"]["min"] - flat[0],
        "green_low_excess_max": colors["green"]["low"]["max"] - flat[0],
        "white_low_excess_max": colors["white"]["low"]["max"] - flat[0],
        "white_high_excess_max": colors["white"]["high"]["max"] - flat[2],
        "blue_high_excess_min": colors["blue"]["high"]["min"] - flat[2],
        "white_band_dev_max": max(
            abs(colors["white"][band][kind] - f)
            for band, f in zip(("low", "mid", "high"), flat)
            for kind in ("min", "max")
        ),
    }


def resize_rates():
    cases = {
        "blue_64_to_32": ("blue", SigmaPolicy.fixed(SIGMA), (32, 32)),
        "red_64_to_32": ("red", SigmaPolicy.fixed(SIGMA), (32, 32)),
        "green12_64_to_44": ("green", SigmaPolicy.fixed(1.0, 2.0), (44, 44)),
    }
    out = {}
    for name, (color, policy, target) in cases.items():
        verdicts = []
        for seed in range(SEEDS_RESIZE):
            full = color_noise(GRID, color, policy, seed=seed)
            full_verdict = classify_color(radial_profile(full))
            small = resize_multilinear(full.values, target)
            small_verdict = classify_color(radial_profile(small))
            verdicts.append((full_verdict, small_verdict))
        out[name] = {
            "full_rate": float(np.mean([v[0] == color for v in verdicts])),
            "resized_rate": float(np.mean([v[1] == color for v in verdicts])),
        }
    return out


def volume_stats():
    flat = None
    green_verdicts, green_low_excess, green_mid_strict = [], [], []
    for seed in range(SEEDS_3D):
        n = color_noise((64, 64, 64), "green", sigma_preset("variant5"), seed=seed)
        prof = radial_profile(n)
        flat = prof.flat_proportions
        low, mid, high = prof.band_energy
        green_verdicts.append(classify_color(prof))
        green_low_excess.append(low - flat[0])
        green_mid_strict.append(mid > low and mid > high)
    white_verdicts, white_dev = [], []
    for seed in range(SEEDS_3D):
        prof = radial_profile(color_noise((64, 64, 64), "white", seed=seed))
        flat = prof.flat_proportions
        devs = [abs(b - f) for b, f in zip(prof.band_energy, flat)]
        white_verdicts.append(classify_color(prof))
        white_dev.append(max(devs))
    return {
        "green3d_rate": float(np.mean([v == "green" for v in green_verdicts])),
        "green3d_red_rate": float(np.mean([v == "red" for v in green_verdicts])),
        "green3d_low_excess": stats(green_low_excess),
        "green3d_mid_strict_max_rate": float(np.mean(green_mid_strict)),
        "white3d_rate": float(np.mean([v == "white" for v in white_verdicts])),
        "white3d_band_dev": stats(white_dev),
    }


def optim_blue_rate():
    verdicts = []
    for seed in range(SEEDS_3D):
        masks = optimize_blue(OptimBlueConfig(shape=GRID, seed=seed))
        for index in range(masks.config.params.k):
            mask = export_mask(masks, index)
            verdicts.append(classify_color(radial_profile(mask)))
    return float(np.mean([v == "blue" for v in verdicts]))


def main():
    colors = collect_2d()
    record = {
        "grid": list(GRID),
        "sigma": SIGMA,
        "green_pair": list(GREEN_PAIR),
        "seeds": {"2d": SEEDS_2D, "resize": SEEDS_RESIZE, "3d": SEEDS_3D},
        "pinned": PINNED,
        "colors": colors,
        "centroid": centroid_section(colors),
        "margin_support": margin_support(colors),
        "resize": resize_rates(),
        "volume": volume_stats(),
        "optim_blue_blue_rate": optim_blue_rate(),
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "docs" / "calibration.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    print(json.dumps(record["centroid"], indent=2))
    for color in ("white", "red", "blue", "green"):
        print(f"{color}: classify rate {colors[color]['classify_rate']:.2f}")
    print(json.dumps(record["resize"], indent=2))
    print(json.dumps(record["volume"], indent=2))
    print(f"optim-blue blue rate: {record['optim_blue_blue_rate']:.2f}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
