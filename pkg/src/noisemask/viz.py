"""Byte-deterministic image and chart writers for the command-line tools.

Masks and noise fields render as binary PGM (P5) graymaps, radial profiles
as small standalone SVG line charts.  Both formats are plain bytes with no
timestamps or library version strings, so identical inputs always produce
identical files and golden-file comparisons stay meaningful.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ShapeError
from .spectrum import SpectrumProfile

# Masked cells render dark, visible cells bright.
_MASKED_GRAY = 0
_VISIBLE_GRAY = 255


def to_gray(values: np.ndarray) -> np.ndarray:
    """Map a 2D field to uint8 grayscale.

    Boolean fields use the mask convention (True = masked = dark); real
    fields are min-max scaled, with constant fields mapping to mid-gray.
    """
    arr = np.asarray(values)
    if arr.ndim != 2:
        raise ShapeError(f"grayscale rendering needs a 2D field, got rank {arr.ndim}")
    if arr.dtype == np.bool_:
        return np.where(arr, np.uint8(_MASKED_GRAY), np.uint8(_VISIBLE_GRAY))
    arr = arr.astype(np.float64)
    lo = float(arr.min())
    hi = float(arr.max())
    if hi <= lo:
        return np.full(arr.shape, 128, dtype=np.uint8)
    scaled = np.rint((arr - lo) / (hi - lo) * 255.0)
    return np.clip(scaled, 0, 255).astype(np.uint8)


def write_pgm(gray: np.ndarray, path) -> Path:
    """Write a 2D uint8 array as a binary PGM (P5) file."""
    arr = np.ascontiguousarray(gray, dtype=np.uint8)
    if arr.ndim != 2:
        raise ShapeError(f"PGM output needs a 2D image, got rank {arr.ndim}")
    height, width = arr.shape
    out = Path(path)
    with open(out, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())
    return out


def frame_images(values: np.ndarray) -> list[np.ndarray]:
    """Split a 2D or 3D field into per-frame grayscale images.

    3D fields are sliced along the trailing (time) axis; scaling for real
    fields is global across the volume so frames stay comparable.
    """
    arr = np.asarray(values)
    if arr.ndim == 2:
        return [to_gray(arr)]
    if arr.ndim != 3:
        raise ShapeError(f"frame rendering needs a 2D or 3D field, got rank {arr.ndim}")
    if arr.dtype == np.bool_:
        return [to_gray(arr[:, :, t]) for t in range(arr.shape[2])]
    lo = float(arr.min())
    hi = float(arr.max())
    if hi <= lo:
        return [np.full(arr.shape[:2], 128, dtype=np.uint8) for _ in range(arr.shape[2])]
    scaled = np.clip(np.rint((arr - lo) / (hi - lo) * 255.0), 0, 255).astype(np.uint8)
    return [scaled[:, :, t] for t in range(arr.shape[2])]


def _svg_points(profile: SpectrumProfile, x0, y0, width, height) -> str:
    populated = np.flatnonzero(profile.bin_counts > 0)
    means = profile.bin_means[populated]
    centers = profile.bin_centers[populated]
    top = float(means.max())
    if top <= 0.0:
        top = 1.0
    pts = []
    for r, p in zip(centers, means):
        x = x0 + (r / 0.5) * width
        y = y0 + height - (p / top) * height
        pts.append(f"{x:.2f},{y:.2f}")
    return " ".join(pts)


def write_profile_svg(profiles, path) -> Path:
    """Write radial profiles as a standalone SVG line chart.

    profiles is a sequence of (label, SpectrumProfile) pairs; each is drawn
    as one polyline of its populated bins, mean power normalized to the
    curve's own peak so differently scaled fields share the canvas.
    """
    entries = list(profiles)
    if not entries:
        raise ShapeError("profile chart needs at least one profile")
    width, height = 640, 400
    x0, y0 = 60, 20
    plot_w, plot_h = width - 80, height - 70
    palette = ("#444444", "#bb3333", "#3344bb", "#228833", "#886622", "#555588")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<line x1="{x0}" y1="{y0 + plot_h}" x2="{x0 + plot_w}" y2="{y0 + plot_h}" '
        'stroke="#000000" stroke-width="1"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y0 + plot_h}" '
        'stroke="#000000" stroke-width="1"/>',
    ]
    for i in range(6):
        r = i * 0.1
        x = x0 + (r / 0.5) * plot_w
        parts.append(
            f'<text x="{x:.2f}" y="{y0 + plot_h + 18}" font-family="monospace" '
            f'font-size="12" text-anchor="middle">{r:.1f}</text>'
        )
    parts.append(
        f'<text x="{x0 + plot_w / 2:.2f}" y="{height - 12}" font-family="monospace" '
        'font-size="12" text-anchor="middle">normalized radial frequency</text>'
    )
    for i, (label, profile) in enumerate(entries):
        color = palette[i % len(palette)]
        pts = _svg_points(profile, x0, y0, plot_w, plot_h)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{x0 + plot_w - 6}" y="{y0 + 16 + 16 * i}" font-family="monospace" '
            f'font-size="12" text-anchor="end" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    out = Path(path)
    out.write_text("\n".join(parts) + "\n", encoding="ascii")
    return out
