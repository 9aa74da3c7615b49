"""Greedy construction of K disjoint blue-noise-like 2D masks.

Masks are optimized jointly: positions are visited in a seeded random order
and each position is made visible in whichever unfilled mask currently has
the least clustering around it.  Internally 1 means visible (the update rule
of the construction); exported masks flip to the package-wide 1 = masked
convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PositionError, ShapeError
from .masking import MaskTensor
from .rng import check_seed, generator


@dataclass(frozen=True)
class OptimBlueParams:
    """Shape-independent knobs of the construction."""

    k: int = 4
    transmittance: float = 0.2
    window: int = 7
    weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        if int(self.k) < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        t = float(self.transmittance)
        if not (math.isfinite(t) and 0.0 < t <= 1.0):
            raise ParameterError(f"transmittance must lie in (0, 1], got {self.transmittance}")
        object.__setattr__(self, "transmittance", t)
        w = int(self.window)
        if w < 3 or w % 2 == 0:
            raise ParameterError(f"window must be odd and >= 3, got {self.window}")
        object.__setattr__(self, "window", w)
        weights = tuple(float(x) for x in self.weights)
        if len(weights) != 4 or any(not math.isfinite(x) or x < 0 for x in weights):
            raise ParameterError(f"weights must be 4 finite non-negative reals, got {self.weights}")
        if not any(x > 0 for x in weights):
            raise ParameterError("at least one weight must be positive")
        object.__setattr__(self, "weights", weights)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "transmittance": self.transmittance,
            "window": self.window,
            "weights": list(self.weights),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OptimBlueParams":
        return cls(
            k=data["k"],
            transmittance=data["transmittance"],
            window=data["window"],
            weights=tuple(data["weights"]),
        )


@dataclass(frozen=True)
class OptimBlueConfig:
    """A full run description: knobs plus grid and traversal seed."""

    shape: tuple[int, int]
    params: OptimBlueParams = OptimBlueParams()
    seed: int = 0

    def __post_init__(self) -> None:
        shape = tuple(int(d) for d in self.shape)
        if len(shape) != 2:
            raise ShapeError(f"optim-blue grids are 2D, got rank {len(shape)}")
        if any(d < 2 for d in shape):
            raise ShapeError(f"every grid dimension must be >= 2, got {shape}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "seed", check_seed(self.seed))


@dataclass(frozen=True)
class MaskSet:
    """The K jointly optimized masks of one run, in the internal 1 = visible form."""

    config: OptimBlueConfig
    visible: np.ndarray  # (k, n1, n2) uint8
    visible_counts: tuple[int, ...]

    @property
    def k(self) -> int:
        return self.config.params.k


def traversal_order(shape, seed: int) -> np.ndarray:
    """Seeded uniformly random order of all grid positions, as (x, y) rows.

    Exposed separately so an independent reimplementation of the greedy
    update can consume the identical position stream.
    """
    n1, n2 = (int(d) for d in shape)
    flat = generator(seed).permutation(n1 * n2)
    return np.stack([flat // n2, flat % n2], axis=1)


def clustering_score(visible: np.ndarray, position, window: int = 7, weights=(1.0, 1.0, 1.0, 1.0)) -> float:
    """Weighted visible-cell count along the 4 lines through a position.

    The window is ``window x window`` centered on the position and clipped at
    the grid border.  d1 counts visible cells on the horizontal line through
    the center, d2 the vertical line, d3 the main diagonal, d4 the
    anti-diagonal; the center cell itself never counts.
    """
    visible = np.asarray(visible)
    if visible.ndim != 2:
        raise ShapeError(f"clustering_score takes a 2D mask, got rank {visible.ndim}")
    if int(window) < 3 or int(window) % 2 == 0:
        raise ParameterError(f"window must be odd and >= 3, got {window}")
    n1, n2 = visible.shape
    x, y = (int(c) for c in position)
    if not (0 <= x < n1 and 0 <= y < n2):
        raise PositionError(f"position ({x}, {y}) outside grid {visible.shape}")
    half = int(window) // 2

    d1 = d2 = d3 = d4 = 0
    for step in range(-half, half + 1):
        if step == 0:
            continue
        if 0 <= y + step < n2 and visible[x, y + step]:
            d1 += 1
        if 0 <= x + step < n1 and visible[x + step, y]:
            d2 += 1
        if 0 <= x + step < n1 and 0 <= y + step < n2 and visible[x + step, y + step]:
            d3 += 1
        if 0 <= x + step < n1 and 0 <= y - step < n2 and visible[x + step, y - step]:
            d4 += 1
    w1, w2, w3, w4 = (float(w) for w in weights)
    return w1 * d1 + w2 * d2 + w3 * d3 + w4 * d4


def optimize_blue(config: OptimBlueConfig) -> MaskSet:
    """Run the greedy joint construction.

    Every mask starts fully masked.  Each traversed position becomes visible
    in the unfilled mask with the lowest clustering score there (ties go to
    the lowest mask index); once every mask holds its visible-cell cap,
    leftover positions stay masked in all of them.  The K visible sets are
    pairwise disjoint by construction.
    """
    params = config.params
    n1, n2 = config.shape
    cap = int(params.transmittance * n1 * n2)
    masks = np.zeros((params.k, n1, n2), dtype=np.uint8)
    counts = [0] * params.k

    for x, y in traversal_order(config.shape, config.seed):
        best = -1
        best_score = math.inf
        for i in range(params.k):
            if counts[i] >= cap:
                continue
            score = clustering_score(masks[i], (x, y), params.window, params.weights)
            if score < best_score:
                best_score = score
                best = i
        if best >= 0:
            masks[best, x, y] = 1
            counts[best] += 1

    return MaskSet(config=config, visible=masks, visible_counts=tuple(counts))


def export_mask(mask_set: MaskSet, index: int) -> MaskTensor:
    """Flip one mask of a set to the package-wide 1 = masked convention.

    The recorded gamma is the realized ratio 1 - visible/N, which can sit a
    hair above 1 - transmittance because the cap floors.
    """
    if not 0 <= int(index) < mask_set.k:
        raise IndexError(f"mask index {index} out of range for k={mask_set.k}")
    visible = mask_set.visible[int(index)]
    gamma = 1.0 - mask_set.visible_counts[int(index)] / visible.size
    return MaskTensor(
        bits=visible == 0,
        gamma=gamma,
        source=f"optim-blue:seed={mask_set.config.seed}:mask={int(index)}",
    )
