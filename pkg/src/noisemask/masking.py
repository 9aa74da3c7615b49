"""Rank-based binarization of noise fields into exact-ratio masks.

A mask keeps the convention 1 = masked, 0 = visible.  The masking function
ranks the noise cells by value, highest first, and masks exactly
``N - floor((1 - gamma) * N)`` of them, so the visible count is the floored
keep count used by masked-autoencoder training loops.  Ranking depends only
on the order of the values, never their magnitudes, and ties break toward
the lower row-major index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .noise import NoiseTensor, check_grid_shape, white_noise


@dataclass(frozen=True)
class MaskTensor:
    """A boolean mask plus the ratio and a short provenance string."""

    bits: np.ndarray
    gamma: float
    source: str = ""

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits)
        if bits.dtype != np.bool_:
            bits = bits.astype(np.bool_)
        check_grid_shape(bits.shape)
        if not 0.0 <= float(self.gamma) <= 1.0:
            raise ParameterError(f"gamma must lie in [0, 1], got {self.gamma}")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.bits.shape)

    @property
    def masked_cells(self) -> int:
        return int(self.bits.sum())

    @property
    def visible_cells(self) -> int:
        return int(self.bits.size - self.bits.sum())


def masked_count(shape, gamma: float) -> int:
    """Number of masked cells for a grid at ratio ``gamma``.

    The visible count floors first: visible = int((1 - gamma) * N), masked =
    N - visible.  This matches the keep-count convention of masked
    autoencoders, including its float-arithmetic corner cases.
    """
    dims = check_grid_shape(shape)
    if not 0.0 <= float(gamma) <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
    total = 1
    for d in dims:
        total *= d
    visible = int((1.0 - float(gamma)) * total)
    return total - visible


def mask_values(values: np.ndarray, gamma: float, source: str = "") -> MaskTensor:
    """Rank raw values (highest first, ties to the lower index) and mask the top cells."""
    values = np.asarray(values, dtype=np.float64)
    count = masked_count(values.shape, gamma)
    # Stable sort of the negated values: descending by value, ascending by
    # row-major index among ties.
    order = np.argsort(-values.ravel(), kind="stable")
    bits = np.zeros(values.size, dtype=np.bool_)
    bits[order[:count]] = True
    return MaskTensor(bits=bits.reshape(values.shape), gamma=gamma, source=source)


def eta(n: NoiseTensor, gamma: float) -> MaskTensor:
    """The rank-based masking function applied to a noise tensor."""
    return mask_values(n.values, gamma, source=f"{n.color}:seed={n.seed}")


def tube_mask(spatial_shape, frames: int, gamma: float, seed: int) -> MaskTensor:
    """A 2D white-noise mask replicated across ``frames`` time slices.

    Every frame is identical, so the per-frame ratio is exact and the
    temporal smoothness of the result is zero by construction.
    """
    dims = check_grid_shape(spatial_shape)
    if len(dims) != 2:
        raise ShapeError(f"tube masks take a 2D spatial shape, got rank {len(dims)}")
    if int(frames) < 1:
        raise ParameterError(f"frames must be >= 1, got {frames}")
    plane = eta(white_noise(dims, seed), gamma)
    bits = np.repeat(plane.bits[:, :, None], int(frames), axis=2)
    return MaskTensor(bits=bits, gamma=gamma, source=f"tube:seed={seed}")


def partition(tokens, m: MaskTensor) -> tuple[np.ndarray, np.ndarray]:
    """Split token indices into (visible, masked) index arrays, row-major order."""
    count = len(tokens)
    if count != m.bits.size:
        raise ShapeError(f"token count {count} != mask cell count {m.bits.size}")
    flat = m.bits.ravel()
    return np.flatnonzero(~flat), np.flatnonzero(flat)
