"""White noise and its red/blue/green filtered variants.

Colored fields are built by circular Gaussian filtering of seeded uniform
white noise: red keeps the low-pass output, blue keeps the residual after
the low pass, and green is a difference of two Gaussians with
``sigma1 < sigma2``.  Kernels are separable, sampled at integer offsets,
truncated at ``ceil(3 * sigma)`` taps per side and renormalized to sum to
one; boundaries wrap, so fields tile in every axis.  Sigmas are measured in
grid cells.  All arithmetic is float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .rng import RNG_ID, SIGMA_STREAM, check_seed, generator

COLORS = ("white", "red", "blue", "green")

# Draws are redrawn until sigma1 < sigma2; a valid range pair succeeds almost
# immediately, so hitting the cap means the ranges barely overlap.
_REJECTION_CAP = 10_000


def check_grid_shape(dims) -> tuple[int, ...]:
    """Validate a 2D or 3D grid shape and return it as a tuple of ints."""
    try:
        shape = tuple(int(d) for d in dims)
    except (TypeError, ValueError) as exc:
        raise ShapeError(f"grid shape must be a sequence of ints, got {dims!r}") from exc
    if len(shape) not in (2, 3):
        raise ShapeError(f"grid rank must be 2 or 3, got rank {len(shape)}")
    if any(d < 2 for d in shape):
        raise ShapeError(f"every grid dimension must be >= 2, got {shape}")
    return shape


def _check_range(bounds, name: str) -> tuple[float, float]:
    try:
        lo, hi = (float(b) for b in bounds)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{name} must be a (lo, hi) pair, got {bounds!r}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0 or hi < lo:
        raise ParameterError(f"{name} must satisfy 0 < lo <= hi, got ({lo}, {hi})")
    return lo, hi


@dataclass(frozen=True)
class SigmaPolicy:
    """How filter widths are chosen for a colored draw.

    ``fixed`` pins sigma1 (and sigma2 for green) exactly; ``uniform-range``
    draws each sigma uniformly from its interval and, for green, redraws the
    pair until sigma1 < sigma2.
    """

    mode: str
    sigma1: float | None = None
    sigma2: float | None = None
    range1: tuple[float, float] | None = None
    range2: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.mode == "fixed":
            if self.sigma1 is None or not math.isfinite(self.sigma1) or self.sigma1 <= 0:
                raise ParameterError(f"fixed policy needs sigma1 > 0, got {self.sigma1}")
            if self.sigma2 is not None:
                if not math.isfinite(self.sigma2) or self.sigma2 <= 0:
                    raise ParameterError(f"sigma2 must be > 0, got {self.sigma2}")
                if not self.sigma1 < self.sigma2:
                    raise ParameterError(
                        f"green needs sigma1 < sigma2, got ({self.sigma1}, {self.sigma2})"
                    )
            if self.range1 is not None or self.range2 is not None:
                raise ParameterError("fixed policy must not carry ranges")
        elif self.mode == "uniform-range":
            if self.range1 is None:
                raise ParameterError("uniform-range policy needs range1")
            object.__setattr__(self, "range1", _check_range(self.range1, "range1"))
            if self.range2 is not None:
                object.__setattr__(self, "range2", _check_range(self.range2, "range2"))
                if self.range1[0] >= self.range2[1]:
                    raise ParameterError(
                        "sigma1 < sigma2 is unsatisfiable: range1 starts at or above "
                        f"range2's upper bound ({self.range1}, {self.range2})"
                    )
            if self.sigma1 is not None or self.sigma2 is not None:
                raise ParameterError("uniform-range policy must not carry fixed sigmas")
        else:
            raise ParameterError(f"unknown sigma policy mode {self.mode!r}")

    @classmethod
    def fixed(cls, sigma1: float, sigma2: float | None = None) -> "SigmaPolicy":
        return cls(mode="fixed", sigma1=float(sigma1), sigma2=None if sigma2 is None else float(sigma2))

    @classmethod
    def uniform(cls, range1, range2=None) -> "SigmaPolicy":
        return cls(mode="uniform-range", range1=tuple(range1), range2=None if range2 is None else tuple(range2))

    def draw(self, color: str, rng: np.random.Generator) -> tuple[float, ...]:
        """Resolve the concrete sigmas for one draw of ``color``."""
        pair = color == "green"
        if self.mode == "fixed":
            if pair:
                if self.sigma2 is None:
                    raise ParameterError("green needs two sigmas; policy has one")
                return (self.sigma1, self.sigma2)
            return (self.sigma1,)
        if not pair:
            lo, hi = self.range1
            return (float(rng.uniform(lo, hi)),)
        if self.range2 is None:
            raise ParameterError("green needs two sigma ranges; policy has one")
        lo1, hi1 = self.range1
        lo2, hi2 = self.range2
        for _ in range(_REJECTION_CAP):
            s1 = float(rng.uniform(lo1, hi1))
            s2 = float(rng.uniform(lo2, hi2))
            if s1 < s2:
                return (s1, s2)
        raise ParameterError(
            f"could not draw sigma1 < sigma2 from {self.range1} x {self.range2} "
            f"within {_REJECTION_CAP} attempts"
        )

    def to_dict(self) -> dict:
        out: dict = {"mode": self.mode}
        if self.mode == "fixed":
            out["sigma1"] = self.sigma1
            if self.sigma2 is not None:
                out["sigma2"] = self.sigma2
        else:
            out["range1"] = list(self.range1)
            if self.range2 is not None:
                out["range2"] = list(self.range2)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SigmaPolicy":
        mode = data.get("mode")
        if mode == "fixed":
            return cls(mode="fixed", sigma1=data.get("sigma1"), sigma2=data.get("sigma2"))
        if mode == "uniform-range":
            range2 = data.get("range2")
            return cls(
                mode="uniform-range",
                range1=tuple(data["range1"]),
                range2=None if range2 is None else tuple(range2),
            )
        raise ParameterError(f"unknown sigma policy mode {mode!r}")


def sigma_preset(name: str) -> SigmaPolicy:
    """Named sigma policies.

    ``variant5`` (the default for 3D green banks) draws sigma1 ~ U(0.4, 1.5)
    and sigma2 ~ U(1.4, 3); ``main-text`` draws both from U(0.5, 2).  Both
    redraw until sigma1 < sigma2.
    """
    if name == "variant5":
        return SigmaPolicy.uniform((0.4, 1.5), (1.4, 3.0))
    if name == "main-text":
        return SigmaPolicy.uniform((0.5, 2.0), (0.5, 2.0))
    raise ParameterError(f"unknown sigma preset {name!r}")


@dataclass(frozen=True)
class NoiseTensor:
    """A dense float64 noise field plus the provenance needed to redraw it."""

    values: np.ndarray
    color: str
    sigma_params: tuple[float, ...]
    seed: int
    rng_id: str = RNG_ID

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        check_grid_shape(values.shape)
        if not np.isfinite(values).all():
            raise ParameterError("noise values must be finite")
        if self.color not in COLORS:
            raise ParameterError(f"color must be one of {COLORS}, got {self.color!r}")
        params = tuple(float(s) for s in self.sigma_params)
        expected = {"white": 0, "red": 1, "blue": 1, "green": 2}[self.color]
        if len(params) != expected:
            raise ParameterError(
                f"{self.color} noise carries {expected} sigma parameter(s), got {params}"
            )
        if any(s <= 0 for s in params):
            raise ParameterError(f"sigma parameters must be > 0, got {params}")
        if self.color == "green" and not params[0] < params[1]:
            raise ParameterError(f"green needs sigma1 < sigma2, got {params}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sigma_params", params)
        object.__setattr__(self, "seed", check_seed(self.seed))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.values.shape)


def white_noise(shape, seed: int) -> NoiseTensor:
    """I.i.d. uniform [0, 1) noise on ``shape``, filled in row-major order."""
    dims = check_grid_shape(shape)
    values = generator(seed).random(dims)
    return NoiseTensor(values=values, color="white", sigma_params=(), seed=seed)


def gaussian_kernel(sigma: float, rank: int = 2) -> np.ndarray:
    """1D taps of the separable Gaussian kernel for one axis.

    Taps are ``exp(-k^2 / (2 sigma^2))`` at integer offsets k in
    ``[-ceil(3 sigma), ceil(3 sigma)]``, renormalized to sum to one.  The
    full rank-d kernel is the outer product of identical 1D taps, so only
    the 1D form is materialized.
    """
    if not (isinstance(sigma, (int, float, np.floating)) and math.isfinite(sigma)) or sigma <= 0:
        raise ParameterError(f"sigma must be finite and > 0, got {sigma}")
    if rank not in (2, 3):
        raise ParameterError(f"kernel rank must be 2 or 3, got {rank}")
    radius = math.ceil(3.0 * float(sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets**2) / (2.0 * float(sigma) ** 2))
    return taps / taps.sum()


def filter_values(values: np.ndarray, sigma: float) -> np.ndarray:
    """Separable circular Gaussian convolution of a raw array, axis by axis.

    np.roll reduces shifts modulo the axis length, so kernels longer than an
    axis wrap around it as circular convolution requires.
    """
    values = np.asarray(values, dtype=np.float64)
    taps = gaussian_kernel(sigma, rank=values.ndim if values.ndim in (2, 3) else 2)
    radius = (taps.size - 1) // 2
    out = values
    for axis in range(values.ndim):
        acc = np.zeros_like(out)
        for tap, shift in zip(taps, range(-radius, radius + 1)):
            acc += tap * np.roll(out, shift, axis=axis)
        out = acc
    return out


def filter_gaussian(n: NoiseTensor, sigma: float) -> NoiseTensor:
    """Filter a noise tensor with an isotropic circular Gaussian.

    The result keeps the input's provenance fields: color tags describe the
    base draw, and color_noise is the provenance-correct way to build
    colored fields.
    """
    check_grid_shape(n.values.shape)
    return NoiseTensor(
        values=filter_values(n.values, sigma),
        color=n.color,
        sigma_params=n.sigma_params,
        seed=n.seed,
        rng_id=n.rng_id,
    )


def colored_values(white: np.ndarray, color: str, sigmas: tuple[float, ...]) -> np.ndarray:
    """Apply the coloring transform to raw white-noise values, no normalization."""
    if color == "red":
        return filter_values(white, sigmas[0])
    if color == "blue":
        return white - filter_values(white, sigmas[0])
    if color == "green":
        return filter_values(white, sigmas[0]) - filter_values(white, sigmas[1])
    raise ParameterError(f"no coloring transform for {color!r}")


def znormalize(values: np.ndarray) -> np.ndarray:
    """Z-score an array (np.std, ddof=0); an exactly constant array maps to zeros."""
    values = np.asarray(values, dtype=np.float64)
    std = float(values.std())
    if std == 0.0:
        return np.zeros_like(values)
    return (values - values.mean()) / std


def normalize(n: NoiseTensor) -> NoiseTensor:
    """Z-score a noise tensor in place of its values; metadata is unchanged."""
    return NoiseTensor(
        values=znormalize(n.values),
        color=n.color,
        sigma_params=n.sigma_params,
        seed=n.seed,
        rng_id=n.rng_id,
    )


def color_noise(shape, color: str, sigma_policy: SigmaPolicy | None = None, seed: int = 0) -> NoiseTensor:
    """Draw a z-scored colored noise field.

    The white base uses the plain stream of ``seed`` (identical to
    ``white_noise(shape, seed)``); sigma draws, when the policy needs them,
    come from a reserved sub-stream of the same seed so the white field does
    not move when the policy changes.
    """
    dims = check_grid_shape(shape)
    if color not in COLORS:
        raise ParameterError(f"color must be one of {COLORS}, got {color!r}")
    if color == "white":
        if sigma_policy is not None:
            raise ParameterError("white noise takes no sigma policy")
        base = white_noise(dims, seed)
        return NoiseTensor(values=znormalize(base.values), color="white", sigma_params=(), seed=seed)
    if sigma_policy is None:
        raise ParameterError(f"{color} noise requires a sigma policy")
    sigmas = sigma_policy.draw(color, generator(seed, SIGMA_STREAM))
    base = white_noise(dims, seed)
    values = znormalize(colored_values(base.values, color, sigmas))
    return NoiseTensor(values=values, color=color, sigma_params=sigmas, seed=seed)
