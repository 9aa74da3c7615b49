"""Mask banks: precomputed noise or mask tensors with byte-exact on-disk form.

A bank directory holds ``entries.npy`` (all entries stacked on a leading
axis, NPY format version 1.0, '<f4' for continuous noise and '|u1' for
binary masks) next to a ``bank.json`` sidecar carrying everything needed to
regenerate the payload bit for bit: the rng id, per-entry seeds, the sigma
policy and its realized draws, and a SHA-256 digest of the concatenated
payload bytes.

Sampling picks a stored entry uniformly, optionally flips axes (each
requested axis is flipped with probability 1/2), resizes continuous noise
to the target grid by multilinear interpolation, and binarizes at the exact
requested ratio.  Binary entries are never resized.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import BankFormatError, ConfigError, ParameterError, SamplingError, ShapeError
from .masking import MaskTensor, mask_values
from .noise import SigmaPolicy, check_grid_shape, color_noise, sigma_preset
from .optim_blue import OptimBlueConfig, OptimBlueParams, export_mask, optimize_blue
from .rng import RNG_ID, check_seed, generator, split_seed

FORMAT_VERSION = "1"

BANK_COLORS = ("white", "red", "blue", "green", "green3d", "optim-blue")
CONTINUOUS_COLORS = ("white", "red", "blue", "green", "green3d")

# Axis names used for flips, in the order coins are drawn.
FLIP_AXES = ("horizontal", "vertical", "temporal")

_NPY_MAGIC = b"\x93NUMPY"


def _default_entry_shape(color: str) -> tuple[int, ...]:
    return (64, 64, 64) if color == "green3d" else (64, 64)


def _default_policy(color: str) -> SigmaPolicy | None:
    if color in ("green", "green3d"):
        return sigma_preset("variant5")
    if color in ("red", "blue"):
        return SigmaPolicy.fixed(2.0)
    return None


@dataclass(frozen=True)
class GenConfig:
    """Everything that determines a bank's payload, minus the entry count."""

    color: str
    entry_shape: tuple[int, ...] | None = None
    seed: int = 0
    sigma_policy: SigmaPolicy | None = None
    optim_blue: OptimBlueParams | None = None

    def __post_init__(self) -> None:
        if self.color not in BANK_COLORS:
            raise ConfigError(f"color must be one of {BANK_COLORS}, got {self.color!r}")
        shape = self.entry_shape
        if shape is None:
            shape = _default_entry_shape(self.color)
        shape = check_grid_shape(shape)
        if self.color == "green3d":
            if len(shape) != 3:
                raise ConfigError(f"green3d entries are 3D, got shape {shape}")
        elif len(shape) != 2:
            raise ConfigError(f"{self.color} entries are 2D, got shape {shape}")
        policy = self.sigma_policy
        if self.color in ("white", "optim-blue"):
            if policy is not None:
                raise ConfigError(f"{self.color} banks take no sigma policy")
        elif policy is None:
            policy = _default_policy(self.color)
        params = self.optim_blue
        if self.color == "optim-blue":
            if params is None:
                params = OptimBlueParams()
        elif params is not None:
            raise ConfigError(f"{self.color} banks take no optim-blue params")
        object.__setattr__(self, "entry_shape", shape)
        object.__setattr__(self, "seed", check_seed(self.seed))
        object.__setattr__(self, "sigma_policy", policy)
        object.__setattr__(self, "optim_blue", params)

    @property
    def noise_color(self) -> str:
        """The noise-core color behind this bank color."""
        return "green" if self.color == "green3d" else self.color


@dataclass(frozen=True)
class MaskBank:
    """An in-memory bank: stacked entries plus regeneration metadata."""

    config: GenConfig
    entries: np.ndarray
    entry_seeds: tuple[int, ...]
    sigma_draws: tuple[tuple[float, ...], ...]
    gammas: tuple[float, ...] | None
    digest: str
    rng_id: str = RNG_ID
    format_version: str = FORMAT_VERSION

    @property
    def count(self) -> int:
        return int(self.entries.shape[0])

    @property
    def entry_shape(self) -> tuple[int, ...]:
        return tuple(self.entries.shape[1:])

    @property
    def binary(self) -> bool:
        return self.config.color == "optim-blue"


def _payload_digest(entries: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(entries).tobytes()).hexdigest()


def _check_workers(workers: int) -> int:
    if int(workers) < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    return int(workers)


def build_bank(config: GenConfig, count: int, workers: int = 1) -> MaskBank:
    """Generate a bank of ``count`` entries (or ``count`` runs for optim-blue).

    Entry i derives its own seed from the config seed, so results do not
    depend on ``workers``.  Continuous colors yield z-scored float32 noise;
    optim-blue yields the k binary masks (1 = masked) of each run stacked in
    run-major order, so the bank holds count * k entries.
    """
    if int(count) < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    count = int(count)
    workers = _check_workers(workers)

    if config.color == "optim-blue":
        return _build_optim_blue(config, count, workers)

    shape = config.entry_shape
    entries = np.empty((count, *shape), dtype=np.float32)
    seeds = [split_seed(config.seed, i) for i in range(count)]
    draws: list[tuple[float, ...]] = [()] * count

    def one(i: int) -> None:
        tensor = color_noise(shape, config.noise_color, config.sigma_policy, seeds[i])
        entries[i] = tensor.values.astype(np.float32)
        draws[i] = tensor.sigma_params

    if workers == 1 or count <= 1:
        for i in range(count):
            one(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(count)))

    return MaskBank(
        config=config,
        entries=entries,
        entry_seeds=tuple(seeds),
        sigma_draws=tuple(draws),
        gammas=None,
        digest=_payload_digest(entries),
    )


def _build_optim_blue(config: GenConfig, runs: int, workers: int) -> MaskBank:
    params = config.optim_blue
    shape = config.entry_shape
    total = runs * params.k
    entries = np.empty((total, *shape), dtype=np.uint8)
    run_seeds = [split_seed(config.seed, r) for r in range(runs)]
    seeds = [run_seeds[i // params.k] for i in range(total)]
    gammas = [0.0] * total

    def one(r: int) -> None:
        result = optimize_blue(OptimBlueConfig(shape=shape, params=params, seed=run_seeds[r]))
        for j in range(params.k):
            mask = export_mask(result, j)
            entries[r * params.k + j] = mask.bits.astype(np.uint8)
            gammas[r * params.k + j] = mask.gamma

    if workers == 1 or runs <= 1:
        for r in range(runs):
            one(r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(runs)))

    return MaskBank(
        config=config,
        entries=entries,
        entry_seeds=tuple(seeds),
        sigma_draws=tuple(() for _ in range(total)),
        gammas=tuple(gammas),
        digest=_payload_digest(entries),
    )


def _sidecar_dict(bank: MaskBank) -> dict:
    config = bank.config
    meta: dict = {
        "format_version": bank.format_version,
        "rng_id": bank.rng_id,
        "color": config.color,
        "sigma_policy": None if config.sigma_policy is None else config.sigma_policy.to_dict(),
        "sigma_draws": [list(d) for d in bank.sigma_draws],
        "seeds": list(bank.entry_seeds),
        "root_seed": config.seed,
        "count": bank.count,
        "entry_shape": list(config.entry_shape),
        "digest": bank.digest,
    }
    if config.color == "optim-blue":
        meta["gamma"] = list(bank.gammas)
        meta["optim_blue"] = config.optim_blue.to_dict()
    return meta


def write_bank(bank: MaskBank, path) -> Path:
    """Write ``entries.npy`` + ``bank.json`` into a directory, creating it."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    np.save(root / "entries.npy", bank.entries, allow_pickle=False)
    sidecar = json.dumps(_sidecar_dict(bank), indent=2, sort_keys=True) + "\n"
    (root / "bank.json").write_text(sidecar, encoding="utf-8")
    return root


def _read_sidecar(root: Path) -> dict:
    sidecar_path = root / "bank.json"
    if not sidecar_path.is_file():
        raise BankFormatError(f"{sidecar_path}: sidecar missing")
    try:
        meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BankFormatError(f"{sidecar_path}: unreadable sidecar ({exc})") from exc
    if not isinstance(meta, dict):
        raise BankFormatError(f"{sidecar_path}: sidecar must be a JSON object")
    required = ("format_version", "rng_id", "color", "sigma_policy", "seeds", "entry_shape", "digest")
    for field in required:
        if field not in meta:
            raise BankFormatError(f"{sidecar_path}: missing field {field!r}")
    return meta


def _check_npy_header(npy_path: Path, expect_descr: str) -> None:
    try:
        with open(npy_path, "rb") as handle:
            preamble = handle.read(10)
    except OSError as exc:
        raise BankFormatError(f"{npy_path}: unreadable ({exc})") from exc
    if len(preamble) < 10 or preamble[:6] != _NPY_MAGIC:
        raise BankFormatError(f"{npy_path}: bad magic; not an NPY file")
    major, minor = preamble[6], preamble[7]
    if (major, minor) != (1, 0):
        raise BankFormatError(f"{npy_path}: unsupported NPY version {major}.{minor}")
    header_len = int.from_bytes(preamble[8:10], "little")
    with open(npy_path, "rb") as handle:
        handle.seek(10)
        header = handle.read(header_len).decode("latin1", errors="replace")
    if f"'descr': '{expect_descr}'" not in header:
        raise BankFormatError(f"{npy_path}: descr is not {expect_descr!r}")
    if "'fortran_order': False" not in header:
        raise BankFormatError(f"{npy_path}: payload must be row-major (fortran_order False)")


def read_bank(path) -> MaskBank:
    """Load and validate a bank directory.

    Validates the NPY magic/version/descr by hand, the payload shape and
    dtype against the sidecar, and the SHA-256 digest of the payload bytes;
    every failure raises BankFormatError naming the offending field.
    """
    root = Path(path)
    if not root.is_dir():
        raise BankFormatError(f"{root}: not a bank directory")
    meta = _read_sidecar(root)

    if meta["format_version"] != FORMAT_VERSION:
        raise BankFormatError(
            f"{root}: format_version {meta['format_version']!r} unsupported (want {FORMAT_VERSION!r})"
        )
    if meta["rng_id"] != RNG_ID:
        raise BankFormatError(f"{root}: rng_id {meta['rng_id']!r} unsupported (want {RNG_ID!r})")
    color = meta["color"]
    if color not in BANK_COLORS:
        raise BankFormatError(f"{root}: unknown color {color!r}")

    npy_path = root / "entries.npy"
    if not npy_path.is_file():
        raise BankFormatError(f"{npy_path}: payload missing")
    expect_dtype = np.uint8 if color == "optim-blue" else np.float32
    _check_npy_header(npy_path, "|u1" if color == "optim-blue" else "<f4")
    try:
        entries = np.load(npy_path, allow_pickle=False)
    except (ValueError, OSError, EOFError) as exc:
        raise BankFormatError(f"{npy_path}: corrupt payload ({exc})") from exc
    if entries.dtype != expect_dtype:
        raise BankFormatError(f"{npy_path}: dtype {entries.dtype} != {np.dtype(expect_dtype)}")

    try:
        entry_shape = tuple(int(d) for d in meta["entry_shape"])
        seeds = tuple(int(s) for s in meta["seeds"])
    except (TypeError, ValueError) as exc:
        raise BankFormatError(f"{root}: malformed entry_shape or seeds ({exc})") from exc
    if entries.ndim != len(entry_shape) + 1 or tuple(entries.shape[1:]) != entry_shape:
        raise BankFormatError(
            f"{npy_path}: payload shape {tuple(entries.shape)} inconsistent with entry_shape {entry_shape}"
        )
    if len(seeds) != entries.shape[0]:
        raise BankFormatError(f"{root}: seeds length {len(seeds)} != entry count {entries.shape[0]}")

    digest = _payload_digest(entries)
    if digest != meta["digest"]:
        raise BankFormatError(f"{root}: digest mismatch (payload {digest}, sidecar {meta['digest']})")

    policy = None if meta["sigma_policy"] is None else SigmaPolicy.from_dict(meta["sigma_policy"])
    params = None
    gammas = None
    if color == "optim-blue":
        if "optim_blue" not in meta or "gamma" not in meta:
            raise BankFormatError(f"{root}: optim-blue bank missing 'optim_blue' or 'gamma'")
        try:
            params = OptimBlueParams.from_dict(meta["optim_blue"])
        except (KeyError, TypeError, ParameterError) as exc:
            raise BankFormatError(f"{root}: malformed optim_blue params ({exc})") from exc
        gammas = tuple(float(g) for g in meta["gamma"])
        if len(gammas) != entries.shape[0]:
            raise BankFormatError(f"{root}: gamma length {len(gammas)} != entry count")

    draws_raw = meta.get("sigma_draws", [[] for _ in seeds])
    if len(draws_raw) != entries.shape[0]:
        raise BankFormatError(f"{root}: sigma_draws length {len(draws_raw)} != entry count")

    try:
        config = GenConfig(
            color=color,
            entry_shape=entry_shape,
            seed=int(meta.get("root_seed", 0)),
            sigma_policy=policy,
            optim_blue=params,
        )
    except (ConfigError, ShapeError, ParameterError) as exc:
        raise BankFormatError(f"{root}: inconsistent config ({exc})") from exc

    return MaskBank(
        config=config,
        entries=entries,
        entry_seeds=seeds,
        sigma_draws=tuple(tuple(float(s) for s in d) for d in draws_raw),
        gammas=gammas,
        digest=digest,
        rng_id=meta["rng_id"],
        format_version=meta["format_version"],
    )


def config_from_metadata(meta: dict) -> tuple[GenConfig, int]:
    """Rebuild the (config, count) pair that regenerates a bank from its sidecar."""
    policy = None if meta.get("sigma_policy") is None else SigmaPolicy.from_dict(meta["sigma_policy"])
    params = None
    count = int(meta.get("count", len(meta.get("seeds", ()))))
    if meta["color"] == "optim-blue":
        params = OptimBlueParams.from_dict(meta["optim_blue"])
        if count % params.k != 0:
            raise BankFormatError(f"entry count {count} not a multiple of k={params.k}")
        count //= params.k
    config = GenConfig(
        color=meta["color"],
        entry_shape=tuple(meta["entry_shape"]),
        seed=int(meta.get("root_seed", 0)),
        sigma_policy=policy,
        optim_blue=params,
    )
    return config, count


@dataclass(frozen=True)
class AugmentSpec:
    """How a stored entry becomes a training-shaped mask."""

    target_grid: tuple[int, ...]
    flip_axes: tuple[str, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        grid = check_grid_shape(self.target_grid)
        axes = tuple(self.flip_axes)
        for name in axes:
            if name not in FLIP_AXES:
                raise ParameterError(f"unknown flip axis {name!r}; valid axes: {FLIP_AXES}")
        if len(set(axes)) != len(axes):
            raise ParameterError(f"duplicate flip axis in {axes}")
        object.__setattr__(self, "target_grid", grid)
        object.__setattr__(self, "flip_axes", axes)
        object.__setattr__(self, "seed", check_seed(self.seed))


def resize_multilinear(values: np.ndarray, target) -> np.ndarray:
    """Separable multilinear resize (half-pixel centers, clamped edges)."""
    values = np.asarray(values, dtype=np.float64)
    target = tuple(int(d) for d in target)
    if len(target) != values.ndim:
        raise ShapeError(f"target rank {len(target)} != source rank {values.ndim}")
    if any(d < 1 for d in target):
        raise ShapeError(f"target dims must be >= 1, got {target}")
    out = values
    for axis, (n_in, n_out) in enumerate(zip(values.shape, target)):
        if n_in == n_out:
            continue
        pos = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
        lo = np.floor(pos).astype(np.int64)
        frac = pos - lo
        lo_c = np.clip(lo, 0, n_in - 1)
        hi_c = np.clip(lo + 1, 0, n_in - 1)
        take_lo = np.take(out, lo_c, axis=axis)
        take_hi = np.take(out, hi_c, axis=axis)
        shape = [1] * out.ndim
        shape[axis] = n_out
        frac = frac.reshape(shape)
        out = (1.0 - frac) * take_lo + frac * take_hi
    return out


def _draw_flips(aug: AugmentSpec, rank: int, rng: np.random.Generator) -> dict[str, bool]:
    """Coin flips for the requested axes, drawn in canonical axis order."""
    if "temporal" in aug.flip_axes and rank != 3:
        raise SamplingError("temporal flips need a 3D bank")
    flips: dict[str, bool] = {}
    for name in FLIP_AXES[:rank]:
        if name in aug.flip_axes:
            flips[name] = bool(rng.random() < 0.5)
    return flips


def _apply_flips(values: np.ndarray, flips: dict[str, bool]) -> np.ndarray:
    for axis_index, name in enumerate(FLIP_AXES[: values.ndim]):
        if flips.get(name):
            values = np.flip(values, axis=axis_index)
    return values


def sample_with_provenance(
    bank: MaskBank, aug: AugmentSpec, gamma: float | None = None
) -> tuple[MaskTensor, dict]:
    """Sample one mask and report exactly how it was produced.

    Continuous banks require ``gamma`` and honor any target grid of the same
    rank; binary banks are returned at their stored grid and recorded ratio
    (pass gamma=None or the recorded value).
    """
    if bank.count == 0:
        raise SamplingError("cannot sample from an empty bank")
    target = check_grid_shape(aug.target_grid)
    if len(target) != len(bank.entry_shape):
        raise SamplingError(
            f"target grid rank {len(target)} != bank entry rank {len(bank.entry_shape)}"
        )

    rng = generator(aug.seed)
    index = int(rng.integers(bank.count))
    flips = _draw_flips(aug, len(target), rng)

    if bank.binary:
        if target != bank.entry_shape:
            raise SamplingError(
                f"binary entries are never resized: target {target} != entry shape {bank.entry_shape}"
            )
        recorded = bank.gammas[index]
        if gamma is not None and abs(float(gamma) - recorded) > 1e-12:
            raise SamplingError(
                f"binary entry {index} has ratio {recorded!r}; requested {gamma!r}"
            )
        bits = _apply_flips(bank.entries[index] != 0, flips)
        mask = MaskTensor(
            bits=bits,
            gamma=recorded,
            source=f"optim-blue:bank-entry={index}:seed={bank.entry_seeds[index]}",
        )
    else:
        if gamma is None:
            raise SamplingError("continuous banks need an explicit gamma")
        values = _apply_flips(bank.entries[index].astype(np.float64), flips)
        values = resize_multilinear(values, target)
        mask = mask_values(
            values,
            float(gamma),
            source=f"{bank.config.color}:bank-entry={index}:seed={bank.entry_seeds[index]}",
        )

    provenance = {
        "bank_color": bank.config.color,
        "bank_digest": bank.digest,
        "entry_index": index,
        "entry_seed": bank.entry_seeds[index],
        "flips": flips,
        "gamma": mask.gamma,
        "target_grid": list(mask.shape),
        "seed": aug.seed,
        "rng_id": bank.rng_id,
    }
    return mask, provenance


def sample_mask(bank: MaskBank, aug: AugmentSpec, gamma: float | None = None) -> MaskTensor:
    """Sample one mask from a bank (see sample_with_provenance)."""
    mask, _ = sample_with_provenance(bank, aug, gamma)
    return mask


def pair_sample(
    video_bank: MaskBank,
    audio_bank: MaskBank,
    video_aug: AugmentSpec,
    audio_aug: AugmentSpec,
    gamma_video: float = 0.75,
    gamma_audio: float = 0.75,
    seed: int = 0,
) -> tuple[MaskTensor, MaskTensor]:
    """Draw a correlated (video, audio) mask pair from one root seed.

    The root seed splits into one child per modality, overriding the seeds
    in the augment specs, so a single integer reproduces the whole pair.
    """
    if len(video_bank.entry_shape) != 3:
        raise ConfigError(f"video bank must hold 3D entries, got {video_bank.entry_shape}")
    if len(audio_bank.entry_shape) != 2:
        raise ConfigError(f"audio bank must hold 2D entries, got {audio_bank.entry_shape}")
    video = sample_mask(video_bank, replace(video_aug, seed=split_seed(seed, 0)), gamma_video)
    audio = sample_mask(audio_bank, replace(audio_aug, seed=split_seed(seed, 1)), gamma_audio)
    return video, audio
