"""In-process array interface to mask banks for training pipelines.

This wrapper keeps dataloaders decoupled from the core package: banks come
back as opaque :class:`BoundBank` handles, masks come back as plain boolean
arrays (True = masked) together with a JSON-compatible provenance mapping,
and every call is a pure function of its arguments, so results never depend
on interpreter state. Core exceptions propagate unchanged; the only errors
raised here concern malformed arguments to the wrapper itself.

Exactly five operations are public: ``load_bank``, ``generate_bank``,
``sample``, ``pair_sample``, and ``verify_bank``. ``__version__`` mirrors
the bank format version of the core package.
"""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

import noisemask as _core

__all__ = ["load_bank", "generate_bank", "sample", "pair_sample", "verify_bank"]
__version__ = _core.FORMAT_VERSION

_CONFIG_KEYS = frozenset(
    {
        "color",
        "shape",
        "count",
        "seed",
        "sigma",
        "sigma_policy",
        "k",
        "transmittance",
        "window",
        "weights",
    }
)
_OPTIM_KEYS = ("k", "transmittance", "window", "weights")


class BoundBank:
    """Read-only handle to a loaded or generated bank.

    Handles are independent views: dropping one never invalidates another
    wrapping the same bank, and nothing in this module mutates bank state.
    """

    __slots__ = ("_bank",)

    def __init__(self, bank: _core.MaskBank):
        if not isinstance(bank, _core.MaskBank):
            raise TypeError(f"expected a MaskBank, got {type(bank).__name__}")
        self._bank = bank

    @property
    def shape(self) -> tuple[int, ...]:
        """Grid shape shared by every entry."""
        return tuple(self._bank.entry_shape)

    @property
    def color(self) -> str:
        return self._bank.config.color

    @property
    def count(self) -> int:
        return self._bank.count

    @property
    def metadata(self) -> dict:
        """Bank description, field for field the on-disk sidecar JSON.

        A fresh mapping is built on every access, so callers may edit the
        result freely without touching the handle.
        """
        bank = self._bank
        policy = bank.config.sigma_policy
        meta = {
            "color": bank.config.color,
            "count": bank.count,
            "digest": bank.digest,
            "entry_shape": list(bank.entry_shape),
            "format_version": bank.format_version,
            "rng_id": bank.rng_id,
            "root_seed": bank.config.seed,
            "seeds": [int(seed) for seed in bank.entry_seeds],
            "sigma_draws": [list(draw) for draw in bank.sigma_draws],
            "sigma_policy": None if policy is None else policy.to_dict(),
        }
        if bank.binary:
            meta["gamma"] = list(bank.gammas)
            meta["optim_blue"] = bank.config.optim_blue.to_dict()
        return meta

    def __repr__(self) -> str:
        return (
            f"BoundBank(color={self.color!r}, count={self.count}, "
            f"shape={self.shape})"
        )


def _require_bound(bank) -> _core.MaskBank:
    if not isinstance(bank, BoundBank):
        raise TypeError(f"expected a BoundBank, got {type(bank).__name__}")
    return bank._bank


def load_bank(path) -> BoundBank:
    """Wrap the bank stored at ``path``.

    Format problems surface as the core ``BankFormatError`` with the
    offending path in the message.
    """
    return BoundBank(_core.read_bank(path))


def _policy_from_config(config: Mapping) -> _core.SigmaPolicy | None:
    if "sigma" in config and "sigma_policy" in config:
        raise _core.ConfigError("give either 'sigma' or 'sigma_policy', not both")
    if "sigma" in config:
        sigma = config["sigma"]
        if isinstance(sigma, str):
            raise _core.ConfigError("'sigma' takes a number or a pair of numbers")
        try:
            values = tuple(float(v) for v in sigma)
        except TypeError:
            values = (float(sigma),)
        if len(values) not in (1, 2):
            raise _core.ConfigError(
                f"'sigma' takes one or two values, got {len(values)}"
            )
        return _core.SigmaPolicy.fixed(*values)
    if "sigma_policy" in config:
        policy = config["sigma_policy"]
        if isinstance(policy, str):
            return _core.sigma_preset(policy)
        if isinstance(policy, Mapping):
            return _core.SigmaPolicy.from_dict(dict(policy))
        raise _core.ConfigError("'sigma_policy' takes a preset name or a mapping")
    return None


def _optim_from_config(config: Mapping) -> _core.OptimBlueParams | None:
    provided = [name for name in _OPTIM_KEYS if name in config]
    if not provided and config.get("color") != "optim-blue":
        return None
    kwargs = {}
    if "k" in config:
        kwargs["k"] = int(config["k"])
    if "transmittance" in config:
        kwargs["transmittance"] = float(config["transmittance"])
    if "window" in config:
        kwargs["window"] = int(config["window"])
    if "weights" in config:
        kwargs["weights"] = tuple(float(w) for w in config["weights"])
    return _core.OptimBlueParams(**kwargs)


def generate_bank(config: Mapping) -> BoundBank:
    """Build a bank in memory from a plain config mapping.

    Recognized keys: ``color`` and ``shape`` (required); ``count``, entries
    or optimizer runs, default 1; ``seed``, default 0; either ``sigma`` (one
    or two fixed filter widths) or ``sigma_policy`` (a preset name or a
    policy mapping); and for color ``optim-blue`` the optimizer knobs ``k``,
    ``transmittance``, ``window``, and ``weights``. Identical mappings
    produce identical banks, digest for digest the same as the command-line
    generator given the same values.
    """
    if not isinstance(config, Mapping):
        raise TypeError(f"config must be a mapping, got {type(config).__name__}")
    unknown = sorted(set(config) - _CONFIG_KEYS)
    if unknown:
        raise _core.ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted({"color", "shape"} - set(config))
    if missing:
        raise _core.ConfigError(f"config needs {', '.join(missing)}")
    gen = _core.GenConfig(
        color=str(config["color"]),
        entry_shape=tuple(int(n) for n in config["shape"]),
        seed=int(config.get("seed", 0)),
        sigma_policy=_policy_from_config(config),
        optim_blue=_optim_from_config(config),
    )
    return BoundBank(_core.build_bank(gen, int(config.get("count", 1))))


def sample(bank: BoundBank, grid, gamma=None, seed=0, flips=()):
    """Draw one augmented mask as a boolean array (True = masked).

    Returns ``(bits, provenance)``. The tuple (bank digest, grid, gamma,
    seed, flips) pins the result bit for bit, and the provenance mapping is
    exactly the record the command-line sampler writes beside its output
    file. Continuous banks need ``gamma`` and resize to any grid of the
    same rank; binary banks keep their stored grid and recorded ratio.
    """
    core = _require_bound(bank)
    aug = _core.AugmentSpec(
        target_grid=tuple(int(n) for n in grid),
        flip_axes=tuple(flips),
        seed=int(seed),
    )
    mask, provenance = _core.sample_with_provenance(core, aug, gamma)
    return np.asarray(mask.bits, dtype=bool), provenance


def pair_sample(
    video_bank: BoundBank,
    audio_bank: BoundBank,
    video_grid,
    audio_grid,
    gamma_video: float = 0.75,
    gamma_audio: float = 0.75,
    seed: int = 0,
    video_flips=(),
    audio_flips=(),
):
    """Draw one coupled video/audio mask pair from a single seed.

    Returns two boolean arrays. The draws consume disjoint child streams
    of ``seed``, one per modality, so regenerating either mask alone gives
    the same bits as generating the pair.
    """
    video_aug = _core.AugmentSpec(
        target_grid=tuple(int(n) for n in video_grid), flip_axes=tuple(video_flips)
    )
    audio_aug = _core.AugmentSpec(
        target_grid=tuple(int(n) for n in audio_grid), flip_axes=tuple(audio_flips)
    )
    video, audio = _core.pair_sample(
        _require_bound(video_bank),
        _require_bound(audio_bank),
        video_aug,
        audio_aug,
        gamma_video=gamma_video,
        gamma_audio=gamma_audio,
        seed=int(seed),
    )
    return np.asarray(video.bits, dtype=bool), np.asarray(audio.bits, dtype=bool)


def verify_bank(
    bank: BoundBank,
    expect: str | None = None,
    min_pass_rate: float = 0.9,
    gamma: float = 0.9,
    workers: int = 1,
) -> dict:
    """Classify every entry and judge the whole bank.

    Pass-through to the core verification report: a JSON-compatible dict
    with per-entry verdicts and an overall ``passed`` flag.
    """
    return _core.verification_report(
        _require_bound(bank),
        expect=expect,
        min_pass_rate=min_pass_rate,
        gamma=gamma,
        workers=workers,
    )
