"""Command-line front end: gen, sample, verify, stats, and plot.

Exit code contract: 0 success, 1 validation error (bad flags, shapes, or
parameter combinations), 2 I/O or file-format error, 3 verification
failure.  Every subcommand is deterministic: identical flags (including
--seed where one exists) produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bank import (
    AugmentSpec,
    GenConfig,
    build_bank,
    read_bank,
    sample_with_provenance,
    write_bank,
)
from .errors import BankFormatError, NoiseMaskError, ParameterError
from .masking import MaskTensor
from .noise import SigmaPolicy, sigma_preset
from .optim_blue import OptimBlueParams
from .spectrum import (
    radial_profile,
    temporal_smoothness,
    uniformity,
    verification_report,
)
from .viz import frame_images, write_pgm, write_profile_svg

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_VERIFY = 3

_GEN_COLORS = ("white", "red", "blue", "green", "green3d", "optim-blue")


class _Parser(argparse.ArgumentParser):
    """argparse with the validation exit code instead of the default 2."""

    def error(self, message):
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _parse_shape(text: str) -> tuple[int, ...]:
    parts = text.lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise ParameterError(
            f"shape must look like 64x64 or 14x14x8, got {text!r}"
        ) from None
    return dims


def _parse_policy(sigma: str | None, sigma_policy: str | None) -> SigmaPolicy | None:
    if sigma is not None and sigma_policy is not None:
        raise ParameterError("--sigma and --sigma-policy are mutually exclusive")
    text = None
    if sigma is not None:
        text = sigma
    elif sigma_policy is not None:
        if sigma_policy in ("main-text", "variant5"):
            return sigma_preset(sigma_policy)
        if not sigma_policy.startswith("fixed:"):
            raise ParameterError(
                "--sigma-policy takes main-text, variant5, or fixed:a[,b], "
                f"got {sigma_policy!r}"
            )
        text = sigma_policy[len("fixed:"):]
    if text is None:
        return None
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ParameterError(f"sigma values must be numbers, got {text!r}") from None
    if len(values) not in (1, 2):
        raise ParameterError(f"expected one or two sigma values, got {len(values)}")
    return SigmaPolicy.fixed(*values)


def _workers() -> int:
    raw = os.environ.get("NOISEMASK_THREADS")
    if raw is None:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ParameterError(
            f"NOISEMASK_THREADS must be a positive integer, got {raw!r}"
        ) from None
    if workers < 1:
        raise ParameterError(f"NOISEMASK_THREADS must be >= 1, got {workers}")
    return workers


def _cmd_gen(args) -> int:
    shape = _parse_shape(args.shape)
    policy = _parse_policy(args.sigma, args.sigma_policy)
    params = None
    optim_flags = {
        "k": args.k,
        "transmittance": args.transmittance,
        "window": args.window,
        "weights": args.weights,
    }
    if args.color == "optim-blue":
        kwargs = {}
        if args.k is not None:
            kwargs["k"] = args.k
        if args.transmittance is not None:
            kwargs["transmittance"] = args.transmittance
        if args.window is not None:
            kwargs["window"] = args.window
        if args.weights is not None:
            try:
                weights = tuple(float(v) for v in args.weights.split(","))
            except ValueError:
                raise ParameterError(
                    f"--weights takes four comma-separated numbers, got {args.weights!r}"
                ) from None
            kwargs["weights"] = weights
        params = OptimBlueParams(**kwargs)
    else:
        for name, value in optim_flags.items():
            if value is not None:
                raise ParameterError(f"--{name} only applies to --color optim-blue")
    config = GenConfig(
        color=args.color,
        entry_shape=shape,
        seed=args.seed,
        sigma_policy=policy,
        optim_blue=params,
    )
    bank = build_bank(config, args.count, workers=_workers())
    write_bank(bank, args.out)
    print(bank.digest)
    return EXIT_OK


def _cmd_sample(args) -> int:
    bank = read_bank(args.bank)
    grid = _parse_shape(args.grid)
    flips = tuple(name for name in args.flips.split(",") if name) if args.flips else ()
    aug = AugmentSpec(target_grid=grid, flip_axes=flips, seed=args.seed)
    mask, provenance = sample_with_provenance(bank, aug, args.gamma)

    out = Path(args.out)
    with open(out, "wb") as fh:
        np.save(fh, mask.bits, allow_pickle=False)
    sidecar = out.with_suffix(".json") if out.suffix == ".npy" else Path(f"{out}.json")
    sidecar.write_text(json.dumps(provenance, indent=2, sort_keys=True) + "\n")
    masked = int(mask.bits.sum())
    print(f"masked {masked} / visible {mask.bits.size - masked}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    bank = read_bank(args.bank)
    report = verification_report(
        bank,
        expect=args.expect,
        min_pass_rate=args.min_pass_rate,
        gamma=args.gamma,
        workers=_workers(),
    )
    report_path = Path(args.report) if args.report else Path(args.bank) / "verify.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    status = "ok" if report["passed"] else "FAIL"
    print(
        f"expect {report['expect']}: pass rate {report['pass_rate']:.3f} "
        f"(floor {report['min_pass_rate']:.3f}) {status}"
    )
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _fmt(value, spec=".5f") -> str:
    if value is None:
        return "-"
    return format(value, spec)


def _load_mask_file(path: str) -> MaskTensor:
    with open(path, "rb") as fh:
        arr = np.load(fh, allow_pickle=False)
    bits = arr != 0
    if bits.ndim not in (2, 3):
        raise BankFormatError(f"mask files hold 2D or 3D arrays, got rank {bits.ndim}")
    return MaskTensor(
        bits=bits, gamma=float(bits.mean()), source=f"file:{Path(path).name}"
    )


def _mask_stats_lines(mask: MaskTensor) -> list[str]:
    bits = mask.bits
    masked = int(bits.sum())
    lines = [
        f"cells {bits.size} masked {masked} visible {bits.size - masked} "
        f"ratio {masked / bits.size:.6f}"
    ]
    if bits.ndim == 3 and bits.shape[2] >= 2:
        lines.append(f"temporal smoothness {temporal_smoothness(mask):.6f}")
    if bits.ndim == 2 and int((~bits).sum()) >= 2:
        report = uniformity(mask)
        lines.append(
            f"mean nn distance {report.mean_nn_distance:.6f} "
            f"mean clustering score {report.mean_clustering_score:.6f} "
            f"visible {report.visible_count}"
        )
    return lines


def _cmd_stats(args) -> int:
    if args.mask:
        lines = _mask_stats_lines(_load_mask_file(args.mask))
    else:
        bank = read_bank(args.bank)
        report = verification_report(bank, gamma=args.gamma, workers=_workers())
        header = (
            f"{'index':>5}  {'verdict':<13}  {'centroid':>9}  {'low':>7}  "
            f"{'mid':>7}  {'high':>7}  {'ratio':>7}  {'smooth':>7}  "
            f"{'nn_dist':>8}  {'clust':>7}"
        )
        lines = [
            f"bank {bank.config.color} entries {bank.count} "
            f"shape {'x'.join(str(n) for n in bank.entry_shape)}",
            header,
        ]
        for entry in report["entries"]:
            bands = entry["band_energy"] or (None, None, None)
            ratio = (
                bank.gammas[entry["index"]] if bank.binary else report["gamma"]
            )
            uni = entry["uniformity"] or {}
            lines.append(
                f"{entry['index']:>5}  {entry['verdict']:<13}  "
                f"{_fmt(entry['centroid']):>9}  {_fmt(bands[0], '.4f'):>7}  "
                f"{_fmt(bands[1], '.4f'):>7}  {_fmt(bands[2], '.4f'):>7}  "
                f"{ratio:>7.4f}  {_fmt(entry['smoothness'], '.4f'):>7}  "
                f"{_fmt(uni.get('mean_nn_distance'), '.4f'):>8}  "
                f"{_fmt(uni.get('mean_clustering_score'), '.3f'):>7}"
            )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_plot(args) -> int:
    base = args.out
    if args.mask:
        mask = _load_mask_file(args.mask)
        field = mask.bits
        label = "mask"
    else:
        bank = read_bank(args.bank)
        if not 0 <= args.index < bank.count:
            raise ParameterError(
                f"--index must be in [0, {bank.count - 1}], got {args.index}"
            )
        entry = bank.entries[args.index]
        field = entry != 0 if bank.binary else entry.astype(np.float64)
        label = bank.config.color
    frames = frame_images(field)
    written = []
    if len(frames) == 1:
        written.append(write_pgm(frames[0], f"{base}.pgm"))
    else:
        for t, frame in enumerate(frames):
            written.append(write_pgm(frame, f"{base}_f{t:03d}.pgm"))
    profile = radial_profile(field.astype(np.float64))
    written.append(write_profile_svg([(label, profile)], f"{base}_profile.svg"))
    for path in written:
        print(path)
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="noisemask", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a bank of noise fields or masks")
    gen.add_argument("--color", required=True, choices=_GEN_COLORS)
    gen.add_argument("--shape", required=True, help="entry grid, e.g. 64x64 or 64x64x64")
    gen.add_argument("--count", type=int, default=1, help="entries (or optimizer runs)")
    gen.add_argument("--sigma", help="fixed sigma value(s), e.g. 2 or 0.5,2")
    gen.add_argument("--sigma-policy", help="main-text, variant5, or fixed:a[,b]")
    gen.add_argument("--k", type=int, help="masks per optimizer run")
    gen.add_argument("--transmittance", type=float, help="visible fraction cap")
    gen.add_argument("--window", type=int, help="clustering window size")
    gen.add_argument("--weights", help="four line weights, e.g. 1,1,1,1")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="bank directory to write")
    gen.set_defaults(func=_cmd_gen)

    sample = sub.add_parser("sample", help="draw one augmented mask from a bank")
    sample.add_argument("--bank", required=True)
    sample.add_argument("--grid", required=True, help="target grid, e.g. 14x14x8")
    sample.add_argument("--gamma", type=float, help="masking ratio in [0, 1]")
    sample.add_argument("--flips", default="", help="subset of horizontal,vertical,temporal")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--out", required=True, help="mask file (.npy) to write")
    sample.set_defaults(func=_cmd_sample)

    verify = sub.add_parser("verify", help="classify every entry and judge the bank")
    verify.add_argument("--bank", required=True)
    verify.add_argument("--expect", choices=("white", "red", "blue", "green"))
    verify.add_argument("--min-pass-rate", type=float, default=0.9)
    verify.add_argument("--gamma", type=float, default=0.9, help="ratio for mask statistics")
    verify.add_argument("--report", help="report path (default: BANK/verify.json)")
    verify.set_defaults(func=_cmd_verify)

    stats = sub.add_parser("stats", help="print per-entry or per-mask statistics")
    src = stats.add_mutually_exclusive_group(required=True)
    src.add_argument("--bank")
    src.add_argument("--mask", help="mask file written by sample")
    stats.add_argument("--gamma", type=float, default=0.9, help="ratio for mask statistics")
    stats.add_argument("--out", help="write the table here instead of stdout")
    stats.set_defaults(func=_cmd_stats)

    plot = sub.add_parser("plot", help="write PGM frames and an SVG radial profile")
    src = plot.add_mutually_exclusive_group(required=True)
    src.add_argument("--bank")
    src.add_argument("--mask", help="mask file written by sample")
    plot.add_argument("--index", type=int, default=0, help="bank entry to draw")
    plot.add_argument("--out", required=True, help="output path prefix")
    plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_VALIDATION
    except BankFormatError as err:
        print(f"noisemask: format error: {err}", file=sys.stderr)
        return EXIT_IO
    except (OSError, ValueError) as err:
        print(f"noisemask: i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    except NoiseMaskError as err:
        print(f"noisemask: invalid request: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
