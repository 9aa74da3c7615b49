"""Deterministic structured color-noise masks for masked-modeling pipelines.

Generation, rank-based binarization, greedy blue-noise mask sets, mask
banks with byte-exact serialization, and spectral/combinatorial
verification oracles.  Everything is seeded: the same config and seed give
bit-identical results regardless of worker count.
"""

from .bank import (
    AugmentSpec,
    FORMAT_VERSION,
    GenConfig,
    MaskBank,
    build_bank,
    config_from_metadata,
    pair_sample,
    read_bank,
    resize_multilinear,
    sample_mask,
    sample_with_provenance,
    write_bank,
)
from .errors import (
    BankFormatError,
    ConfigError,
    NoiseMaskError,
    ParameterError,
    PositionError,
    SamplingError,
    ShapeError,
    UndefinedProfileError,
)
from .masking import MaskTensor, eta, mask_values, masked_count, partition, tube_mask
from .noise import (
    COLORS,
    NoiseTensor,
    SigmaPolicy,
    check_grid_shape,
    color_noise,
    colored_values,
    filter_gaussian,
    filter_values,
    gaussian_kernel,
    normalize,
    sigma_preset,
    white_noise,
    znormalize,
)
from .optim_blue import (
    MaskSet,
    OptimBlueConfig,
    OptimBlueParams,
    clustering_score,
    export_mask,
    optimize_blue,
    traversal_order,
)
from .rng import RNG_ID, generator, split_seed
from .spectrum import (
    SpectrumProfile,
    UniformityReport,
    classify_color,
    radial_profile,
    temporal_smoothness,
    uniformity,
    verification_report,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentSpec",
    "BankFormatError",
    "COLORS",
    "ConfigError",
    "FORMAT_VERSION",
    "GenConfig",
    "MaskBank",
    "MaskSet",
    "MaskTensor",
    "NoiseMaskError",
    "NoiseTensor",
    "OptimBlueConfig",
    "OptimBlueParams",
    "ParameterError",
    "PositionError",
    "RNG_ID",
    "SamplingError",
    "ShapeError",
    "SigmaPolicy",
    "SpectrumProfile",
    "UndefinedProfileError",
    "UniformityReport",
    "build_bank",
    "check_grid_shape",
    "classify_color",
    "clustering_score",
    "color_noise",
    "colored_values",
    "config_from_metadata",
    "eta",
    "export_mask",
    "filter_gaussian",
    "filter_values",
    "gaussian_kernel",
    "generator",
    "mask_values",
    "masked_count",
    "normalize",
    "optimize_blue",
    "pair_sample",
    "partition",
    "radial_profile",
    "read_bank",
    "resize_multilinear",
    "sample_mask",
    "sample_with_provenance",
    "sigma_preset",
    "split_seed",
    "temporal_smoothness",
    "traversal_order",
    "tube_mask",
    "uniformity",
    "verification_report",
    "white_noise",
    "write_bank",
    "znormalize",
]
