"""Numerical time-frequency analysis with sharp mixed-norm bounds.

Submodules: :mod:`signals` (grids and sampled signals), :mod:`transforms`
(STFT, cross-Wigner, ambiguity, 4D STFT), :mod:`oracles` (closed-form
Gaussian results), :mod:`norms` (modulation, amalgam and Wigner norms),
:mod:`sharpness` (index conditions and dilation sweeps),
:mod:`quantization` (Weyl and localization operators), :mod:`cohen`
(Cohen-class distributions) and :mod:`cli`.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .exponents import INF, ExtReal  # noqa: E402
from .signals import (DEFAULT_GRID, AxisGrid, SampledSignal, TfArray,  # noqa: E402
                      gaussian)
from .transforms import ambiguity, cross_wigner, stft, stft2d  # noqa: E402
from .norms import (MixedNormSpec, amalgam_norm, modulation_norm,  # noqa: E402
                    modulation_norm_phase_space, wigner_mod_norm)
from .sharpness import IndexTuple, check_conditions, predicted_ratio_slopes, sweep  # noqa: E402
from .quantization import (localization_apply, localization_weyl_symbol,  # noqa: E402
                           weyl_apply)
from .cohen import CohenKernel, cohen_distribution, cosine_integral  # noqa: E402

from . import errors as _errors  # noqa: E402

__all__ = [n for n in dir(_errors) if n[0].isupper()] + [
    "INF", "ExtReal", "DEFAULT_GRID", "AxisGrid", "SampledSignal", "TfArray", "gaussian",
    "ambiguity", "cross_wigner", "stft", "stft2d", "MixedNormSpec", "amalgam_norm",
    "modulation_norm", "modulation_norm_phase_space", "wigner_mod_norm", "IndexTuple",
    "check_conditions", "predicted_ratio_slopes", "sweep", "localization_apply",
    "localization_weyl_symbol", "weyl_apply", "CohenKernel", "cohen_distribution",
    "cosine_integral",
]
