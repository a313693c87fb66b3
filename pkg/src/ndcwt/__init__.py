"""Non-decimated complex wavelet transforms, wavelet spectra and phase descriptors."""

__version__ = "0.1.0"

from .filters import ComplexFilterPair, available_filters, derive_highpass, dilate_filter, get_filter
from .transform1d import Coefficients1D, TransformPlan1D, build_plan_1d, forward_1d, inverse_1d
from .transform2d import Coefficients2D, TransformPlan2D, build_plan_2d, diagonal_blocks, forward_2d, inverse_2d
from .spectra import LogscaleDiagram, SpectrumFit, fit_spectrum, logscale_1d, logscale_2d
from .phase import PhaseSummary, coefficient_phase, phase_averages_1d, phase_averages_2d
from .selfsim import FbmSpec, simulate_fbm_1d, simulate_fbm_2d
from .features import (
    FeatureSettings,
    FeatureVector,
    NestedDesign,
    extract_features,
    nearest_centroid_classify,
    segment,
    subject_adjust,
)
