"""fedqa: full-reference foveated video/image quality assessment.

Scores a distorted frame against a reference given a gaze point and viewing
geometry by weighting scale-mixture entropy differences of narrow radial
subbands with a foveation-based error sensitivity function. Ships with the
viewport-sampling and correlation machinery used to evaluate the metric
against subjective databases.
"""

from .csf import (
    CsfParams,
    contrast_sensitivity,
    contrast_threshold,
    critical_frequency,
    cutoff_frequency,
    error_sensitivity,
)
from .evaluation import (
    LogisticFit,
    MetricPerformance,
    QualityLogistic,
    evaluate_scores,
    krocc,
    logistic_fit,
    plcc,
    rmse,
    srocc,
)
from .fed import (
    FedReport,
    FoveatedEntropicDifference,
    fed_score,
    fed_subband_map,
    fed_video_score,
    sensitivity_weight_map,
)
from .filterbank import (
    FilterBankSpec,
    RadialFilterBank,
    build_bank,
    decompose,
    evaluate_response,
    out_of_band_energy_fraction,
    subband_mean_frequency,
)
from .frameio import iter_frames, load_frame, store_frame
from .geometry import (
    BlockGrid,
    GazePoint,
    ViewGeometry,
    eccentricity,
    eccentricity_map,
    pixels_per_degree,
)
from .gsm import (
    GsmEntropyEstimator,
    GsmModel,
    blockify,
    conditional_entropy,
    entropy_field,
    fit_gsm,
)
from .manifest import evaluate_manifest
from .viewport import (
    ViewportSampler,
    ViewportSpec,
    default_grid,
    extract_viewport,
    sample_all,
)

__version__ = "0.1.0"

__all__ = [
    "BlockGrid",
    "CsfParams",
    "FedReport",
    "FilterBankSpec",
    "FoveatedEntropicDifference",
    "GazePoint",
    "GsmEntropyEstimator",
    "GsmModel",
    "LogisticFit",
    "MetricPerformance",
    "QualityLogistic",
    "RadialFilterBank",
    "ViewGeometry",
    "ViewportSampler",
    "ViewportSpec",
    "blockify",
    "build_bank",
    "conditional_entropy",
    "contrast_sensitivity",
    "contrast_threshold",
    "critical_frequency",
    "cutoff_frequency",
    "decompose",
    "default_grid",
    "eccentricity",
    "eccentricity_map",
    "entropy_field",
    "error_sensitivity",
    "evaluate_manifest",
    "evaluate_response",
    "evaluate_scores",
    "extract_viewport",
    "fed_score",
    "fed_subband_map",
    "fed_video_score",
    "fit_gsm",
    "iter_frames",
    "krocc",
    "load_frame",
    "logistic_fit",
    "out_of_band_energy_fraction",
    "pixels_per_degree",
    "plcc",
    "rmse",
    "sample_all",
    "sensitivity_weight_map",
    "srocc",
    "store_frame",
    "subband_mean_frequency",
]
