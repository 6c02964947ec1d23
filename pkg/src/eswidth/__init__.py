"""Binaural ensemble-width toolkit.

Two-factor width analysis for binaural signals: a phase-based directional
measure (phase-only spatial correlation over an HRIR basis, and its
time-varying spatiogram) plus a timbre-dependent perceptual weight (mean
time-bandwidth energy over a critical-band Gabor filterbank), together with
the rendering models and listening-test harness used to produce and collect
width judgments.
"""

from .dsp import (
    SPEED_OF_SOUND,
    CorrelationFunction,
    IaccResult,
    Signal,
    cross_correlation,
    delay,
    gcc_phat,
    iacc,
    white_noise,
)
from .hrir import (
    DirectionalBasis,
    HrirBank,
    HrirEntry,
    itd_samples,
    load_bank,
    magnitude_basis,
    phase_basis,
    save_bank,
    synth_spherical_bank,
    woodworth_itd,
)
from .mtbe import (
    GaborFilterSpec,
    MtbeResult,
    TimeBandEnergy,
    band_weights,
    build_filterbank,
    critical_bandwidth,
    mtbe,
    mtbe_weighted,
    patch_energies,
    relative_scores,
)
from .render import (
    EnsembleSpec,
    ItdScenario,
    SourceSpec,
    decorrelate,
    make_scenario,
    normalize_pair,
    render_hrir,
    render_itd,
)
from .spatial import (
    SpatialCorrelation,
    Spatiogram,
    WidthEstimate,
    angular_width,
    centroid_lag,
    detect_peaks,
    dispersion,
    posc,
    spatial_correlation,
    spatiogram,
)

__version__ = "0.1.0"

__all__ = [
    "SPEED_OF_SOUND",
    "CorrelationFunction",
    "DirectionalBasis",
    "EnsembleSpec",
    "GaborFilterSpec",
    "HrirBank",
    "HrirEntry",
    "IaccResult",
    "ItdScenario",
    "MtbeResult",
    "Signal",
    "SourceSpec",
    "SpatialCorrelation",
    "Spatiogram",
    "TimeBandEnergy",
    "WidthEstimate",
    "angular_width",
    "band_weights",
    "build_filterbank",
    "centroid_lag",
    "critical_bandwidth",
    "cross_correlation",
    "decorrelate",
    "delay",
    "detect_peaks",
    "dispersion",
    "gcc_phat",
    "iacc",
    "itd_samples",
    "load_bank",
    "magnitude_basis",
    "make_scenario",
    "mtbe",
    "mtbe_weighted",
    "normalize_pair",
    "patch_energies",
    "phase_basis",
    "posc",
    "relative_scores",
    "render_hrir",
    "render_itd",
    "save_bank",
    "spatial_correlation",
    "spatiogram",
    "synth_spherical_bank",
    "white_noise",
    "woodworth_itd",
]
