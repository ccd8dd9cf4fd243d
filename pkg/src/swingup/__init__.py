"""Two-level-system swing-up simulator and photon-statistics toolkit."""

__version__ = "1.0.0"

from .dynamics import (DensityMatrix, IntegrationError, SimConfig, Trajectory,
                       evolve, final_population, hamiltonian)
from .photonstats import (CorrelationHistogram, StatResult, WindowSpec,
                          bin_timetags, g2_corrected, g2_raw, hom_visibility,
                          window_area)
from .pulses import (HBAR, PulseSpec, beat_frequency, composite_field,
                     fwhm_to_sigma, gaussian_envelope)
from .sweep import (RabiCurve, RefineResult, SweepGrid, SweepResult,
                    delay_series, find_maximum, normalize, rabi_curve,
                    refine_maximum, run_sweep)

__all__ = [
    "DensityMatrix", "IntegrationError", "SimConfig", "Trajectory",
    "evolve", "final_population", "hamiltonian",
    "CorrelationHistogram", "StatResult", "WindowSpec",
    "bin_timetags", "g2_corrected", "g2_raw", "hom_visibility", "window_area",
    "HBAR", "PulseSpec", "beat_frequency", "composite_field",
    "fwhm_to_sigma", "gaussian_envelope",
    "RabiCurve", "RefineResult", "SweepGrid", "SweepResult",
    "delay_series", "find_maximum", "normalize", "rabi_curve",
    "refine_maximum", "run_sweep",
    "__version__",
]
