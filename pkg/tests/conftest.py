import numpy as np
import pytest

from swingup import CorrelationHistogram, PulseSpec, SimConfig

# frozen high-precision reference values (40-digit evaluation of the
# closed forms, rounded to double)
SIGMA_FWHM10 = 6.005612043932249
SIGMA_FWHM5 = 3.0028060219661246
ENVELOPE_PEAK_1PI_FWHM10 = 0.20869049285023034
DRIVE_ABS_T0_OPTIMUM = 3.5060002798838696


def optimum_config(**kw) -> SimConfig:
    """The documented best operating point: 8 pi at -0.7 meV plus
    8.8 pi at -2.05 meV, 10 ps FWHM, zero delay."""
    p1 = PulseSpec(detuning=-0.7, area=8.0, fwhm=10.0)
    p2 = PulseSpec(detuning=-2.05, area=8.8, fwhm=10.0)
    return SimConfig(p1, p2, **kw)


def resonant_config(area: float, **kw) -> SimConfig:
    p1 = PulseSpec(detuning=0.0, area=area, fwhm=10.0)
    p2 = PulseSpec(detuning=0.0, area=0.0, fwhm=10.0)
    return SimConfig(p1, p2, **kw)


def peak_train_histogram(center_count: int, side_count: int,
                         rep_ps: float = 12500.0, bin_width: float = 100.0,
                         n_side: int = 3, pedestal: int = 0,
                         pad_ps: float = 3100.0) -> CorrelationHistogram:
    """Synthetic g2-style histogram with one-bin peaks at 0, +-k*rep.

    Peaks sit exactly mid-bin (t0 offset -bin/2). `pedestal` adds a flat
    background to every bin.
    """
    half = n_side * rep_ps + pad_ps
    t0 = -half - bin_width / 2.0
    n = int(round(2.0 * half / bin_width)) + 1
    counts = np.full(n, pedestal, dtype=np.int64)

    def bin_of(t: float) -> int:
        return int(np.floor((t - t0) / bin_width))

    counts[bin_of(0.0)] += center_count
    for k in range(1, n_side + 1):
        counts[bin_of(k * rep_ps)] += side_count
        counts[bin_of(-k * rep_ps)] += side_count
    return CorrelationHistogram(bin_width, counts, rep_ps / 1000.0, t0)


def hom_histogram(center_count: int, left_count: int, right_count: int,
                  spacing_ps: float = 3300.0,
                  bin_width: float = 100.0) -> CorrelationHistogram:
    """Three one-bin peaks at -spacing, 0, +spacing."""
    half = spacing_ps + spacing_ps / 2.0 + 2.0 * bin_width
    t0 = -half - bin_width / 2.0
    n = int(round(2.0 * half / bin_width)) + 1
    counts = np.zeros(n, dtype=np.int64)

    def bin_of(t: float) -> int:
        return int(np.floor((t - t0) / bin_width))

    counts[bin_of(0.0)] += center_count
    counts[bin_of(-spacing_ps)] += left_count
    counts[bin_of(spacing_ps)] += right_count
    return CorrelationHistogram(bin_width, counts, spacing_ps / 1000.0, t0)


@pytest.fixture
def g2_hist():
    return peak_train_histogram(33, 1000)


@pytest.fixture
def hom_hist():
    return hom_histogram(561, 1000, 1000)
