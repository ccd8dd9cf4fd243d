"""Gaussian pulse envelopes and the composite two-color drive field.

All time arguments are in ps, detunings in meV, pulse areas in units of pi.
The drive is expressed in the rotating frame of pulse 1, so only the beat
between the two carriers appears; its rate is the detuning difference
divided by hbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# hbar in meV ps; divides meV detunings into angular frequencies in rad/ps
HBAR = 0.6582119569

_FWHM_TO_SIGMA = math.sqrt(4.0 * math.log(2.0))


@dataclass(frozen=True)
class PulseSpec:
    """One Gaussian pulse of the bichromatic drive.

    Parameters
    ----------
    detuning : float
        Energy detuning in meV, negative for red detuning.
    area : float
        Integrated pulse area in units of pi, non-negative.
    fwhm : float
        Intensity full width at half maximum in ps, positive.
    delay : float
        Center time of the envelope in ps.
    phase : float
        Carrier phase in radians relative to pulse 1.
    """

    detuning: float
    area: float
    fwhm: float
    delay: float = 0.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        for name in ("detuning", "area", "fwhm", "delay", "phase"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.fwhm <= 0.0:
            raise ValueError(f"fwhm must be positive, got {self.fwhm}")
        if self.area < 0.0:
            raise ValueError(f"area must be non-negative, got {self.area}")

    @property
    def sigma(self) -> float:
        """Gaussian width in ps corresponding to the intensity FWHM."""
        return fwhm_to_sigma(self.fwhm)

    @property
    def amplitude(self) -> float:
        """Peak Rabi amplitude of the envelope in rad/ps."""
        return self.area * math.pi / math.sqrt(2.0 * math.pi * self.sigma**2)


def fwhm_to_sigma(fwhm: float) -> float:
    """Convert an intensity FWHM in ps to the Gaussian sigma in ps.

    sigma = fwhm / sqrt(4 ln 2).
    """
    if fwhm <= 0.0:
        raise ValueError(f"fwhm must be positive, got {fwhm}")
    return fwhm / _FWHM_TO_SIGMA


def gaussian_envelope(t, spec: PulseSpec):
    """Real Gaussian envelope of one pulse, evaluated at time t in ps.

    Returns area*pi / sqrt(2 pi sigma^2) * exp(-(t - delay)^2 / (2 sigma^2))
    in rad/ps. Accepts scalars or numpy arrays.
    """
    s = spec.sigma
    u = (np.asarray(t, dtype=float) - spec.delay) / s
    out = spec.amplitude * np.exp(-0.5 * u * u)
    return float(out) if np.isscalar(t) else out


def beat_frequency(pulse1: PulseSpec, pulse2: PulseSpec) -> float:
    """Carrier frequency difference of pulse 2 relative to pulse 1 in rad/ps."""
    return (pulse2.detuning - pulse1.detuning) / HBAR


def composite_field(t, pulse1: PulseSpec, pulse2: PulseSpec):
    """Complex Rabi amplitude of the two-color drive in rad/ps.

    In the frame rotating with pulse 1 the first envelope enters directly
    and the second is multiplied by exp(-i beat t + i phase) with
    beat = (detuning2 - detuning1) / hbar. Pulse 1's phase is the frame
    reference and is fixed at zero. Accepts scalars or numpy arrays.
    """
    beat = beat_frequency(pulse1, pulse2)
    e1 = gaussian_envelope(t, pulse1)
    e2 = gaussian_envelope(t, pulse2)
    carrier = np.exp(1j * (pulse2.phase - beat * np.asarray(t, dtype=float)))
    out = e1 + e2 * carrier
    return complex(out) if np.isscalar(t) else out
