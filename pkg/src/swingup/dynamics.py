"""Density-matrix propagation of the driven two-level system.

The Hamiltonian in the rotating frame of pulse 1, divided by hbar, is

    H/hbar = [[0,        conj(W)/2],
              [W(t)/2,   -detuning1/hbar]]

with W(t) the composite drive from `pulses`. Propagation integrates the
von Neumann equation with a fixed-step classical RK4 by default; an
adaptive mode is available through `SimConfig.tolerance`. Only rho00,
rho11 and rho01 are stepped, rho10 is reconstructed by conjugation, and
the trace is never renormalized so its drift stays a honest error signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import propagate
from .pulses import HBAR, PulseSpec, beat_frequency, composite_field

# widened default window half-width in ps and envelope coverage in sigmas
_DEFAULT_HALF_WINDOW = 40.0
_COVERAGE_SIGMAS = 3.0


class IntegrationError(RuntimeError):
    """Raised when propagation loses the trace beyond tolerance."""


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 Hermitian density matrix; rho10 is conj(rho01) by construction."""

    rho00: complex
    rho01: complex
    rho11: complex

    @property
    def rho10(self) -> complex:
        return self.rho01.conjugate()

    @property
    def trace(self) -> float:
        return self.rho00.real + self.rho11.real

    @property
    def purity(self) -> float:
        """Tr rho^2, equal to 1 for pure states."""
        return (self.rho00.real**2 + self.rho11.real**2
                + 2.0 * abs(self.rho01) ** 2)

    @property
    def population(self) -> float:
        """Excited-state occupation <1|rho|1>."""
        return self.rho11.real

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01],
                         [self.rho10, self.rho11]], dtype=complex)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.as_matrix())


@dataclass(frozen=True)
class SimConfig:
    """Pulse pair plus integration window and step control.

    Leaving t_start/t_end unset selects the default window of +-40 ps
    around pulse 1, widened if either envelope's center +-3 sigma sticks
    out. Explicit windows must cover both centers +-3 sigma. Setting
    `tolerance` switches to the adaptive integrator; `step` then only
    fixes the output sampling grid.
    """

    pulse1: PulseSpec
    pulse2: PulseSpec
    t_start: float | None = None
    t_end: float | None = None
    step: float = 0.001
    tolerance: float | None = None
    record_stride: int = 1

    def __post_init__(self) -> None:
        if self.step <= 0.0 or not math.isfinite(self.step):
            raise ValueError(f"step must be positive, got {self.step}")
        if self.tolerance is not None and not 0.0 < self.tolerance < 1.0:
            raise ValueError(f"tolerance must be in (0, 1), got {self.tolerance}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be a positive integer, "
                             f"got {self.record_stride}")
        t0, t1 = self.window
        if t0 >= t1:
            raise ValueError(f"t_start {t0} must precede t_end {t1}")
        lo, hi = self._support()
        if t0 > lo + 1e-12 or t1 < hi - 1e-12:
            raise ValueError(
                f"window [{t0}, {t1}] does not cover both pulse centers "
                f"+-{_COVERAGE_SIGMAS:.0f} sigma [{lo}, {hi}]")

    def _support(self) -> tuple[float, float]:
        lo = min(p.delay - _COVERAGE_SIGMAS * p.sigma
                 for p in (self.pulse1, self.pulse2))
        hi = max(p.delay + _COVERAGE_SIGMAS * p.sigma
                 for p in (self.pulse1, self.pulse2))
        return lo, hi

    @property
    def window(self) -> tuple[float, float]:
        """Resolved (t_start, t_end) in ps."""
        lo, hi = self._support()
        t0 = self.t_start
        t1 = self.t_end
        if t0 is None:
            t0 = min(self.pulse1.delay - _DEFAULT_HALF_WINDOW, lo)
        if t1 is None:
            t1 = max(self.pulse1.delay + _DEFAULT_HALF_WINDOW, hi)
        return float(t0), float(t1)

    def n_steps(self) -> int:
        t0, t1 = self.window
        return max(1, int(round((t1 - t0) / self.step)))


@dataclass(frozen=True)
class Trajectory:
    """Sampled time evolution plus the final state."""

    times: np.ndarray
    excited_population: np.ndarray
    coherence_magnitude: np.ndarray
    final_state: DensityMatrix


def hamiltonian(t: float, config: SimConfig) -> np.ndarray:
    """H/hbar at time t as an exactly Hermitian 2x2 matrix in rad/ps."""
    w = composite_field(t, config.pulse1, config.pulse2)
    dd = -config.pulse1.detuning / HBAR
    return np.array([[0.0, np.conj(w) / 2.0],
                     [w / 2.0, dd]], dtype=complex)


def _kernel_args(config: SimConfig) -> tuple:
    p1, p2 = config.pulse1, config.pulse2
    t0, t1 = config.window
    nsteps = config.n_steps()
    dt = config.step
    return (p1.amplitude, p1.sigma, p1.delay,
            p2.amplitude, p2.sigma, p2.delay,
            beat_frequency(p1, p2), p2.phase,
            -p1.detuning / HBAR,
            t0, dt, nsteps)


_DRIFT_LIMIT = 1e-6
_EMPTY = np.empty(0, dtype=float)


def _check_drift(maxdrift: float, config: SimConfig) -> None:
    if not maxdrift <= _DRIFT_LIMIT:
        raise IntegrationError(
            f"trace drift {maxdrift:.3e} exceeds {_DRIFT_LIMIT:.0e} at "
            f"step {config.step} ps; reduce the step or use adaptive mode")


def _record_times(config: SimConfig) -> np.ndarray:
    t0, _ = config.window
    nsteps = config.n_steps()
    stride = int(config.record_stride)
    idx = list(range(0, nsteps + 1, stride))
    if nsteps % stride != 0:
        idx.append(nsteps)
    return t0 + config.step * np.asarray(idx, dtype=float)


def evolve(config: SimConfig) -> Trajectory:
    """Propagate |0><0| over the window and return the sampled trajectory."""
    if config.tolerance is not None:
        return _evolve_adaptive(config)
    times = _record_times(config)
    pop = np.empty(times.size, dtype=float)
    coh = np.empty(times.size, dtype=float)
    args = _kernel_args(config)
    p0, p1v, cr, ci, maxdrift = propagate(*args, int(config.record_stride),
                                          pop, coh)
    _check_drift(maxdrift, config)
    final = DensityMatrix(complex(p0), complex(cr, ci), complex(p1v))
    return Trajectory(times, pop, coh, final)


def final_population(config: SimConfig) -> float:
    """Excited-state occupation at the window end, without a trajectory."""
    if config.tolerance is not None:
        return _evolve_adaptive(config).final_state.population
    args = _kernel_args(config)
    _, p1v, _, _, maxdrift = propagate(*args, 1, _EMPTY, _EMPTY)
    _check_drift(maxdrift, config)
    return p1v


def _evolve_adaptive(config: SimConfig) -> Trajectory:
    # real-packed state (p0, p1, Re c, Im c); solve_ivp wants real vectors
    from scipy.integrate import solve_ivp

    p1, p2 = config.pulse1, config.pulse2
    beat = beat_frequency(p1, p2)
    dd = -p1.detuning / HBAR
    a1, s1, c1 = p1.amplitude, p1.sigma, p1.delay
    a2, s2, c2 = p2.amplitude, p2.sigma, p2.delay
    ph = p2.phase

    def rhs(t, y):
        p0v, p1v, cr, ci = y
        c = complex(cr, ci)
        u1 = (t - c1) / s1
        u2 = (t - c2) / s2
        th = ph - beat * t
        w = a1 * math.exp(-0.5 * u1 * u1) \
            + a2 * math.exp(-0.5 * u2 * u2) * complex(math.cos(th), math.sin(th))
        z = w * c
        dc = -1j * (0.5 * w.conjugate() * (p1v - p0v) - dd * c)
        return (-z.imag, z.imag, dc.real, dc.imag)

    times = _record_times(config)
    tol = config.tolerance
    sol = solve_ivp(rhs, (times[0], times[-1]), (1.0, 0.0, 0.0, 0.0),
                    method="DOP853", rtol=tol, atol=tol * 1e-3, t_eval=times)
    if not sol.success:
        raise IntegrationError(f"adaptive integration failed: {sol.message}")
    p0s, p1s, crs, cis = sol.y
    maxdrift = float(np.max(np.abs(p0s + p1s - 1.0)))
    if math.isnan(maxdrift):
        maxdrift = float("nan")
    _check_drift(maxdrift, config)
    final = DensityMatrix(complex(p0s[-1]), complex(crs[-1], cis[-1]),
                          complex(p1s[-1]))
    return Trajectory(times, p1s.copy(), np.hypot(crs, cis), final)
