"""Compiled fixed-step propagation kernel.

One scalar kernel serves single traces, sweeps and series alike, so every
code path steps the density matrix through bit-identical arithmetic. The
state is (rho00, rho11, rho01); rho10 follows by conjugation, which makes
Hermiticity structural and trace drift a pure round-off signal.
"""

import numpy as np
from numba import njit


@njit(inline="always", nogil=True)
def _deriv(t, p0, p1, c, amp1, sig1, cen1, amp2, sig2, cen2, beat, phase, dd):
    u1 = (t - cen1) / sig1
    u2 = (t - cen2) / sig2
    th = phase - beat * t
    w = amp1 * np.exp(-0.5 * u1 * u1) \
        + amp2 * np.exp(-0.5 * u2 * u2) * (np.cos(th) + 1j * np.sin(th))
    z = w * c
    dc = -1j * (0.5 * w.conjugate() * (p1 - p0) - dd * c)
    return -z.imag, z.imag, dc


@njit(cache=True, nogil=True)
def propagate(amp1, sig1, cen1, amp2, sig2, cen2, beat, phase, dd,
              t0, dt, nsteps, stride, rec_pop, rec_coh):
    """Classical RK4 on the von Neumann equation from ground state.

    Drive parameters are two Gaussian envelopes (peak amplitude, sigma,
    center) with beat frequency and phase on the second, dd is the
    excited-state diagonal of H/hbar in rad/ps. Samples every `stride`
    steps land in rec_pop/rec_coh when those are non-empty; the final
    step is always recorded. Returns (rho00, rho11, Re rho01, Im rho01,
    max trace drift); the drift is NaN if the state left the float range.
    """
    p0 = 1.0
    p1 = 0.0
    c = 0.0 + 0.0j
    maxdrift = 0.0
    nrec = rec_pop.shape[0]
    irec = 0
    if nrec > 0:
        rec_pop[0] = p1
        rec_coh[0] = 0.0
        irec = 1
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(nsteps):
        t = t0 + k * dt
        a0, a1, ac = _deriv(t, p0, p1, c,
                            amp1, sig1, cen1, amp2, sig2, cen2, beat, phase, dd)
        b0, b1, bc = _deriv(t + half, p0 + half * a0, p1 + half * a1, c + half * ac,
                            amp1, sig1, cen1, amp2, sig2, cen2, beat, phase, dd)
        g0, g1, gc = _deriv(t + half, p0 + half * b0, p1 + half * b1, c + half * bc,
                            amp1, sig1, cen1, amp2, sig2, cen2, beat, phase, dd)
        e0, e1, ec = _deriv(t + dt, p0 + dt * g0, p1 + dt * g1, c + dt * gc,
                            amp1, sig1, cen1, amp2, sig2, cen2, beat, phase, dd)
        p0 = p0 + sixth * (a0 + 2.0 * (b0 + g0) + e0)
        p1 = p1 + sixth * (a1 + 2.0 * (b1 + g1) + e1)
        c = c + sixth * (ac + 2.0 * (bc + gc) + ec)
        drift = abs(p0 + p1 - 1.0)
        if drift > maxdrift:
            maxdrift = drift
        if irec < nrec and ((k + 1) % stride == 0 or k + 1 == nsteps):
            rec_pop[irec] = p1
            rec_coh[irec] = np.sqrt(c.real * c.real + c.imag * c.imag)
            irec += 1
    if np.isnan(p0) or np.isnan(p1) or np.isnan(c.real) or np.isnan(c.imag):
        maxdrift = np.nan
    return p0, p1, c.real, c.imag, maxdrift
