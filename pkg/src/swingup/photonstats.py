"""Coincidence-histogram arithmetic: g2(0) and HOM visibility.

Histograms live on a uniform bin grid in ps; repetition spacing and
integration windows are quoted in ns. Window integrals count bins
fractionally by overlap, so results do not depend on how window edges
fall against the bin grid. Peak centers are found by a bounded
maximum-count search by default; `locate="nominal"` pins them to the
exact periodic positions, which is the right mode for synthetic data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_NS = 1000.0  # ps per ns


@dataclass(frozen=True)
class CorrelationHistogram:
    """Binned coincidence counts on a uniform time grid.

    bin_width and t0_offset are in ps, rep_period (the spacing between
    successive correlation peaks) in ns. Bin k spans
    [t0_offset + k*bin_width, t0_offset + (k+1)*bin_width).
    """

    bin_width: float
    counts: np.ndarray
    rep_period: float
    t0_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.bin_width <= 0.0:
            raise ValueError(f"bin_width must be positive, got {self.bin_width}")
        if self.rep_period <= 0.0:
            raise ValueError(f"rep_period must be positive, got {self.rep_period}")
        c = np.asarray(self.counts)
        if c.size and (np.any(c < 0) or np.any(c != np.round(c))):
            raise ValueError("counts must be non-negative integers")
        object.__setattr__(self, "counts", c.astype(np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def span(self) -> tuple[float, float]:
        """Covered time range in ps."""
        return self.t0_offset, self.t0_offset + self.bin_width * self.counts.size


@dataclass(frozen=True)
class WindowSpec:
    """Integration windows in ns and the number of reference side peaks."""

    peak_window: float
    background_window: float = 0.0
    n_side_peaks: int = 6

    def __post_init__(self) -> None:
        if self.peak_window <= 0.0:
            raise ValueError(f"peak_window must be positive, got {self.peak_window}")
        if self.background_window < 0.0:
            raise ValueError("background_window must be non-negative")
        if self.n_side_peaks < 2 or self.n_side_peaks % 2 != 0:
            raise ValueError("n_side_peaks must be an even count >= 2 "
                             "(peaks are split symmetrically around zero)")


@dataclass(frozen=True)
class StatResult:
    """Value with asymmetric error bounds and diagnostic flags."""

    value: float
    error_low: float
    error_high: float
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.error_low < 0.0 or self.error_high < 0.0:
            raise ValueError("errors must be non-negative")


def bin_timetags(events, bin_width: float, rep_period: float,
                 t0_offset: float | None = None) -> CorrelationHistogram:
    """Histogram time tags in ps into uniform bins.

    Without t0_offset the grid starts on the bin boundary at or below the
    earliest event. Total counts are conserved exactly.
    """
    if bin_width <= 0.0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    ev = np.asarray(list(events), dtype=float)
    if ev.size == 0:
        return CorrelationHistogram(bin_width, np.zeros(0, dtype=np.int64),
                                    rep_period, 0.0 if t0_offset is None else t0_offset)
    if t0_offset is None:
        t0_offset = math.floor(ev.min() / bin_width) * bin_width
        if ev.min() < t0_offset:  # guard the floor against rounding up
            t0_offset -= bin_width
    idx = np.floor((ev - t0_offset) / bin_width).astype(np.int64)
    if np.any(idx < 0):
        raise ValueError("events precede t0_offset")
    return CorrelationHistogram(bin_width, np.bincount(idx), rep_period,
                                float(t0_offset))


def window_area(hist: CorrelationHistogram, center: float, width: float) -> float:
    """Counts inside [center - width/2, center + width/2] in ps.

    Bins overlapping a window edge contribute in proportion to the
    overlapped fraction of the bin.
    """
    lo = center - 0.5 * width
    hi = center + 0.5 * width
    n = hist.counts.size
    edges = hist.t0_offset + hist.bin_width * np.arange(n + 1)
    ov = np.minimum(hi, edges[1:]) - np.maximum(lo, edges[:-1])
    np.clip(ov, 0.0, None, out=ov)
    return float(np.dot(hist.counts, ov) / hist.bin_width)


def _locate_peak(hist: CorrelationHistogram, nominal: float, locate: str) -> float:
    if locate == "nominal":
        return nominal
    if locate != "search":
        raise ValueError(f"locate must be 'search' or 'nominal', got {locate!r}")
    quarter = 0.25 * hist.rep_period * _NS
    centers = hist.t0_offset + hist.bin_width * (np.arange(hist.counts.size) + 0.5)
    near = np.abs(centers - nominal) <= quarter
    if not np.any(near):
        raise ValueError(f"no bins within {quarter} ps of nominal peak "
                         f"at {nominal} ps")
    sub = np.where(near, hist.counts, -1)
    return float(centers[int(np.argmax(sub))])


def _require_span(hist: CorrelationHistogram, lo: float, hi: float) -> None:
    s0, s1 = hist.span
    if lo < s0 - 1e-9 or hi > s1 + 1e-9:
        raise ValueError(f"histogram span [{s0}, {s1}] ps does not cover "
                         f"the required windows [{lo}, {hi}] ps")


def _peak_areas(hist: CorrelationHistogram, win: WindowSpec,
                locate: str) -> tuple[float, list[float]]:
    rep = hist.rep_period * _NS
    pw = win.peak_window * _NS
    if pw > rep:
        raise ValueError(f"peak_window {win.peak_window} ns exceeds "
                         f"rep_period {hist.rep_period} ns")
    per_side = win.n_side_peaks // 2
    _require_span(hist, -per_side * rep - 0.5 * pw, per_side * rep + 0.5 * pw)
    center = _locate_peak(hist, 0.0, locate)
    a_center = window_area(hist, center, pw)
    a_side = []
    for k in range(1, per_side + 1):
        for sgn in (-1.0, 1.0):
            c = _locate_peak(hist, sgn * k * rep, locate)
            a_side.append(window_area(hist, c, pw))
    return a_center, a_side


def g2_raw(hist: CorrelationHistogram, win: WindowSpec,
           locate: str = "search") -> StatResult:
    """Center-peak area over the mean side-peak area, with Poisson error.

    The error is value / sqrt(center area); a zero-count center returns
    value 0 with a zero-center flag.
    """
    a_center, a_side = _peak_areas(hist, win, locate)
    mean_side = sum(a_side) / len(a_side)
    if mean_side <= 0.0:
        raise ValueError("zero side-peak area, cannot normalize")
    value = a_center / mean_side
    if a_center == 0.0:
        return StatResult(0.0, 0.0, 0.0, ("zero-center",))
    err = value / math.sqrt(a_center)
    return StatResult(value, err, err)


def g2_corrected(hist: CorrelationHistogram, win: WindowSpec,
                 locate: str = "search") -> StatResult:
    """Background-subtracted center-to-side ratio.

    The mean count of the inter-peak background regions, scaled by
    peak_window / background_window, is subtracted from every peak area.
    Areas driven negative are clamped to zero and flagged. The error is
    raw_center / mean_raw_side**2; note this estimator deliberately mixes
    raw areas of different powers and is not a propagated uncertainty of
    the subtracted value.
    """
    if win.background_window <= 0.0:
        raise ValueError("background_window must be positive for g2_corrected")
    rep = hist.rep_period * _NS
    pw = win.peak_window * _NS
    bw = win.background_window * _NS
    if bw > rep - pw:
        raise ValueError(f"background_window {win.background_window} ns does "
                         f"not fit strictly between {win.peak_window} ns peak "
                         f"windows at {hist.rep_period} ns spacing")
    a_center, a_side = _peak_areas(hist, win, locate)
    per_side = win.n_side_peaks // 2
    bg = []
    for k in range(per_side):
        for sgn in (-1.0, 1.0):
            bg.append(window_area(hist, sgn * (k + 0.5) * rep, bw))
    scaled_bg = (sum(bg) / len(bg)) * (pw / bw)

    flags: list[str] = []

    def corrected(a: float) -> float:
        c = a - scaled_bg
        if c < 0.0:
            flags.append("clamped-negative")
            return 0.0
        return c

    c_center = corrected(a_center)
    c_side = [corrected(a) for a in a_side]
    mean_raw_side = sum(a_side) / len(a_side)
    mean_side = sum(c_side) / len(c_side)
    if mean_side <= 0.0:
        if c_center == 0.0:
            return StatResult(0.0, 0.0, 0.0, tuple(dict.fromkeys(flags)) + ("degenerate",))
        raise ValueError("corrected side-peak area is zero with nonzero "
                         "center, cannot normalize")
    value = c_center / mean_side
    if mean_raw_side <= 0.0:
        raise ValueError("zero raw side-peak area, cannot normalize")
    err = a_center / mean_raw_side**2
    return StatResult(value, err, err, tuple(dict.fromkeys(flags)))


def hom_visibility(hist: CorrelationHistogram, win: WindowSpec,
                   jitter: float = 0.0, locate: str = "search") -> StatResult:
    """Two-photon interference visibility 1 - 2 A_center / (A_left + A_right).

    hist.rep_period is the peak spacing (the pulse separation within an
    excitation pair). The integration window is win.peak_window wide; the
    conventional choice is the full peak spacing, so adjacent windows
    tile without gaps. Errors are the envelope of the Poissonian sigma
    and the shifts obtained by moving both window edges in or out by
    `jitter` ps.
    """
    rep = hist.rep_period * _NS
    pw = win.peak_window * _NS
    if pw > 2.0 * rep:
        raise ValueError(f"peak_window {win.peak_window} ns exceeds twice "
                         f"the peak spacing {hist.rep_period} ns")
    _require_span(hist, -rep - 0.5 * pw, rep + 0.5 * pw)
    c0 = _locate_peak(hist, 0.0, locate)
    cl = _locate_peak(hist, -rep, locate)
    cr = _locate_peak(hist, rep, locate)

    def vis(width: float) -> tuple[float, float, float]:
        a_c = window_area(hist, c0, width)
        a_l = window_area(hist, cl, width)
        a_r = window_area(hist, cr, width)
        s = a_l + a_r
        if s <= 0.0:
            raise ValueError("zero side-peak area, cannot normalize")
        return 1.0 - 2.0 * a_c / s, a_c, s

    value, a_c, s = vis(pw)
    sigma = (2.0 / s) * math.sqrt(a_c * (1.0 + a_c / s))
    lo_dev = 0.0
    hi_dev = 0.0
    if jitter > 0.0:
        for width in (pw - 2.0 * jitter, pw + 2.0 * jitter):
            if width <= 0.0:
                continue
            v_alt, _, _ = vis(width)
            lo_dev = max(lo_dev, value - v_alt)
            hi_dev = max(hi_dev, v_alt - value)
    return StatResult(value, max(sigma, lo_dev), max(sigma, hi_dev))
