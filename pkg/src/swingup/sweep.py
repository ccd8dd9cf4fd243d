"""Parameter sweeps, optimum refinement and Rabi calibration.

2-D sweeps scan pulse 2's detuning against the area ratio alpha2/alpha1
with everything else frozen in a template SimConfig. Cells are fully
independent final-population evaluations, so serial and threaded runs
produce bit-identical matrices. A small derivative-free simplex ascent
refines grid optima off-lattice.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import IntegrationError, SimConfig, final_population


def _monotonic(values: np.ndarray) -> bool:
    d = np.diff(values)
    return bool(np.all(d > 0.0) or np.all(d < 0.0)) if d.size else True


@dataclass(frozen=True)
class SweepGrid:
    """Axes plus the fixed-parameter template for one 2-D sweep."""

    detuning_axis: np.ndarray
    ratio_axis: np.ndarray
    base: SimConfig

    def __post_init__(self) -> None:
        det = np.asarray(self.detuning_axis, dtype=float)
        rat = np.asarray(self.ratio_axis, dtype=float)
        object.__setattr__(self, "detuning_axis", det)
        object.__setattr__(self, "ratio_axis", rat)
        if det.size == 0 or rat.size == 0:
            raise ValueError("sweep axes must be non-empty")
        if not _monotonic(det) or not _monotonic(rat):
            raise ValueError("sweep axes must be strictly monotonic")
        if np.any(rat <= 0.0):
            raise ValueError("ratio axis must be positive")

    def cell_config(self, i: int, j: int) -> SimConfig:
        """SimConfig for ratio_axis[i] x detuning_axis[j]."""
        p2 = replace(self.base.pulse2,
                     detuning=float(self.detuning_axis[j]),
                     area=float(self.ratio_axis[i]) * self.base.pulse1.area)
        return replace(self.base, pulse2=p2)


@dataclass(frozen=True)
class SweepResult:
    """Fidelity matrix [ratio x detuning] over a SweepGrid."""

    grid: SweepGrid
    fidelity: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        fid = np.asarray(self.fidelity, dtype=float)
        object.__setattr__(self, "fidelity", fid)
        expect = (self.grid.ratio_axis.size, self.grid.detuning_axis.size)
        if fid.shape != expect:
            raise ValueError(f"fidelity shape {fid.shape} does not match "
                             f"axes {expect}")
        if np.any(fid < -1e-9) or np.any(fid > 1.0 + 1e-9):
            raise ValueError("fidelity entries outside [0, 1]")


def run_sweep(grid: SweepGrid, threads: int = 1) -> SweepResult:
    """Evaluate final_population on every grid cell.

    Cells are written to disjoint matrix entries, so any thread count
    yields the same bits. A failing cell aborts with its parameters; with
    several failures the first in row-major order is reported.
    """
    nr = grid.ratio_axis.size
    nd = grid.detuning_axis.size
    fid = np.empty((nr, nd), dtype=float)
    failures: dict[tuple[int, int], IntegrationError] = {}

    def cell(ij: tuple[int, int]) -> None:
        i, j = ij
        try:
            fid[i, j] = final_population(grid.cell_config(i, j))
        except IntegrationError as exc:
            fid[i, j] = np.nan
            failures[(i, j)] = exc

    cells = [(i, j) for i in range(nr) for j in range(nd)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(cell, cells))
    else:
        for ij in cells:
            cell(ij)
    if failures:
        (i, j) = min(failures)
        raise IntegrationError(
            f"sweep cell detuning={grid.detuning_axis[j]} meV, "
            f"ratio={grid.ratio_axis[i]} failed: {failures[(i, j)]}")
    return SweepResult(grid, fid)


def normalize(result: SweepResult) -> SweepResult:
    """Divide all cells by the map maximum; idempotent."""
    top = float(np.max(result.fidelity))
    if top <= 0.0:
        raise ValueError("cannot normalize an all-zero map")
    return SweepResult(result.grid, result.fidelity / top, normalized=True)


def find_maximum(result: SweepResult) -> tuple[float, float, float]:
    """Grid argmax as (detuning, ratio, fidelity).

    Ties go to the smallest |detuning|, then the smallest ratio.
    """
    det = result.grid.detuning_axis
    rat = result.grid.ratio_axis
    best = None
    best_key = None
    for i in range(rat.size):
        for j in range(det.size):
            key = (result.fidelity[i, j], -abs(det[j]), -rat[i])
            if best_key is None or key > best_key:
                best_key = key
                best = (float(det[j]), float(rat[i]),
                        float(result.fidelity[i, j]))
    return best


@dataclass(frozen=True)
class RefineResult:
    """Off-lattice optimum from simplex ascent."""

    detuning: float
    ratio: float
    fidelity: float
    evaluations: int
    truncated: bool


_REFINE_TOL = 1e-3
_REFINE_MAX_EVALS = 500
_REFINE_STEP = 0.05


def refine_maximum(seed: tuple[float, float], base: SimConfig,
                   max_evals: int = _REFINE_MAX_EVALS) -> RefineResult:
    """Nelder-Mead ascent of final_population from a (detuning, ratio) seed.

    Works in the plain (detuning in meV, ratio) coordinates, which are
    both order one over the physical domain. Points outside detuning < 0,
    ratio > 0 score a flat penalty of -1. Converges when the simplex
    diameter drops below 1e-3 in both coordinates; hitting the evaluation
    cap returns the best point seen with `truncated` set.
    """
    det0, rat0 = float(seed[0]), float(seed[1])
    if det0 >= 0.0 or rat0 <= 0.0:
        raise ValueError(f"seed ({det0}, {rat0}) outside detuning < 0, "
                         f"ratio > 0")

    nevals = 0
    best_pt = (det0, rat0)
    best_f = -np.inf

    def f(pt: tuple[float, float]) -> float:
        nonlocal nevals, best_pt, best_f
        nevals += 1
        det, rat = pt
        if det >= 0.0 or rat <= 0.0:
            return -1.0
        p2 = replace(base.pulse2, detuning=det, area=rat * base.pulse1.area)
        val = final_population(replace(base, pulse2=p2))
        if val > best_f:
            best_f = val
            best_pt = pt
        return val

    # vertices sorted best-first throughout
    pts = [(det0, rat0),
           (det0 + _REFINE_STEP, rat0),
           (det0, rat0 + _REFINE_STEP)]
    vals = [f(p) for p in pts]

    def sort() -> None:
        order = sorted(range(3), key=lambda k: vals[k], reverse=True)
        pts[:] = [pts[k] for k in order]
        vals[:] = [vals[k] for k in order]

    sort()
    truncated = False
    while True:
        dd = max(abs(pts[0][0] - pts[1][0]), abs(pts[0][0] - pts[2][0]),
                 abs(pts[1][0] - pts[2][0]))
        dr = max(abs(pts[0][1] - pts[1][1]), abs(pts[0][1] - pts[2][1]),
                 abs(pts[1][1] - pts[2][1]))
        if dd < _REFINE_TOL and dr < _REFINE_TOL:
            break
        if nevals >= max_evals:
            truncated = True
            break
        cx = 0.5 * (pts[0][0] + pts[1][0])
        cy = 0.5 * (pts[0][1] + pts[1][1])
        wx, wy = pts[2]
        refl = (cx + (cx - wx), cy + (cy - wy))
        fr = f(refl)
        if fr > vals[0]:
            # try stretching past the reflection
            expd = (cx + 2.0 * (cx - wx), cy + 2.0 * (cy - wy))
            fe = f(expd)
            if fe > fr:
                pts[2], vals[2] = expd, fe
            else:
                pts[2], vals[2] = refl, fr
        elif fr >= vals[1]:
            # ties accepted so a flat landscape keeps drifting to the cap
            pts[2], vals[2] = refl, fr
        else:
            cont = (cx + 0.5 * (wx - cx), cy + 0.5 * (wy - cy))
            fc = f(cont)
            if fc >= vals[2]:
                pts[2], vals[2] = cont, fc
            else:
                for k in (1, 2):
                    pts[k] = (0.5 * (pts[k][0] + pts[0][0]),
                              0.5 * (pts[k][1] + pts[0][1]))
                    vals[k] = f(pts[k])
        sort()
    return RefineResult(best_pt[0], best_pt[1], best_f, nevals, truncated)


@dataclass(frozen=True)
class RabiCurve:
    """Final population against pulse area for a single resonant pulse."""

    areas: np.ndarray
    populations: np.ndarray

    def __post_init__(self) -> None:
        ar = np.asarray(self.areas, dtype=float)
        po = np.asarray(self.populations, dtype=float)
        object.__setattr__(self, "areas", ar)
        object.__setattr__(self, "populations", po)
        if ar.size != po.size:
            raise ValueError("areas and populations lengths differ")
        if np.any(np.diff(ar) <= 0.0):
            raise ValueError("areas must be strictly increasing")

    def first_maximum(self) -> tuple[float, float]:
        """First local maximum (area, population), the pi-pulse calibration."""
        p = self.populations
        for i in range(1, p.size - 1):
            if p[i] > p[i - 1] and p[i] >= p[i + 1]:
                return float(self.areas[i]), float(p[i])
        k = int(np.argmax(p))
        return float(self.areas[k]), float(p[k])


def rabi_curve(areas, base: SimConfig) -> RabiCurve:
    """Sweep the area of a single resonant pulse.

    The template must be resonant (pulse1.detuning == 0) with pulse 2
    switched off (area 0); anything else is a domain error.
    """
    ar = np.asarray(areas, dtype=float)
    if np.any(np.diff(ar) <= 0.0):
        raise ValueError("areas must be strictly increasing")
    if base.pulse1.detuning != 0.0:
        raise ValueError("rabi_curve needs a resonant pulse 1 "
                         f"(detuning 0, got {base.pulse1.detuning})")
    if base.pulse2.area != 0.0:
        raise ValueError("rabi_curve needs pulse 2 switched off "
                         f"(area 0, got {base.pulse2.area})")
    pops = np.empty(ar.size, dtype=float)
    for k, a in enumerate(ar):
        cfg = replace(base, pulse1=replace(base.pulse1, area=float(a)))
        pops[k] = final_population(cfg)
    return RabiCurve(ar, pops)


def delay_series(delays, base: SimConfig) -> list[tuple[float, float]]:
    """Final population for each pulse-2 delay in ps.

    With the template's window left at the default, each configuration
    re-derives its own window, widening as the delayed envelope moves out.
    """
    out = []
    for tau in delays:
        cfg = replace(base, pulse2=replace(base.pulse2, delay=float(tau)))
        out.append((float(tau), final_population(cfg)))
    return out
