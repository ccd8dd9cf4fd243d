"""Deterministic text and image serialization.

All writers are pure functions from values to bytes or str, with floats
rendered through repr for exact round-tripping and JSON keys sorted, so
identical inputs always serialize to identical bytes. No timestamps or
environment details enter any output; runs are traceable through a
sha256 hash of the fully resolved configuration instead.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .dynamics import Trajectory
from .photonstats import CorrelationHistogram, StatResult
from .sweep import RefineResult, SweepResult


def _f(x) -> str:
    return repr(float(x))


def canonical_json(obj) -> str:
    """Sorted-key JSON with a trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def config_hash(config: dict) -> str:
    """sha256 over the canonical JSON of a resolved configuration dict."""
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def trajectory_to_csv(traj: Trajectory) -> str:
    lines = ["t_ps,population,coherence_abs"]
    for t, p, c in zip(traj.times, traj.excited_population,
                       traj.coherence_magnitude):
        lines.append(f"{_f(t)},{_f(p)},{_f(c)}")
    return "\n".join(lines) + "\n"


def parse_trajectory_csv(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = [ln.split(",") for ln in text.strip().splitlines()[1:]]
    cols = np.array([[float(v) for v in r] for r in rows], dtype=float)
    if cols.size == 0:
        return (np.zeros(0),) * 3
    return cols[:, 0], cols[:, 1], cols[:, 2]


def pairs_to_csv(header: tuple[str, str], pairs) -> str:
    lines = [",".join(header)]
    for a, b in pairs:
        lines.append(f"{_f(a)},{_f(b)}")
    return "\n".join(lines) + "\n"


def parse_pairs_csv(text: str) -> list[tuple[float, float]]:
    rows = text.strip().splitlines()[1:]
    return [tuple(float(v) for v in r.split(",")) for r in rows]


def sweep_to_csv(result: SweepResult) -> str:
    det = result.grid.detuning_axis
    rat = result.grid.ratio_axis
    lines = ["ratio_vs_detuning_mev," + ",".join(_f(d) for d in det)]
    for i in range(rat.size):
        row = ",".join(_f(v) for v in result.fidelity[i])
        lines.append(f"{_f(rat[i])},{row}")
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (detuning_axis, ratio_axis, fidelity matrix)."""
    lines = text.strip().splitlines()
    det = np.array([float(v) for v in lines[0].split(",")[1:]])
    rat = []
    fid = []
    for ln in lines[1:]:
        vals = [float(v) for v in ln.split(",")]
        rat.append(vals[0])
        fid.append(vals[1:])
    return det, np.array(rat), np.array(fid)


def sweep_to_json(result: SweepResult, metadata: dict) -> str:
    return canonical_json({
        "detuning_axis": [float(v) for v in result.grid.detuning_axis],
        "ratio_axis": [float(v) for v in result.grid.ratio_axis],
        "fidelity": [[float(v) for v in row] for row in result.fidelity],
        "normalized": result.normalized,
        "metadata": metadata,
    })


def parse_sweep_json(text: str) -> dict:
    return json.loads(text)


def refine_to_json(res: RefineResult, seed: tuple[float, float],
                   metadata: dict) -> str:
    return canonical_json({
        "detuning": res.detuning,
        "ratio": res.ratio,
        "fidelity": res.fidelity,
        "evaluations": res.evaluations,
        "truncated": res.truncated,
        "seed": {"detuning": seed[0], "ratio": seed[1]},
        "metadata": metadata,
    })


def stat_to_json(res: StatResult, windows: dict, metadata: dict) -> str:
    return canonical_json({
        "value": res.value,
        "error_low": res.error_low,
        "error_high": res.error_high,
        "flags": list(res.flags),
        "windows_used": windows,
        "metadata": metadata,
    })


def pgm_bytes(matrix: np.ndarray) -> bytes:
    """8-bit binary PGM; row 0 of the image is the last matrix row.

    Pixel value is round(255 * cell) clipped to [0, 255], so a normalized
    map maps its maximum to white.
    """
    m = np.asarray(matrix, dtype=float)
    pix = np.clip(np.rint(255.0 * m), 0, 255).astype(np.uint8)
    pix = pix[::-1]  # highest ratio row at the top of the image
    h, w = pix.shape
    return f"P5\n{w} {h}\n255\n".encode() + pix.tobytes()


def histogram_from_timetags_csv(text: str, bin_width: float,
                                rep_period: float,
                                t0_offset: float | None = None) -> CorrelationHistogram:
    from .photonstats import bin_timetags

    rows = text.strip().splitlines()
    if rows and rows[0].strip() == "delay_ps":
        rows = rows[1:]
    events = [float(r) for r in rows if r.strip()]
    return bin_timetags(events, bin_width, rep_period, t0_offset)


def histogram_from_binned_csv(text: str, rep_period: float) -> CorrelationHistogram:
    rows = [r for r in text.strip().splitlines() if r.strip()]
    if rows and rows[0].split(",")[0] == "bin_start_ps":
        rows = rows[1:]
    starts = []
    counts = []
    for r in rows:
        s, c = r.split(",")
        starts.append(float(s))
        counts.append(int(c))
    starts_arr = np.array(starts)
    if starts_arr.size < 2:
        raise ValueError("binned histogram needs at least two bins")
    widths = np.diff(starts_arr)
    if not np.allclose(widths, widths[0], rtol=0.0, atol=1e-9):
        raise ValueError("bin starts are not uniformly spaced")
    return CorrelationHistogram(float(widths[0]), np.array(counts),
                                rep_period, float(starts_arr[0]))
