"""Command-line front end.

Every subcommand reads one TOML configuration file, validates it fully
before computing, and writes CSV/JSON (and optionally PGM) files whose
bytes depend only on the configuration. Exit codes: 0 success, 2 bad
configuration, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .dynamics import IntegrationError, SimConfig, evolve, final_population
from .photonstats import (CorrelationHistogram, WindowSpec, g2_corrected,
                          g2_raw, hom_visibility)
from .pulses import PulseSpec
from .serialize import (config_hash, canonical_json, histogram_from_binned_csv,
                        histogram_from_timetags_csv, pairs_to_csv, pgm_bytes,
                        refine_to_json, stat_to_json, sweep_to_csv,
                        sweep_to_json, trajectory_to_csv)
from .sweep import (SweepGrid, delay_series, find_maximum, normalize,
                    rabi_curve, refine_maximum, run_sweep)


class ConfigError(Exception):
    pass


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def _section(cfg: dict, name: str, required: bool = True) -> dict:
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing [{name}] section")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def _take(sec: dict, name: str, kind, default=None, required: bool = False,
          where: str = ""):
    if name not in sec:
        if required:
            raise ConfigError(f"missing key {name!r} in [{where}]")
        return default
    v = sec[name]
    if kind is float and isinstance(v, int):
        v = float(v)
    if not isinstance(v, kind):
        raise ConfigError(f"key {name!r} in [{where}] must be {kind.__name__}, "
                          f"got {type(v).__name__}")
    return v


def _build_pulse(cfg: dict, name: str) -> PulseSpec:
    sec = _section(cfg, name)
    try:
        return PulseSpec(
            detuning=_take(sec, "detuning", float, required=True, where=name),
            area=_take(sec, "area", float, required=True, where=name),
            fwhm=_take(sec, "fwhm", float, required=True, where=name),
            delay=_take(sec, "delay", float, 0.0, where=name),
            phase=_take(sec, "phase", float, 0.0, where=name),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [{name}]: {exc}") from exc


def _build_simconfig(cfg: dict, pulse2_optional: bool = False) -> SimConfig:
    p1 = _build_pulse(cfg, "pulse1")
    if pulse2_optional and "pulse2" not in cfg:
        p2 = PulseSpec(detuning=0.0, area=0.0, fwhm=p1.fwhm, delay=p1.delay)
    else:
        p2 = _build_pulse(cfg, "pulse2")
    sec = _section(cfg, "integration", required=False)
    try:
        return SimConfig(
            pulse1=p1,
            pulse2=p2,
            t_start=_take(sec, "t_start", float, where="integration"),
            t_end=_take(sec, "t_end", float, where="integration"),
            step=_take(sec, "step", float, 0.001, where="integration"),
            tolerance=_take(sec, "tolerance", float, where="integration"),
            record_stride=_take(sec, "record_stride", int, 1,
                                where="integration"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [integration]: {exc}") from exc


def _pulse_dict(p: PulseSpec) -> dict:
    return {"detuning": p.detuning, "area": p.area, "fwhm": p.fwhm,
            "delay": p.delay, "phase": p.phase}


def _sim_dict(sim: SimConfig) -> dict:
    t0, t1 = sim.window
    return {
        "pulse1": _pulse_dict(sim.pulse1),
        "pulse2": _pulse_dict(sim.pulse2),
        "t_start": t0,
        "t_end": t1,
        "step": sim.step,
        "tolerance": sim.tolerance,
        "record_stride": sim.record_stride,
    }


def _metadata(resolved: dict, extra: dict | None = None) -> dict:
    meta = {"tool": "swingup", "version": __version__,
            "config_sha256": config_hash(resolved)}
    if extra:
        meta.update(extra)
    return meta


def _outdir(outdir: str | None) -> Path:
    path = outdir or os.environ.get("SWINGUP_OUTDIR") or "."
    return Path(path)


def _basename(cfg: dict, default: str) -> str:
    sec = _section(cfg, "output", required=False)
    return _take(sec, "basename", str, default, where="output")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _write_bytes(path: Path, blob: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(blob)


def _threads(threads: int | None) -> int:
    if threads is not None:
        return threads
    env = os.environ.get("SWINGUP_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"SWINGUP_THREADS must be an integer, "
                              f"got {env!r}") from exc
    return 1


def _run(body) -> None:
    try:
        body()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except IntegrationError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    except OSError as exc:
        click.echo(f"i/o failure: {exc}", err=True)
        sys.exit(4)


_CONFIG_OPT = click.option("--config", "config_path", required=True,
                           type=click.Path(), help="TOML configuration file.")
_OUTDIR_OPT = click.option("--outdir", default=None,
                           help="Output directory (or $SWINGUP_OUTDIR).")


@click.group()
@click.version_option(version=__version__, prog_name="swingup")
def main() -> None:
    """Two-level-system swing-up simulator and histogram analysis."""


@main.command()
@_CONFIG_OPT
@_OUTDIR_OPT
def trace(config_path: str, outdir: str | None) -> None:
    """Propagate one configuration and write the time-resolved trace."""
    def body() -> None:
        cfg = _load_config(config_path)
        sim = _build_simconfig(cfg)
        base = _basename(cfg, "trace")
        resolved = {"command": "trace", "simulation": _sim_dict(sim)}
        traj = evolve(sim)
        out = _outdir(outdir)
        _write_text(out / f"{base}.csv", trajectory_to_csv(traj))
        meta = _metadata(resolved, {
            "final_population": traj.final_state.population,
            "samples": int(traj.times.size),
        })
        _write_text(out / f"{base}.json", canonical_json({"metadata": meta}))
        click.echo(f"final population {traj.final_state.population:.6f}; "
                   f"wrote {out / (base + '.csv')}")
    _run(body)


@main.command()
@_CONFIG_OPT
@_OUTDIR_OPT
@click.option("--threads", type=int, default=None,
              help="Worker threads for the sweep (or $SWINGUP_THREADS).")
def sweep(config_path: str, outdir: str | None, threads: int | None) -> None:
    """Run a 2-D detuning x area-ratio sweep."""
    def body() -> None:
        cfg = _load_config(config_path)
        sim = _build_simconfig(cfg)
        sec = _section(cfg, "sweep")
        det = np.linspace(
            _take(sec, "detuning_min", float, required=True, where="sweep"),
            _take(sec, "detuning_max", float, required=True, where="sweep"),
            _take(sec, "detuning_points", int, required=True, where="sweep"))
        rat = np.linspace(
            _take(sec, "ratio_min", float, required=True, where="sweep"),
            _take(sec, "ratio_max", float, required=True, where="sweep"),
            _take(sec, "ratio_points", int, required=True, where="sweep"))
        do_norm = _take(sec, "normalize", bool, False, where="sweep")
        do_image = _take(sec, "image", bool, False, where="sweep")
        try:
            grid = SweepGrid(det, rat, sim)
        except ValueError as exc:
            raise ConfigError(f"invalid [sweep]: {exc}") from exc
        nthreads = _threads(threads)
        base = _basename(cfg, "sweep")
        resolved = {"command": "sweep", "simulation": _sim_dict(sim),
                    "detuning_axis": [float(v) for v in det],
                    "ratio_axis": [float(v) for v in rat],
                    "normalize": do_norm}
        result = run_sweep(grid, threads=nthreads)
        if do_norm:
            result = normalize(result)
        d_max, r_max, f_max = find_maximum(result)
        out = _outdir(outdir)
        meta = _metadata(resolved, {
            "argmax": {"detuning": d_max, "ratio": r_max, "fidelity": f_max},
            "coordinate_scaling": "detuning in meV, ratio dimensionless",
        })
        _write_text(out / f"{base}.csv", sweep_to_csv(result))
        _write_text(out / f"{base}.json", sweep_to_json(result, meta))
        if do_image:
            _write_bytes(out / f"{base}.pgm", pgm_bytes(result.fidelity))
        click.echo(f"max fidelity {f_max:.6f} at detuning {d_max:.4f} meV, "
                   f"ratio {r_max:.4f}; wrote {out / (base + '.json')}")
    _run(body)


@main.command()
@_CONFIG_OPT
@_OUTDIR_OPT
def rabi(config_path: str, outdir: str | None) -> None:
    """Resonant Rabi curve over pulse areas."""
    def body() -> None:
        cfg = _load_config(config_path)
        sim = _build_simconfig(cfg, pulse2_optional=True)
        sec = _section(cfg, "rabi")
        areas = _take(sec, "areas", list, required=True, where="rabi")
        try:
            curve = rabi_curve([float(a) for a in areas], sim)
        except ValueError as exc:
            raise ConfigError(f"invalid [rabi]: {exc}") from exc
        base = _basename(cfg, "rabi")
        resolved = {"command": "rabi", "simulation": _sim_dict(sim),
                    "areas": [float(a) for a in areas]}
        cal_area, cal_pop = curve.first_maximum()
        out = _outdir(outdir)
        _write_text(out / f"{base}.csv",
                    pairs_to_csv(("area_pi", "population"),
                                 zip(curve.areas, curve.populations)))
        meta = _metadata(resolved, {"pi_calibration_area": cal_area,
                                    "pi_calibration_population": cal_pop})
        _write_text(out / f"{base}.json", canonical_json({"metadata": meta}))
        click.echo(f"pi calibration at area {cal_area}; "
                   f"wrote {out / (base + '.csv')}")
    _run(body)


@main.command()
@_CONFIG_OPT
@_OUTDIR_OPT
def delay(config_path: str, outdir: str | None) -> None:
    """Final population against pulse-2 delay."""
    def body() -> None:
        cfg = _load_config(config_path)
        sim = _build_simconfig(cfg)
        sec = _section(cfg, "delay")
        delays = _take(sec, "delays", list, required=True, where="delay")
        base = _basename(cfg, "delay")
        resolved = {"command": "delay", "simulation": _sim_dict(sim),
                    "delays": [float(d) for d in delays]}
        try:
            series = delay_series([float(d) for d in delays], sim)
        except ValueError as exc:
            raise ConfigError(f"invalid [delay]: {exc}") from exc
        out = _outdir(outdir)
        _write_text(out / f"{base}.csv",
                    pairs_to_csv(("delay_ps", "population"), series))
        _write_text(out / f"{base}.json",
                    canonical_json({"metadata": _metadata(resolved)}))
        click.echo(f"wrote {out / (base + '.csv')}")
    _run(body)


@main.command()
@_CONFIG_OPT
@_OUTDIR_OPT
def optimize(config_path: str, outdir: str | None) -> None:
    """Refine a (detuning, ratio) optimum off the sweep lattice."""
    def body() -> None:
        cfg = _load_config(config_path)
        sim = _build_simconfig(cfg)
        sec = _section(cfg, "optimize")
        seed = (_take(sec, "seed_detuning", float, required=True,
                      where="optimize"),
                _take(sec, "seed_ratio", float, required=True,
                      where="optimize"))
        max_evals = _take(sec, "max_evals", int, 500, where="optimize")
        base = _basename(cfg, "optimize")
        resolved = {"command": "optimize", "simulation": _sim_dict(sim),
                    "seed_detuning": seed[0], "seed_ratio": seed[1],
                    "max_evals": max_evals}
        try:
            res = refine_maximum(seed, sim, max_evals=max_evals)
        except ValueError as exc:
            raise ConfigError(f"invalid [optimize]: {exc}") from exc
        out = _outdir(outdir)
        meta = _metadata(resolved, {
            "coordinate_scaling": "detuning in meV, ratio dimensionless"})
        _write_text(out / f"{base}.json", refine_to_json(res, seed, meta))
        click.echo(f"refined fidelity {res.fidelity:.6f} at detuning "
                   f"{res.detuning:.4f} meV, ratio {res.ratio:.4f}"
                   f"{' (truncated)' if res.truncated else ''}")
    _run(body)


def _load_histogram(cfg: dict) -> tuple[CorrelationHistogram, dict]:
    sec = _section(cfg, "histogram")
    path = _take(sec, "file", str, required=True, where="histogram")
    fmt = _take(sec, "format", str, "timetags", where="histogram")
    rep = _take(sec, "rep_period", float, required=True, where="histogram")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read histogram file {path}: {exc}") from exc
    try:
        if fmt == "timetags":
            bw = _take(sec, "bin_width", float, required=True, where="histogram")
            t0 = _take(sec, "t0_offset", float, where="histogram")
            hist = histogram_from_timetags_csv(text, bw, rep, t0)
        elif fmt == "binned":
            hist = histogram_from_binned_csv(text, rep)
        else:
            raise ConfigError(f"histogram format must be 'timetags' or "
                              f"'binned', got {fmt!r}")
    except ValueError as exc:
        raise ConfigError(f"invalid histogram data in {path}: {exc}") from exc
    resolved = {"file": path, "format": fmt, "rep_period": rep,
                "bin_width": hist.bin_width, "t0_offset": hist.t0_offset,
                "total_counts": hist.total}
    return hist, resolved


def _load_windows(cfg: dict, need_background: bool) -> tuple[WindowSpec, str, float]:
    sec = _section(cfg, "windows")
    try:
        win = WindowSpec(
            peak_window=_take(sec, "peak", float, required=True,
                              where="windows"),
            background_window=_take(sec, "background", float,
                                    4.5 if need_background else 0.0,
                                    where="windows"),
            n_side_peaks=_take(sec, "side_peaks", int, 6, where="windows"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [windows]: {exc}") from exc
    locate = _take(sec, "locate", str, "search", where="windows")
    if locate not in ("search", "nominal"):
        raise ConfigError(f"locate must be 'search' or 'nominal', "
                          f"got {locate!r}")
    jitter = _take(sec, "jitter", float, 0.0, where="windows")
    return win, locate, jitter


@main.command()
@_CONFIG_OPT
@_OUTDIR_OPT
def g2(config_path: str, outdir: str | None) -> None:
    """Raw and background-corrected g2(0) from a coincidence histogram."""
    def body() -> None:
        cfg = _load_config(config_path)
        hist, hist_resolved = _load_histogram(cfg)
        win, locate, _ = _load_windows(cfg, need_background=True)
        base = _basename(cfg, "g2")
        windows = {"peak_window": win.peak_window,
                   "background_window": win.background_window,
                   "n_side_peaks": win.n_side_peaks, "locate": locate}
        resolved = {"command": "g2", "histogram": hist_resolved,
                    "windows": windows}
        try:
            raw = g2_raw(hist, win, locate=locate)
            corr = g2_corrected(hist, win, locate=locate)
        except ValueError as exc:
            raise ConfigError(f"histogram does not fit the windows: "
                              f"{exc}") from exc
        meta = _metadata(resolved)
        out = _outdir(outdir)
        _write_text(out / f"{base}.json", canonical_json({
            "raw": {"value": raw.value, "error_low": raw.error_low,
                    "error_high": raw.error_high, "flags": list(raw.flags)},
            "corrected": {"value": corr.value, "error_low": corr.error_low,
                          "error_high": corr.error_high,
                          "flags": list(corr.flags)},
            "windows_used": windows,
            "metadata": meta,
        }))
        click.echo(f"g2 raw {raw.value:.4f} corrected {corr.value:.4f}; "
                   f"wrote {out / (base + '.json')}")
    _run(body)


@main.command()
@_CONFIG_OPT
@_OUTDIR_OPT
def hom(config_path: str, outdir: str | None) -> None:
    """Two-photon interference visibility from a coincidence histogram."""
    def body() -> None:
        cfg = _load_config(config_path)
        hist, hist_resolved = _load_histogram(cfg)
        win, locate, jitter = _load_windows(cfg, need_background=False)
        base = _basename(cfg, "hom")
        windows = {"peak_window": win.peak_window,
                   "jitter": jitter, "locate": locate}
        resolved = {"command": "hom", "histogram": hist_resolved,
                    "windows": windows}
        try:
            res = hom_visibility(hist, win, jitter=jitter, locate=locate)
        except ValueError as exc:
            raise ConfigError(f"histogram does not fit the windows: "
                              f"{exc}") from exc
        out = _outdir(outdir)
        _write_text(out / f"{base}.json",
                    stat_to_json(res, windows, _metadata(resolved)))
        click.echo(f"visibility {res.value:.4f} "
                   f"(+{res.error_high:.4f}/-{res.error_low:.4f}); "
                   f"wrote {out / (base + '.json')}")
    _run(body)


if __name__ == "__main__":
    main()
