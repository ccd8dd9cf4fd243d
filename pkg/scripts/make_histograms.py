#!/usr/bin/env python3
"""Generate synthetic coincidence histograms for the analysis commands.

Peaks are two-sided exponentials (emitter lifetime tau) on a uniform
100 ps grid, Poisson-sampled on top of a flat background. The defaults
write data/g2_synthetic.csv (12.5 ns peak train, center suppressed to
g2 = 0.03) and data/hom_synthetic.csv (3.3 ns pulse pair, visibility
0.44), matching configs/g2_synthetic.toml and configs/hom_synthetic.toml.
"""

import argparse
from pathlib import Path

import numpy as np

BIN = 100.0  # ps


def peak_profile(centers_ps: np.ndarray, weights, tau: float,
                 lo: float, n_bins: int) -> np.ndarray:
    """Expected counts per bin for two-sided exponential peaks."""
    edges = lo + BIN * np.arange(n_bins + 1)
    mean = np.zeros(n_bins)

    def cdf(x):
        # two-sided exponential, unit mass, centered at zero
        return np.where(x < 0.0, 0.5 * np.exp(x / tau),
                        1.0 - 0.5 * np.exp(-x / tau))

    for c, w in zip(centers_ps, weights):
        mean += w * (cdf(edges[1:] - c) - cdf(edges[:-1] - c))
    return mean


def write_binned(path: Path, lo: float, counts: np.ndarray) -> None:
    lines = ["bin_start_ps,count"]
    lines += [f"{lo + k * BIN},{int(c)}" for k, c in enumerate(counts)]
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({counts.sum()} counts in {counts.size} bins)")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20240817)
    ap.add_argument("--tau", type=float, default=300.0,
                    help="emitter lifetime in ps (default 300)")
    ap.add_argument("--side-counts", type=float, default=50000.0,
                    help="mean counts per side peak")
    ap.add_argument("--g2", type=float, default=0.03)
    ap.add_argument("--visibility", type=float, default=0.44)
    ap.add_argument("--background", type=float, default=2.0,
                    help="mean background counts per bin")
    ap.add_argument("--outdir", type=Path, default=Path("data"))
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    args.outdir.mkdir(parents=True, exist_ok=True)

    # g2 histogram: center plus three side peaks each way, 12.5 ns apart
    rep = 12500.0
    lo = -40650.0
    n = 813
    centers = np.arange(-3, 4) * rep
    weights = [args.side_counts] * 3 + [args.g2 * args.side_counts] \
        + [args.side_counts] * 3
    mean = peak_profile(centers, weights, args.tau, lo, n) + args.background
    write_binned(args.outdir / "g2_synthetic.csv", lo, rng.poisson(mean))

    # HOM histogram: pulse pair 3.3 ns apart, center carries 1 - v of the
    # side average
    spacing = 3300.0
    lo = -5200.0
    n = 104
    centers = np.array([-spacing, 0.0, spacing])
    weights = [args.side_counts, (1.0 - args.visibility) * args.side_counts,
               args.side_counts]
    mean = peak_profile(centers, weights, args.tau, lo, n) + args.background
    write_binned(args.outdir / "hom_synthetic.csv", lo, rng.poisson(mean))


if __name__ == "__main__":
    main()
