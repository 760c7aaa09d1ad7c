"""Sup-norm tails: simulated limit vs Kloosterman and Birch sweeps.

Prints P(||.||_inf >= A) and log(-log P) per threshold for each source.
"""

from __future__ import annotations

import argparse
import json
import math
from dataclasses import asdict, dataclass

from klpaths.families import Kind
from klpaths.limit_series import SeriesConfig
from klpaths.stats import Empirical, Simulated, ks_distance, sup_norm_samples, tail_from_samples


@dataclass(frozen=True)
class TailConfig:
    m: int = 512
    grid: int = 1024
    samples: int = 100_000
    seed: int = 2024
    p: int = 1009
    thresholds: tuple[float, ...] = (1.0, 1.5, 2.0, 2.5, 3.0)
    workers: int = 1


def summarize(sups, thresholds):
    est = tail_from_samples(sups, thresholds)
    out = []
    for a, q, c in zip(est.thresholds, est.probabilities, est.exceedances):
        ll = math.log(-math.log(q)) if 0 < q < 1 else None
        out.append({"A": a, "P": q, "exceedances": c, "loglog": ll})
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=TailConfig.samples)
    ap.add_argument("--p", type=int, default=TailConfig.p)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    cfg = TailConfig(samples=args.samples, p=args.p, workers=args.workers)
    sim = sup_norm_samples(Simulated(SeriesConfig.uniform(cfg.m, cfg.grid), cfg.samples, cfg.seed), workers=cfg.workers)
    report = {"config": asdict(cfg), "simulated": summarize(sim, cfg.thresholds)}
    for fam in (Kind.KLOOSTERMAN, Kind.BIRCH):
        emp = sup_norm_samples(Empirical(fam, cfg.p), workers=cfg.workers)
        report[fam.value] = {"tail": summarize(emp, cfg.thresholds), "ks_vs_simulated": ks_distance(emp, sim)}
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
