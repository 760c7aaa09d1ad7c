"""KS distance between K_p(t0, .) and simulated K(t0) as p grows, plus second moments."""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from klpaths.arith import field_context
from klpaths.families import Kind, sweep_values
from klpaths.limit_series import SeriesConfig, simulate_batch
from klpaths.stats import ks_distance


@dataclass(frozen=True)
class ConvergenceConfig:
    primes: tuple[int, ...] = (101, 1009, 10007)
    t0: float = 0.5
    m: int = 1000
    samples: int = 100_000
    seed: int = 2024
    family: str = "kloosterman"
    workers: int = 1


def run(cfg: ConvergenceConfig) -> list[dict]:
    sim = simulate_batch(SeriesConfig(cfg.m, (cfg.t0,)), cfg.samples, cfg.seed, workers=cfg.workers)[:, 0]
    rows = []
    for p in cfg.primes:
        vals, _ = sweep_values(Kind(cfg.family), field_context(p), [cfg.t0], workers=cfg.workers)
        z = vals[:, 0]
        rows.append({
            "p": p,
            "ks_re": ks_distance(z.real, sim.real),
            "ks_im": ks_distance(z.imag, sim.imag),
            "second_moment": float(np.mean(np.abs(z) ** 2)),
        })
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="kloosterman", choices=["kloosterman", "birch"])
    ap.add_argument("--samples", type=int, default=ConvergenceConfig.samples)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    cfg = ConvergenceConfig(family=args.family, samples=args.samples, workers=args.workers)
    print(json.dumps({"config": asdict(cfg), "rows": run(cfg)}, indent=2))


if __name__ == "__main__":
    main()
