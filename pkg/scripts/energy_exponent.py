"""Measured growth exponents of the quadruple counts in |I|.

Only log-log slopes are reported; no bound is asserted.
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

from klpaths.stats import FourthMomentVariant, IntervalSpec, fourth_moment_count, loglog_slope


@dataclass(frozen=True)
class EnergyConfig:
    p: int = 100003
    lengths: tuple[int, ...] = (16, 32, 64, 128, 256)
    start: int = 1


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=EnergyConfig.p)
    args = ap.parse_args()
    cfg = EnergyConfig(p=args.p)
    out = {"config": asdict(cfg)}
    for v in FourthMomentVariant:
        counts = [fourth_moment_count(cfg.p, IntervalSpec(cfg.start, n), v) for n in cfg.lengths]
        out[v.value] = {"counts": counts, "slope": loglog_slope(cfg.lengths, counts)}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
