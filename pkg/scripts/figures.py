"""Render the two reference pictures: a Kloosterman path and a sample of the random series."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from klpaths.cli import dispatch


@dataclass(frozen=True)
class FigureConfig:
    p: int = 10007
    a: int = 1
    m: int = 5000
    grid: int = 10000
    seed: int = 7
    out: str = "figures"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=FigureConfig.out)
    ap.add_argument("--seed", type=int, default=FigureConfig.seed)
    args = ap.parse_args()
    cfg = FigureConfig(out=args.out, seed=args.seed)
    for fam in ("kloosterman", "birch"):
        dispatch(["path", "--family", fam, "--p", str(cfg.p), "--a", str(cfg.a), "--format", "svg", "--output-dir", cfg.out])
    dispatch(["path", "--family", "kloosterman", "--p", str(cfg.p), "--ordering", "geometric", "--format", "svg",
              "-o", f"{cfg.out}/path-kloosterman-p{cfg.p}-a{cfg.a}-geometric.svg"])
    dispatch(["simulate", "--m", str(cfg.m), "--grid", str(cfg.grid), "--seed", str(cfg.seed), "--format", "svg",
              "--output-dir", cfg.out])


if __name__ == "__main__":
    main()
