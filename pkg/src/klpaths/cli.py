"""Command-line front end: ``klpaths <subcommand> [flags]``.

Exit status is 0 on success, 1 on a domain error (composite p, a = 0, ...)
and 2 on a usage error.  A ``--config FILE`` of ``key = value`` lines
supplies defaults for any flag; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .arith import DomainError, field_context
from .families import Kind, Ordering, SumFamily, complete_sum, n_segments, partial_sum_vector, sup_norm, sweep, sweep_values
from .limit_series import SeriesConfig, Variant, simulate_batch, simulate_series
from .render import csv_text, dumps, svg_polyline
from .sato_tate import SatoTateSampler
from .stats import (
    Empirical,
    Expansion,
    IntervalSpec,
    MomentSpec,
    MonteCarlo,
    Simulated,
    kloosterman2_fourth_moment_from_counts,
    empirical_mixed_moment,
    energy_counts,
    ks_distance,
    short_sum_moment,
    sup_norm_samples,
    tail_from_samples,
    theoretical_mixed_moment,
)

OUTPUT_ENV = "KLPATHS_OUTPUT_DIR"
FAMILIES = [k.value for k in Kind]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _add_common(sp: argparse.ArgumentParser, formats: list[str], default: str) -> None:
    sp.add_argument("--config", help="key = value file providing flag defaults")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--output-dir", default=None, help=f"artifact directory (default ${OUTPUT_ENV} or .)")
    sp.add_argument("-o", "--output", default=None, help="artifact path; '-' writes to stdout")
    sp.add_argument("--format", choices=formats, default=default)


def _add_family(sp: argparse.ArgumentParser, default: str = "kloosterman") -> None:
    sp.add_argument("--family", choices=FAMILIES, default=default)
    sp.add_argument("--p", type=int, required=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="klpaths", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("path", help="partial-sum path of one exponential sum")
    _add_family(sp)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--alpha", type=int, default=1)
    sp.add_argument("--ordering", choices=[o.value for o in Ordering], default="natural")
    _add_common(sp, ["csv", "json", "svg"], "csv")

    sp = sub.add_parser("simulate", help="one realization of the limiting random series")
    sp.add_argument("--m", type=int, default=5000)
    sp.add_argument("--grid", type=int, default=10000, help="number of segments N; t = j/N")
    sp.add_argument("--variant", choices=[v.value for v in Variant], default="standard")
    _add_common(sp, ["csv", "json", "svg"], "csv")

    sp = sub.add_parser("moments", help="empirical vs predicted mixed moment")
    _add_family(sp)
    sp.add_argument("--spec", default="0.5:1,1", help="'t:n,m;t:n,m'")
    sp.add_argument("--theory", choices=["expansion", "montecarlo", "none"], default="expansion")
    sp.add_argument("--H", type=int, default=10_000)
    sp.add_argument("--samples", type=int, default=20000)
    sp.add_argument("--m", type=int, default=1000)
    _add_common(sp, ["json"], "json")

    sp = sub.add_parser("dist", help="KS distance between K_p(t) and simulated K(t)")
    _add_family(sp)
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--m", type=int, default=1000)
    sp.add_argument("--samples", type=int, default=100000)
    _add_common(sp, ["json"], "json")

    sp = sub.add_parser("tails", help="sup-norm tail probabilities")
    sp.add_argument("--source", choices=["empirical", "simulated"], default="simulated")
    _add_family(sp, default="birch")
    sp.add_argument("--m", type=int, default=512)
    sp.add_argument("--grid", type=int, default=1024)
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--thresholds", default="1.0,1.5,2.0")
    _add_common(sp, ["csv", "json"], "csv")

    sp = sub.add_parser("shortsum", help="averaged moment of a short interval sum")
    _add_family(sp, default="kloosterman2")
    sp.add_argument("--start", type=int, default=1)
    sp.add_argument("--length", type=int, required=False)
    sp.add_argument("--alpha-moment", type=int, default=4, dest="moment")
    _add_common(sp, ["json"], "json")

    sp = sub.add_parser("sweep", help="complete sums and sup norms over a parameter space")
    _add_family(sp)
    sp.add_argument("--primes", default=None, help="comma-separated primes (overrides --p)")
    sp.add_argument("--t", default="", help="comma-separated t values to record")
    sp.add_argument("--ordering", choices=[o.value for o in Ordering], default="natural")
    _add_common(sp, ["csv", "json"], "csv")
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = _read_config(args.config)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    known = {a.dest: a for a in sub._actions}  # noqa: SLF001
    defaults = {}
    for k, v in cfg.items():
        if k not in known:
            parser.error(f"unknown config key {k!r}")
        action = known[k]
        defaults[k] = action.type(v) if action.type else v
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _meta(args: argparse.Namespace, **extra) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in {"output", "output_dir", "config", "workers"}}
    return {"tool": "klpaths", "version": __version__, "seed": args.seed, "parameters": params, **extra}


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required for {args.command}")


class UsageError(Exception):
    pass


def _write(args: argparse.Namespace, stem: str, text: str) -> None:
    if args.output == "-":
        sys.stdout.write(text)
        return
    if args.output:
        target = Path(args.output)
    else:
        base = Path(args.output_dir or os.environ.get(OUTPUT_ENV) or ".")
        target = base / f"{stem}.{args.format}"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    print(target)


def _path_rows(verts: np.ndarray):
    n = len(verts) - 1
    for j, z in enumerate(verts):
        yield j, (j / n if n else 0.0), float(z.real), float(z.imag)


def cmd_path(args) -> None:
    _require(args, "p")
    ctx = field_context(args.p)
    fam = SumFamily(Kind(args.family), a=args.a, alpha=args.alpha, ordering=Ordering(args.ordering))
    path = partial_sum_vector(fam, ctx)
    verts = path.vertices
    end = complete_sum(fam, ctx)
    meta = _meta(args, complete_sum=end, sup_norm=sup_norm(path), segments=path.n_segments)
    stem = f"path-{args.family}-p{args.p}-a{args.a}" + (f"-alpha{args.alpha}" if args.family == "kloosterman2" else "")
    if args.format == "svg":
        text = svg_polyline(verts, meta)
    elif args.format == "csv":
        text = csv_text(meta, ["index", "t", "re", "im"], _path_rows(verts))
    else:
        text = dumps({**meta, "vertices": [[float(z.real), float(z.imag)] for z in verts]}) + "\n"
    _write(args, stem, text)


def cmd_simulate(args) -> None:
    cfg = SeriesConfig.uniform(args.m, args.grid, Variant(args.variant))
    sample = simulate_series(cfg, SatoTateSampler(args.seed))
    verts = sample.values
    meta = _meta(args, sup_norm=float(np.max(np.abs(verts))))
    stem = f"simulate-m{args.m}-n{args.grid}-seed{args.seed}"
    if args.format == "svg":
        text = svg_polyline(verts, meta)
    elif args.format == "csv":
        text = csv_text(meta, ["index", "t", "re", "im"], _path_rows(verts))
    else:
        text = dumps({**meta, "values": [[float(z.real), float(z.imag)] for z in verts]}) + "\n"
    _write(args, stem, text)


def cmd_moments(args) -> None:
    _require(args, "p")
    spec = MomentSpec.parse(args.spec)
    ctx = field_context(args.p)
    emp = empirical_mixed_moment(Kind(args.family), ctx, spec, workers=args.workers)
    record = _meta(args, statistic="mixed_moment", family=args.family, p=args.p, value=emp, error_estimate=None)
    if args.theory != "none":
        method = Expansion(args.H) if args.theory == "expansion" else MonteCarlo(args.samples, args.m, args.seed)
        est = theoretical_mixed_moment(spec, method)
        record["theory"] = {"method": args.theory, "value": est.value, "error_estimate": est.error}
        record["error_estimate"] = abs(emp - est.value)
    _write(args, f"moments-{args.family}-p{args.p}", dumps(record) + "\n")


def cmd_dist(args) -> None:
    _require(args, "p")
    ctx = field_context(args.p)
    emp, _ = sweep_values(Kind(args.family), ctx, [args.t], workers=args.workers)
    sim = simulate_batch(SeriesConfig(args.m, (args.t,)), args.samples, args.seed, workers=args.workers)
    record = _meta(
        args,
        statistic="ks_distance",
        family=args.family,
        p=args.p,
        value={"re": ks_distance(emp[:, 0].real, sim[:, 0].real), "im": ks_distance(emp[:, 0].imag, sim[:, 0].imag)},
        error_estimate=1.36 * math.sqrt(1.0 / len(emp) + 1.0 / len(sim)),
    )
    _write(args, f"dist-{args.family}-p{args.p}-t{args.t}", dumps(record) + "\n")


def cmd_tails(args) -> None:
    if args.source == "empirical":
        _require(args, "p")
        field_context(args.p)
        source = Empirical(Kind(args.family), args.p)
        stem = f"tails-{args.family}-p{args.p}"
    else:
        source = Simulated(SeriesConfig.uniform(args.m, args.grid), args.samples, args.seed)
        stem = f"tails-simulated-m{args.m}-n{args.grid}-seed{args.seed}"
    est = tail_from_samples(sup_norm_samples(source, workers=args.workers), _floats(args.thresholds))
    meta = _meta(args, statistic="sup_norm_tail")
    if args.format == "csv":
        rows = zip(est.thresholds, est.probabilities, [est.samples] * len(est.thresholds))
        text = csv_text(meta, ["threshold", "probability", "samples"], rows)
    else:
        text = dumps({**meta, "value": vars(est)}) + "\n"
    _write(args, stem, text)


def cmd_shortsum(args) -> None:
    _require(args, "p", "length")
    ctx = field_context(args.p)
    interval = IntervalSpec(args.start, args.length)
    value = short_sum_moment(Kind(args.family), ctx, interval, args.moment)
    record = _meta(args, statistic="short_sum_moment", family=args.family, p=args.p, value=value, error_estimate=None)
    if args.family == "kloosterman2" and args.moment == 4 and args.length:
        record["counts"] = energy_counts(args.p, interval)
        record["count_identity"] = kloosterman2_fourth_moment_from_counts(args.p, interval)
    _write(args, f"shortsum-{args.family}-p{args.p}-s{args.start}-l{args.length}", dumps(record) + "\n")


def cmd_sweep(args) -> None:
    primes = _ints(args.primes) if args.primes else ([args.p] if args.p else None)
    if not primes:
        raise UsageError("sweep needs --p or --primes")
    ts = _floats(args.t)
    kind = Kind(args.family)
    header = ["p", "alpha", "a", "re", "im", "sup_norm"]
    for t in ts:
        header += [f"re_t{t}", f"im_t{t}"]
    rows = []
    for p in primes:
        ctx = field_context(p)
        vals, res = sweep_values(kind, ctx, ts, ordering=Ordering(args.ordering), sup=True, workers=args.workers)
        for i, prm in enumerate(res.params):
            alpha, a = (int(prm[0]), int(prm[1])) if kind is Kind.KLOOSTERMAN2 else (1, int(prm))
            row = [p, alpha, a, float(res.final[i].real), float(res.final[i].imag), float(res.sup[i])]
            for z in vals[i]:
                row += [float(z.real), float(z.imag)]
            rows.append(row)
    meta = _meta(args, statistic="sweep")
    if args.format == "csv":
        text = csv_text(meta, header, rows)
    else:
        text = dumps({**meta, "columns": header, "rows": rows}) + "\n"
    _write(args, f"sweep-{args.family}-p{'_'.join(map(str, primes))}", text)


COMMANDS = {
    "path": cmd_path,
    "simulate": cmd_simulate,
    "moments": cmd_moments,
    "dist": cmd_dist,
    "tails": cmd_tails,
    "shortsum": cmd_shortsum,
    "sweep": cmd_sweep,
}


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", 1) < 1:
        print("klpaths: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"klpaths: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"klpaths: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
