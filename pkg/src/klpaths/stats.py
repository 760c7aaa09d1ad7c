"""Empirical statistics of path families and their predicted limits."""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .arith import DomainError, FieldContext
from .families import (
    Kind,
    Ordering,
    SumFamily,
    UNIT_KINDS,
    complete_sum_table,
    domain_start,
    parameter_space,
    phases,
    sweep,
    sweep_values,
    _split_params,
)
from .limit_series import SeriesConfig, beta_table, simulate_batch
from .sato_tate import st_cumulant, st_moment


def _kind(family) -> Kind:
    return family.kind if isinstance(family, SumFamily) else Kind(family)


def _ordering(family) -> Ordering:
    return family.ordering if isinstance(family, SumFamily) else Ordering.NATURAL


# -- mixed moments -----------------------------------------------------------


@dataclass(frozen=True)
class MomentSpec:
    """Points (t_i, n_i, m_i): the moment E prod K(t_i)^n_i conj(K(t_i))^m_i."""

    points: tuple[tuple[float, int, int], ...]

    def __post_init__(self):
        pts = tuple((float(t), int(n), int(m)) for t, n, m in self.points)
        object.__setattr__(self, "points", pts)
        ts = [t for t, _, _ in pts]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("moment points must have strictly increasing t")
        if any(not 0.0 <= t <= 1.0 for t in ts):
            raise ValueError("moment points must lie in [0, 1]")
        if any(n < 0 or m < 0 for _, n, m in pts):
            raise ValueError("exponents must be non-negative")

    @property
    def n(self) -> int:
        return sum(n for _, n, _ in self.points)

    @property
    def m(self) -> int:
        return sum(m for _, _, m in self.points)

    @property
    def degree(self) -> int:
        return self.n + self.m

    @classmethod
    def parse(cls, text: str) -> "MomentSpec":
        """'t:n,m;t:n,m' -> MomentSpec, e.g. '0.5:1,1'."""
        pts = []
        for item in text.split(";"):
            item = item.strip()
            if not item:
                continue
            t, exps = item.split(":")
            n, m = exps.split(",")
            pts.append((float(t), int(n), int(m)))
        return cls(tuple(pts))


def _product(values: np.ndarray, spec: MomentSpec) -> np.ndarray:
    out = np.ones(values.shape[0], dtype=np.complex128)
    for i, (_, n, m) in enumerate(spec.points):
        z = values[:, i]
        if n:
            out *= z**n
        if m:
            out *= np.conj(z) ** m
    return out


def empirical_mixed_moment(family, ctx: FieldContext, spec: MomentSpec, *, workers: int = 1) -> complex:
    """Average over the parameter space of prod K_p(t_i)^n_i conj(K_p(t_i))^m_i."""
    if spec.degree == 0:
        return 1.0 + 0j
    ts = [t for t, _, _ in spec.points]
    vals, _ = sweep_values(_kind(family), ctx, ts, ordering=_ordering(family), workers=workers)
    return complex(np.mean(_product(vals, spec)))


@dataclass(frozen=True)
class Expansion:
    H: int = 10_000


@dataclass(frozen=True)
class MonteCarlo:
    samples: int
    m: int
    seed: int = 0


@dataclass(frozen=True)
class MomentEstimate:
    value: complex
    error: float


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def _riemann_zeta(b: int) -> float:
    return math.fsum(1.0 / k**b for k in range(1, 100000)) + 1.0 / ((b - 1) * 99999 ** (b - 1))


def expansion_moment(spec: MomentSpec, H: int = 10_000) -> MomentEstimate:
    """Limit moment from the shift expansion, truncated to |h| < H.

    The expansion sum_{h tuples} prod beta * E(prod ST) is grouped by which
    slots share a shift; grouping by set partitions with Sato-Tate
    cumulants gives the same number in O(Bell(d) H) operations.
    """
    d = spec.degree
    if d > 4:
        raise ValueError("expansion is limited to total degree n + m <= 4")
    if d == 0:
        return MomentEstimate(1.0 + 0j, 0.0)
    hs = np.arange(-(H - 1), H)
    slots = []
    for t, n, m in spec.points:
        row = beta_table(hs, [t])[0]
        slots += [row] * n + [np.conj(row)] * m
    total = 0j
    err = 0.0
    for part in _set_partitions(list(range(d))):
        kappa = 1.0
        for block in part:
            kappa *= st_cumulant(len(block))
        if kappa == 0.0:
            continue
        sums = []
        bounds = []
        tails = []
        for block in part:
            b = len(block)
            sums.append(np.sum(np.prod([slots[k] for k in block], axis=0)))
            bounds.append(1.0 + 2.0 * _riemann_zeta(b) / math.pi**b)
            tails.append(2.0 / (math.pi**b * (b - 1) * (H - 1) ** (b - 1)))
        total += kappa * np.prod(sums)
        for i in range(len(part)):
            err += abs(kappa) * tails[i] * np.prod([bounds[j] for j in range(len(part)) if j != i])
    return MomentEstimate(complex(total), float(err))


def monte_carlo_moment(spec: MomentSpec, samples: int, m: int, seed: int = 0, *, workers: int = 1) -> MomentEstimate:
    ts = tuple(t for t, _, _ in spec.points)
    cfg = SeriesConfig(m=m, grid=ts)
    vals = simulate_batch(cfg, samples, seed, workers=workers)
    prod = _product(vals, spec)
    se = math.sqrt((np.var(prod.real) + np.var(prod.imag)) / samples)
    return MomentEstimate(complex(np.mean(prod)), se)


def theoretical_mixed_moment(spec: MomentSpec, method: Expansion | MonteCarlo = Expansion()) -> MomentEstimate:
    if isinstance(method, Expansion):
        return expansion_moment(spec, method.H)
    return monte_carlo_moment(spec, method.samples, method.m, method.seed)


# -- sums of products of shifted complete sums ---------------------------------


def sums_of_products(p: int, shifts: Mapping[int, int] | Sequence[int], kind: Kind = Kind.KLOOSTERMAN) -> complex:
    """(1/(p-1)) sum_{a != 0} prod_h S(a - h)^mu(h), S = Kl_p or Bi_p.

    ``shifts`` maps a shift h to its multiplicity, or lists shifts with
    repetition.
    """
    if not isinstance(shifts, Mapping):
        shifts = Counter(int(h) for h in shifts)
    table = complete_sum_table(kind, p)
    a = np.arange(1, p, dtype=np.int64)
    prod = np.ones(p - 1, dtype=np.complex128)
    for h, mu in shifts.items():
        if mu:
            prod *= table[(a - h) % p] ** mu
    return complex(np.mean(prod))


def main_term(shifts: Mapping[int, int] | Sequence[int], p: int) -> int:
    """prod_tau A(mu(tau)) with multiplicities collected modulo p."""
    if isinstance(shifts, Mapping):
        items = [h for h, mu in shifts.items() for _ in range(mu)]
    else:
        items = list(shifts)
    mu = Counter(int(h) % p for h in items)
    out = 1
    for v in mu.values():
        out *= st_moment(v)
    return out


# -- distribution distances --------------------------------------------------


def ks_distance(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.sort(np.asarray(sample_a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(sample_b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("KS distance needs two non-empty samples")
    support = np.concatenate([a, b])
    fa = np.searchsorted(a, support, side="right") / a.size
    fb = np.searchsorted(b, support, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


# -- sup-norm tails ----------------------------------------------------------


@dataclass(frozen=True)
class Empirical:
    family: Kind
    p: int


@dataclass(frozen=True)
class Simulated:
    config: SeriesConfig
    samples: int
    seed: int = 0


@dataclass
class TailEstimate:
    thresholds: list[float]
    probabilities: list[float]
    exceedances: list[int]
    samples: int


def _sup_abs(vals: np.ndarray) -> np.ndarray:
    return np.max(np.abs(vals), axis=1)


def sup_norm_samples(source: Empirical | Simulated, *, workers: int = 1) -> np.ndarray:
    """One sup norm per parameter (empirical) or realization (simulated)."""
    if isinstance(source, Empirical):
        from .arith import field_context

        res = sweep(Kind(source.family), field_context(source.p), sup=True, workers=workers)
        return res.sup
    return simulate_batch(source.config, source.samples, source.seed, workers=workers, reducer=_sup_abs)


def tail_from_samples(sups: np.ndarray, thresholds: Sequence[float]) -> TailEstimate:
    ths = [float(a) for a in thresholds]
    if any(b <= a for a, b in zip(ths, ths[1:])):
        raise ValueError("thresholds must be increasing")
    if any(a < 0 for a in ths):
        raise ValueError("thresholds must be non-negative")
    sups = np.asarray(sups)
    counts = [int(np.count_nonzero(sups >= a)) for a in ths]
    n = int(sups.size)
    return TailEstimate(ths, [c / n for c in counts], counts, n)


def sup_norm_tail(source: Empirical | Simulated, thresholds: Sequence[float], *, workers: int = 1) -> TailEstimate:
    return tail_from_samples(sup_norm_samples(source, workers=workers), thresholds)


# -- short sums and fourth moments ---------------------------------------------


@dataclass(frozen=True)
class IntervalSpec:
    """Consecutive integers start, ..., start + length - 1 (no wrap mod p)."""

    start: int
    length: int

    @property
    def stop(self) -> int:
        return self.start + self.length

    def points(self) -> np.ndarray:
        return np.arange(self.start, self.stop, dtype=np.int64)

    def check(self, p: int, *, units: bool) -> None:
        lo = 1 if units else 0
        if self.length < 0:
            raise ValueError("interval length must be non-negative")
        if self.length and (self.start < lo or self.stop - 1 > p - 1):
            where = "1..p-1" if units else "0..p-1"
            raise DomainError(f"interval [{self.start}, {self.stop - 1}] must lie in {where}")


def short_sum_moment(family, ctx: FieldContext, interval: IntervalSpec, alpha: int, *, chunk: int = 8192) -> float:
    """Average over the parameter space of |(1/sqrt p) sum_{x in I} xi(x)|^alpha."""
    kind = _kind(family)
    if alpha <= 0 or alpha % 2:
        raise ValueError("alpha must be a positive even integer")
    interval.check(ctx.p, units=kind in UNIT_KINDS)
    if interval.length == 0:
        return 0.0
    xs = interval.points()
    params = parameter_space(kind, ctx.p)
    acc = []
    for i in range(0, len(params), chunk):
        a, al = _split_params(kind, params[i : i + chunk])
        a = np.asarray(a)[:, None]
        al = np.asarray(al)[:, None] if np.ndim(al) else al
        s = ctx.step[phases(kind, ctx, xs[None, :], a, al)].sum(axis=1)
        acc.append((s.real**2 + s.imag**2) ** (alpha // 2))
    return float(np.mean(np.concatenate(acc)))


class FourthMomentVariant(str, Enum):
    INVERSE_PAIR = "inverse_pair"  # x1+x2 = x3+x4 and 1/x1+1/x2 = 1/x3+1/x4
    ADDITIVE_PAIR = "additive_pair"  # 1/x1+1/x2 = 1/x3+1/x4 only


def _pair_keys(p: int, interval: IntervalSpec):
    if interval.length < 1:
        raise ValueError("interval must be non-empty")
    if interval.start % p == 0 or any(x % p == 0 for x in range(interval.start, interval.stop)):
        raise DomainError("interval must avoid 0 mod p (inverses undefined)")
    xs = list(range(interval.start, interval.stop))
    inv = {x: pow(x, -1, p) for x in xs}
    return xs, inv


def energy_counts(p: int, interval: IntervalSpec) -> dict[str, int]:
    """Quadruple counts in I^4 by hashing pairs: sums, inverse sums, both."""
    xs, inv = _pair_keys(p, interval)
    by_sum: Counter = Counter()
    by_inv: Counter = Counter()
    by_both: Counter = Counter()
    for x1 in xs:
        for x2 in xs:
            s = (x1 + x2) % p
            u = (inv[x1] + inv[x2]) % p
            by_sum[s] += 1
            by_inv[u] += 1
            by_both[s, u] += 1
    sq = lambda c: sum(v * v for v in c.values())  # noqa: E731
    return {"sum": sq(by_sum), "inverse": sq(by_inv), "both": sq(by_both)}


def fourth_moment_count_exhaustive(p: int, interval: IntervalSpec, variant=FourthMomentVariant.INVERSE_PAIR) -> int:
    variant = FourthMomentVariant(variant)
    xs, inv = _pair_keys(p, interval)
    count = 0
    for x1, x2, x3, x4 in itertools.product(xs, repeat=4):
        inv_ok = (inv[x1] + inv[x2] - inv[x3] - inv[x4]) % p == 0
        if variant is FourthMomentVariant.INVERSE_PAIR:
            count += inv_ok and (x1 + x2 - x3 - x4) % p == 0
        else:
            count += inv_ok
    return int(count)


def fourth_moment_count(p: int, interval: IntervalSpec, variant=FourthMomentVariant.INVERSE_PAIR, *, method: str = "hashed") -> int:
    variant = FourthMomentVariant(variant)
    if method == "exhaustive":
        return fourth_moment_count_exhaustive(p, interval, variant)
    counts = energy_counts(p, interval)
    return counts["both"] if variant is FourthMomentVariant.INVERSE_PAIR else counts["inverse"]


def kloosterman2_fourth_moment_from_counts(p: int, interval: IntervalSpec) -> float:
    """Exact two-parameter fourth moment from quadruple counts.

    Orthogonality over both parameters gives
    (p^2 N_both - p (N_sum + N_inverse) + |I|^4) / (p^2 (p-1)^2).
    """
    c = energy_counts(p, interval)
    n4 = interval.length**4
    return (p * p * c["both"] - p * (c["sum"] + c["inverse"]) + n4) / (p * p * (p - 1) ** 2)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x (a measured exponent)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


# -- records -----------------------------------------------------------------


@dataclass
class StatRecord:
    statistic: str
    family: str | None
    p: int | None
    parameters: dict
    value: object
    error_estimate: float | None = None
    seed: int | None = None
    version: str = field(default="")

    def to_json(self) -> str:
        from . import __version__

        d = asdict(self)
        d["version"] = self.version or __version__
        return json.dumps(_jsonable(d), sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, Enum):
        return obj.value
    return obj
