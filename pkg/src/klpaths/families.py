"""Summand families over F_p, their partial-sum paths and the completion method.

A family is a summand ``xi_p(x, omega)`` of modulus one, read off the
character table as ``step[phase(x, omega)]``.  Paths are accumulated with
compensated (Kahan) summation so that the final vertex and the complete sum
are the same floating-point number.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .arith import DomainError, FieldContext, field_context, primitive_root


class Kind(str, Enum):
    KLOOSTERMAN = "kloosterman"  # psi(a x + 1/x), x in F_p^*
    KLOOSTERMAN2 = "kloosterman2"  # psi(alpha (a x + 1/x)), x in F_p^*
    BIRCH = "birch"  # psi(a x + x^3), x in F_p
    KLOOSTERMAN_SHIFT = "kloosterman_shift"  # psi(x + a/x), x in F_p^*


class Ordering(str, Enum):
    NATURAL = "natural"
    GEOMETRIC = "geometric"


UNIT_KINDS = frozenset({Kind.KLOOSTERMAN, Kind.KLOOSTERMAN2, Kind.KLOOSTERMAN_SHIFT})


def domain_start(kind: Kind) -> int:
    """First summation index: 1 for F_p^* families, 0 for F_p families."""
    return 1 if Kind(kind) in UNIT_KINDS else 0


def n_segments(kind: Kind, p: int) -> int:
    return p - domain_start(kind)


@dataclass(frozen=True)
class SumFamily:
    kind: Kind
    a: int = 1
    alpha: int = 1
    ordering: Ordering = Ordering.NATURAL

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "ordering", Ordering(self.ordering))

    def reduced(self, p: int) -> "SumFamily":
        fam = replace(self, a=self.a % p, alpha=self.alpha % p)
        if fam.kind in UNIT_KINDS and fam.a == 0:
            raise DomainError(f"{fam.kind.value}: parameter a must be nonzero mod {p}")
        if fam.kind is Kind.KLOOSTERMAN2 and fam.alpha == 0:
            raise DomainError(f"kloosterman2: parameter alpha must be nonzero mod {p}")
        return fam


def positions(kind: Kind, ctx: FieldContext, ordering: Ordering = Ordering.NATURAL) -> np.ndarray:
    """Summation indices x in the order the path visits them.

    Geometric order runs over g^0, g^1, ..., g^(p-2) for the smallest
    primitive root g; F_p families visit x = 0 first.
    """
    p = ctx.p
    start = domain_start(kind)
    if Ordering(ordering) is Ordering.NATURAL:
        return np.arange(start, p, dtype=np.int64)
    g = primitive_root(p)
    xs = np.empty(p - 1, dtype=np.int64)
    x = 1
    for m in range(p - 1):
        xs[m] = x
        x = x * g % p
    if start == 0:
        xs = np.concatenate(([0], xs))
    return xs


def phases(kind: Kind, ctx: FieldContext, x, a, alpha=1):
    """Residue r with xi_p(x) = psi_p(r); broadcasts over numpy inputs."""
    p = ctx.p
    kind = Kind(kind)
    x = np.asarray(x, dtype=np.int64)
    a = np.asarray(a, dtype=np.int64)
    if kind is Kind.KLOOSTERMAN:
        return (a * x + ctx.inv[x]) % p
    if kind is Kind.KLOOSTERMAN2:
        alpha = np.asarray(alpha, dtype=np.int64)
        return alpha * ((a * x + ctx.inv[x]) % p) % p
    if kind is Kind.BIRCH:
        return (a * x + x * x % p * x) % p
    if kind is Kind.KLOOSTERMAN_SHIFT:
        return (x + a * ctx.inv[x]) % p
    raise ValueError(kind)


def parameter_space(kind: Kind, p: int) -> np.ndarray:
    """All parameters omega: shape (p-1,) of a, or (p-1)^2 rows of (alpha, a)."""
    units = np.arange(1, p, dtype=np.int64)
    if Kind(kind) is Kind.KLOOSTERMAN2:
        al, a = np.meshgrid(units, units, indexing="ij")
        return np.stack([al.ravel(), a.ravel()], axis=1)
    return units


def _split_params(kind: Kind, params: np.ndarray):
    params = np.asarray(params, dtype=np.int64)
    if Kind(kind) is Kind.KLOOSTERMAN2:
        return params[..., 1], params[..., 0]
    return params, 1


# -- paths -------------------------------------------------------------------


@dataclass(frozen=True)
class PathSample:
    """Vertices z_0 = 0, ..., z_N of a polygonal path, t_j = j / N."""

    vertices: np.ndarray
    family: SumFamily | None = None
    p: int | None = None

    @property
    def n_segments(self) -> int:
        return len(self.vertices) - 1

    @property
    def times(self) -> np.ndarray:
        n = self.n_segments
        return np.arange(n + 1) / n if n else np.zeros(1)


def _kahan_cumsum(steps: Sequence[complex]) -> list[complex]:
    s = 0j
    c = 0j
    out = [0j]
    for v in steps:
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
        out.append(s)
    return out


def partial_sum_vector(family: SumFamily, ctx: FieldContext) -> PathSample:
    fam = family.reduced(ctx.p)
    xs = positions(fam.kind, ctx, fam.ordering)
    steps = ctx.step[phases(fam.kind, ctx, xs, fam.a, fam.alpha)]
    verts = np.asarray(_kahan_cumsum(steps.tolist()), dtype=np.complex128)
    return PathSample(vertices=verts, family=fam, p=ctx.p)


def complete_sum(family: SumFamily, ctx: FieldContext) -> complex:
    """(1/sqrt p) * sum of the summands over the whole domain."""
    return complex(partial_sum_vector(family, ctx).vertices[-1])


def window_count(n_seg: int, t: float) -> int:
    """floor(n_seg * t), snapping values within 1e-9 of an integer upward."""
    return min(n_seg, int(math.floor(n_seg * t + 1e-9)))


def path_eval(path: PathSample, t: float) -> complex:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    z = path.vertices
    n = len(z) - 1
    if n == 0:
        return complex(z[0])
    s = n * t
    j = min(int(math.floor(s)), n - 1)
    frac = s - j
    return complex(z[j] + frac * (z[j + 1] - z[j]))


def sup_norm(path: PathSample | np.ndarray) -> float:
    z = path.vertices if isinstance(path, PathSample) else np.asarray(path)
    return float(np.max(np.abs(z)))


# -- completion --------------------------------------------------------------


def shift_range(p: int) -> np.ndarray:
    """h with |h| < p/2, i.e. -(p-1)/2 .. (p-1)/2."""
    half = (p - 1) // 2
    return np.arange(-half, half + 1, dtype=np.int64)


def interval_coefficients(ctx: FieldContext, start: int, count: int, hs=None) -> np.ndarray:
    """(1/sqrt p) sum_{start <= x < start+count} psi(h x), closed geometric form."""
    p = ctx.p
    hs = shift_range(p) if hs is None else np.asarray(hs, dtype=np.int64)
    out = np.empty(hs.shape, dtype=np.complex128)
    zero = hs % p == 0
    out[zero] = count / math.sqrt(p)
    h = hs[~zero] % p
    num = ctx.chi[(h * start) % p] * (1.0 - ctx.chi[(h * count) % p])
    out[~zero] = num / (1.0 - ctx.chi[h]) / math.sqrt(p)
    return out


def window_fourier_coeff(p: int, h: int, t: float, *, domain: str = "units") -> complex:
    """Discrete Fourier coefficient of the initial window of length floor(N t).

    ``domain="units"`` is the window 1 <= x <= floor((p-1) t); ``domain="field"``
    is 0 <= x < floor(p t).
    """
    ctx = field_context(p)
    start = 1 if domain == "units" else 0
    n = window_count(p - start, t)
    return complex(interval_coefficients(ctx, start, n, [h])[0])


@lru_cache(maxsize=64)
def _dft_of_summand(kind: Kind, p: int) -> np.ndarray:
    """T[b] = (1/sqrt p) sum_x psi(b x) g(x) with g the parameter-free part."""
    ctx = field_context(p)
    xs = np.arange(p, dtype=np.int64)
    if kind is Kind.BIRCH:
        g = ctx.chi[xs * xs % p * xs % p]
    else:
        g = ctx.chi[ctx.inv[xs]].copy()
        g[0] = 0.0
    # numpy's forward transform carries psi(-k x); read it at -b.
    f = np.fft.fft(g)
    table = f[(-xs) % p] / math.sqrt(p)
    table.setflags(write=False)
    return table


def complete_sum_table(kind: Kind, p: int) -> np.ndarray:
    """Kl_p(b) (resp. Bi_p(b)) for every b in F_p, computed by one FFT."""
    kind = Kind(kind)
    base = Kind.BIRCH if kind is Kind.BIRCH else Kind.KLOOSTERMAN
    return _dft_of_summand(base, p)


def shifted_complete_sums(family: SumFamily, ctx: FieldContext, hs=None) -> np.ndarray:
    """(1/sqrt p) sum_x xi(x) psi(-h x) for each h, via the complete-sum table."""
    p = ctx.p
    fam = family.reduced(p)
    hs = shift_range(p) if hs is None else np.asarray(hs, dtype=np.int64)
    table = complete_sum_table(fam.kind, p)
    if fam.kind in (Kind.KLOOSTERMAN, Kind.BIRCH):
        idx = fam.a - hs
    elif fam.kind is Kind.KLOOSTERMAN2:
        # sum psi(u x + v/x) = Kl(u v) for v != 0
        idx = fam.alpha * ((fam.alpha * fam.a - hs) % p)
    else:
        idx = fam.a * (1 - hs)
    return table[idx % p]


def completed_interpolant(family: SumFamily, ctx: FieldContext, t: float) -> complex:
    """Step-function partial sum rebuilt from shifted complete sums.

    Equals the direct sum over the first floor(N t) summands exactly, up to
    rounding.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    fam = family.reduced(ctx.p)
    if fam.ordering is not Ordering.NATURAL:
        raise ValueError("completion needs an interval window (natural ordering)")
    start = domain_start(fam.kind)
    n = window_count(ctx.p - start, t)
    alpha = interval_coefficients(ctx, start, n)
    shifted = shifted_complete_sums(fam, ctx)
    return complex(np.dot(alpha, shifted) / math.sqrt(ctx.p))


def completed_interpolant_all(kind: Kind, ctx: FieldContext, t: float) -> np.ndarray:
    """completed_interpolant for every a in F_p at once (circular convolution).

    Index a of the result is the parameter value; only one-parameter
    families with an additive shift (kloosterman, birch) are supported.
    """
    kind = Kind(kind)
    if kind not in (Kind.KLOOSTERMAN, Kind.BIRCH):
        raise ValueError(f"no convolution form for {kind.value}")
    p = ctx.p
    start = domain_start(kind)
    n = window_count(p - start, t)
    coeff = np.zeros(p, dtype=np.complex128)
    hs = shift_range(p)
    coeff[hs % p] = interval_coefficients(ctx, start, n, hs)
    table = complete_sum_table(kind, p)
    conv = np.fft.ifft(np.fft.fft(coeff) * np.fft.fft(table))
    return conv / math.sqrt(p)


def truncated_sum(family: SumFamily, ctx: FieldContext, t: float) -> complex:
    """Direct (1/sqrt p) sum over the first floor(N t) summands.

    Evaluates the exponentials afresh with :mod:`cmath`; used as the
    independent side of the completion identity.
    """
    fam = family.reduced(ctx.p)
    p = ctx.p
    start = domain_start(fam.kind)
    n = window_count(p - start, t)
    xs = positions(fam.kind, ctx, fam.ordering)[:n]
    total = 0j
    for x in xs.tolist():
        if fam.kind is Kind.KLOOSTERMAN:
            r = fam.a * x + pow(x, -1, p)
        elif fam.kind is Kind.KLOOSTERMAN2:
            r = fam.alpha * (fam.a * x + pow(x, -1, p))
        elif fam.kind is Kind.BIRCH:
            r = fam.a * x + x**3
        else:
            r = x + fam.a * pow(x, -1, p)
        total += cmath.exp(2j * math.pi * (r % p) / p)
    return total / math.sqrt(p)


# -- sweeps over the parameter space ------------------------------------------


@dataclass
class SweepResult:
    """Per-parameter outputs of :func:`sweep`, rows in parameter order."""

    params: np.ndarray
    final: np.ndarray
    recorded: np.ndarray
    record_at: tuple[int, ...]
    sup: np.ndarray | None


def _sweep_chunk(kind, p, ordering, params, record_at, want_sup):
    ctx = field_context(p)
    a, alpha = _split_params(kind, params)
    xs = positions(kind, ctx, ordering)
    n = len(params)
    s = np.zeros(n, dtype=np.complex128)
    c = np.zeros(n, dtype=np.complex128)
    recorded = np.zeros((n, len(record_at)), dtype=np.complex128)
    where: dict[int, list[int]] = {}
    for col, j in enumerate(record_at):
        where.setdefault(j, []).append(col)
    sup_sq = np.zeros(n) if want_sup else None
    step = ctx.step
    for k, x in enumerate(xs.tolist()):
        v = step[phases(kind, ctx, x, a, alpha)]
        y = v - c
        tot = s + y
        c = (tot - s) - y
        s = tot
        if want_sup:
            np.maximum(sup_sq, s.real * s.real + s.imag * s.imag, out=sup_sq)
        for col in where.get(k + 1, ()):
            recorded[:, col] = s
    return s, recorded, (np.sqrt(sup_sq) if want_sup else None)


def sweep(
    kind: Kind,
    ctx: FieldContext,
    params=None,
    *,
    ordering: Ordering = Ordering.NATURAL,
    record_at: Iterable[int] = (),
    sup: bool = False,
    workers: int = 1,
    chunk: int = 4096,
) -> SweepResult:
    """Accumulate the paths of many parameters at once, streaming over x.

    Memory is O(#params * len(record_at)); the paths themselves are never
    stored.  Vertex 0 is the origin and may be requested.
    """
    from .parallel import parallel_map

    kind = Kind(kind)
    params = parameter_space(kind, ctx.p) if params is None else np.asarray(params, dtype=np.int64)
    record_at = tuple(int(j) for j in record_at)
    nseg = n_segments(kind, ctx.p)
    if any(j < 0 or j > nseg for j in record_at):
        raise ValueError(f"record_at indices must lie in 0..{nseg}")
    blocks = [params[i : i + chunk] for i in range(0, len(params), chunk)]
    tasks = [(kind, ctx.p, Ordering(ordering), b, record_at, sup) for b in blocks]
    parts = parallel_map(_sweep_chunk, tasks, workers)
    if parts:
        final = np.concatenate([q[0] for q in parts])
        recorded = np.concatenate([q[1] for q in parts])
        sups = np.concatenate([q[2] for q in parts]) if sup else None
    else:
        final = np.zeros(0, complex)
        recorded = np.zeros((0, len(record_at)), complex)
        sups = np.zeros(0) if sup else None
    return SweepResult(params=params, final=final, recorded=recorded, record_at=record_at, sup=sups)


def eval_indices(nseg: int, ts: Sequence[float]) -> list[tuple[int, float]]:
    """(j, frac) per t with t * nseg = j + frac, j <= nseg - 1."""
    out = []
    for t in ts:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {t}")
        s = nseg * t
        j = min(int(math.floor(s)), nseg - 1)
        out.append((j, s - j))
    return out


def sweep_values(
    kind: Kind,
    ctx: FieldContext,
    ts: Sequence[float],
    params=None,
    *,
    ordering: Ordering = Ordering.NATURAL,
    sup: bool = False,
    workers: int = 1,
) -> tuple[np.ndarray, SweepResult]:
    """Interpolated path values K_p(t, omega) for each t, all parameters."""
    nseg = n_segments(kind, ctx.p)
    idx = eval_indices(nseg, ts)
    need = sorted({j for j, _ in idx} | {j + 1 for j, _ in idx})
    res = sweep(kind, ctx, params, ordering=ordering, record_at=need, sup=sup, workers=workers)
    col = {j: i for i, j in enumerate(need)}
    vals = np.empty((len(res.params), len(ts)), dtype=np.complex128)
    for i, (j, frac) in enumerate(idx):
        z0 = res.recorded[:, col[j]]
        z1 = res.recorded[:, col[j + 1]]
        vals[:, i] = z0 + frac * (z1 - z0)
    return vals, res
