"""The limiting random Fourier series K(t) = sum_h beta(h; t) ST_h.

Realizations draw ST_h for h = -(m-1), ..., m-1 in that order.  Batches are
split into blocks of ``BLOCK`` realizations; block b reads Philox stream b of
the master seed, so a batch is identical whatever the worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .families import window_fourier_coeff
from .parallel import parallel_map
from .sato_tate import SatoTateSampler

BLOCK = 256
TAIL_CUTOFF = 10**6


class Variant(str, Enum):
    STANDARD = "standard"
    SHIFT_MINUS_ONE = "shift_minus_one"


def beta(h: int, t: float) -> complex:
    if h == 0:
        return complex(t)
    return (np.exp(2j * np.pi * h * t) - 1.0) / (2j * np.pi * h)


def beta_table(hs, ts) -> np.ndarray:
    """beta(h; t) with rows indexed by t and columns by h."""
    hs = np.asarray(hs, dtype=np.float64)
    ts = np.asarray(ts, dtype=np.float64)
    hh = hs[None, :]
    tt = ts[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.expm1(2j * np.pi * hh * tt) / (2j * np.pi * hh)
    return np.where(hh == 0, tt + 0j, b)


def uniform_grid(n: int) -> np.ndarray:
    """t_j = j / n for j = 0..n."""
    return np.arange(n + 1) / n


@dataclass(frozen=True)
class SeriesConfig:
    m: int
    grid: tuple[float, ...]
    variant: Variant = Variant.STANDARD
    uniform_n: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("truncation m must be >= 1")
        g = np.asarray(self.grid, dtype=float)
        if g.size == 0 or np.any(g < 0) or np.any(g > 1) or np.any(np.diff(g) < 0):
            raise ValueError("grid must be sorted values in [0, 1]")
        object.__setattr__(self, "variant", Variant(self.variant))

    @classmethod
    def uniform(cls, m: int, n: int, variant: Variant = Variant.STANDARD) -> "SeriesConfig":
        return cls(m=m, grid=tuple(uniform_grid(n).tolist()), variant=variant, uniform_n=n)

    @property
    def shifts(self) -> np.ndarray:
        return np.arange(-(self.m - 1), self.m, dtype=np.int64)

    @property
    def n_draws(self) -> int:
        return 2 * self.m - 1


@dataclass
class SeriesPathSample:
    grid: np.ndarray
    values: np.ndarray
    draws: np.ndarray
    config: SeriesConfig

    def coefficients(self) -> np.ndarray:
        return beta_table(self.config.shifts, self.grid)


def _values_uniform(draws: np.ndarray, hs: np.ndarray, n: int) -> np.ndarray:
    # beta(h; j/n) = (e(h j / n) - 1) / (2 pi i h): one inverse FFT per row.
    rows = draws.shape[0]
    nz = hs != 0
    c = draws[:, nz] / (2j * np.pi * hs[nz])
    spec = np.zeros((rows, n), dtype=np.complex128)
    cols = hs[nz] % n
    if len(np.unique(cols)) == len(cols):
        spec[:, cols] = c
    else:
        for k, col in enumerate(cols.tolist()):
            spec[:, col] += c[:, k]
    osc = np.fft.ifft(spec, axis=1) * n
    osc -= c.sum(axis=1)[:, None]
    osc = np.concatenate([osc, osc[:, :1]], axis=1)  # t = 1 closes the period
    t = np.arange(n + 1) / n
    st0 = draws[:, hs == 0][:, 0] if np.any(hs == 0) else np.zeros(rows)
    return t[None, :] * st0[:, None] + osc


def series_values(draws, hs, grid, *, uniform_n: int | None = None, chunk: int = 64) -> np.ndarray:
    """sum_h beta(h; t) draws[:, h] for each row of draws and each t in grid."""
    draws = np.atleast_2d(np.asarray(draws, dtype=np.float64))
    hs = np.asarray(hs, dtype=np.int64)
    grid = np.asarray(grid, dtype=np.float64)
    if uniform_n is not None:
        return _values_uniform(draws, hs, uniform_n)
    out = np.empty((draws.shape[0], grid.size), dtype=np.complex128)
    zero = hs == 0
    for i in range(0, grid.size, chunk):
        ts = grid[i : i + chunk]
        b = beta_table(hs[~zero], ts)
        # h = 0 drift kept apart from the oscillating part
        out[:, i : i + chunk] = draws[:, ~zero] @ b.T
        if zero.any():
            out[:, i : i + chunk] += draws[:, zero] * ts[None, :]
    return out


def _apply_variant(values, draws, hs, grid, variant):
    if variant is Variant.SHIFT_MINUS_ONE and np.any(hs == -1):
        st = draws[:, hs == -1][:, 0]
        g = np.asarray(grid)
        values = values + np.expm1(-2j * np.pi * g)[None, :] / (2j * np.pi) * st[:, None]
    return values


def simulate_series(cfg: SeriesConfig, sampler: SatoTateSampler) -> SeriesPathSample:
    """One realization of the truncated series on ``cfg.grid``."""
    draws = sampler.sample_n(cfg.n_draws)[None, :]
    grid = np.asarray(cfg.grid)
    vals = series_values(draws, cfg.shifts, grid, uniform_n=cfg.uniform_n)
    vals = _apply_variant(vals, draws, cfg.shifts, grid, cfg.variant)
    return SeriesPathSample(grid=grid, values=vals[0], draws=draws[0], config=cfg)


def _block(cfg: SeriesConfig, seed: int, block: int, rows: int, reducer):
    sampler = SatoTateSampler(seed, stream=block)
    draws = sampler.sample_array((rows, cfg.n_draws))
    grid = np.asarray(cfg.grid)
    vals = series_values(draws, cfg.shifts, grid, uniform_n=cfg.uniform_n)
    vals = _apply_variant(vals, draws, cfg.shifts, grid, cfg.variant)
    return reducer(vals) if reducer is not None else vals


def simulate_batch(cfg: SeriesConfig, n: int, seed: int, *, workers: int = 1, reducer=None):
    """Values of ``n`` independent realizations, shape (n, len(grid)).

    ``reducer`` (a picklable function of a block's value array) is applied
    per block and the reduced blocks are concatenated; use it to keep only
    e.g. sup norms when the full value array would be too large.
    """
    tasks = []
    for b, start in enumerate(range(0, n, BLOCK)):
        tasks.append((cfg, seed, b, min(BLOCK, n - start), reducer))
    parts = parallel_map(_block, tasks, workers)
    if not parts:
        return np.zeros((0, len(cfg.grid)), dtype=np.complex128)
    return np.concatenate(parts, axis=0)


def xp_coefficient(p: int, h: int, t: float) -> complex:
    """Coefficient of ST_h in X_p(t): alpha_p(h; t) / sqrt(p)."""
    if not abs(h) < p / 2:
        raise ValueError("need |h| < p/2")
    return window_fourier_coeff(p, h, t) / math.sqrt(p)


def truncation_tail_interval(m: int, t: float, cutoff: int = TAIL_CUTOFF) -> tuple[float, float]:
    """Certified enclosure of sum_{|h| >= m} |beta(h; t)|^2."""
    if m < 1:
        raise ValueError("m must be >= 1")
    lo = 0.0
    if m < cutoff:
        h = np.arange(max(m, 1), cutoff, dtype=np.float64)
        terms = np.sin(np.pi * h * t) ** 2 / (np.pi**2 * h**2)
        lo = 2.0 * math.fsum(terms[::-1])
    first = max(m, cutoff)
    # 2 * sum_{h >= first} 1/(pi h)^2 <= 2 / (pi^2 (first - 1))
    tail = 2.0 / (math.pi**2 * (first - 1)) if (t != 0.0 and t != 1.0) else 0.0
    return lo, lo + tail


def truncation_tail_variance(m: int, t: float) -> float:
    """sigma_m^2 = sum_{|h| >= m} |beta(h; t)|^2 (midpoint of the certified interval)."""
    lo, hi = truncation_tail_interval(m, t)
    return 0.5 * (lo + hi)
