"""Sato-Tate (semicircle) sampling and its exact moments.

Draws are 2 cos(theta) with theta of density (2/pi) sin^2 on [0, pi], obtained
by inverting F(theta) = (theta - sin theta cos theta) / pi with Newton steps.
The uniform source is Philox-4x64 keyed by (seed, stream), so every stream is
reproducible bit-for-bit and streams never overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

NEWTON_TOL = 1e-12
_MASK64 = (1 << 64) - 1


def _inverse_table(n: int = 4097):
    theta = np.linspace(0.0, np.pi / 2, n)
    w = np.cbrt((theta - np.sin(theta) * np.cos(theta)) / np.pi)
    return w, theta


_W_GRID, _THETA_GRID = _inverse_table()


def _theta_lower_half(u: np.ndarray) -> np.ndarray:
    # Solves F(theta) = u for u in [0, 1/2].  theta is smooth in cbrt(u), so a
    # table lookup there leaves Newton only a couple of quadratic steps.
    theta = np.interp(np.cbrt(u), _W_GRID, _THETA_GRID)
    for _ in range(100):
        s, c = np.sin(theta), np.cos(theta)
        f = (theta - s * c) / np.pi - u
        df = 2.0 * s * s / np.pi
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = np.where(df > 0, f / df, 0.0)
        new = np.clip(theta - delta, 0.0, np.pi / 2)
        done = np.max(np.abs(new - theta), initial=0.0) < NEWTON_TOL
        theta = new
        if done:
            break
    return theta


def semicircle_from_uniform(u) -> np.ndarray:
    """Inverse CDF of the Sato-Tate law applied to uniforms in [0, 1)."""
    u = np.asarray(u, dtype=np.float64)
    upper = u > 0.5
    v = np.where(upper, 1.0 - u, u)
    theta = _theta_lower_half(v)
    theta = np.where(upper, np.pi - theta, theta)
    return 2.0 * np.cos(theta)


def st_cdf(x) -> np.ndarray:
    """CDF of the semicircle law on [-2, 2]."""
    x = np.clip(np.asarray(x, dtype=np.float64), -2.0, 2.0)
    theta = np.arccos(x / 2.0)
    return 1.0 - (theta - np.sin(theta) * np.cos(theta)) / np.pi


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    key = (int(seed) & _MASK64) | ((int(stream) & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class SatoTateSampler:
    seed: int
    stream: int = 0
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self._gen = make_generator(self.seed, self.stream)

    def sample(self) -> float:
        return float(self.sample_n(1)[0])

    def sample_n(self, n: int) -> np.ndarray:
        return semicircle_from_uniform(self._gen.random(int(n)))

    def sample_array(self, shape) -> np.ndarray:
        """Row-major draws; equals ``sample_n(prod(shape)).reshape(shape)``."""
        shape = tuple(shape)
        return self.sample_n(int(np.prod(shape))).reshape(shape)


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def st_moment(mu: int) -> int:
    """E(ST^mu): 0 for odd mu, Catalan(mu/2) for even mu."""
    if mu < 0:
        raise ValueError("moment order must be non-negative")
    return 0 if mu % 2 else catalan(mu // 2)


@dataclass(frozen=True)
class MultiplicityProfile:
    mu: Mapping[int, int]

    def __post_init__(self):
        if any(v < 0 for v in self.mu.values()):
            raise ValueError("multiplicities must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.mu.values())

    @classmethod
    def from_shifts(cls, shifts, p: int | None = None) -> "MultiplicityProfile":
        mu: dict[int, int] = {}
        for h in shifts:
            key = h % p if p else h
            mu[key] = mu.get(key, 0) + 1
        return cls(mu)


def joint_moment(profile: MultiplicityProfile | Mapping[int, int]) -> int:
    """E(prod_tau ST_tau^mu(tau)) for independent Sato-Tate variables."""
    mu = profile.mu if isinstance(profile, MultiplicityProfile) else profile
    out = 1
    for m in mu.values():
        out *= st_moment(m)
        if out == 0:
            break
    return out


def st_cumulant(order: int) -> float:
    """Cumulants of the Sato-Tate law from its Catalan moments."""
    moments = [st_moment(k) for k in range(order + 1)]
    kappa = [0.0] * (order + 1)
    for n in range(1, order + 1):
        kappa[n] = moments[n] - sum(
            math.comb(n - 1, k - 1) * kappa[k] * moments[n - k] for k in range(1, n)
        )
    return kappa[order]
