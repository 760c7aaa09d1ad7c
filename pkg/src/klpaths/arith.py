"""Prime-field arithmetic: inverse tables, primitive roots, additive character."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Raised for inputs outside the arithmetic domain (composite p, a = 0, ...)."""


# Deterministic Miller-Rabin witnesses, valid for every n < 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_odd_prime(p: int) -> int:
    p = int(p)
    if p < 3:
        raise DomainError(f"p must be an odd prime >= 3, got {p}")
    if not is_prime(p):
        raise DomainError(f"p = {p} is not prime")
    return p


def mod_inverse(x: int, p: int) -> int:
    """Inverse of ``x`` modulo the prime ``p``, in 1..p-1."""
    check_odd_prime(p)
    if x % p == 0:
        raise DomainError(f"{x} is not invertible modulo {p}")
    return pow(x, -1, p)


def inverse_table(p: int) -> np.ndarray:
    # inv[x] = -(p // x) * inv[p mod x] mod p; inv[0] is left as 0.
    inv = [0] * p
    inv[1] = 1
    for x in range(2, p):
        inv[x] = (p - (p // x) * inv[p % x] % p) % p
    return np.asarray(inv, dtype=np.int64)


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group modulo ``p``."""
    p = check_odd_prime(p)
    qs = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("unreachable for prime p")


@dataclass(frozen=True, eq=False)
class FieldContext:
    """Tables for one prime field F_p.

    ``inv[x]`` is the inverse of x (``inv[0] == 0`` as a sentinel), ``chi[k]``
    is e^{2 pi i k/p} and ``step[k] = chi[k] / sqrt(p)`` is the normalized
    summand every path accumulates.
    """

    p: int
    inv: np.ndarray = field(repr=False)
    chi: np.ndarray = field(repr=False)
    step: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, p: int) -> "FieldContext":
        p = check_odd_prime(p)
        k = np.arange(p)
        chi = np.exp(2j * np.pi * k / p)
        chi[0] = 1.0
        step = chi / math.sqrt(p)
        for arr in (chi, step):
            arr.setflags(write=False)
        inv = inverse_table(p)
        inv.setflags(write=False)
        return cls(p=p, inv=inv, chi=chi, step=step)

    def __hash__(self) -> int:
        return hash(self.p)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldContext) and other.p == self.p

    def __reduce__(self):
        return (field_context, (self.p,))


_CACHE: dict[int, FieldContext] = {}


def field_context(p: int) -> FieldContext:
    """Cached :class:`FieldContext` for ``p``."""
    ctx = _CACHE.get(p)
    if ctx is None:
        ctx = FieldContext.build(p)
        _CACHE[ctx.p] = ctx
    return ctx


def psi(ctx: FieldContext, z: int) -> complex:
    """Additive character e^{2 pi i z / p}, read from the table."""
    return complex(ctx.chi[int(z) % ctx.p])
