"""Exact integer kernels and the shared precision configuration."""

from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

import mpmath as mp
import numpy as np

from . import _accel
from .errors import ResourceError

MOBIUS_CAP = 10**8


@dataclass(frozen=True)
class PrecisionConfig:
    """Working precision and tolerances handed to every evaluator.

    ``bits`` is the binary mantissa width used for mpmath arithmetic.  The
    binary64 kernels ignore it but still honour ``abs_tol`` when choosing
    truncation lengths.
    """

    bits: int = 256
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_terms: int = MOBIUS_CAP

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 53:
            raise ValueError(f"bits must be an integer >= 53, got {self.bits}")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")
        if self.max_terms < 16:
            raise ValueError("max_terms must be >= 16")

    @contextmanager
    def workprec(self, extra: int = 0):
        with mp.workprec(self.bits + extra):
            yield

    @property
    def eps(self):
        """Unit roundoff at the working precision, as an mpf."""
        return mp.ldexp(mp.mpf(1), -self.bits)

    def with_(self, **changes) -> "PrecisionConfig":
        return replace(self, **changes)


FLOAT64 = PrecisionConfig(bits=53, abs_tol=1e-12, rel_tol=1e-12)


@dataclass(frozen=True, eq=False)
class MobiusTable:
    limit: int
    padded: np.ndarray = field(repr=False)

    @property
    def values(self) -> np.ndarray:
        """mu(1..limit) as a read-only int8 view."""
        return self.padded[1:]

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(n)
        return int(self.padded[n])

    def mertens(self, n: int | None = None) -> int:
        n = self.limit if n is None else n
        return int(self.padded[1 : n + 1].sum(dtype=np.int64))


def build_mobius(limit: int) -> MobiusTable:
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if limit > MOBIUS_CAP:
        raise ResourceError(f"Moebius table of {limit} entries exceeds cap {MOBIUS_CAP}")
    mu = _accel.sieve_mobius(int(limit))
    mu.setflags(write=False)
    return MobiusTable(int(limit), mu)


_shared_lock = threading.Lock()
_shared: MobiusTable | None = None


def mobius_upto(n: int) -> np.ndarray:
    """Padded mu array covering at least 1..n, grown geometrically and shared."""
    global _shared
    if n > MOBIUS_CAP:
        raise ResourceError(f"series needs mu up to {n}, above cap {MOBIUS_CAP}")
    with _shared_lock:
        if _shared is None or _shared.limit < n:
            size = max(n, 1 << 16)
            if _shared is not None:
                size = max(size, min(2 * _shared.limit, MOBIUS_CAP))
            _shared = build_mobius(size)
        return _shared.padded


def hermite_numbers(limit: int) -> list[int]:
    """Exact H_0..H_limit with H_n = H_n(0), via H_n = -2(n-1) H_{n-2}."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    h = [1, 0]
    for n in range(2, limit + 1):
        h.append(-2 * (n - 1) * h[n - 2])
    return h[: limit + 1]


def hermite_closed_form(n: int) -> int:
    if n % 2:
        return 0
    k = n // 2
    return (-1) ** k * math.factorial(2 * k) // math.factorial(k)


def log_factorial(n: int, cfg: PrecisionConfig | None = None):
    """log(n!) as an exact running sum of logs at the working precision."""
    if n < 0:
        raise ValueError("n must be >= 0")
    bits = 53 if cfg is None else cfg.bits
    with mp.workprec(bits + 16):
        s = mp.fsum(mp.log(k) for k in range(2, n + 1))
    with mp.workprec(bits):
        return +s


def log_factorial_table(n: int, cfg: PrecisionConfig | None = None) -> list:
    """[log 0!, log 1!, ..., log n!] by cumulative summation."""
    bits = 53 if cfg is None else cfg.bits
    out = [mp.mpf(0)]
    with mp.workprec(bits + 32):
        acc = mp.mpf(0)
        for k in range(1, n + 1):
            acc += mp.log(k)
            out.append(+acc)
    return out
