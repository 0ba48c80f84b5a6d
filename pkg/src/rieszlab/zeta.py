"""Riemann zeta, its derivative, and complex log-gamma at configurable precision.

Euler-Maclaurin summation is the only zeta algorithm here.  For
``Re s < 0.25`` the value is obtained through the functional equation
``zeta(s) = chi(s) zeta(1 - s)`` with
``chi(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s)``, except inside
``|s| <= 1/2`` where that product is an indeterminate 0 * pole.

mpmath supplies the multiprecision number types and Bernoulli numbers;
the series themselves are summed here.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath as mp

from .arith import PrecisionConfig
from .errors import ConsistencyError, ConvergenceError, PoleError

_DEFAULT = PrecisionConfig()
_GUARD = 24
REFLECT_BELOW = 0.25


def _cfg(cfg):
    return _DEFAULT if cfg is None else cfg


def _is_nonpos_int(z) -> bool:
    return mp.im(z) == 0 and mp.re(z) <= 0 and mp.isint(mp.re(z))


# ---------------------------------------------------------------------------
# log-gamma and digamma (Stirling series after upward shift)
# ---------------------------------------------------------------------------


def _shift_radius(bits: int) -> int:
    # Stirling's smallest term is about exp(-2 pi |w|)
    return int(0.12 * bits) + 8


def _loggamma_raw(z, bits: int):
    eps = mp.ldexp(1, -bits)
    R = _shift_radius(bits)
    m = max(0, int(mp.ceil(R - mp.re(z))))
    shift = mp.fsum(mp.log(z + j) for j in range(m)) if m else 0
    w = z + m
    s = (w - 0.5) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
    w2 = w * w
    wp = w
    for k in range(1, 4 * bits):
        term = mp.bernoulli(2 * k) / (2 * k * (2 * k - 1) * wp)
        s += term
        if abs(term) < eps * (1 + abs(s)):
            break
        wp *= w2
    else:  # pragma: no cover - R is chosen so this cannot happen
        raise ConvergenceError("Stirling series did not converge")
    return s - shift


def log_gamma(s, cfg: PrecisionConfig | None = None):
    """Principal branch of log Gamma(s) (continuous from the positive axis)."""
    cfg = _cfg(cfg)
    with mp.workprec(cfg.bits + _GUARD):
        z = mp.mpmathify(s)
        if _is_nonpos_int(z):
            raise PoleError(f"Gamma has a pole at {s}")
        real = mp.im(z) == 0 and mp.re(z) > 0
        if real:
            z = mp.re(z)
        r = _loggamma_raw(z, cfg.bits + _GUARD)
    with mp.workprec(cfg.bits):
        return +r


def digamma(s, cfg: PrecisionConfig | None = None):
    cfg = _cfg(cfg)
    bits = cfg.bits + _GUARD
    with mp.workprec(bits):
        z = mp.mpmathify(s)
        if _is_nonpos_int(z):
            raise PoleError(f"digamma has a pole at {s}")
        eps = mp.ldexp(1, -bits)
        R = _shift_radius(bits)
        m = max(0, int(mp.ceil(R - mp.re(z))))
        shift = mp.fsum(1 / (z + j) for j in range(m)) if m else 0
        w = z + m
        r = mp.log(w) - 1 / (2 * w)
        w2 = w * w
        wp = w2
        for k in range(1, 4 * bits):
            term = mp.bernoulli(2 * k) / (2 * k * wp)
            r -= term
            if abs(term) < eps * (1 + abs(r)):
                break
            wp *= w2
        r -= shift
    with mp.workprec(cfg.bits):
        return +r


def gamma(s, cfg: PrecisionConfig | None = None):
    cfg = _cfg(cfg)
    with mp.workprec(cfg.bits + _GUARD):
        g = mp.exp(log_gamma(s, cfg.with_(bits=cfg.bits + _GUARD)))
    with mp.workprec(cfg.bits):
        return +g


# ---------------------------------------------------------------------------
# Euler-Maclaurin core
# ---------------------------------------------------------------------------


def _em(s, bits: int, deriv: bool, max_terms: int):
    """Euler-Maclaurin for zeta(s) (and zeta'(s)); caller holds workprec(bits)."""
    eps = mp.ldexp(1, -bits)
    a = abs(s)
    N = max(8, int(2 * (a + bits / 2) / math.pi) + 2)
    if N > max_terms:
        raise ConvergenceError(f"Euler-Maclaurin needs N={N} > max_terms={max_terms}")
    real = mp.im(s) == 0
    head = 0
    dhead = 0
    for n in range(1, N):
        ln = mp.log(n)
        p = mp.exp(-s * ln)
        head += p
        if deriv:
            dhead -= ln * p
    L = mp.log(N)
    pN = mp.exp(-s * L)  # N^-s
    sm1 = s - 1
    val = head + N * pN / sm1 + pN / 2
    dval = dhead + N * pN * (-L / sm1 - 1 / sm1**2) - L * pN / 2 if deriv else 0
    P = s
    dP = mp.mpf(1)
    Npow = pN / N  # N^(-s-1)
    N2 = mp.mpf(N) ** 2
    prev = None
    for k in range(1, 4 * bits):
        c = mp.bernoulli(2 * k) / mp.factorial(2 * k)
        term = c * P * Npow
        val += term
        mag = abs(term)
        if deriv:
            dterm = c * Npow * (dP - L * P)
            dval += dterm
            mag = max(mag, abs(dterm))
        if mag < eps * (1 + abs(val)):
            break
        if prev is not None and mag > prev and k > 4:
            raise ConvergenceError("Euler-Maclaurin tail diverged before reaching tolerance")
        prev = mag
        q = (s + 2 * k - 1) * (s + 2 * k)
        dq = 2 * s + 4 * k - 1
        dP = dP * q + P * dq
        P = P * q
        Npow /= N2
    else:  # pragma: no cover
        raise ConvergenceError("Euler-Maclaurin did not converge")
    if real:
        val = mp.re(val)
        dval = mp.re(dval) if deriv else 0
    return val, dval


def _chi_parts(s, cfg_bits):
    """Return (chi(s), chi'(s)) for the functional equation."""
    inner = PrecisionConfig(bits=cfg_bits)
    g = mp.exp(log_gamma(1 - s, inner))
    base = mp.power(2, s) * mp.power(mp.pi, s - 1) * g
    half = mp.pi * s / 2
    sn, cs = mp.sin(half), mp.cos(half)
    chi = base * sn
    dchi = base * ((mp.log(2 * mp.pi) - digamma(1 - s, inner)) * sn + mp.pi / 2 * cs)
    return chi, dchi


def _zeta_pair(s, cfg: PrecisionConfig, deriv: bool):
    bits = cfg.bits + _GUARD
    with mp.workprec(bits):
        s = mp.mpmathify(s)
        if s == 1:
            raise PoleError("zeta has a pole at s = 1")
        # near s = 0 the reflection is 0 * pole; Euler-Maclaurin is fine there
        if mp.re(s) < REFLECT_BELOW and abs(s) > 0.5:
            chi, dchi = _chi_parts(s, bits)
            z1, dz1 = _em(1 - s, bits, deriv, cfg.max_terms)
            val = chi * z1
            dval = dchi * z1 - chi * dz1 if deriv else 0
        elif mp.im(s) == 0 and not deriv and mp.re(s) > 1:
            val, dval = _zeta_real_direct(mp.re(s), bits, cfg.max_terms), 0
        else:
            val, dval = _em(s, bits, deriv, cfg.max_terms)
    with mp.workprec(cfg.bits):
        return +val, (+dval if deriv else None)


def _zeta_real_direct(s, bits, max_terms):
    # direct sum when the integral tail N^(1-s)/(s-1) is already below 2^-bits
    N = int(mp.ceil(mp.exp(bits * mp.ln2 / (s - 1)))) + 1 if s - 1 > bits / 40 else None
    if N is not None and N <= 64:
        return mp.fsum(mp.power(n, -s) for n in range(1, N + 1))
    return _em(s, bits, False, max_terms)[0]


def zeta(s, cfg: PrecisionConfig | None = None):
    return _zeta_pair(s, _cfg(cfg), False)[0]


def zeta_real(s, cfg: PrecisionConfig | None = None):
    """Shortcut for real s; returns an mpf."""
    v = zeta(mp.mpf(s), cfg)
    return mp.re(v)


@lru_cache(maxsize=8192)
def _zeta_int_cached(m: int, bits: int):
    return zeta_real(m, PrecisionConfig(bits=bits))


def zeta_int(m: int, cfg: PrecisionConfig | None = None):
    """zeta(m) for an integer m >= 2, memoised per precision."""
    cfg = _cfg(cfg)
    return _zeta_int_cached(int(m), cfg.bits)


def zeta_prime(s, cfg: PrecisionConfig | None = None):
    """zeta'(s) by the term-wise differentiated series, cross-checked.

    The check is a five-point central difference with step
    h = 2^(-bits/3) evaluated with extra guard bits; the two must agree to
    10 * abs_tol or ConsistencyError is raised.
    """
    cfg = _cfg(cfg)
    _, d = _zeta_pair(s, cfg, True)
    fd = _fd_derivative(s, cfg)
    with mp.workprec(cfg.bits):
        gap = abs(d - fd)
    if gap > 10 * cfg.abs_tol:
        raise ConsistencyError(f"zeta'({s}): series and finite difference differ by {mp.nstr(gap, 5)}")
    return d


def _fd_derivative(s, cfg: PrecisionConfig):
    inner = cfg.with_(bits=cfg.bits + cfg.bits // 3 + 16)
    with mp.workprec(inner.bits):
        s = mp.mpmathify(s)
        h = mp.ldexp(1, -(cfg.bits // 3))
        f = [zeta(s + k * h, inner) for k in (-2, -1, 1, 2)]
        d = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
    with mp.workprec(cfg.bits):
        return +d


def inv_zeta_prime_trivial(n: int, cfg: PrecisionConfig | None = None):
    """1/zeta'(-2n) = pi^(2n) 2^(2n+1) / ((-1)^n zeta(2n+1) (2n)!)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = _cfg(cfg)
    with mp.workprec(cfg.bits + _GUARD):
        z = zeta_int(2 * n + 1, cfg.with_(bits=cfg.bits + _GUARD))
        v = mp.pi ** (2 * n) * mp.mpf(2) ** (2 * n + 1) / ((-1) ** n * z * mp.factorial(2 * n))
    with mp.workprec(cfg.bits):
        return +v


def hardy_z(t, cfg: PrecisionConfig | None = None):
    """Z(t) = exp(i theta(t)) zeta(1/2 + i t), real for real t."""
    cfg = _cfg(cfg)
    with mp.workprec(cfg.bits + _GUARD):
        t = mp.mpf(t)
        inner = cfg.with_(bits=cfg.bits + _GUARD)
        theta = mp.im(log_gamma(mp.mpc(0.25, t / 2), inner)) - t / 2 * mp.log(mp.pi)
        z = zeta(mp.mpc(0.5, t), inner)
        r = mp.re(mp.expj(theta) * z)
    with mp.workprec(cfg.bits):
        return +r
