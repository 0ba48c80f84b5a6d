"""Binary64 hot loops: Moebius sieve and Moebius-weighted series.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The numba path is used unless numba is
missing or ``RIESZLAB_DISABLE_NUMBA=1`` is set in the environment; the
choice is made once at import time.

All series kernels take ``mu`` as a padded int8 array (``mu[n]`` is the
Moebius value of ``n``, ``mu[0]`` unused) and sum ``n = 1..N`` inclusive.
"""

from __future__ import annotations

import math
import os

import numpy as np

_CHUNK = 1 << 20

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

NUMBA_ENABLED = HAVE_NUMBA and os.environ.get("RIESZLAB_DISABLE_NUMBA", "0") not in ("1", "true", "yes")


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


# ---------------------------------------------------------------------------
# pure numpy implementations
# ---------------------------------------------------------------------------


def _np_sieve_mobius(limit: int) -> np.ndarray:
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    if limit < 2:
        return mu
    is_comp = np.zeros(limit + 1, dtype=bool)
    r = math.isqrt(limit)
    for p in range(2, r + 1):
        if not is_comp[p]:
            is_comp[p * p :: p] = True
    primes = np.flatnonzero(~is_comp[2:]) + 2
    for p in primes:
        p = int(p)
        mu[p::p] *= -1
        if p <= r:
            mu[p * p :: p * p] = 0
    return mu


def _chunks(N: int):
    start = 1
    while start <= N:
        stop = min(N, start + _CHUNK - 1)
        yield np.arange(start, stop + 1, dtype=np.float64), start, stop
        start = stop + 1


def _np_riesz_direct_sum(x: float, mu: np.ndarray, N: int) -> float:
    parts = []
    for n, a, b in _chunks(N):
        m = mu[a : b + 1].astype(np.float64)
        parts.append(np.sum(m / (n * n) * np.expm1(-x / (n * n))))
    return math.fsum(parts)


def _np_s_sum(t: float, mu: np.ndarray, N: int) -> float:
    parts = []
    for n, a, b in _chunks(N):
        m = mu[a : b + 1].astype(np.float64)
        parts.append(np.sum(n * m * np.exp(-(n * t) ** 2)))
    return math.fsum(parts)


def _np_s_prime_sum(t: float, mu: np.ndarray, N: int) -> float:
    parts = []
    for n, a, b in _chunks(N):
        m = mu[a : b + 1].astype(np.float64)
        parts.append(np.sum(-2.0 * t * n**3 * m * np.exp(-(n * t) ** 2)))
    return math.fsum(parts)


def _np_kbar_sum(t: float, mu: np.ndarray, N: int) -> float:
    parts = []
    for n, a, b in _chunks(N):
        m = mu[a : b + 1].astype(np.float64)
        parts.append(np.sum(m / (n * n) * np.exp(-(n * t) ** 2) * np.cos(2.0 * n * t)))
    return math.fsum(parts)


def _np_mu_weighted_sum(p: int, mu: np.ndarray, N: int) -> float:
    parts = []
    for n, a, b in _chunks(N):
        m = mu[a : b + 1].astype(np.float64)
        parts.append(np.sum(m / n**p))
    return math.fsum(parts)


def _np_cos_comp_sum(w: float, mu: np.ndarray, N: int, order: int) -> float:
    parts = []
    for n, a, b in _chunks(N):
        m = mu[a : b + 1].astype(np.float64)
        u = w / n
        c = -2.0 * np.sin(0.5 * u) ** 2
        if order == 2:
            c = c + 0.5 * u * u
        parts.append(np.sum(m / n * c))
    return math.fsum(parts)


def _np_pz_comp_sum(y: float, zr: float, zi: float, mu: np.ndarray, N: int, order: int = 1) -> tuple[float, float]:
    sy = math.sqrt(y)
    z = complex(zr, zi)
    c1 = y * (0.5 * z * z - 1.0)  # coefficient of n^-2 in the expansion
    re_parts, im_parts = [], []
    for n, a, b in _chunks(N):
        m = mu[a : b + 1].astype(np.float64)
        v = (sy / n) * z
        half = 0.5 * v
        sh = np.sinh(half)
        cosh_m1 = 2.0 * sh * sh
        term = np.expm1(-y / (n * n)) * (1.0 + cosh_m1) + cosh_m1
        if order == 2:
            term = term - c1 / (n * n)
        w = m / n * term
        re_parts.append(np.sum(w.real))
        im_parts.append(np.sum(w.imag))
    return math.fsum(re_parts), math.fsum(im_parts)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_sieve_mobius(limit):
        mu = np.ones(limit + 1, dtype=np.int8)
        mu[0] = 0
        if limit < 2:
            return mu
        comp = np.zeros(limit + 1, dtype=np.bool_)
        for p in range(2, limit + 1):
            if comp[p]:
                continue
            for k in range(p, limit + 1, p):
                comp[k] = True
                mu[k] = -mu[k]
            pp = p * p
            if pp <= limit:
                for k in range(pp, limit + 1, pp):
                    mu[k] = 0
        return mu

    @njit(cache=True)
    def _nb_riesz_direct_sum(x, mu, N):
        s = 0.0
        c = 0.0
        for n in range(1, N + 1):
            m = mu[n]
            if m == 0:
                continue
            fn = float(n)
            v = m / (fn * fn) * math.expm1(-x / (fn * fn))
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        return s + c

    @njit(cache=True)
    def _nb_s_sum(t, mu, N):
        s = 0.0
        c = 0.0
        for n in range(1, N + 1):
            m = mu[n]
            if m == 0:
                continue
            fn = float(n)
            v = fn * m * math.exp(-(fn * t) ** 2)
            u = s + v
            if abs(s) >= abs(v):
                c += (s - u) + v
            else:
                c += (v - u) + s
            s = u
        return s + c

    @njit(cache=True)
    def _nb_s_prime_sum(t, mu, N):
        s = 0.0
        c = 0.0
        for n in range(1, N + 1):
            m = mu[n]
            if m == 0:
                continue
            fn = float(n)
            v = -2.0 * t * fn * fn * fn * m * math.exp(-(fn * t) ** 2)
            u = s + v
            if abs(s) >= abs(v):
                c += (s - u) + v
            else:
                c += (v - u) + s
            s = u
        return s + c

    @njit(cache=True)
    def _nb_kbar_sum(t, mu, N):
        s = 0.0
        c = 0.0
        for n in range(1, N + 1):
            m = mu[n]
            if m == 0:
                continue
            fn = float(n)
            v = m / (fn * fn) * math.exp(-(fn * t) ** 2) * math.cos(2.0 * fn * t)
            u = s + v
            if abs(s) >= abs(v):
                c += (s - u) + v
            else:
                c += (v - u) + s
            s = u
        return s + c

    @njit(cache=True)
    def _nb_mu_weighted_sum(p, mu, N):
        s = 0.0
        c = 0.0
        for n in range(1, N + 1):
            m = mu[n]
            if m == 0:
                continue
            v = m / float(n) ** p
            u = s + v
            if abs(s) >= abs(v):
                c += (s - u) + v
            else:
                c += (v - u) + s
            s = u
        return s + c

    @njit(cache=True)
    def _nb_cos_comp_sum(w, mu, N, order):
        s = 0.0
        c = 0.0
        for n in range(1, N + 1):
            m = mu[n]
            if m == 0:
                continue
            fn = float(n)
            u = w / fn
            sh = math.sin(0.5 * u)
            d = -2.0 * sh * sh
            if order == 2:
                d += 0.5 * u * u
            v = m / fn * d
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        return s + c

    @njit(cache=True)
    def _nb_pz_comp_sum(y, zr, zi, mu, N, order):
        sy = math.sqrt(y)
        # coefficient of n^-2: y (z^2/2 - 1)
        c1r = y * (0.5 * (zr * zr - zi * zi) - 1.0)
        c1i = y * zr * zi
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for n in range(1, N + 1):
            m = mu[n]
            if m == 0:
                continue
            fn = float(n)
            a = 0.5 * sy * zr / fn
            b = 0.5 * sy * zi / fn
            # sinh(a + ib) = sinh a cos b + i cosh a sin b
            shr = math.sinh(a) * math.cos(b)
            shi = math.cosh(a) * math.sin(b)
            # cosh(v) - 1 = 2 sinh^2(v/2)
            cm_r = 2.0 * (shr * shr - shi * shi)
            cm_i = 4.0 * shr * shi
            e = math.expm1(-y / (fn * fn))
            tr = e * (1.0 + cm_r) + cm_r
            ti = e * cm_i + cm_i
            if order == 2:
                tr -= c1r / (fn * fn)
                ti -= c1i / (fn * fn)
            vr = m / fn * tr
            vi = m / fn * ti
            t = sr + vr
            if abs(sr) >= abs(vr):
                cr += (sr - t) + vr
            else:
                cr += (vr - t) + sr
            sr = t
            t = si + vi
            if abs(si) >= abs(vi):
                ci += (si - t) + vi
            else:
                ci += (vi - t) + si
            si = t
        return sr + cr, si + ci


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if NUMBA_ENABLED:
    sieve_mobius = _nb_sieve_mobius
    riesz_direct_sum = _nb_riesz_direct_sum
    s_sum = _nb_s_sum
    s_prime_sum = _nb_s_prime_sum
    kbar_sum = _nb_kbar_sum
    mu_weighted_sum = _nb_mu_weighted_sum
    cos_comp_sum = _nb_cos_comp_sum
    pz_comp_sum = _nb_pz_comp_sum
else:
    sieve_mobius = _np_sieve_mobius
    riesz_direct_sum = _np_riesz_direct_sum
    s_sum = _np_s_sum
    s_prime_sum = _np_s_prime_sum
    kbar_sum = _np_kbar_sum
    mu_weighted_sum = _np_mu_weighted_sum
    cos_comp_sum = _np_cos_comp_sum
    pz_comp_sum = _np_pz_comp_sum

NUMPY_KERNELS = {
    "sieve_mobius": _np_sieve_mobius,
    "riesz_direct_sum": _np_riesz_direct_sum,
    "s_sum": _np_s_sum,
    "s_prime_sum": _np_s_prime_sum,
    "kbar_sum": _np_kbar_sum,
    "mu_weighted_sum": _np_mu_weighted_sum,
    "cos_comp_sum": _np_cos_comp_sum,
    "pz_comp_sum": _np_pz_comp_sum,
}

NUMBA_KERNELS = (
    {
        "sieve_mobius": _nb_sieve_mobius,
        "riesz_direct_sum": _nb_riesz_direct_sum,
        "s_sum": _nb_s_sum,
        "s_prime_sum": _nb_s_prime_sum,
        "kbar_sum": _nb_kbar_sum,
        "mu_weighted_sum": _nb_mu_weighted_sum,
        "cos_comp_sum": _nb_cos_comp_sum,
        "pz_comp_sum": _nb_pz_comp_sum,
    }
    if HAVE_NUMBA
    else {}
)
