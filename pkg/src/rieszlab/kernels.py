"""Moebius-weighted kernels and admissibility scans.

    s(t)      = sum n mu(n) exp(-(n t)^2)
    kbar(t)   = sum mu(n) n^-2 exp(-n^2 t^2) cos(2 n t)
    A(z)      = -2 sum mu(n)/n cos((2 pi / n) e^-z)
    B(t)      = sum mu(n)/n cos(sqrt(t) / n)
    P_z(y)    = sum mu(n)/n exp(-y/n^2) cosh(sqrt(y) z / n)

The last three converge only conditionally.  They are summed after
subtracting the n -> infinity limit of each summand (allowed because
sum mu(n)/n = 0), which leaves an absolutely convergent series with an
explicit tail bound.  Abel-smoothed direct sums are kept alongside as an
independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from . import _accel
from .arith import MOBIUS_CAP, PrecisionConfig, mobius_upto
from .errors import ResourceError

T_MIN = 1e-3
_F64 = PrecisionConfig(bits=53)
_INV_ZETA3 = 1.0 / 1.2020569031595942854


def _cfg(cfg):
    return cfg if cfg is not None else _F64


def _need(N: int, what: str) -> np.ndarray:
    if N > MOBIUS_CAP:
        raise ResourceError(f"{what} needs {N} terms (cap {MOBIUS_CAP})")
    return mobius_upto(N)


@dataclass(frozen=True)
class KernelId:
    tag: str
    z: complex | None = None

    TAGS = ("S_KERNEL", "KBAR", "B_FUNC", "A_BARTZ", "P_Z")

    def __post_init__(self):
        if self.tag not in self.TAGS:
            raise ValueError(f"unknown kernel tag {self.tag!r}")
        if self.tag == "P_Z":
            if self.z is None or not np.isfinite(complex(self.z)):
                raise ValueError("P_Z kernel needs a finite parameter z")

    def __str__(self):
        return self.tag if self.z is None else f"{self.tag}({complex(self.z)})"


S_KERNEL = KernelId("S_KERNEL")
KBAR = KernelId("KBAR")
B_FUNC = KernelId("B_FUNC")
A_BARTZ = KernelId("A_BARTZ")


def P_Z(z) -> KernelId:
    return KernelId("P_Z", complex(z))


# ---------------------------------------------------------------------------
# absolutely convergent kernels
# ---------------------------------------------------------------------------


def s_terms(t: float, tol: float) -> int:
    """Truncation length for s(t).

    Starts from sqrt(ln(1/tol))/t + 8 and lengthens it when needed so that
    the integral bound exp(-(N-1)^2 t^2) / (2 t^2) on the tail also holds.
    """
    base = int(math.ceil(math.sqrt(math.log(1.0 / tol)) / t)) + 8
    strict = int(math.ceil(math.sqrt(max(0.0, math.log(1.0 / (2.0 * t * t * tol)))) / t)) + 2
    return max(base, strict)


def s_kernel(t, cfg: PrecisionConfig | None = None, t_min: float = T_MIN) -> float:
    cfg = _cfg(cfg)
    t = abs(float(t))
    if t < t_min:
        raise ValueError(f"s_kernel needs t >= {t_min} (got {t})")
    N = s_terms(t, cfg.abs_tol)
    return _accel.s_sum(t, _need(N, "s(t)"), N)


def s_kernel_prime(t, cfg: PrecisionConfig | None = None, t_min: float = T_MIN) -> float:
    """Term-wise derivative of s, used as a check on finite differences."""
    cfg = _cfg(cfg)
    t = float(t)
    if abs(t) < t_min:
        raise ValueError(f"s_kernel_prime needs |t| >= {t_min}")
    N = s_terms(abs(t), cfg.abs_tol * 1e-2) + 4
    return _accel.s_prime_sum(t, _need(N, "s'(t)"), N)


def kbar_terms(t: float, tol: float) -> int:
    if t == 0:
        return 0
    return int(math.ceil(math.sqrt(math.log(1.0 / tol)) / t)) + 8


def kbar(t, cfg: PrecisionConfig | None = None) -> float:
    """kbar(t); tail after N is below exp(-N^2 t^2)/N^2 <= 1/N."""
    cfg = _cfg(cfg)
    t = abs(float(t))
    if t == 0:
        return 6.0 / math.pi**2
    N = kbar_terms(t, cfg.abs_tol)
    return _accel.kbar_sum(t, _need(N, "kbar(t)"), N)


def partial_kbar(t, N: int, cfg: PrecisionConfig | None = None):
    """Exact truncated sum of kbar's first N terms at ``cfg.bits`` (mpmath)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    cfg = cfg if cfg is not None else PrecisionConfig()
    mu = mobius_upto(N)
    with mp.workprec(cfg.bits + 16):
        tm = mp.mpf(t)
        s = mp.fsum(
            int(mu[n]) * mp.exp(-(n * tm) ** 2) * mp.cos(2 * n * tm) / (n * n)
            for n in range(1, N + 1)
            if mu[n]
        )
    with mp.workprec(cfg.bits):
        return +s


def kbar_three_term_closed(cfg: PrecisionConfig | None = None):
    """-(1/36) e^{-9 pi^2/4} (-4 + 9 e^{5 pi^2/4} + 36 e^{2 pi^2})."""
    cfg = cfg if cfg is not None else PrecisionConfig()
    with mp.workprec(cfg.bits + 16):
        p2 = mp.pi**2
        v = -mp.exp(-9 * p2 / 4) * (-4 + 9 * mp.exp(5 * p2 / 4) + 36 * mp.exp(2 * p2)) / 36
    with mp.workprec(cfg.bits):
        return +v


def p_z_kernel(t, z, cfg: PrecisionConfig | None = None) -> float:
    """Cosine-transform kernel paired with P_z: sum mu(n) n^-2 e^{-n^2 t^2} cos(2 z n t).

    z = 1 reproduces kbar; z = i z' gives the cosh variant.  Only real or
    purely imaginary z give a real kernel.
    """
    cfg = _cfg(cfg)
    z = complex(z)
    t = abs(float(t))
    if z.real and z.imag:
        raise ValueError("kernel is real only for real or purely imaginary z")
    if t == 0:
        return 6.0 / math.pi**2
    # the Gaussian beats cosh(2 z' n t) once n t > 2|z| + sqrt(ln 1/tol)
    N = int(math.ceil((2 * abs(z) + math.sqrt(math.log(1.0 / cfg.abs_tol)) + 2) / t)) + 8
    mu = _need(N, "P_z kernel")
    n = np.arange(1, N + 1, dtype=np.float64)
    m = mu[1 : N + 1].astype(np.float64)
    if z.imag:
        osc = np.cosh(2.0 * z.imag * n * t)
    else:
        osc = np.cos(2.0 * z.real * n * t)
    return math.fsum(m / (n * n) * np.exp(-(n * t) ** 2) * osc)


# ---------------------------------------------------------------------------
# compensated conditionally convergent series
# ---------------------------------------------------------------------------


def _cos_series(w: float, tol: float, order: int) -> tuple[float, int]:
    """sum mu(n)/n [cos(w/n) - 1] with first- or second-order compensation."""
    w = abs(w)
    if w == 0:
        return 0.0, 0
    if order == 1:
        # |cos u - 1| <= u^2/2  ->  tail <= w^2/(4 N^2)
        N = int(math.ceil(w / (2.0 * math.sqrt(tol / 2)))) + 1
    else:
        # |cos u - 1 + u^2/2| <= u^4/24  ->  tail <= w^4/(96 N^4)
        N = int(math.ceil(w / (96.0 * tol / 2) ** 0.25)) + 1
    N = max(N, 16)
    s = _accel.cos_comp_sum(w, _need(N, "cosine series"), N, order)
    if order == 2:
        s -= 0.5 * w * w * _INV_ZETA3
    return s, N


def b_func(t, cfg: PrecisionConfig | None = None, order: int = 2) -> float:
    """B(t) = sum mu(n)/n cos(sqrt(t)/n), with B(0) = 0.

    ``order=1`` subtracts 1 from each cosine (tail <= t/(2N^2)); the
    default ``order=2`` also subtracts u^2/2 and adds back
    -(t/2) sum mu(n)/n^3 = -(t/2)/zeta(3), shortening the series a lot.
    """
    cfg = _cfg(cfg)
    t = float(t)
    if t < 0:
        raise ValueError("b_func needs t >= 0")
    return _cos_series(math.sqrt(t), cfg.abs_tol, order)[0]


def b_func_terms(t, N: int, order: int = 1) -> float:
    """Compensated B(t) truncated at exactly N terms (for tail checks)."""
    w = math.sqrt(float(t))
    s = _accel.cos_comp_sum(w, _need(N, "b_func"), int(N), order)
    if order == 2:
        s -= 0.5 * w * w * _INV_ZETA3
    return s


def bartz_A(z, cfg: PrecisionConfig | None = None, order: int = 2) -> float:
    """A(z) = -2 sum mu(n)/n cos((2 pi/n) e^{-z}) via the compensated series."""
    cfg = _cfg(cfg)
    w = 2.0 * math.pi * math.exp(-float(z))
    return -2.0 * _cos_series(w, cfg.abs_tol / 2, order)[0]


def bartz_A_sqrt_form(u, cfg: PrecisionConfig | None = None) -> float:
    """-2 sum mu(n)/n cos(2 pi sqrt(u)/n), i.e. A(-1/2 log u), summed directly in u."""
    cfg = _cfg(cfg)
    u = float(u)
    if u < 0:
        raise ValueError("u must be >= 0")
    w = 2.0 * math.pi * math.sqrt(u)
    # first-order compensation here so the two evaluations differ in method
    return -2.0 * _cos_series(w, cfg.abs_tol / 2, 1)[0]


def pz_terms(y: float, z: complex, tol: float, order: int = 2) -> int:
    """Terms needed so the compensated P_z series tail is below tol."""
    az = abs(z)
    if order == 1:
        # e^{-a} cosh v - 1 ~ (-y + y z^2/2)/n^2; 1.25 covers the next order
        c = 1.25 * y * (1.0 + az**2 / 2.0)
        return max(16, int(math.ceil(math.sqrt(c / (2.0 * tol)))) + 1)
    # after removing the n^-2 part the summand is y^2 (1/2 - z^2/2 + z^4/24) / n^4
    # to leading order, valid once n is well past sqrt(y)(1 + |z|)
    c = 1.5 * y * y * (0.5 + az**2 / 2.0 + az**4 / 24.0)
    N = int(math.ceil((c / (4.0 * tol)) ** 0.25)) + 1
    return max(16, N, int(4.0 * math.sqrt(y) * (1.0 + az)) + 1)


def p_z(y, z, cfg: PrecisionConfig | None = None, order: int = 2) -> complex:
    """P_z(y) via sum mu(n)/n [e^{-y/n^2} cosh(sqrt(y) z/n) - 1].

    ``order=1`` is the plain mean-zero compensation.  The default
    ``order=2`` also removes the n^-2 part c/n^2 with c = y (z^2/2 - 1) and
    adds back c * sum mu(n)/n^3 = c / zeta(3), which shortens the series
    from about sqrt(y/tol) terms to about (y^2/tol)^(1/4).

    Real z and purely imaginary z give a real result (returned as a float);
    otherwise a complex number.
    """
    cfg = _cfg(cfg)
    y = float(y)
    if not y > 0:
        raise ValueError("p_z needs y > 0")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    z = complex(z)
    N = pz_terms(y, z, cfg.abs_tol, order)
    re, im = _accel.pz_comp_sum(y, z.real, z.imag, _need(N, "P_z(y)"), N, order)
    if order == 2:
        c1 = y * (0.5 * z * z - 1.0)
        re += c1.real * _INV_ZETA3
        im += c1.imag * _INV_ZETA3
    if z.real == 0 or z.imag == 0:
        # cosh of a real or of a purely imaginary argument is real
        return re
    return complex(re, im)


# ---------------------------------------------------------------------------
# Abel-smoothed oracle
# ---------------------------------------------------------------------------


def abel_sum(f, delta: float = 2e-3, levels: int = 4, cut: float = 40.0) -> float:
    """lim_{d->0} sum mu(n)/n f(n) e^{-n d}, Richardson-extrapolated in d.

    The smoothed sum has an expansion in integer powers of d (from the
    poles of Gamma) plus terms d^{1-rho} whose coefficients carry
    Gamma(rho - 1) and are below 1e-9; ``levels`` halvings of d remove the
    first ``levels - 1`` integer powers.  ``f`` must accept a float64 array.
    """
    deltas = [delta / 2**j for j in range(levels)]
    N = int(cut / deltas[-1]) + 1
    mu = _need(N, "Abel sum")
    n = np.arange(1, N + 1, dtype=np.float64)
    base = mu[1 : N + 1].astype(np.float64) / n * np.asarray(f(n))
    vals = []
    for d in deltas:
        k = min(N, int(cut / d) + 1)
        w = base[:k] * np.exp(-n[:k] * d)
        vals.append(math.fsum(w.real) + (1j * math.fsum(w.imag) if np.iscomplexobj(w) else 0.0))
    # Neville table for extrapolation to d = 0 in powers of d
    T = list(vals)
    for j in range(1, levels):
        f2 = 2.0**j
        T = [(f2 * T[i + 1] - T[i]) / (f2 - 1.0) for i in range(len(T) - 1)]
    return T[0]


def b_func_abel(t, **kw) -> float:
    w = math.sqrt(float(t))
    return abel_sum(lambda n: np.cos(w / n), **kw).real


def bartz_A_abel(z, **kw) -> float:
    w = 2.0 * math.pi * math.exp(-float(z))
    return -2.0 * abel_sum(lambda n: np.cos(w / n), **kw).real


def p_z_abel(y, z, **kw):
    y = float(y)
    z = complex(z)
    sy = math.sqrt(y)
    v = abel_sum(lambda n: np.exp(-y / (n * n)) * np.cosh(sy * z / n), **kw)
    return v.real if (z.real == 0 or z.imag == 0) else complex(v)


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionStatus:
    status: str  # pass | pass(structural) | fail | indeterminate
    witness: float | None = None
    value: float | None = None
    note: str = ""

    def __post_init__(self):
        if self.status == "fail" and self.witness is None:
            raise ValueError("a failing condition must carry a witness")

    @property
    def passed(self) -> bool:
        return self.status.startswith("pass")

    def as_dict(self):
        return {"status": self.status, "witness": self.witness, "value": self.value, "note": self.note}


@dataclass(frozen=True)
class AdmissibilityReport:
    kernel: str
    conditions: dict
    decay_exponent: float | None
    decay_window: tuple | None
    grid: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "kernel": self.kernel,
            "conditions": {k: v.as_dict() for k, v in self.conditions.items()},
            "decay_exponent": self.decay_exponent,
            "decay_window": list(self.decay_window) if self.decay_window else None,
            "grid": self.grid,
        }


def kernel_function(kernel: KernelId, cfg: PrecisionConfig | None = None):
    """A scalar evaluator t -> k(t) for the given kernel id (even in t)."""
    cfg = _cfg(cfg)
    if kernel.tag == "S_KERNEL":
        return lambda t: s_kernel(abs(t), cfg)
    if kernel.tag == "KBAR":
        return lambda t: kbar(t, cfg)
    if kernel.tag == "B_FUNC":
        return lambda t: b_func(abs(t), cfg)
    if kernel.tag == "A_BARTZ":
        return lambda t: bartz_A(abs(t), cfg)
    return lambda t: p_z_kernel(t, kernel.z, cfg)


def default_grid(kernel: KernelId, n: int = 10_000) -> np.ndarray:
    """Uniform grid: (0.001, 10] for s(t), (0, 5] otherwise."""
    if kernel.tag == "S_KERNEL":
        lo, hi = T_MIN, 10.0
    else:
        lo, hi = 0.0, 5.0
    return lo + (hi - lo) * np.arange(1, n + 1) / n


def _first_run(mask: np.ndarray):
    idx = np.flatnonzero(mask)
    if not idx.size:
        return None
    i = j = idx[0]
    while j + 1 < mask.size and mask[j + 1]:
        j += 1
    return i, j


def fit_decay_exponent(t: np.ndarray, k: np.ndarray, floor: float):
    """Decay exponent p in k(t) ~ C exp(-c t^p).

    The fit uses the decaying tail: the last run where k > floor, from
    the run's maximum onwards, cut to its top decade in t.  The model
    log k = a - c t^p is fitted with all three parameters free so a
    prefactor C != 1 does not leak into p.
    """
    pos = k > floor
    if not pos[-1]:
        # the grid may run past the point where k drops below the floor
        last = np.flatnonzero(pos)
        if not last.size:
            return None, None
        end = last[-1]
    else:
        end = k.size - 1
    start = end
    while start > 0 and pos[start - 1]:
        start -= 1
    seg = slice(start, end + 1)
    ts, ks = t[seg], k[seg]
    peak = int(np.argmax(ks))
    ts, ks = ts[peak + 1 :], ks[peak + 1 :]
    if ts.size < 8:
        return None, None
    keep = ts >= ts[-1] / 10
    ts, ks = ts[keep], ks[keep]
    if ts.size < 8 or ts[0] <= 0:
        return None, None
    from scipy.optimize import curve_fit

    y = np.log(ks)
    p0 = np.polyfit(np.log(ts), np.log(np.maximum(-y, 1e-300)), 1)[0] if np.all(y < 0) else 2.0
    try:
        (a, c, p), _ = curve_fit(lambda x, a, c, p: a - c * x**p, ts, y, p0=(0.0, 1.0, p0), maxfev=20000)
    except RuntimeError:
        return None, None
    return float(p), (float(ts[0]), float(ts[-1]))


def admissibility_report(kernel: KernelId, grid=None, cfg: PrecisionConfig | None = None) -> AdmissibilityReport:
    """Grid-level check of the five admissible-kernel conditions.

    (i) smoothness and (iii) evenness are structural: every kernel is a
    series of smooth even functions (or is evaluated at |t|).  (ii) and (iv)
    are scanned on the grid; a failure reports the midpoint of the first
    failing run.  (v) is returned as a fitted decay exponent.
    """
    cfg = _cfg(cfg)
    t = default_grid(kernel) if grid is None else np.asarray(grid, dtype=float)
    if t.ndim != 1 or t.size < 1000:
        raise ValueError("grid too coarse: need at least 1000 points")
    if np.any(np.diff(t) <= 0) or t[0] < 0:
        raise ValueError("grid must be ascending and nonnegative")
    f = kernel_function(kernel, cfg)
    k = np.array([f(x) for x in t])
    spacing = float(np.min(np.diff(t)))
    h = spacing / 8

    conds = {
        "i": ConditionStatus("pass(structural)", note="series of C-infinity terms"),
        "iii": ConditionStatus("pass(structural)", note="even by construction"),
    }

    run = _first_run(~(k > 0))
    if run is None:
        conds["ii"] = ConditionStatus("pass", note=f"k > 0 at all {t.size} grid points")
    else:
        i, j = run
        mid = (i + j) // 2
        conds["ii"] = ConditionStatus(
            "fail", float(t[mid]), float(k[mid]),
            f"k <= 0 on grid run [{t[i]:.6g}, {t[j]:.6g}]",
        )

    pos = t > h
    tp = t[pos]
    dk = np.array([(f(x + h) - f(x - h)) / (2 * h) for x in tp])
    run = _first_run(~(dk < 0))
    if run is None:
        conds["iv"] = ConditionStatus("pass", note=f"central difference < 0 at {tp.size} points, h={h:.3g}")
    else:
        i, j = run
        mid = (i + j) // 2
        conds["iv"] = ConditionStatus(
            "fail", float(tp[mid]), float(dk[mid]),
            f"k' >= 0 on grid run [{tp[i]:.6g}, {tp[j]:.6g}]",
        )

    p, window = fit_decay_exponent(t, k, 10 * cfg.abs_tol)
    if p is None:
        conds["v"] = ConditionStatus("indeterminate", note="no positive decaying tail to fit")
    else:
        # decay is reported, not judged: exp(-t^(2+eps)) is not reachable by
        # Gaussian-type kernels and a fitted p near 2 cannot settle it
        conds["v"] = ConditionStatus("indeterminate", None, p, "fitted p in k ~ C exp(-c t^p)")
    return AdmissibilityReport(
        str(kernel), conds, p, window,
        {"t_min": float(t[0]), "t_max": float(t[-1]), "points": int(t.size), "fd_step": h},
    )


def sign_changes(kernel: KernelId, grid=None, cfg: PrecisionConfig | None = None) -> list:
    """Grid intervals where the kernel changes sign (for plots and reports)."""
    t = default_grid(kernel) if grid is None else np.asarray(grid, dtype=float)
    f = kernel_function(kernel, cfg)
    k = np.array([f(x) for x in t])
    idx = np.flatnonzero(np.sign(k[:-1]) != np.sign(k[1:]))
    return [(float(t[i]), float(t[i + 1])) for i in idx]
