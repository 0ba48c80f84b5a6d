"""Envelope extraction and growth-exponent fits.

An O(x^alpha) statement cannot be checked on a finite window, so it is
read operationally: sample the function on a geometric grid, keep the
strict local maxima of |f| (the envelope) and fit the slope of
log|envelope| against log x.  The grid and the window are part of every
result.

Sampling density matters.  The sums probed here oscillate in log x with
the frequency gamma_1/2 of the first zero pair, so |f| has a half-period
of 2 pi / gamma_1 (about 0.19 decades).  A grid that puts only a few
samples in each half-period catches the maxima at random phases and
biases the fit; ``oscillation_density`` picks at least
``SAMPLES_PER_HALF_PERIOD`` samples per half-period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import PrecisionConfig
from .errors import ConsistencyError, ResourceError, SingularFitError
from .kernels import p_z
from .riesz import calibrated, explicit_formula, riesz_direct, trivial_sum, zero_sum
from .zeros import ZeroTable

DEFAULT_PER_DECADE = 16
SAMPLES_PER_HALF_PERIOD = 8
GAMMA_1 = 14.134725141734693790
MIN_SAMPLES = 32
RIESZ_WINDOW = (1e2, 1e8)
CROSS_CHECK_MAX_X = 1e3
CROSS_CHECK_TOL = 1e-6
PZ_MAX_Y = 1e6
TARGETS = ("riesz", "w", "trivial")

OK = "ok"
INSUFFICIENT = "insufficient oscillation"


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares slope of log|f| against log x on a window.

    ``n_points`` is the number of samples behind the fit; the number of
    envelope maxima actually regressed is ``meta["n_maxima"]``.
    """

    exponent: float
    intercept: float
    window: tuple
    n_points: int
    residual_rms: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.window
        if not (0 < lo < hi):
            raise ValueError("window must satisfy 0 < x_lo < x_hi")
        if self.n_points < 8:
            raise ValueError("a growth fit needs at least 8 samples")
        if not self.residual_rms >= 0:
            raise ValueError("residual_rms must be >= 0")

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "intercept": self.intercept,
            "window": list(self.window),
            "n_points": self.n_points,
            "residual_rms": self.residual_rms,
            "meta": self.meta,
        }


@dataclass(frozen=True)
class Envelope:
    x: np.ndarray
    value: np.ndarray
    status: str
    n_samples: int
    window: tuple

    def __len__(self):
        return len(self.x)

    def pairs(self) -> list:
        return list(zip(self.x.tolist(), self.value.tolist()))


def geometric_grid(lo: float, hi: float, per_decade: int = DEFAULT_PER_DECADE) -> np.ndarray:
    """Points lo = x_0 < ... < x_m = hi with a constant ratio, per_decade per factor 10."""
    if not (0 < lo < hi):
        raise ValueError("geometric grid needs 0 < lo < hi")
    if per_decade < 1:
        raise ValueError("per_decade must be >= 1")
    m = max(1, int(round(per_decade * math.log10(hi / lo))))
    return np.geomspace(lo, hi, m + 1)


def oscillation_density(gamma: float = GAMMA_1, per_half_period: int = SAMPLES_PER_HALF_PERIOD) -> int:
    """Points per decade giving per_half_period samples per half-period of |f|.

    Never below the default of 16 per decade.
    """
    half_periods_per_decade = math.log(10.0) * gamma / (2.0 * math.pi)
    return max(DEFAULT_PER_DECADE, int(math.ceil(per_half_period * half_periods_per_decade)))


def _as_arrays(samples):
    if isinstance(samples, tuple) and len(samples) == 2 and np.ndim(samples[0]) == 1:
        x, v = samples
    else:
        arr = list(samples)
        x = [p[0] for p in arr]
        v = [p[1] for p in arr]
    x = np.asarray(x, dtype=float)
    v = np.abs(np.asarray(v, dtype=complex)) if np.iscomplexobj(np.asarray(v)) else np.asarray(v, dtype=float)
    return x, v


def _check_geometric(x: np.ndarray):
    if np.any(x <= 0) or np.any(np.diff(x) <= 0):
        raise ValueError("samples must have positive, strictly increasing abscissae")
    r = np.diff(np.log(x))
    if np.ptp(r) > 1e-6 * max(abs(r.mean()), 1e-300):
        raise ValueError("samples must lie on a geometric grid")


def envelope(samples) -> Envelope:
    """Strict local maxima of |value| over the interior samples.

    ``samples`` is a sequence of (x, value) pairs or a pair of arrays.  At
    least 32 samples on a geometric grid are required.  Fewer than three
    maxima give an envelope with status "insufficient oscillation".
    """
    x, v = _as_arrays(samples)
    if len(x) < MIN_SAMPLES:
        raise ValueError(f"envelope needs at least {MIN_SAMPLES} samples, got {len(x)}")
    _check_geometric(x)
    a = np.abs(v)
    if not np.all(np.isfinite(a)):
        raise ValueError("samples contain non-finite values")
    if np.ptp(a) == 0:
        raise ValueError("constant input has no envelope")
    mid = a[1:-1]
    idx = np.flatnonzero((mid > a[:-2]) & (mid > a[2:])) + 1
    status = OK if len(idx) >= 3 else INSUFFICIENT
    return Envelope(x[idx], a[idx], status, len(x), (float(x[0]), float(x[-1])))


def _loglog_fit(lx: np.ndarray, ly: np.ndarray):
    if len(lx) < 3:
        raise ValueError("fit needs at least 3 points")
    if np.ptp(lx) == 0:
        raise SingularFitError("all abscissae coincide")
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, icpt), *_ = np.linalg.lstsq(A, ly, rcond=None)
    res = ly - (slope * lx + icpt)
    rms = float(np.sqrt(np.mean(res**2)))
    # curvature across the window, in log units; large means "not a power law"
    if len(lx) >= 4:
        q = np.polyfit(lx - lx.mean(), ly, 2)[0]
        bend = float(abs(q) * (np.ptp(lx) / 2.0) ** 2)
    else:
        bend = 0.0
    return float(slope), float(icpt), rms, bend


def fit_exponent(env, n_samples: int | None = None) -> GrowthFit:
    """Least-squares slope of log(envelope) against log x.

    Accepts an ``Envelope`` or a plain sequence of (x, value) points.
    """
    if isinstance(env, Envelope):
        x, a = env.x, env.value
        n = env.n_samples if n_samples is None else n_samples
        status = env.status
    else:
        x, v = _as_arrays(env)
        a = np.abs(v)
        n = len(x) if n_samples is None else n_samples
        status = OK
    if len(x) < 3:
        raise ValueError("fit_exponent needs at least 3 envelope points")
    if np.any(a <= 0):
        raise ValueError("envelope values must be positive")
    slope, icpt, rms, bend = _loglog_fit(np.log(x), np.log(a))
    lo, hi = (float(x.min()), float(x.max()))
    if isinstance(env, Envelope):
        lo, hi = env.window
    meta = {"n_maxima": int(len(x)), "envelope_status": status, "curvature": bend, "power_law": bend < 1.0}
    return GrowthFit(slope, icpt, (lo, hi), int(n), rms, meta)


def fit_samples(x, v, meta: dict | None = None, log_abs=None) -> GrowthFit:
    """Envelope fit of sampled data, falling back to all samples without oscillation.

    When the samples do not oscillate (fewer than three maxima), the slope
    is fitted through every sample instead and the envelope status is
    recorded in ``meta``.  ``log_abs`` may carry log|v| directly for values
    that underflow in floating point.
    """
    x = np.asarray(x, dtype=float)
    extra = dict(meta or {})
    if log_abs is None:
        env = envelope((x, np.asarray(v)))
        if env.status == OK:
            fit = fit_exponent(env)
            fit.meta.update(extra)
            return fit
        ly = np.log(np.abs(np.asarray(v, dtype=float)))
    else:
        _check_geometric(x)
        env = None
        ly = np.asarray(log_abs, dtype=float)
    if not np.all(np.isfinite(ly)):
        raise ValueError("samples contain zeros or non-finite values")
    slope, icpt, rms, bend = _loglog_fit(np.log(x), ly)
    extra.update(
        n_maxima=0,
        envelope_status=INSUFFICIENT,
        fit="all samples",
        curvature=bend,
        power_law=bend < 1.0,
    )
    return GrowthFit(slope, icpt, (float(x[0]), float(x[-1])), len(x), rms, extra)


def _check_window(lo, hi, bounds, name):
    if not (lo < hi):
        raise ValueError(f"{name} window must satisfy lo < hi")
    if lo < bounds[0] * (1 - 1e-12) or hi > bounds[1] * (1 + 1e-12):
        raise ValueError(f"{name} window must lie inside [{bounds[0]:g}, {bounds[1]:g}]")


def riesz_samples(xs, table: ZeroTable, cfg: PrecisionConfig | None = None, target: str = "riesz", cal=None) -> np.ndarray:
    """Values of R (calibrated explicit formula), its zero part (w) or its trivial part."""
    cfg = cfg or PrecisionConfig()
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    cal = cal or _calibration(table, cfg)
    K = len(table)
    if target == "riesz":
        return np.array([explicit_formula(x, cal.a, cal.b, table, cfg, K).value for x in xs])
    if target == "w":
        return np.array([cal.a * zero_sum(x, table, K, cfg).value for x in xs])
    return np.array([cal.b * trivial_sum(x, None, cfg).value for x in xs])


def _calibration(table, cfg):
    try:
        return calibrated(table, cfg)
    except ValueError as exc:
        raise ConsistencyError(f"calibration missing: {exc}") from exc


def riesz_criterion_probe(
    x_lo: float = RIESZ_WINDOW[0],
    x_hi: float = RIESZ_WINDOW[1],
    table: ZeroTable | None = None,
    cfg: PrecisionConfig | None = None,
    target: str = "riesz",
    per_decade: int | None = None,
    cal=None,
) -> GrowthFit:
    """Envelope exponent of R(x) sampled through the calibrated explicit formula.

    ``target="w"`` fits the zero sum alone and ``target="trivial"`` the
    trivial-zero series alone.  Grid points at or below 1e3 are
    cross-checked against the direct series; a disagreement above
    1e-6 x^(1/4) raises ``ConsistencyError``.
    """
    cfg = cfg or PrecisionConfig()
    if table is None:
        raise ConsistencyError("calibration missing: no zero table supplied")
    _check_window(x_lo, x_hi, RIESZ_WINDOW, "probe")
    cal = cal or _calibration(table, cfg)
    per_decade = per_decade or oscillation_density()
    xs = geometric_grid(x_lo, x_hi, per_decade)
    vals = riesz_samples(xs, table, cfg, target, cal)
    meta = {"target": target, "per_decade": per_decade, "zero_pairs": len(table), "a": cal.a, "b": cal.b}
    if target == "riesz":
        # the check only needs 1e-6 x^(1/4), so a looser tolerance keeps
        # the direct series on its float64 path
        loose = cfg.with_(abs_tol=max(cfg.abs_tol, 1e-9))
        worst = 0.0
        for x, v in zip(xs, vals):
            if x <= CROSS_CHECK_MAX_X:
                worst = max(worst, abs(v - riesz_direct(x, loose).value) / x**0.25)
        if worst > CROSS_CHECK_TOL:
            raise ConsistencyError(f"explicit formula and direct series disagree: {worst:.3g} x^(1/4)")
        meta["cross_check"] = float(worst)
    return fit_samples(xs, vals, meta)


def pz_samples(ys, z, cfg: PrecisionConfig | None = None, control: bool = False):
    """P_z(y) on the grid, or log|e^{-y} cosh(z sqrt y)| for the single-term control."""
    cfg = cfg or PrecisionConfig()
    z = complex(z)
    if control:
        # n = 1 term without Moebius compensation; kept in log form since
        # e^{-y} underflows long before y = 1e3
        return np.array([-y + _log_abs_cosh(math.sqrt(y) * z) for y in ys])
    return np.array([abs(p_z(y, z, cfg)) if z.real and z.imag else p_z(y, z, cfg) for y in ys])


def _log_abs_cosh(w: complex) -> float:
    a, b = abs(w.real), w.imag
    # |cosh(a + ib)|^2 = sinh(a)^2 + cos(b)^2
    if a > 20:
        return a - math.log(2.0) + 0.5 * math.log1p(math.exp(-4 * a) + 4 * math.exp(-2 * a) * (math.cos(b) ** 2 - 0.5))
    return 0.5 * math.log(math.sinh(a) ** 2 + math.cos(b) ** 2)


def pz_decay_probe(
    z=0.0,
    y_lo: float = 1e3,
    y_hi: float = PZ_MAX_Y,
    cfg: PrecisionConfig | None = None,
    per_decade: int | None = None,
    control: bool = False,
) -> GrowthFit:
    """Envelope exponent of |P_z(y)| on a geometric grid.

    ``control=True`` replaces the series by its n = 1 term e^{-y} cosh(z sqrt y),
    which has no power-law envelope; the fit reports ``power_law`` False.
    """
    cfg = cfg or PrecisionConfig(abs_tol=1e-10)
    if not (0 < y_lo < y_hi):
        raise ValueError("pz window must satisfy 0 < y_lo < y_hi")
    if y_hi > PZ_MAX_Y:
        raise ResourceError(f"y_hi = {y_hi:g} exceeds the cap {PZ_MAX_Y:g} for the compensated series")
    per_decade = per_decade or oscillation_density()
    ys = geometric_grid(y_lo, y_hi, per_decade)
    z = complex(z)
    meta = {"target": "pz", "z": [z.real, z.imag], "per_decade": per_decade, "control": control}
    if control:
        return fit_samples(ys, None, meta, log_abs=pz_samples(ys, z, cfg, control=True))
    return fit_samples(ys, pz_samples(ys, z, cfg), meta)
