"""Nontrivial-zero ordinates: ingestion, refinement, enrichment, persistence.

Ordinate files are plain text, one decimal ordinate per line, ascending,
with ``#`` comments.  Enriched tables are CSV files with header
``index,gamma,zeta_prime_re,zeta_prime_im,precision_bits``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import mpmath as mp

from .arith import PrecisionConfig
from .errors import BracketError, PrecisionDowngradeWarning, TableFormatError
from .zeta import hardy_z, zeta, zeta_prime

CSV_HEADER = ["index", "gamma", "zeta_prime_re", "zeta_prime_im", "precision_bits"]
REFINED_RESIDUAL = 1e-10


@dataclass(frozen=True)
class ZeroEntry:
    index: int
    gamma: mp.mpf
    zeta_prime: mp.mpc | None = None
    refined: bool = False

    @property
    def rho(self) -> mp.mpc:
        # built at generous precision so gamma is carried exactly
        with mp.workprec(max(mp.mp.prec, 4096)):
            return mp.mpc(0.5, self.gamma)


@dataclass(frozen=True)
class ZeroTable:
    entries: tuple[ZeroEntry, ...]
    precision_bits: int

    def __post_init__(self):
        prev = None
        for i, e in enumerate(self.entries, start=1):
            if e.index != i:
                raise TableFormatError(f"entry {i} carries index {e.index}")
            if e.gamma <= 0:
                raise TableFormatError(f"entry {i}: gamma must be positive")
            if prev is not None and not e.gamma > prev:
                raise TableFormatError(f"entry {i}: ordinates must be strictly ascending")
            prev = e.gamma
        if self.entries and not 14.0 < self.entries[0].gamma < 14.2:
            raise TableFormatError("first ordinate must lie in (14.0, 14.2)")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def enriched(self) -> bool:
        return all(e.zeta_prime is not None for e in self.entries)

    def head(self, k: int) -> "ZeroTable":
        return ZeroTable(self.entries[:k], self.precision_bits)


def _build(gammas, bits, refined=False) -> ZeroTable:
    return ZeroTable(
        tuple(ZeroEntry(i, g, None, refined) for i, g in enumerate(gammas, start=1)),
        bits,
    )


def load_ordinates(path, bits: int = 256) -> ZeroTable:
    """Read an ordinate file into an unrefined, unenriched table."""
    path = Path(path)
    text = path.read_text()
    gammas = []
    prev = None
    with mp.workprec(bits):
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                g = mp.mpf(line)
            except (ValueError, TypeError):
                raise TableFormatError(f"{path}:{lineno}: cannot parse ordinate {line!r}") from None
            if not mp.isfinite(g) or g <= 0:
                raise TableFormatError(f"{path}:{lineno}: ordinate must be positive and finite")
            if prev is not None and not g > prev:
                raise TableFormatError(f"{path}:{lineno}: ordinates not ascending ({line} after {mp.nstr(prev, 15)})")
            gammas.append(g)
            prev = g
    if not gammas:
        raise TableFormatError(f"{path}: no ordinates")
    return _build(gammas, bits)


def standard_ordinates_path() -> Path:
    return Path(str(resources.files("rieszlab") / "data" / "zeros_60.txt"))


def scan_ordinates(t_max: float, step: float = 0.05, t_min: float = 10.0, cfg: PrecisionConfig | None = None) -> list[float]:
    """Midpoints of sign changes of Hardy's Z on a uniform grid."""
    cfg = cfg or PrecisionConfig(bits=64)
    n = int(math.ceil((t_max - t_min) / step))
    ts = [t_min + i * step for i in range(n + 1)]
    vals = [hardy_z(t, cfg) for t in ts]
    out = []
    for a, b, fa, fb in zip(ts, ts[1:], vals, vals[1:]):
        if fa == 0:
            out.append(a)
        elif fa * fb < 0:
            out.append(0.5 * (a + b))
    return out


def refine_zero(gamma_seed, cfg: PrecisionConfig | None = None):
    """Bracket a sign change of Z within +-0.5 of the seed and polish it.

    Illinois (modified regula falsi) keeps the root bracketed throughout.
    Returns gamma with |zeta(1/2 + i gamma)| < 10^(-bits/4).
    """
    cfg = cfg or PrecisionConfig()
    target = mp.mpf(10) ** (-(cfg.bits / 4))
    with mp.workprec(cfg.bits + 16):
        seed = mp.mpf(gamma_seed)
        lo, hi = seed - 0.5, seed + 0.5
        k = 32
        grid = [lo + (hi - lo) * i / k for i in range(k + 1)]
        probe = cfg.with_(bits=max(64, cfg.bits // 4))
        zs = [hardy_z(t, probe) for t in grid]
        brackets = [(grid[i], grid[i + 1]) for i in range(k) if zs[i] * zs[i + 1] < 0]
        if not brackets:
            raise BracketError(f"no sign change of Z(t) within 0.5 of {mp.nstr(seed, 12)}")
        a, b = min(brackets, key=lambda ab: abs((ab[0] + ab[1]) / 2 - seed))
        fa, fb = hardy_z(a, cfg), hardy_z(b, cfg)
        if fa * fb > 0:
            # the root sits on a grid node (e.g. an already refined seed) and
            # the coarse probe saw the wrong sign there; widen by one cell
            step = (hi - lo) / k
            a, b = a - step, b + step
            fa, fb = hardy_z(a, cfg), hardy_z(b, cfg)
            if fa * fb > 0:
                raise BracketError("sign change vanished at full precision")
        width_goal = mp.ldexp(1, -(cfg.bits - 8))
        for _ in range(4 * cfg.bits):
            c = b - fb * (b - a) / (fb - fa)
            fc = hardy_z(c, cfg)
            if fc == 0:
                a = b = c
                break
            if fc * fb < 0:
                a, fa = b, fb
            else:
                fa /= 2
            b, fb = c, fc
            if abs(fb) < target * mp.mpf(10) ** -4 or abs(b - a) < width_goal:
                break
        else:  # pragma: no cover
            raise BracketError("refinement did not converge")
        # fa may have been halved by the Illinois step; b is the latest true iterate
        g = b
    with mp.workprec(cfg.bits):
        g = +g
        s = mp.mpc(0.5, g)
    resid = abs(zeta(s, cfg))
    if resid >= target:
        raise BracketError(f"refined ordinate leaves |zeta| = {mp.nstr(resid, 3)}")
    return g


def refine(table: ZeroTable, cfg: PrecisionConfig | None = None) -> ZeroTable:
    cfg = cfg or PrecisionConfig()
    gammas = [refine_zero(e.gamma, cfg) for e in table.entries]
    return _build(gammas, cfg.bits, refined=True)


def enrich(table: ZeroTable, cfg: PrecisionConfig | None = None) -> ZeroTable:
    """Attach zeta'(1/2 + i gamma) to every entry (recomputed, so idempotent)."""
    cfg = cfg or PrecisionConfig()
    out = []
    for e in table.entries:
        d = zeta_prime(e.rho, cfg)
        if d == 0:
            raise BracketError(f"zeta'(rho_{e.index}) vanished; multiple zero?")
        out.append(replace(e, zeta_prime=d))
    return ZeroTable(tuple(out), cfg.bits)


def residuals(table: ZeroTable, cfg: PrecisionConfig | None = None) -> list:
    cfg = cfg or PrecisionConfig(bits=table.precision_bits)
    return [abs(zeta(e.rho, cfg)) for e in table.entries]


def _digits(bits: int) -> int:
    return int(math.ceil(bits * math.log10(2))) + 2


def save_enriched(table: ZeroTable, path) -> None:
    if not table.enriched:
        raise TableFormatError("table is not enriched")
    d = _digits(table.precision_bits)
    with mp.workprec(table.precision_bits), open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for e in table.entries:
            w.writerow(
                [
                    e.index,
                    mp.nstr(e.gamma, d, strip_zeros=False),
                    mp.nstr(mp.re(e.zeta_prime), d, strip_zeros=False),
                    mp.nstr(mp.im(e.zeta_prime), d, strip_zeros=False),
                    table.precision_bits,
                ]
            )


def load_enriched(path, bits: int | None = None) -> ZeroTable:
    """Load an enriched CSV; warns if its precision is below ``bits``."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise TableFormatError(f"{path}: header must be {','.join(CSV_HEADER)}")
    if len(rows) == 1:
        return ZeroTable((), bits or 53)
    try:
        file_bits = {int(r[4]) for r in rows[1:]}
    except (IndexError, ValueError):
        raise TableFormatError(f"{path}: bad precision_bits column") from None
    if len(file_bits) != 1:
        raise TableFormatError(f"{path}: mixed precision_bits")
    file_bits = file_bits.pop()
    if bits is not None and file_bits < bits:
        warnings.warn(
            f"{path} holds {file_bits}-bit values, {bits} requested",
            PrecisionDowngradeWarning,
            stacklevel=2,
        )
    entries = []
    with mp.workprec(file_bits):
        for lineno, r in enumerate(rows[1:], start=2):
            if len(r) != 5:
                raise TableFormatError(f"{path}:{lineno}: expected 5 fields")
            try:
                entries.append(
                    ZeroEntry(int(r[0]), mp.mpf(r[1]), mp.mpc(mp.mpf(r[2]), mp.mpf(r[3])), True)
                )
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: unparsable field") from None
    return ZeroTable(tuple(entries), file_bits)


def standard_table(k: int = 30, cfg: PrecisionConfig | None = None, cache_dir=None) -> ZeroTable:
    """First ``k`` zeros from the bundled ordinate list, refined and enriched.

    With ``cache_dir`` the enriched table is stored content-addressed by
    (k, bits) and reused on later calls.
    """
    cfg = cfg or PrecisionConfig()
    cache = None
    if cache_dir is not None:
        cache = Path(cache_dir) / f"zeros-k{k}-b{cfg.bits}.csv"
        if cache.exists():
            try:
                t = load_enriched(cache, cfg.bits)
                if len(t) == k:
                    return t
            except (TableFormatError, OSError):
                pass
    seeds = load_ordinates(standard_ordinates_path(), cfg.bits)
    if k > len(seeds):
        raise ValueError(f"bundled list has only {len(seeds)} ordinates")
    table = enrich(refine(seeds.head(k), cfg), cfg)
    if cache is not None:
        cache.parent.mkdir(parents=True, exist_ok=True)
        tmp = cache.with_suffix(".tmp")
        save_enriched(table, tmp)
        tmp.replace(cache)
    return table


def default_cache_dir() -> Path:
    """$RIESZLAB_CACHE if set, else ~/.cache/rieszlab."""
    import os

    env = os.environ.get("RIESZLAB_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "rieszlab"
