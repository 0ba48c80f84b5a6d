"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 numerical or tolerance failure, 3 I/O.

Settings come from (highest priority first) command-line flags, a
``key = value`` config file given with ``--config``, the environment
variable RIESZLAB_CACHE (cache directory only) and built-in defaults.
All numbers are written with ``repr`` so they round-trip exactly.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__, integrals, kernels, probe, riesz, zeros
from .arith import MOBIUS_CAP, PrecisionConfig
from .errors import RieszLabError, TableFormatError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

SCAN_HEADER = ["x", "value", "abs_error_bound", "method", "terms"]
IDENTITY_IDS = ("2.3", "2.6", "2.7", "3.2", "3.3", "3.4", "4.4")
KERNEL_IDS = {"s": "S_KERNEL", "kbar": "KBAR", "b": "B_FUNC", "a": "A_BARTZ", "pz": "P_Z"}
CONFIG_KEYS = {
    "bits": int,
    "abs_tol": float,
    "rel_tol": float,
    "mobius_limit": int,
    "zeros": str,
    "format": str,
    "output": str,
    "cache_dir": str,
    "zero_pairs": int,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    bits: int = 256
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    mobius_limit: int = MOBIUS_CAP
    zeros: str | None = None
    format: str | None = None
    output: str | None = None
    cache_dir: str | None = None
    zero_pairs: int = 30

    def __post_init__(self):
        try:
            self.precision()
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if self.format not in (None, "csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format!r}")
        if self.zero_pairs < 1:
            raise UsageError("zero_pairs must be >= 1")

    def precision(self) -> PrecisionConfig:
        return PrecisionConfig(self.bits, self.abs_tol, self.rel_tol, self.mobius_limit)

    def cache_path(self) -> Path:
        p = Path(self.cache_dir) if self.cache_dir else zeros.default_cache_dir()
        p.mkdir(parents=True, exist_ok=True)
        if not os.access(p, os.W_OK):
            raise OSError(f"cache directory {p} is not writable")
        return p


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](float(value)) if CONFIG_KEYS[key] is int else CONFIG_KEYS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def build_config(args) -> RunConfig:
    settings = {}
    if os.environ.get("RIESZLAB_CACHE"):
        settings["cache_dir"] = os.environ["RIESZLAB_CACHE"]
    if args.config:
        settings.update(read_config_file(args.config))
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            settings[key] = v
    return RunConfig(**settings)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _num(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def emit(text: str, cfg: RunConfig, stdout) -> None:
    if cfg.output:
        tmp = Path(cfg.output + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, cfg.output)
    else:
        stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# shared numerics
# ---------------------------------------------------------------------------


def load_table(cfg: RunConfig, k: int | None = None) -> zeros.ZeroTable:
    """Enriched zero table: from --zeros (ordinates or enriched CSV) or the bundled list.

    Tables enriched from an ordinate file are cached under a name derived
    from the file contents and the precision.
    """
    pc = cfg.precision()
    k = cfg.zero_pairs if k is None else k
    if cfg.zeros is None:
        return zeros.standard_table(k, pc, cache_dir=cfg.cache_path())
    path = Path(cfg.zeros)
    text = path.read_text()
    if text.startswith(",".join(zeros.CSV_HEADER)):
        return zeros.load_enriched(path, pc.bits).head(k)
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    cache = cfg.cache_path() / f"zeros-{digest}-k{k}-b{pc.bits}.csv"
    if cache.exists():
        try:
            return zeros.load_enriched(cache, pc.bits)
        except TableFormatError:
            pass
    table = zeros.enrich(zeros.refine(zeros.load_ordinates(path, pc.bits).head(k), pc), pc)
    zeros.save_enriched(table, cache)
    return table


def evaluate(x: float, method: str, cfg: RunConfig, table=None) -> riesz.EvalResult:
    pc = cfg.precision()
    if method == "direct":
        return riesz.riesz_direct(x, pc)
    if method == "maclaurin":
        return riesz.riesz_maclaurin(x, pc)
    if method == "hermite":
        r = riesz.riesz_hermite(math.sqrt(x), pc)
        return riesz.EvalResult(r.value * x, r.abs_error_bound * x, "hermite", r.terms_used, r.note)
    if method == "explicit":
        return riesz.riesz_explicit(x, table if table is not None else load_table(cfg), pc)
    raise UsageError(f"unknown method {method!r}")


def _record(x, r) -> list:
    return [_num(x), _num(r.value), _num(r.abs_error_bound), r.method, str(r.terms_used)]


def _positive(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {s!r}")
    return v


def parse_window(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"window must look like lo:hi, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"window must look like lo:hi, got {text!r}") from None
    if not (0 < lo < hi):
        raise UsageError(f"window needs 0 < lo < hi, got {text!r}")
    return lo, hi


def parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:n, got {text!r}") from None
    if not (0 <= lo < hi) or n < 2:
        raise UsageError(f"grid needs 0 <= lo < hi and n >= 2, got {text!r}")
    return np.linspace(lo, hi, n + 1)[1:] if lo == 0 else np.linspace(lo, hi, n)


def _complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_eval(args, cfg: RunConfig, stdout) -> int:
    r = evaluate(args.x, args.method, cfg)
    if (cfg.format or "json") == "csv":
        emit(_csv_text(SCAN_HEADER, [_record(args.x, r)]), cfg, stdout)
    else:
        rec = {"x": args.x, "value": r.value, "abs_error_bound": r.abs_error_bound, "method": r.method, "terms": r.terms_used}
        emit(dump_json(rec), cfg, stdout)
    return EXIT_OK


def cmd_scan(args, cfg: RunConfig, stdout) -> int:
    if not args.x_min < args.x_max:
        raise UsageError("scan needs x_min < x_max")
    if args.points < 2:
        raise UsageError("scan needs at least 2 points")
    if args.log:
        xs = np.geomspace(args.x_min, args.x_max, args.points)
    else:
        xs = np.linspace(args.x_min, args.x_max, args.points)
    table = load_table(cfg) if args.method == "explicit" else None
    rows = [_record(x, evaluate(float(x), args.method, cfg, table)) for x in xs]
    if (cfg.format or "csv") == "json":
        recs = [dict(zip(SCAN_HEADER, r)) for r in rows]
        emit(dump_json(recs), cfg, stdout)
    else:
        emit(_csv_text(SCAN_HEADER, rows), cfg, stdout)
    return EXIT_OK


def _read_any_table(path: Path, bits: int) -> zeros.ZeroTable:
    text = path.read_text()
    if text.startswith(",".join(zeros.CSV_HEADER)):
        return zeros.load_enriched(path, bits)
    return zeros.load_ordinates(path, bits)


VALIDATE_THRESHOLD = 1e-6


def cmd_zeros(args, cfg: RunConfig, stdout) -> int:
    pc = cfg.precision()
    path = Path(args.input)
    table = _read_any_table(path, pc.bits)
    if args.action == "validate":
        res = zeros.residuals(table, pc)
        rows = []
        bad = 0
        for e, r in zip(table.entries, res):
            flag = float(r) > VALIDATE_THRESHOLD
            bad += flag
            rows.append([str(e.index), _gamma_str(e.gamma, 30), _num(float(r)), "bad" if flag else "ok"])
        emit(_csv_text(["index", "gamma", "abs_zeta", "status"], rows), cfg, stdout)
        return EXIT_NUMERIC if bad else EXIT_OK
    if args.output_file is None:
        raise UsageError(f"zeros {args.action} needs --out")
    if args.action == "refine":
        t = zeros.refine(table, pc)
        digits = zeros._digits(pc.bits)
        lines = [f"# refined ordinates, {pc.bits}-bit", *(_gamma_str(e.gamma, digits) for e in t.entries)]
        _write_text(args.output_file, "\n".join(lines) + "\n")
    else:
        t = zeros.enrich(table, pc)
        tmp = Path(args.output_file + ".tmp")
        zeros.save_enriched(t, tmp)
        os.replace(tmp, args.output_file)
    return EXIT_OK


def _gamma_str(g, digits: int) -> str:
    import mpmath as mp

    return mp.nstr(g, digits, strip_zeros=False)


def _write_text(path, text):
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


_ID_PARAMS = {
    "2.3": ("a", "b"),
    "2.6": ("x",),
    "2.7": ("x",),
    "3.2": ("beta", "alpha", "y"),
    "3.3": ("beta", "alpha", "t"),
    "3.4": ("t",),
    "4.4": ("s",),
}


def cmd_identity(args, cfg: RunConfig, stdout) -> int:
    ident = args.id
    names = _ID_PARAMS[ident]
    given = {k: getattr(args, k) for k in ("a", "b", "x", "beta", "alpha", "y", "t", "s") if getattr(args, k) is not None}
    stray = set(given) - set(names)
    if stray:
        raise UsageError(f"identity {ident} does not take {', '.join(sorted(stray))}")
    if given and args.grid != "default":
        raise UsageError("give either explicit parameters or --grid default")
    if given:
        missing = [k for k in names if k not in given]
        if missing:
            raise UsageError(f"identity {ident} needs {', '.join('--' + m for m in missing)}")
        grid = [{k: given[k] for k in names}]
    else:
        grid = None
    pc = cfg.precision()
    kw = {"table": load_table(cfg)} if ident in ("2.6", "4.4") else {}
    summary = integrals.run_identity(ident, grid, pc, **kw)
    errata = Path(args.errata) if args.errata else cfg.cache_path() / "errata.json"
    integrals.write_errata(errata, {ident: integrals.errata_entry(summary)})
    emit(dump_json(summary.as_dict()), cfg, stdout)
    return EXIT_NUMERIC if summary.status == "mismatch" else EXIT_OK


def cmd_calibrate(args, cfg: RunConfig, stdout) -> int:
    pc = cfg.precision()
    table = load_table(cfg)
    cal = riesz.calibrate_explicit(riesz.default_grid(), table, pc, K=min(len(table), 30))
    rec = {"2.1": riesz.calibration_record(cal), "2.2": riesz.trivial_ratio(cfg=pc)}
    errata = Path(args.errata) if args.errata else cfg.cache_path() / "errata.json"
    integrals.write_errata(errata, rec)
    emit(dump_json(rec), cfg, stdout)
    return EXIT_OK


def cmd_kernel(args, cfg: RunConfig, stdout) -> int:
    tag = KERNEL_IDS[args.id]
    if tag == "P_Z":
        if args.z is None:
            raise UsageError("kernel pz needs --z")
        kid = kernels.P_Z(args.z)
    else:
        kid = kernels.KernelId(tag)
    grid = parse_grid(args.grid) if args.grid else None
    rep = kernels.admissibility_report(kid, grid, cfg.precision())
    emit(dump_json(rep.as_dict()), cfg, stdout)
    return EXIT_OK


def read_scan(path) -> tuple:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != SCAN_HEADER:
        raise TableFormatError(f"{path}: header must be {','.join(SCAN_HEADER)}")
    try:
        x = np.array([float(r[0]) for r in rows[1:]])
        v = np.array([float(r[1]) for r in rows[1:]])
    except (ValueError, IndexError):
        raise TableFormatError(f"{path}: unparsable row") from None
    return x, v


def cmd_probe(args, cfg: RunConfig, stdout) -> int:
    window = parse_window(args.window) if args.window else None
    pc = cfg.precision()
    if args.input:
        x, v = read_scan(args.input)
        if window:
            keep = (x >= window[0] * (1 - 1e-12)) & (x <= window[1] * (1 + 1e-12))
            x, v = x[keep], v[keep]
        fit = probe.fit_samples(x, v, {"target": args.target, "source": "scan"})
    elif args.target == "pz":
        lo, hi = window or (1e3, probe.PZ_MAX_Y)
        fit = probe.pz_decay_probe(args.z or 0, lo, hi, pc.with_(abs_tol=max(pc.abs_tol, 1e-10)), args.per_decade)
    else:
        lo, hi = window or probe.RIESZ_WINDOW
        fit = probe.riesz_criterion_probe(lo, hi, load_table(cfg), pc, args.target, args.per_decade)
    emit(dump_json(fit.as_dict()), cfg, stdout)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="key = value settings file")
    g.add_argument("--bits", type=int, help="working precision in bits (default 256)")
    g.add_argument("--abs-tol", dest="abs_tol", type=float)
    g.add_argument("--rel-tol", dest="rel_tol", type=float)
    g.add_argument("--mobius-limit", dest="mobius_limit", type=int, help="largest n for Moebius sums")
    g.add_argument("--zeros", help="ordinate file or enriched zero CSV")
    g.add_argument("--zero-pairs", dest="zero_pairs", type=int, help="number of zero pairs (default 30)")
    g.add_argument("--format", choices=("csv", "json"))
    g.add_argument("--output", "-o", help="write output here instead of stdout")
    g.add_argument("--cache-dir", dest="cache_dir", help="overrides $RIESZLAB_CACHE")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="rieszlab", description="Numerical laboratory for the Riesz function.")
    parser.add_argument("--version", action="version", version=f"rieszlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="evaluate R(x) once")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--method", choices=riesz.METHODS, default="direct")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("scan", parents=[common], help="evaluate R on a grid, CSV out")
    p.add_argument("--x-min", dest="x_min", type=_positive, required=True)
    p.add_argument("--x-max", dest="x_max", type=_positive, required=True)
    p.add_argument("--points", type=int, default=33)
    p.add_argument("--method", choices=riesz.METHODS, default="direct")
    p.add_argument("--log", action="store_true", help="geometric spacing")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("zeros", parents=[common], help="zero-table workflows")
    p.add_argument("action", choices=("validate", "refine", "enrich"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output_file")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("identity", parents=[common], help="verify an integral or series identity")
    p.add_argument("--id", choices=IDENTITY_IDS, required=True)
    p.add_argument("--grid", choices=("default",), default="default")
    for name in ("a", "b", "x", "beta", "alpha", "y", "t", "s"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--errata", help="errata JSON path (default: cache dir)")
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("calibrate", parents=[common], help="fit the explicit-formula coefficients")
    p.add_argument("--errata", help="errata JSON path (default: cache dir)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("kernel", parents=[common], help="admissibility report for a kernel")
    p.add_argument("--id", choices=tuple(KERNEL_IDS), required=True)
    p.add_argument("--z", type=_complex)
    p.add_argument("--grid", help="lo:hi:n (lo = 0 drops the origin)")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("probe", parents=[common], help="growth-exponent probe")
    p.add_argument("--target", choices=("riesz", "w", "trivial", "pz"), required=True)
    p.add_argument("--window", help="lo:hi")
    p.add_argument("--z", type=_complex)
    p.add_argument("--per-decade", dest="per_decade", type=int)
    p.add_argument("--input", help="scan CSV to fit instead of sampling")
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "x", None) is not None and args.command == "eval" and not args.x > 0:
            raise UsageError(f"x must be positive, got {args.x}")
        cfg = build_config(args)
        return args.func(args, cfg, stdout)
    except UsageError as exc:
        print(f"rieszlab: usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except (OSError, TableFormatError) as exc:
        print(f"rieszlab: I/O error: {exc}", file=stderr)
        return EXIT_IO
    except (RieszLabError, ValueError, ArithmeticError) as exc:
        print(f"rieszlab: numerical failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
