"""Command-line front end.

Subcommands build and cache tables and zero sets, evaluate the identities
over a grid and turn reports into plot-ready columns.  Data goes to stdout,
logs to stderr.  Exit codes: 0 pass, 2 threshold failure (or a count
mismatch under --strict), 3 input/config error, 4 truncation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .arith import LAMBDA_MAGIC, LambdaTable, character_table, sieve_lambda
from .config import GROWTH_CHECKED, ConfigError, RunConfig, default_cache_dir
from .explicit import (FUJII_HEIGHT, GAMMA_HEIGHT, IDENTITIES, MissingInput, ResidualRecord,
                       TruncationError, growth_flags, residual)
from .goldbach import DIRECT_CAP, PSI2_MAGIC, InsufficientTable, Psi2Array, psi2, truncation
from .storage import CacheCorruption, peek_count
from .zeros import (ZeroCountWarning, ZeroFormatError, ZeroSet, export_zeros, import_zeros,
                    l_zero_count_estimate, l_zeros, riemann_siegel_theta,
                    riemann_von_mangoldt_count, zeta_zeros)

log = logging.getLogger("goldbach_explicit")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_TRUNCATION = 0, 2, 3, 4
CSV_COLUMNS = ("identity", "N", "q", "chi", "direct", "main_term", "residual", "normalizer",
               "normalized", "zero_height", "tail", "assumptions")
ZETA_IDENTITIES = ("fujii_1_2", "lz_1_3", "thm_f_1_9", "psi_r_2_7")
LAMBDA_IDENTITIES = ("thm_fq_1_8", "thm_f_1_9", "psi_r_2_7", "psi_chi0_2_5", "psi_chi_2_4")
Q_FREE = ("fujii_1_2", "lz_1_3", "thm_f_1_9", "psi_r_2_7")


class UsageError(Exception):
    """Bad command-line input; mapped to exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# caches


class Cache:
    """Files under one directory; written before any worker pool starts."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def lambda_path(self, T: int) -> Path:
        return self.root / f"lambda_T{T}.bin"

    def psi2_path(self, T: int, method: str) -> Path:
        return self.root / f"psi2_{method}_T{T}.bin"

    def zeros_path(self, q: int, chi: int | None, height: float) -> Path:
        tag = "zeta" if chi is None else f"q{q}_c{chi}"
        return self.root / f"zeros_{tag}_H{_fmt_height(height)}.txt"

    def lambda_table(self, T: int) -> LambdaTable:
        path = self.lambda_path(T)
        if peek_count(path, LAMBDA_MAGIC) == T:
            log.info("cache hit: %s", path)
            return LambdaTable.load(path)
        _reject_foreign(path, LAMBDA_MAGIC)
        log.info("sieving Lambda to T=%d", T)
        lam = sieve_lambda(T)
        lam.save(path)
        return lam

    def psi2_array(self, T: int, method: str) -> Psi2Array:
        if method == "direct" and T > DIRECT_CAP:
            raise UsageError(f"direct psi_2 is capped at T <= {DIRECT_CAP}; use --method fft")
        path = self.psi2_path(T, method)
        if peek_count(path, PSI2_MAGIC) == T:
            log.info("cache hit: %s", path)
            return Psi2Array.load(path)
        _reject_foreign(path, PSI2_MAGIC)
        lam = self.lambda_table(max(T, 2))
        log.info("building psi_2 to T=%d (%s)", T, method)
        p2 = psi2(lam, T, method)
        p2.save(path)
        return p2

    def zero_set(self, height: float, chi=None) -> ZeroSet:
        """Zeros of zeta (chi None) or of a primitive character, to at least ``height``."""
        q, idx = (1, None) if chi is None else (chi.modulus, chi.index)
        tag = "zeta" if idx is None else f"q{q}_c{idx}"
        best = None
        for path in sorted(self.root.glob(f"zeros_{tag}_H*.txt")):
            try:
                zs = import_zeros(path, q, "zeta" if idx is None else idx)
            except ZeroFormatError as exc:
                log.warning("ignoring %s: %s", path, exc)
                continue
            if zs.height >= height and (best is None or zs.height < best.height):
                best = zs
        if best is not None:
            log.info("cache hit: zeros %s to %g", tag, best.height)
            return best
        log.info("computing zeros %s to %g", tag, height)
        zs = zeta_zeros(height) if chi is None else l_zeros(chi, height)
        export_zeros(zs, self.zeros_path(q, idx, height))
        return zs


def _reject_foreign(path: Path, magic: bytes) -> None:
    """A present file with an unreadable header is corruption, not a miss."""
    if path.exists() and peek_count(path, magic) is None:
        raw = path.read_bytes()[:4]
        raise CacheCorruption(path, 0, f"bad magic {raw!r}, expected {magic!r}")


def _fmt_height(h: float) -> str:
    return str(int(h)) if float(h).is_integer() else repr(float(h))


# ---------------------------------------------------------------------------
# report formatting


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, complex):
        return str(x).strip("()")
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, tuple):
        return ";".join(x)
    return str(x)


def _row(rec: ResidualRecord) -> dict:
    d = rec.as_dict()
    d["chi"] = d.pop("chi_index")
    return {k: _fmt(d[k]) for k in CSV_COLUMNS}


def _json_value(x):
    if isinstance(x, complex):
        return _fmt(x)
    if isinstance(x, tuple):
        return list(x)
    return x


def render_csv(records: list[ResidualRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(_row(rec))
    return buf.getvalue()


def render_json(records: list[ResidualRecord], cfg: RunConfig, wall_time: float,
                failures: list[str]) -> str:
    rows = []
    for rec in records:
        d = rec.as_dict()
        d["chi"] = d.pop("chi_index")
        rows.append({k: _json_value(d[k]) for k in CSV_COLUMNS})
    meta = {"version": __version__, "config": cfg.to_text(), "wall_time": round(wall_time, 3),
            "failures": failures}
    return json.dumps({"metadata": meta, "records": rows}, indent=2) + "\n"


def read_report(text: str) -> list[dict]:
    """Parse a CSV or JSON report back into string-valued rows."""
    if not text.strip():
        return []
    if text.lstrip().startswith("{"):
        rows = json.loads(text)["records"]
        return [{k: "" if r[k] is None else (";".join(r[k]) if isinstance(r[k], list) else str(r[k]))
                 for k in CSV_COLUMNS} for r in rows]
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise UsageError("report header does not match the CSV schema")
    return list(reader)


# ---------------------------------------------------------------------------
# verify


def _cells(cfg: RunConfig):
    """(identity, N, q, chi) in report order."""
    cells = []
    for tag in cfg.identities:
        for N in cfg.n_grid:
            if tag in Q_FREE:
                cells.append((tag, N, 1, None))
                continue
            for q in cfg.q_list:
                if tag in ("granville_1_5", "psi_chi0_2_5") and q < 2:
                    log.info("skipping %s at q=%d (needs q >= 2)", tag, q)
                    continue
                if tag == "psi_chi_2_4":
                    for chi in character_table(q):
                        if not chi.is_principal:
                            cells.append((tag, N, q, chi.index))
                    continue
                cells.append((tag, N, q, None))
    return cells


def _height(cfg: RunConfig, tag: str) -> float:
    default = FUJII_HEIGHT if IDENTITIES[tag].kind == "fujii_kernel" else GAMMA_HEIGHT
    return cfg.zero_height.get(tag, default)


def _inputs(cfg: RunConfig, cells, cache: Cache, method: str):
    tags = {c[0] for c in cells}
    n_max = max(cfg.n_grid)
    lam = p2 = None
    if tags & set(LAMBDA_IDENTITIES):
        lam = cache.lambda_table(cfg.truncation or truncation(n_max))
    need_p2 = []
    if tags & {"fujii_1_2", "lz_1_3", "granville_1_5"}:
        need_p2.append(int(n_max))
    if "thm_fq_1_8" in tags:
        need_p2.append(truncation(n_max))
    if need_p2:
        T = cfg.truncation or max(need_p2)
        p2 = cache.psi2_array(T, "direct" if method == "direct" and T <= DIRECT_CAP else "fft")
    zeta = None
    zeta_tags = [t for t in tags if t in ZETA_IDENTITIES]
    if zeta_tags:
        zeta = cache.zero_set(max(_height(cfg, t) for t in zeta_tags))
    l_sets = {}
    for tag, _, q, idx in cells:
        if tag == "psi_chi_2_4":
            prim = character_table(q)[idx].primitive()
            key = (prim.modulus, prim.index)
            if key not in l_sets:
                l_sets[key] = cache.zero_set(_height(cfg, tag), prim)
    return lam, p2, zeta, l_sets


def _evaluate(cell, cfg, lam, p2, zeta, l_sets):
    tag, N, q, idx = cell
    zeros = zeta
    if tag == "psi_chi_2_4":
        prim = character_table(q)[idx].primitive()
        zeros = l_sets[(prim.modulus, prim.index)]
    zh = _height(cfg, tag) if IDENTITIES[tag].kind else None
    return residual(tag, N, q, idx, lam=lam, psi2=p2, zeros=zeros, zero_height=zh)


def check_thresholds(records: list[ResidualRecord], cfg: RunConfig) -> list[str]:
    failures = []
    for rec in records:
        fld, centre, tol = cfg.threshold(rec.identity)
        value = getattr(rec, fld)
        if not abs(value - centre) <= tol:
            failures.append(f"{rec.identity} N={rec.N:g} q={rec.q} chi={rec.chi_index}: "
                            f"{fld}={_fmt(value)} outside {centre:.4f} +- {tol}")
    checked = [r for r in records if r.identity in GROWTH_CHECKED]
    for tag, q, chi, factor in growth_flags(checked):
        failures.append(f"{tag} q={q} chi={chi}: |normalized| grows monotonically by x{factor:.2f}")
    return failures


def run_verify(cfg: RunConfig, jobs: int, method: str = "fft") -> tuple[int, str]:
    """Evaluate the grid; returns (exit code, report text)."""
    start = time.perf_counter()
    cfg.validate()
    cache = Cache(cfg.cache_dir)
    cells = _cells(cfg)
    lam, p2, zeta, l_sets = _inputs(cfg, cells, cache, method)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(_evaluate, c, cfg, lam, p2, zeta, l_sets) for c in cells]
    records, truncated = [], []
    for cell, fut in zip(cells, futures):
        try:
            records.append(fut.result())
        except (TruncationError, InsufficientTable) as exc:
            truncated.append(str(exc))
            log.error("truncation: %s", exc)
    failures = check_thresholds(records, cfg)
    for msg in failures:
        log.warning("threshold: %s", msg)
    wall = time.perf_counter() - start
    if cfg.format == "json":
        text = render_json(records, cfg, wall, failures)
    else:
        text = render_csv(records)
    log.info("%d cells, %d threshold failures, %d truncation errors, %.2fs",
             len(cells), len(failures), len(truncated), wall)
    if truncated:
        return EXIT_TRUNCATION, text
    return (EXIT_FAIL if failures else EXIT_OK), text


# ---------------------------------------------------------------------------
# subcommands


def _cache(args) -> Cache:
    return Cache(args.cache_dir or default_cache_dir())


def cmd_sieve(args) -> int:
    if args.T is None:
        raise UsageError("sieve needs --T")
    cache = _cache(args)
    cache.lambda_table(int(args.T))
    print(cache.lambda_path(int(args.T)))
    return EXIT_OK


def cmd_psi2(args) -> int:
    if args.T is None:
        raise UsageError("psi2 needs --T")
    cache = _cache(args)
    T = int(args.T)
    method = args.method or "fft"
    cache.psi2_array(T, method)
    print(cache.psi2_path(T, method))
    return EXIT_OK


def _target_character(args):
    if args.target == "zeta":
        return None
    if args.q is None or len(args.q) != 1:
        raise UsageError("dirichlet zeros need exactly one --q")
    table = character_table(args.q[0])
    if args.chi is None:
        prims = [c for c in table if c.is_primitive and not c.is_principal]
        if not prims:
            raise UsageError(f"no primitive character mod {args.q[0]}")
        return prims[0]
    chi = table[args.chi]
    if not chi.is_primitive or chi.modulus < 3:
        raise UsageError(f"character #{args.chi} mod {args.q[0]} is not primitive")
    return chi


def _zero_summary(zs: ZeroSet, chi) -> tuple[str, bool]:
    if chi is None:
        expected = riemann_von_mangoldt_count(zs.height)
        smooth = float(riemann_siegel_theta(zs.height)) / math.pi + 1
        found = len(zs)
        # |S(T)| < 1 at desk heights; the floor count alone can be off by one
        return (f"count={found} riemann_von_mangoldt={expected} smooth={smooth:.3f}",
                abs(found - smooth) < 1)
    positive = int((zs.ordinates > 0).sum())
    est = l_zero_count_estimate(chi, zs.height)
    return f"count={len(zs)} positive={positive} smooth_positive={est:.3f}", abs(positive - est) <= 2


def _compute_zeros(args):
    if args.T is None:
        raise UsageError(f"{args.command} needs --T (the height)")
    chi = _target_character(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ZeroCountWarning)
        zs = zeta_zeros(args.T) if chi is None else l_zeros(chi, args.T)
    flagged = [str(w.message) for w in caught if issubclass(w.category, ZeroCountWarning)]
    for msg in flagged:
        log.warning("%s", msg)
    return zs, chi, flagged


def cmd_zeros(args) -> int:
    zs, chi, flagged = _compute_zeros(args)
    cache = _cache(args)
    path = Path(args.out) if args.out else cache.zeros_path(zs.modulus, zs.character, zs.height)
    export_zeros(zs, path)
    summary, ok = _zero_summary(zs, chi)
    print(f"{summary} path={path}")
    if not ok:
        log.warning("zero count differs from the smooth count")
    if args.strict and (flagged or not ok):
        return EXIT_FAIL
    return EXIT_OK


def cmd_export_zeros(args) -> int:
    if not args.out:
        raise UsageError("export-zeros needs --out")
    zs, chi, flagged = _compute_zeros(args)
    export_zeros(zs, args.out)
    print(f"{_zero_summary(zs, chi)[0]} path={args.out}")
    return EXIT_FAIL if args.strict and flagged else EXIT_OK


def cmd_import_zeros(args) -> int:
    q = args.q[0] if args.q else None
    zs = import_zeros(args.path, q, args.chi)
    if zs.character is not None:
        chi = character_table(zs.modulus)[zs.character]
        if not chi.is_primitive:
            raise UsageError("imported L-zeros must belong to a primitive character")
        if zs.symmetric != chi.is_real:
            raise UsageError("symmetry flag does not match the character's realness")
    bad = zs.density_violations()
    if bad:
        log.warning("density ceiling exceeded at t=%s", bad[:5])
        if args.strict:
            return EXIT_FAIL
    dest = _cache(args).zeros_path(zs.modulus, zs.character, zs.height)
    export_zeros(zs, dest)
    print(f"imported {len(zs)} ordinates to height {zs.height:g} -> {dest}")
    return EXIT_OK


def _run_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.N:
        cfg.n_grid = [float(x) for x in args.N]
    if args.q:
        cfg.q_list = list(args.q)
    if args.identity:
        cfg.identities = list(args.identity)
    if args.zero_height is not None:
        cfg.zero_height = {t: args.zero_height for t in cfg.identities if IDENTITIES.get(t) and IDENTITIES[t].kind}
    if args.truncation is not None:
        cfg.truncation = args.truncation
    if args.cache_dir:
        cfg.cache_dir = Path(args.cache_dir)
    if args.format:
        cfg.format = args.format
    return cfg.validate()


def cmd_verify(args) -> int:
    cfg = _run_config(args)
    code, text = run_verify(cfg, args.jobs or os.cpu_count() or 1, args.method or "fft")
    sys.stdout.write(text)
    return code


def cmd_plotdata(args) -> int:
    text = sys.stdin.read() if args.report == "-" else Path(args.report).read_text(encoding="utf-8")
    rows = read_report(text)
    ycol = {"normalized": "normalized", "raw": "residual"}[args.y]
    series: dict[tuple, list[tuple[float, float]]] = {}
    for r in rows:
        x = float(r[args.x])
        y = complex(r[ycol])
        key = (r["identity"], r["q"], r["chi"]) if args.x == "N" else (r["identity"], r["N"], r["chi"])
        series.setdefault(key, []).append((x, abs(y) if y.imag else y.real))
    out = []
    for key, pts in series.items():
        fixed = "q" if args.x == "N" else "N"
        head = f"# identity={key[0]} {fixed}={key[1]}" + (f" chi={key[2]}" if key[2] else "")
        out.append(head)
        out.append(f"{args.x},{args.y}")
        out += [f"{x!r},{y!r}" for x, y in sorted(pts, key=lambda p: p[0])]
    if out:
        sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def _positive_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--cache-dir", help="cache directory (default: $GOLDBACH_CACHE or ./.cache)")
    common.add_argument("--jobs", type=int, help="worker threads for verify (default: CPU count)")
    common.add_argument("--strict", action="store_true", help="turn count warnings into failures")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="goldbach-explicit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sieve", parents=[common], help="build the Lambda table")
    p.add_argument("--T", type=_positive_float)
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("psi2", parents=[common], help="build the psi_2 array")
    p.add_argument("--T", type=_positive_float)
    p.add_argument("--method", choices=("fft", "direct"))
    p.set_defaults(func=cmd_psi2)

    for name, func in (("zeros", cmd_zeros), ("export-zeros", cmd_export_zeros)):
        p = sub.add_parser(name, parents=[common], help="compute a zero set")
        p.add_argument("target", nargs="?", choices=("zeta", "dirichlet"), default="zeta")
        p.add_argument("--T", type=_positive_float, help="height T_max")
        p.add_argument("--q", type=int, action="append")
        p.add_argument("--chi", type=int, help="character index (default: first primitive)")
        p.add_argument("--out", help="output zero file")
        p.set_defaults(func=func)

    p = sub.add_parser("import-zeros", parents=[common], help="validate a zero file and cache it")
    p.add_argument("path")
    p.add_argument("--q", type=int, action="append")
    p.add_argument("--chi")
    p.set_defaults(func=cmd_import_zeros)

    p = sub.add_parser("verify", parents=[common], help="evaluate identities over a grid")
    p.add_argument("--config", help="flat key = value run configuration")
    p.add_argument("--N", type=_positive_float, action="append")
    p.add_argument("--q", type=int, action="append")
    p.add_argument("--identity", action="append", choices=sorted(IDENTITIES))
    p.add_argument("--zero-height", type=_positive_float)
    p.add_argument("--truncation", type=int, help="override the table size T")
    p.add_argument("--method", choices=("fft", "direct"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plotdata", parents=[common], help="two-column series from a report")
    p.add_argument("report", help="report file, or - for stdin")
    p.add_argument("--x", choices=("N", "q"), default="N")
    p.add_argument("--y", choices=("normalized", "raw"), default="normalized")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except (TruncationError, InsufficientTable) as exc:
        log.error("%s", exc)
        return EXIT_TRUNCATION
    except CacheCorruption as exc:
        log.error("cache corruption in %s at byte offset %d: %s", exc.path, exc.offset, exc.reason)
        return EXIT_CONFIG
    except (UsageError, ConfigError, MissingInput, ZeroFormatError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
