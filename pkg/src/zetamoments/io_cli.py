"""Zero files, report CSVs, and the ``zetamoments`` command line.

Zero file: optional ``#`` comment lines, one of which may read
``# source: computed t_max=100 claimed_accuracy=1e-09``, then one decimal
ordinate per line in ascending order (Odlyzko-style tables without a
header load as well).  Report CSV: header
``T,X,k,quantity,empirical,predicted,ratio,n_zeros`` and floats written with
17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import re
import sys
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import arith, harness, rmt
from .errors import (AccuracyError, MissedZeroError, NonconvergenceError, ParseError, ValidationError,
                     ZetaMomentsError)
from .zeta_engine import DEFAULT_CONFIG, ZeroTable, find_zeros

CSV_HEADER = ("T", "X", "k", "quantity", "empirical", "predicted", "ratio", "n_zeros")
EXIT_OK, EXIT_VALIDATION, EXIT_ACCURACY, EXIT_USAGE = 0, 1, 2, 64

_HEADER_RE = re.compile(r"(\w+)\s*[=:]\s*(\S+)")


def _g17(x: float) -> str:
    return "%.17g" % x


# ---------------------------------------------------------------- zero files


def write_zeros(table: ZeroTable, path: str | Path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# source: {table.source} t_max={_g17(table.t_max)} "
                 f"claimed_accuracy={_g17(table.claimed_accuracy)}\n")
        for g in table.ordinates:
            fh.write(_g17(g) + "\n")


def parse_zeros(lines: Iterable[str]) -> tuple[np.ndarray, dict[str, str]]:
    """Ordinates and header key/values; ParseError names the bad line."""
    values, meta = [], {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta.update(dict(_HEADER_RE.findall(line[1:])))
            continue
        token = line.split()[-1]  # tolerate "index ordinate" two-column tables
        try:
            v = float(token)
        except ValueError:
            raise ParseError(f"not a decimal ordinate: {line!r}", line=lineno) from None
        if not math.isfinite(v):
            raise ParseError(f"non-finite ordinate: {line!r}", line=lineno)
        values.append(v)
    return np.asarray(values, dtype=float), meta


def ingest_zeros(path: str | Path) -> ZeroTable:
    """Load and validate a zero file; the table is tagged ``ingested``."""
    with open(path, encoding="utf-8") as fh:
        values, meta = parse_zeros(fh)
    if values.size == 0:
        raise ValidationError(f"{path}: no ordinates")
    if np.any(np.diff(values) <= 0):
        bad = int(np.flatnonzero(np.diff(values) <= 0)[0]) + 2
        raise ValidationError(f"{path}: ordinates not ascending at entry {bad}")
    try:
        t_max = float(meta.get("t_max", values[-1]))
        acc = float(meta.get("claimed_accuracy", 1e-9))
    except ValueError as exc:
        raise ParseError(f"bad header value: {exc}") from None
    table = ZeroTable(values, max(t_max, float(values[-1])), "ingested", acc)
    table.validate()
    return table


# ---------------------------------------------------------------- report CSV


def write_reports(reports: Sequence[harness.MomentReport], out: str | Path | TextIO) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w", newline="", encoding="ascii") as fh:
            write_reports(reports, fh)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow([_g17(r.T), _g17(r.X), _g17(r.k), r.quantity, _g17(r.empirical), _g17(r.predicted),
                    _g17(r.ratio), str(r.n_zeros)])


def read_reports(src: str | Path | TextIO) -> list[harness.MomentReport]:
    if isinstance(src, (str, Path)):
        with open(src, newline="", encoding="ascii") as fh:
            return read_reports(fh)
    rows = list(csv.reader(src))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ParseError("missing or wrong CSV header", line=1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            T, X, k, q, emp, pred, _ratio, n = row
            out.append(harness.MomentReport(float(T), float(X), float(k), q, float(emp), float(pred), int(n)))
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    return out


def reports_to_csv(reports: Sequence[harness.MomentReport]) -> str:
    buf = io.StringIO()
    write_reports(reports, buf)
    return buf.getvalue()


# ---------------------------------------------------------------- config files


def read_config(path: str | Path) -> dict[str, str]:
    """key=value lines; ``#`` starts a comment; keys use underscores or dashes."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"expected key=value, got {line!r}", line=lineno)
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _float_list(text: str) -> list[float]:
    return [float(x) for x in str(text).replace(";", ",").split(",") if x.strip()]


_DEFAULTS = {
    "threads": 1,
    "t_grid": "1000,2000,5000",
    "k": "1",
    "x": None,
    "x_rule": None,
    "cutoff": 10**4,
    "prime_cutoff": 10**6,
    "samples": 10**4,
    "seed": 0,
    "deterministic": False,
}

_CASTS = {
    "threads": int, "t_grid": str, "k": str, "x": float, "x_rule": float, "cutoff": int,
    "prime_cutoff": int, "samples": int, "seed": int,
    "deterministic": lambda v: v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes", "on"),
    "t_max": float, "t": float, "n": int, "m": int,
}


def _resolve(args: argparse.Namespace, config: dict[str, str]) -> argparse.Namespace:
    """flags > config file > defaults, for every option left at None."""
    if getattr(args, "x", None) is not None or getattr(args, "x_rule", None) is not None:
        # an X choice on the command line replaces either X choice in the file
        config = {k: v for k, v in config.items() if k not in ("x", "x_rule")}
    for key, cast in _CASTS.items():
        if not hasattr(args, key):
            continue
        val = getattr(args, key)
        if val is None and key in config:
            val = config[key]
        if val is None:
            val = _DEFAULTS.get(key)
        if val is not None:
            try:
                val = cast(val)
            except ValueError:
                raise _UsageError(f"--{key.replace('_', '-')}: bad value {val!r}") from None
        setattr(args, key, val)
    return args


# ---------------------------------------------------------------- CLI


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zetamoments", description="Discrete moments of zeta' at zeta zeros.")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--threads", type=int, default=None)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    z = sub.add_parser("zeros", help="compute or ingest zero tables")
    zs = z.add_subparsers(dest="action", required=True, parser_class=_Parser)
    zc = zs.add_parser("compute")
    zc.add_argument("--t-max", dest="t_max", type=float, required=True)
    zc.add_argument("--out", required=True)
    zc.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    zi = zs.add_parser("ingest")
    zi.add_argument("--in", dest="path", required=True)

    m = sub.add_parser("moments", help="empirical moments against predictions")
    m.add_argument("quantity", choices=harness.QUANTITIES)
    m.add_argument("--k", default=None, help="comma-separated k values")
    m.add_argument("--t-grid", dest="t_grid", default=None)
    xg = m.add_mutually_exclusive_group()
    xg.add_argument("--x", type=float, default=None)
    xg.add_argument("--x-rule", dest="x_rule", type=float, default=None, help="X = (log T)^x_rule")
    m.add_argument("--zeros", help="zero file; computed on the fly when omitted")
    m.add_argument("--out", help="CSV path (stdout when omitted)")
    m.add_argument("--prime-cutoff", dest="prime_cutoff", type=int, default=None)
    m.add_argument("--deterministic", action="store_true", default=None)
    m.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    pr = sub.add_parser("predict", help="closed-form predictions")
    pr.add_argument("kind", choices=("hko", "conj3", "i4"))
    pr.add_argument("--k", default=None)
    pr.add_argument("--t", type=float, required=True)
    pr.add_argument("--x", type=float, default=None)
    pr.add_argument("--m", type=int, default=None)
    pr.add_argument("--n", type=int, default=None)

    r = sub.add_parser("rmt", help="CUE moments")
    r.add_argument("kind", choices=("exact", "mc"))
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--k", default=None)
    r.add_argument("--samples", type=int, default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    a = sub.add_parser("ak", help="arithmetic factor a_k")
    a.add_argument("--k", default=None)
    a.add_argument("--prime-cutoff", dest="prime_cutoff", type=int, default=None)
    return p


def _single_k(args) -> float:
    ks = _float_list(args.k)
    if len(ks) != 1:
        raise _UsageError(f"--k: expected one value, got {args.k!r}")
    return ks[0]


def _cmd_zeros(args, out: TextIO) -> int:
    if args.action == "compute":
        table = find_zeros(args.t_max, dataclasses.replace(DEFAULT_CONFIG, workers=args.threads))
        write_zeros(table, args.out)
        print(f"{len(table)} zeros up to t={_g17(table.t_max)} written to {args.out}", file=out)
    else:
        table = ingest_zeros(args.path)
        print(f"{len(table)} zeros, t_max={_g17(table.t_max)}, first={_g17(table.ordinates[0])}, "
              f"claimed_accuracy={_g17(table.claimed_accuracy)}", file=out)
    return EXIT_OK


def _cmd_moments(args, out: TextIO) -> int:
    if args.x is None and args.x_rule is None:
        raise _UsageError("moments: one of --x or --x-rule is required")
    try:
        cfg = harness.ExperimentConfig(
            t_grid=tuple(_float_list(args.t_grid)),
            x_fixed=args.x if args.x_rule is None else None,
            x_exponent=args.x_rule,
            k_list=tuple(_float_list(args.k)),
            prime_cutoff=args.prime_cutoff,
            deterministic=args.deterministic,
            threads=args.threads,
        )
    except ValidationError as exc:
        raise _UsageError(str(exc)) from None
    zeros = ingest_zeros(args.zeros) if args.zeros else find_zeros(max(cfg.t_grid), cfg.zeta_config)
    write_reports(harness.run_grid(args.quantity, cfg, zeros), args.out or out)
    return EXIT_OK


def _cmd_predict(args, out: TextIO) -> int:
    if args.kind == "hko":
        val = harness.predict_hko(_single_k(args), args.t)
    elif args.kind == "conj3":
        if args.x is None:
            raise _UsageError("predict conj3: --x is required")
        val = harness.predict_conj3(_single_k(args), args.t, args.x)
    else:
        if args.m is None or args.n is None:
            raise _UsageError("predict i4: --m and --n are required")
        val = harness.predict_twisted_i4(args.m, args.n, args.t)
    print(_g17(val), file=out)
    return EXIT_OK


def _cmd_rmt(args, out: TextIO) -> int:
    k = _single_k(args)
    if args.kind == "exact":
        print(_g17(rmt.cue_moment_exact(args.n, k)), file=out)
    else:
        res = rmt.cue_moment_mc(args.n, k, args.samples, args.seed, args.threads)
        print(f"{_g17(res.mean)} +/- {_g17(res.std_error)}", file=out)
    return EXIT_OK


def _cmd_ak(args, out: TextIO) -> int:
    res = arith.a_k(_single_k(args), args.prime_cutoff)
    print(f"{res.value:.10f} +/- {res.tail_bound:.3e}", file=out)
    return EXIT_OK


_COMMANDS = {"zeros": _cmd_zeros, "moments": _cmd_moments, "predict": _cmd_predict, "rmt": _cmd_rmt,
             "ak": _cmd_ak}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        config = read_config(args.config) if args.config else {}
        args = _resolve(args, config)
        return _COMMANDS[args.command](args, out)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=err)
        return EXIT_VALIDATION
    except (AccuracyError, MissedZeroError, NonconvergenceError) as exc:
        print(f"accuracy failure: {exc}", file=err)
        return EXIT_ACCURACY
    except (ZetaMomentsError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
