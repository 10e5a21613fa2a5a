"""Command-line harness: ``qeig bench`` for convergence/stability tables, ``qeig solve`` for one matrix.

``bench`` writes one CSV row per (class, n, strategy, trial) cell with the
fixed header :data:`CSV_HEADER`.  Floats are printed with ``repr``-exact
``.17g`` formatting so every row parses back to the same values; missing
values are the literal ``N/A``.  Timing columns are wall-clock seconds:
``t_q_s`` is all accumulation of transforms into ``U``, ``t_aed_s`` is time
spent inside AED passes, and both are contained in ``t_total_s``.
"""
from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .eigvec import full_eigenvectors, triangular_eigenvectors
from .errors import NonConvergenceError, NonDistinctSpectrumError, QMatFormatError
from .oracle import metrics
from .qmat import QMatrix, fullrand, hessrand, read_qmatrix, write_qmatrix
from .reorder import AedConfig, reorder_selected
from .schur import schur_decompose

CSV_HEADER = ("strategy", "class", "n", "seed", "status", "sweeps",
              "t_total_s", "t_q_s", "t_aed_s", "e1", "e2", "e3")
TIMING_COLUMNS = ("t_total_s", "t_q_s", "t_aed_s")
STRATEGIES = ("qr", "qr+aed")
CLASSES = {"fullrand": fullrand, "hessrand": hessrand}
DEFAULT_SIZES = "32,64,128,256"
NA = "N/A"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3
EXIT_IO = 4


def fmt(x) -> str:
    """Locale-free CSV formatting: ints as-is, floats ``.17g``, ``None`` as ``N/A``."""
    if x is None:
        return NA
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return vals


def _choice_list(choices):
    def parse(text: str) -> list[str]:
        vals = [t.strip() for t in text.split(",") if t.strip()]
        bad = [v for v in vals if v not in choices]
        if not vals or bad:
            raise argparse.ArgumentTypeError(f"choose from {', '.join(choices)}; got {text!r}")
        return vals
    return parse


def _window(text: str):
    if text == "auto":
        return None
    try:
        w = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--aed-window takes an integer or 'auto'")
    if w < 2:
        raise argparse.ArgumentTypeError("--aed-window must be at least 2")
    return w


def _nibble(text: str) -> float:
    v = float(text)
    if not (0.0 <= v <= 100.0):
        raise argparse.ArgumentTypeError("--nibble is a percentage in [0, 100]")
    return v


def _mask(text: str) -> list[bool]:
    vals = [t.strip() for t in text.split(",") if t.strip()]
    if not vals or any(v not in ("0", "1") for v in vals):
        raise argparse.ArgumentTypeError("--reorder takes a comma-separated 0/1 mask")
    return [v == "1" for v in vals]


# ---------------------------------------------------------------------------
# bench


def run_cell(klass: str, n: int, strategy: str, seed: int, cfg: AedConfig,
             max_sweeps: int | None, eigvec: bool) -> dict:
    """Run one benchmark cell and return its CSV row as a dict of typed values."""
    A = CLASSES[klass](n, seed)
    row = dict(strategy=strategy, **{"class": klass}, n=n, seed=seed, status="ok", sweeps=None,
               t_total_s=None, t_q_s=None, t_aed_s=None, e1=None, e2=None, e3=None)
    use_aed = strategy == "qr+aed"
    t0 = time.perf_counter()
    try:
        dec = schur_decompose(A, use_aed=use_aed, aed=cfg, max_sweeps=max_sweeps)
    except NonConvergenceError as err:
        part = err.partial
        row.update(status="nonconvergence", sweeps=part.sweeps, t_total_s=part.stats.t_total,
                   t_q_s=part.stats.t_q, t_aed_s=part.stats.t_aed if use_aed else None)
        return row
    X = lam = None
    if eigvec:
        try:
            es = triangular_eigenvectors(dec.T)
            X, lam = full_eigenvectors(dec.U, es), es.lambdas
        except NonDistinctSpectrumError:
            row["status"] = "non_distinct"
    t_total = time.perf_counter() - t0
    m = metrics(A, dec.U, dec.T, X, lam)
    row.update(sweeps=dec.sweeps, t_total_s=t_total, t_q_s=dec.stats.t_q,
               t_aed_s=dec.stats.t_aed if use_aed else None, e1=m.e1, e2=m.e2, e3=m.e3)
    return row


def summarize(rows: list[dict]) -> list[dict]:
    """Per-cell medians over trials (only converged rows enter the medians)."""
    cells: dict[tuple, list[dict]] = {}
    for r in rows:
        cells.setdefault((r["strategy"], r["class"], r["n"]), []).append(r)
    out = []
    for (strategy, klass, n), rs in cells.items():
        ok = [r for r in rs if r["status"] == "ok"]
        entry = {"strategy": strategy, "class": klass, "n": n, "trials": len(rs), "converged": len(ok)}
        for key in ("sweeps", "t_total_s", "t_q_s", "t_aed_s", "e1", "e2", "e3"):
            vals = [r[key] for r in ok if r[key] is not None]
            entry[f"median_{key}"] = statistics.median(vals) if vals else None
        out.append(entry)
    return out


def cmd_bench(args) -> int:
    cfg = AedConfig(window=args.aed_window, nibble=args.nibble)
    rows = []
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for klass in args.klass:
            for n in args.sizes:
                for strategy in args.strategies:
                    for trial in range(args.trials):
                        row = run_cell(klass, n, strategy, args.seed + trial, cfg,
                                       args.max_sweeps, args.eigvec == "on")
                        rows.append(row)
                        w.writerow([row[c] if c in ("strategy", "class", "status") else fmt(row[c])
                                    for c in CSV_HEADER])
                        out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    if args.summary:
        Path(args.summary).write_text(json.dumps(
            {"version": __version__, "seed": args.seed, "trials": args.trials, "cells": summarize(rows)},
            indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve


def _lambda_column(lam) -> QMatrix:
    return QMatrix.from_complex(np.asarray(lam, dtype=np.complex128).reshape(-1, 1))


def cmd_solve(args) -> int:
    try:
        A = read_qmatrix(args.input)
    except (OSError, QMatFormatError) as err:
        print(f"qeig solve: {err}", file=sys.stderr)
        return EXIT_IO
    if A.nrows != A.ncols:
        print(f"qeig solve: matrix must be square, got {A.shape}", file=sys.stderr)
        return EXIT_IO
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = AedConfig(window=args.aed_window, nibble=args.nibble)
    summary = {"input": str(args.input), "n": A.nrows, "used_aed": not args.no_aed}
    try:
        dec = schur_decompose(A, use_aed=not args.no_aed, aed=cfg, max_sweeps=args.max_sweeps)
    except NonConvergenceError as err:
        part = err.partial
        write_qmatrix(part.T, outdir / "T.qmat")
        write_qmatrix(part.U, outdir / "U.qmat")
        summary.update(status="nonconvergence", sweeps=part.sweeps, active_hi=err.active_hi)
        (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
        print(f"qeig solve: {err}", file=sys.stderr)
        return EXIT_NONCONVERGED
    T, U = dec.T, dec.U
    if args.reorder is not None:
        if len(args.reorder) != A.nrows:
            print(f"qeig solve: reorder mask has {len(args.reorder)} entries, need {A.nrows}", file=sys.stderr)
            return EXIT_USAGE
        summary["permutation"] = reorder_selected(T, U, args.reorder)
    write_qmatrix(T, outdir / "T.qmat")
    write_qmatrix(U, outdir / "U.qmat")
    lam = T.diagonal()[:, 0] + 1j * T.diagonal()[:, 1]
    X = None
    status = "ok"
    if args.eigvec:
        try:
            es = triangular_eigenvectors(T)
            X = full_eigenvectors(U, es)
            write_qmatrix(X, outdir / "X.qmat")
        except NonDistinctSpectrumError as err:
            status = "non_distinct"
            summary["error"] = str(err)
        write_qmatrix(_lambda_column(lam), outdir / "lambda.qmat")
    m = metrics(A, U, T, X, lam if X is not None else None)
    summary.update(status=status, sweeps=dec.sweeps,
                   eigenvalues=[[float(z.real), float(z.imag)] for z in lam],
                   e1=m.e1, e2=m.e2, e3=m.e3,
                   t_total_s=dec.stats.t_total, t_q_s=dec.stats.t_q,
                   t_aed_s=dec.stats.t_aed if not args.no_aed else None)
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qeig", description="Quaternion eigensolver harness.")
    p.add_argument("--version", action="version", version=f"qeig {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="convergence and stability experiments, CSV output")
    b.add_argument("--class", dest="klass", type=_choice_list(tuple(CLASSES)), default=["fullrand"],
                   help="matrix class(es): fullrand, hessrand (comma-separated)")
    b.add_argument("--sizes", type=_int_list, default=_int_list(DEFAULT_SIZES))
    b.add_argument("--strategies", "--strategy", type=_choice_list(STRATEGIES), default=list(STRATEGIES))
    b.add_argument("--trials", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="CSV path (default stdout)")
    b.add_argument("--summary", help="optional JSON file with per-cell medians")
    b.add_argument("--max-sweeps", type=int, default=None, help="sweep budget (default 30 n)")
    b.add_argument("--nibble", type=_nibble, default=14.0, help="AED sweep-skip threshold in percent")
    b.add_argument("--aed-window", type=_window, default=None, help="window size or 'auto'")
    b.add_argument("--eigvec", choices=("on", "off"), default="on")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("solve", help="Schur form and eigenpairs of one qmat file")
    s.add_argument("input", help="qmat file")
    s.add_argument("--out-dir", default=".", help="directory for T.qmat, U.qmat, X.qmat, lambda.qmat, summary.json")
    s.add_argument("--no-aed", action="store_true")
    s.add_argument("--eigvec", action="store_true", help="also write eigenvectors and eigenvalues")
    s.add_argument("--reorder", type=_mask, default=None, help="0/1 mask of eigenvalues to move to the front")
    s.add_argument("--max-sweeps", type=int, default=None)
    s.add_argument("--nibble", type=_nibble, default=14.0)
    s.add_argument("--aed-window", type=_window, default=None)
    s.set_defaults(func=cmd_solve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        print("qeig bench: --trials must be positive", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "seed", 0) < 0:
        print("qeig bench: --seed must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
