"""
Command-line front end.

    toeplitz-growth classify   --symbol b3.json
    toeplitz-growth divisor    --symbol b0.json --w 3,0
    toeplitz-growth regularity --symbol b0.json
    toeplitz-growth factor     --symbol ellipse.json --w 3.2,0.5
    toeplitz-growth lrg        --symbol ellipse.json [--csv points.csv]
    toeplitz-growth scan       --symbol b3.json --config cfg.json [--out scan.csv]
    toeplitz-growth portrait   --symbol b2.json --grid -3,3,-3,3,200,200 --N 400
    toeplitz-growth qrg        --symbol b0.json --w 3,0 [--trace-ray 0.0]
    toeplitz-growth corpus     --all

``--symbol`` takes a JSON file, an inline JSON literal, or the name of a
corpus entry. Exit status: 0 success, 2 inconclusive verdict, 1 error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import corpus as corpus_mod
from .config import (ScanConfig, emit_csv, load_config, load_schema, load_symbol, symbol_from_json,
                     write_json)
from .errors import NotStabilized, ToeplitzError

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1 (2 is reserved for inconclusive verdicts)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.stderr.write("symbol files follow this schema:\n")
        sys.stderr.write(json.dumps(load_schema("symbol"), indent=2) + "\n")
        sys.exit(EXIT_ERROR)


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(parts[0].replace(" ", ""))
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from exc


def parse_grid(text: str):
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("expected X0,X1,Y0,Y1,NX,NY")
    try:
        x0, x1, y0, y1 = (float(p) for p in parts[:4])
        nx, ny = int(parts[4]), int(parts[5])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc
    if nx < 1 or ny < 1:
        raise argparse.ArgumentTypeError("NX and NY must be positive")
    return (x0, x1, y0, y1), nx, ny


def resolve_symbol(text: str):
    if os.path.exists(text):
        return load_symbol(text)
    if text.lstrip().startswith("{"):
        return symbol_from_json(json.loads(text))
    try:
        return corpus_mod.get_entry(text).symbol
    except KeyError:
        raise FileNotFoundError(f"--symbol {text!r} is neither a file, a JSON literal, nor a corpus entry") from None


def _config(args) -> ScanConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ScanConfig()
    if getattr(args, "workers", None):
        cfg = ScanConfig(**{**cfg.__dict__, "workers": args.workers})
    return cfg


def _emit_json(obj, args):
    write_json(obj, getattr(args, "out", None))


def _csv_target(args):
    return args.out if getattr(args, "out", None) else sys.stdout


# -- subcommands ------------------------------------------------------------


def cmd_classify(args) -> int:
    from .curvegeom import classify_lj
    rep = classify_lj(resolve_symbol(args.symbol), _config(args))
    _emit_json(rep.to_json(), args)
    return EXIT_INCONCLUSIVE if rep.verdict == "Inconclusive" else EXIT_OK


def cmd_divisor(args) -> int:
    from .curvegeom import in_resolvent_set
    from .divisor import zero_divisor
    b = resolve_symbol(args.symbol)
    cfg = _config(args)
    zd = zero_divisor(b, args.w, band=args.band or cfg.band)
    out = zd.to_json()
    out.update({"m": b.m, "k": b.k, "counts_match": zd.counts_match(b.m, b.k),
                "in_resolvent_set": in_resolvent_set(b, args.w)})
    _emit_json(out, args)
    return EXIT_OK


def cmd_regularity(args) -> int:
    from .divisor import regularity_scan
    rep = regularity_scan(resolve_symbol(args.symbol), _config(args))
    _emit_json(rep.to_json(), args)
    return EXIT_INCONCLUSIVE if rep.verdict == "inconclusive" else EXIT_OK


def cmd_factor(args) -> int:
    from .divisor import regularity_scan
    from .factorization import bound_report, factorize
    b = resolve_symbol(args.symbol)
    pair = factorize(b, args.w)
    reg = None if args.no_regularity else regularity_scan(b, _config(args))
    rep = bound_report(b, args.w, reg, pair)
    _emit_json({"factors": pair.to_json(), "reconstruction_error": pair.reconstruction_error(b),
                "bounds": rep.to_json()}, args)
    return EXIT_OK


def cmd_lrg(args) -> int:
    from .divisor import regularity_scan
    from .factorization import LRG_COLUMNS, lrg_constant
    b = resolve_symbol(args.symbol)
    cfg = _config(args)
    reg = regularity_scan(b, cfg)
    try:
        res = lrg_constant(b, cfg, reg)
    except NotStabilized as exc:
        _emit_json({"C_lrg": None, "argmax_w": None, "stabilized": False, "trace": exc.trace}, args)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.csv:
        emit_csv(res.records, args.csv, LRG_COLUMNS)
    out = res.to_json()
    out["regularity"] = reg.verdict
    _emit_json(out, args)
    return EXIT_INCONCLUSIVE if reg.verdict == "inconclusive" else EXIT_OK


def cmd_scan(args) -> int:
    from .scan import SCAN_COLUMNS, resolvent_scan
    cfg = _config(args)
    recs = resolvent_scan(resolve_symbol(args.symbol), cfg, workers=cfg.workers,
                          include_spectrum=args.include_spectrum)
    emit_csv(recs, _csv_target(args), SCAN_COLUMNS)
    return EXIT_OK


def cmd_portrait(args) -> int:
    from .scan import PORTRAIT_COLUMNS, portrait
    box, nx, ny = args.grid
    cfg = _config(args)
    rows = portrait(resolve_symbol(args.symbol), box, nx, ny, N=args.N, seed=cfg.seed, workers=cfg.workers)
    emit_csv(rows, _csv_target(args), PORTRAIT_COLUMNS)
    return EXIT_OK


def cmd_qrg(args) -> int:
    from .qrg import TRACE_COLUMNS, qrg_bound, ray_trace
    from .symbol import WienerSymbol
    b = resolve_symbol(args.symbol)
    cfg = _config(args)
    if b.m != 1:
        raise ToeplitzError(f"qrg needs a symbol with exactly one negative index (m = 1), got m = {b.m}")
    ws = WienerSymbol.from_laurent(b)
    if args.trace_ray is not None:
        rows = ray_trace(ws, args.trace_ray, schedule=cfg.section_schedule, n_fft=cfg.fft_size)
        emit_csv(rows, _csv_target(args), TRACE_COLUMNS)
        return EXIT_OK
    if args.w is None:
        raise ToeplitzError("qrg needs --w or --trace-ray")
    _emit_json(qrg_bound(ws, args.w, n_fft=cfg.fft_size).to_json(), args)
    return EXIT_OK


def cmd_corpus(args) -> int:
    names = None if args.all or not args.name else set(args.name)
    if names is not None:
        known = {e.name for e in corpus_mod.load_corpus()}
        missing = names - known
        if missing:
            raise KeyError(f"unknown corpus entries: {', '.join(sorted(missing))}")
    results = corpus_mod.run_corpus(names, _config(args))
    print(corpus_mod.format_table(results))
    if args.out:
        emit_csv([r.row() for r in results], args.out, corpus_mod.CHECK_COLUMNS)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed", file=sys.stderr)
    return EXIT_OK if failed == 0 else EXIT_ERROR


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scan configuration JSON")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--workers", type=int, help="worker processes (TOEPLITZ_WORKERS overrides)")

    sym = argparse.ArgumentParser(add_help=False)
    sym.add_argument("--symbol", required=True, help="symbol JSON file, inline JSON, or corpus entry name")

    p = _Parser(prog="toeplitz-growth", description="Resolvent growth of banded Toeplitz operators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", parents=[common, sym], help="LJ / cusp / self-intersection verdict")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("divisor", parents=[common, sym], help="zero divisor of z^m (b(z) - w)")
    s.add_argument("--w", type=parse_complex, required=True, metavar="RE,IM")
    s.add_argument("--band", type=float, help="unimodular band (default from config)")
    s.set_defaults(func=cmd_divisor)

    s = sub.add_parser("regularity", parents=[common, sym], help="regularity scan of Omega(b)")
    s.set_defaults(func=cmd_regularity)

    s = sub.add_parser("factor", parents=[common, sym], help="Wiener-Hopf factors and resolvent bounds at w")
    s.add_argument("--w", type=parse_complex, required=True, metavar="RE,IM")
    s.add_argument("--no-regularity", action="store_true", help="skip the scan behind the refined bounds")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("lrg", parents=[common, sym], help="sup of dist * Krein bound")
    s.add_argument("--csv", help="write the sampled points here")
    s.set_defaults(func=cmd_lrg)

    s = sub.add_parser("scan", parents=[common, sym], help="finite-section norms vs Krein bound (CSV)")
    s.add_argument("--include-spectrum", action="store_true", help="also list grid points outside the resolvent set")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("portrait", parents=[common, sym], help="sigma_min(T_N - w) raster (CSV)")
    s.add_argument("--grid", type=parse_grid, required=True, metavar="X0,X1,Y0,Y1,NX,NY")
    s.add_argument("--N", type=int, default=400)
    s.set_defaults(func=cmd_portrait)

    s = sub.add_parser("qrg", parents=[common, sym], help="rank-one resolvent bound for m = 1")
    s.add_argument("--w", type=parse_complex, metavar="RE,IM")
    s.add_argument("--trace-ray", type=float, metavar="ANGLE", help="approach the curve along direction ANGLE")
    s.set_defaults(func=cmd_qrg)

    s = sub.add_parser("corpus", parents=[common], help="recheck the reference corpus")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--name", action="append", help="entry name (repeatable)")
    s.set_defaults(func=cmd_corpus)
    return p


# options whose values may start with '-' (negative coordinates)
_VALUE_FLAGS = ("--w", "--grid", "--trace-ray")


def _glue_values(argv):
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run_subcommand(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    try:
        return args.func(args)
    except (ToeplitzError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None):
    sys.exit(run_subcommand(argv))


if __name__ == "__main__":
    main()
