"""Command line interface: ``polar-ae <subcommand>``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import reports
from .automorphism import admissible_mask, count_automorphisms_bruteforce
from .code import CRC, PolarCode
from .ensemble import EnsembleError

log = logging.getLogger("polar_ae")


def _emit(rows, args, meta=None, columns=None):
    fmt = args.format
    if fmt == "json":
        payload = {"rows": rows, "meta": meta} if meta is not None else rows
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        cols = columns or (list(rows[0]) if rows else [])
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
        if meta is not None and fmt == "csv":
            Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    else:
        sys.stdout.write(text)


def _load_code(path) -> PolarCode:
    try:
        return PolarCode.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise SystemExit(f"error: cannot read code from {path}: {exc}")


def cmd_design(args):
    code = reports.design_from_args(args.design, args.n, args.K, snr=args.snr, r=args.r, s=args.s,
                                    targets=args.targets, base=args.base, greedy=args.greedy)
    if args.crc:
        code = code.with_crc(CRC(int(args.crc, 0)))
    text = json.dumps(code.to_dict()) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_mask(args):
    code = _load_code(args.code)
    mask = admissible_mask(code)
    rows = [{"i": i, "j": j} for i, j in mask.sorted_positions()]
    meta = {"code": code.to_dict(), "t": mask.t, "utl_automorphisms": mask.group_size, "pattern": mask.pattern()}
    _emit(rows, args, meta, columns=["i", "j"])


def cmd_count_aut(args):
    if args.code:
        code = _load_code(args.code)
        aut, aff = count_automorphisms_bruteforce(code)
        rows = [{"monomials": str(code.monomials), "K": code.K, "aut": aut, "affine": aff}]
    else:
        if not args.all:
            raise SystemExit("error: pass --all or --code")
        if args.n != 3:
            raise SystemExit(f"error: brute-force counting supports n = 3 only, got n = {args.n}")
        rows = reports.count_aut_table(args.n)
    _emit(rows, args, columns=["monomials", "K", "aut", "affine"])


def cmd_sweep(args):
    designs = args.designs.split(",")
    _emit(reports.admissible_sweep(args.n, designs), args, columns=["N", "design", "K", "t"])


def cmd_suitability(args):
    n_list = [int(v) for v in args.n_list.split(",")]
    rows = reports.suitability(n_list, args.designs.split(","))
    _emit(rows, args, reports.SUITABILITY_META)


def cmd_reproduce(args):
    report = reports.reproduce_16_7()
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args):
    if args.config:
        cfg = reports.load_config(args.config)
        base = Path(args.config).parent
    else:
        if not args.code:
            raise SystemExit("error: simulate needs --config or --code")
        cfg = {
            "code_file": str(Path(args.code).resolve()),
            "decoders": [{
                "decoder": args.decoder,
                "list_size": args.list_size,
                "iters": args.iters,
                "ae_branches": args.ae_branches,
                "ae_group": args.ae_group,
                **({"crc": args.crc} if args.crc else {}),
            }],
            "snr_db": [float(v) for v in args.snr.split(",")],
            "max_frames": args.max_frames,
            "max_errors": args.max_errors,
            "convention": args.convention,
        }
        base = None
    if args.seed is not None:
        cfg["seed"] = args.seed
    rows, meta = reports.simulate_matrix(cfg, base, workers=args.workers)
    cols = ["code_id", "decoder", "snr_db", "frames", "block_errors", "bler", "ci95", "bit_errors", "ber"]
    _emit(rows, args, meta, columns=cols)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polar-ae", description=__doc__)
    p.add_argument("--seed", type=int, default=None, help="RNG seed (simulate)")
    p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="construct a code and print it as JSON")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--K", type=int, default=0)
    d.add_argument("--design", choices=("ga", "ga-low", "5g", "rm", "utl"), default="ga")
    d.add_argument("--snr", type=float, default=reports.HIGH_SNR_DB, help="GA design SNR (Es/N0, dB)")
    d.add_argument("--r", type=int, default=None, help="Reed-Muller order")
    d.add_argument("--s", type=int, default=0, help="UTL design: number of removed channels")
    d.add_argument("--targets", default=None, help='UTL targets, e.g. "1:3,2:3"')
    d.add_argument("--base", choices=("ga", "5g"), default="ga", help="UTL design base sequence")
    d.add_argument("--greedy", action="store_true", help="UTL design: pick targets automatically")
    d.add_argument("--crc", default=None, help="attach a CRC polynomial, e.g. 0x1D5")
    d.set_defaults(func=cmd_design)

    m = sub.add_parser("mask", help="UT admissible positions of a code")
    m.add_argument("--code", required=True)
    m.set_defaults(func=cmd_mask)

    c = sub.add_parser("count-aut", help="brute-force |Aut| and |Aff| (N = 8)")
    c.add_argument("--n", type=int, default=3)
    c.add_argument("--all", action="store_true", help="all decreasing codes of length 2^n")
    c.add_argument("--code", default=None)
    c.set_defaults(func=cmd_count_aut)

    w = sub.add_parser("sweep", help="admissible positions t versus K")
    w.add_argument("--n", type=int, default=7)
    w.add_argument("--designs", default="5g,ga-high,ga-low")
    w.set_defaults(func=cmd_sweep)

    s = sub.add_parser("suitability", help="fractions of K with t = 0 and 2^t >= 32")
    s.add_argument("--n-list", default="7,8,9,10")
    s.add_argument("--designs", default="ga-high,5g")
    s.set_defaults(func=cmd_suitability)

    r = sub.add_parser("reproduce-16-7", help="the (16,7) worked example as JSON")
    r.set_defaults(func=cmd_reproduce)

    sim = sub.add_parser("simulate", help="Monte Carlo BLER over BPSK-AWGN")
    sim.add_argument("--config", default=None, help="JSON simulation config")
    sim.add_argument("--code", default=None, help="code JSON (when no config is given)")
    sim.add_argument("--decoder", choices=("sc", "scl", "bp"), default="sc")
    sim.add_argument("--list-size", type=int, default=8)
    sim.add_argument("--iters", type=int, default=60)
    sim.add_argument("--ae-branches", type=int, default=1)
    sim.add_argument("--ae-group", choices=("utl", "lta", "utlxlta"), default="utl")
    sim.add_argument("--crc", default=None)
    sim.add_argument("--snr", default="3,4,5", help="comma-separated SNR points in dB")
    sim.add_argument("--convention", choices=("ebn0", "esn0"), default="ebn0")
    sim.add_argument("--max-frames", type=int, default=1_000_000)
    sim.add_argument("--max-errors", type=int, default=100)
    sim.add_argument("--workers", type=int, default=None)
    sim.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (reports.ConfigError, EnsembleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
