"""Command-line entry points.

Exit codes: 0 ok, 1 verification failure or mismatch, 2 parameter error,
3 I/O or network error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import rates, serialize
from .gf import FieldError, prime_power
from .protocol import Database, run_pipeline
from .scheme import HERMITIAN, RATIONAL, ParamViolation, SchemeParams, build
from .simnet import ChannelTransport, RemoteError, TcpTransport, Timeout, read_addresses, \
    run_session, serve
from .verify import verify_scheme

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARAM = 2
EXIT_IO = 3

SEED_ENV = "XSTPIR_SEED"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{SEED_ENV}={raw!r} is not an integer", EXIT_PARAM) from None


# ----------------------------------------------------------------------
# parameter handling


def _add_scheme_flags(p: argparse.ArgumentParser, allow_file: bool = False) -> None:
    if allow_file:
        p.add_argument("--scheme", help="serialized scheme file (instead of the flags below)")
    p.add_argument("--curve", choices=[RATIONAL, HERMITIAN], default=RATIONAL)
    p.add_argument("--q", type=int)
    p.add_argument("--x", type=int, default=1)
    p.add_argument("--t", type=int, default=1)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--l", type=int, help="file length (rational)")
    g.add_argument("--m", type=int, help="basis parameter (hermitian)")


def params_from_args(args) -> SchemeParams:
    if args.q is None:
        raise CliError("--q is required", EXIT_PARAM)
    try:
        prime_power(args.q)
    except (FieldError, ValueError):
        raise CliError(f"{args.q} not a prime power", EXIT_PARAM) from None
    if args.curve == RATIONAL:
        if args.l is None:
            raise CliError("rational curve needs --l", EXIT_PARAM)
        return SchemeParams.rational(args.q, args.l, args.x, args.t)
    if args.m is None:
        raise CliError("hermitian curve needs --m", EXIT_PARAM)
    return SchemeParams.hermitian(args.q, args.m, args.x, args.t)


def _build(params: SchemeParams):
    try:
        return build(params)
    except ParamViolation as exc:
        raise CliError(str(exc), EXIT_PARAM) from None


def scheme_from_args(args):
    if getattr(args, "scheme", None):
        try:
            return serialize.load(args.scheme)
        except OSError as exc:
            raise CliError(f"cannot read {args.scheme}: {exc}", EXIT_IO) from None
        except serialize.SchemeFormatError as exc:
            raise CliError(f"{args.scheme}: {exc}", EXIT_IO) from None
    params = params_from_args(args)
    return _build(params)


def _seeds(seed: int):
    """Independent streams for the database and for the protocol run."""
    db_ss, run_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(db_ss), np.random.default_rng(run_ss)


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from None


# ----------------------------------------------------------------------
# subcommands


def cmd_params(args) -> int:
    params = params_from_args(args)
    print(f"curve: {params.kind}")
    print(f"q: {params.q} (field size {params.field_size})")
    if params.m is not None:
        print(f"m: {params.m}")
    print(f"X: {params.X}  T: {params.T}")
    print(f"L: {params.L}")
    print(f"N: {params.N}")
    print(f"deg D^full: {params.deg_dfull}")
    print(f"rate: {params.rate} ≈ {float(params.rate):.6f}")
    for name, ok in params.conditions():
        print(f"  [{'pass' if ok else 'FAIL'}] {name}")
    bad = params.violations()
    if bad:
        print("infeasible, violated: " + "; ".join(bad), file=sys.stderr)
        return EXIT_PARAM
    print("feasible")
    return EXIT_OK


def _parse_range(text: str) -> tuple[int, int]:
    a, sep, b = text.partition(":")
    try:
        lo = int(a)
        hi = int(b) if sep else lo
    except ValueError:
        raise CliError(f"--xt expects A:B, got {text!r}", EXIT_PARAM) from None
    if lo < 2:
        raise CliError("--xt needs A ≥ 2", EXIT_PARAM)
    if hi < lo:
        raise CliError(f"--xt range {lo}:{hi} is empty", EXIT_PARAM)
    return lo, hi


def maxrates_csv(q: int, lo: int, hi: int, same_field: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["xt", *rates.COLUMNS, *(f"{c}_frac" for c in rates.COLUMNS)])
    for r in rates.compare_sweep(q, lo, hi, same_field=same_field):
        vals = r.values()
        w.writerow([r.xt, *(f"{float(vals[c]):.6f}" for c in rates.COLUMNS),
                    *(_frac(vals[c]) for c in rates.COLUMNS)])
    return buf.getvalue()


def _frac(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def cmd_maxrates(args) -> int:
    try:
        prime_power(args.q)
    except (FieldError, ValueError):
        raise CliError(f"{args.q} not a prime power", EXIT_PARAM) from None
    lo, hi = _parse_range(args.xt)
    _write(args.out, maxrates_csv(args.q, lo, hi, args.same_field))
    return EXIT_OK


def cmd_build(args) -> int:
    scheme = _build(params_from_args(args))
    try:
        serialize.save(scheme, args.out)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from None
    print(f"{scheme!r} -> {args.out}")
    print(f"digest: {serialize.digest(scheme).hex()}")
    return EXIT_OK


def cmd_verify(args) -> int:
    scheme = scheme_from_args(args)
    report = verify_scheme(scheme, subset_cap=args.subset_cap, privacy_K=args.privacy_k)
    text = report.to_csv() if args.out and args.out.endswith(".csv") else report.to_text() + "\n"
    _write(args.out, text)
    if args.out not in (None, "-"):
        print("RESULT: " + ("PASS" if report.ok else "FAIL"))
    return EXIT_OK if report.ok else EXIT_FAIL


def _report_match(decoded, expected, elapsed) -> int:
    ok = bool(np.array_equal(decoded, expected))
    print("MATCH" if ok else "MISMATCH")
    print(f"file: {' '.join(str(int(v)) for v in decoded)}")
    print(f"elapsed: {elapsed:.3f}s")
    return EXIT_OK if ok else EXIT_FAIL


def _check_theta(theta, K):
    if K < 1:
        raise CliError("--files must be at least 1", EXIT_PARAM)
    if not 1 <= theta <= K:
        raise CliError(f"--theta must lie in [1, {K}]", EXIT_PARAM)


def cmd_run(args) -> int:
    scheme = scheme_from_args(args)
    seed = args.seed if args.seed is not None else _default_seed()
    _check_theta(args.theta, args.files)
    db_rng, run_rng = _seeds(seed)
    db = Database.random(scheme.field, args.files, scheme.L, db_rng)
    t0 = time.perf_counter()
    res = run_pipeline(scheme, db, args.theta, run_rng)
    print(f"{scheme!r} K={args.files} theta={args.theta} seed={seed}")
    return _report_match(res.decoded, db.file(args.theta), time.perf_counter() - t0)


def _addresses(path):
    try:
        return read_addresses(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARAM) from None


def cmd_serve(args) -> int:
    scheme = scheme_from_args(args)
    digest = serialize.digest(scheme)
    addrs = _addresses(args.addresses)
    if len(addrs) != scheme.N:
        raise CliError(f"address list has {len(addrs)} entries, scheme needs N={scheme.N}",
                       EXIT_PARAM)
    which = range(scheme.N) if args.index is None else [args.index]
    handles = []
    try:
        for n in which:
            handles.append(serve(addrs[n], n, digest))
    except OSError as exc:
        for h in handles:
            h.shutdown()
        raise CliError(f"cannot listen: {exc}", EXIT_IO) from None
    for h in handles:
        print(f"server {h.actor.server_index} listening on {h.address[0]}:{h.address[1]}",
              flush=True)
    try:
        if args.duration is not None:
            time.sleep(args.duration)
        else:
            while True:
                time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        for h in handles:
            h.shutdown()
    return EXIT_OK


def cmd_retrieve(args) -> int:
    scheme = scheme_from_args(args)
    digest = serialize.digest(scheme)
    seed = args.seed if args.seed is not None else _default_seed()
    _check_theta(args.theta, args.files)
    if args.addresses:
        transport = TcpTransport(_addresses(args.addresses))
    else:
        transport = ChannelTransport.spawn(scheme.N, digest)
    if transport.size != scheme.N:
        raise CliError(f"address list has {transport.size} entries, scheme needs N={scheme.N}",
                       EXIT_PARAM)
    db_rng, run_rng = _seeds(seed)
    db = Database.random(scheme.field, args.files, scheme.L, db_rng)
    t0 = time.perf_counter()
    try:
        sess = run_session(transport, scheme, digest, db, args.theta, run_rng,
                           timeout=args.timeout)
    except Timeout as exc:
        raise CliError(f"Timeout: {exc}", EXIT_IO) from None
    except RemoteError as exc:
        raise CliError(str(exc), EXIT_IO) from None
    print(f"{scheme!r} K={args.files} theta={args.theta} seed={seed}")
    return _report_match(sess.decoded, db.file(args.theta), time.perf_counter() - t0)


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xstpir", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("params", help="check parameters and print N, L and the rate")
    _add_scheme_flags(p)
    p.set_defaults(fn=cmd_params)

    p = sub.add_parser("maxrates", help="maximum-rate sweep as CSV")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--xt", default="2:60", help="range A:B of X+T values")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--same-field", action="store_true",
                   help="evaluate the rational and hyperelliptic columns over F_{q^2}")
    p.set_defaults(fn=cmd_maxrates)

    p = sub.add_parser("build", help="build and serialize a scheme")
    _add_scheme_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("verify", help="run all structural checks")
    _add_scheme_flags(p, allow_file=True)
    p.add_argument("--out", help="report path; .csv selects CSV (default: text to stdout)")
    p.add_argument("--subset-cap", type=int, default=10**6)
    p.add_argument("--privacy-k", type=int, default=None,
                   help="also compare exact single-server view distributions for K files")
    p.set_defaults(fn=cmd_verify)

    def protocol_flags(p):
        p.add_argument("--files", type=int, default=3, help="number of files K")
        p.add_argument("--theta", type=int, default=1)
        p.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV} or 0")

    p = sub.add_parser("run", help="in-process end-to-end retrieval")
    _add_scheme_flags(p, allow_file=True)
    protocol_flags(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("serve", help="serve shares over TCP")
    _add_scheme_flags(p, allow_file=True)
    p.add_argument("--addresses", required=True, help="file with one host:port per line")
    p.add_argument("--index", type=int, default=None, help="serve only this server")
    p.add_argument("--duration", type=float, default=None, help="seconds before exiting")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("retrieve", help="store a random database and retrieve one file")
    _add_scheme_flags(p, allow_file=True)
    p.add_argument("--addresses", help="server list; omitted means in-process channels")
    p.add_argument("--timeout", type=float, default=10.0)
    protocol_flags(p)
    p.set_defaults(fn=cmd_retrieve)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(asctime)s %(name)s %(message)s")
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParamViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
