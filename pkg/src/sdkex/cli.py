"""Command-line front end: ``sdkex {selftest,params,exchange,bench,attack}``.

Exit codes: 0 success, 1 check or attack failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import random
import socket
import sys

from .analysis import attack_exponent_bruteforce, attack_key_from_quadruple, bench_sd_power
from .core import derive_shared_key, transmission
from .errors import ConfigError, ParameterError, SDKexError, TransportError
from .groupring import MatrixPlatform
from .protocol import (
    Role,
    SocketTransport,
    dump_config,
    generate_params,
    load_config,
    run_handshake,
    session_create,
)
from .selftest import PLATFORMS, run_selftest

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def fingerprint(key: bytes) -> str:
    return hashlib.sha256(key).hexdigest()[:32]


def _addr(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {text!r}")
    try:
        return host or "127.0.0.1", int(port)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad port in {text!r}") from None


def cmd_selftest(args) -> int:
    return EXIT_OK if run_selftest(args.platform) else EXIT_FAIL


def cmd_params(args) -> int:
    ps = generate_params(args.platform, args.seed, toy=args.toy)
    text = dump_config(ps)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_exchange(args) -> int:
    params = load_config(args.config)
    role = Role.RESPONDER if args.listen else Role.INITIATOR
    state = session_create(params, role)
    if args.listen:
        srv = socket.create_server(args.listen)
        srv.settimeout(args.timeout)
        if args.ready_file:
            with open(args.ready_file, "w") as fh:
                fh.write(str(srv.getsockname()[1]))
        try:
            conn, _ = srv.accept()
        except socket.timeout:
            raise TransportError("no peer connected before timeout") from None
        finally:
            srv.close()
    else:
        try:
            conn = socket.create_connection(args.connect, timeout=args.timeout)
        except OSError as exc:
            raise TransportError(f"connect failed: {exc}") from exc
    transport = SocketTransport(conn, args.timeout)
    try:
        key = run_handshake(transport, state)
    finally:
        transport.close()
    print(fingerprint(key))
    return EXIT_OK


def cmd_bench(args) -> int:
    names = [args.platform] if args.platform else list(PLATFORMS)
    ok = True
    rows = []
    for name in names:
        ps = generate_params(name, 0, toy=True)
        for row in bench_sd_power(ps.platform, ps.g, ps.phi, args.max_exp_bits, args.step):
            ok &= row.within_bound
            rows.append((name, row))
    if args.csv:
        w = csv.writer(sys.stdout)
        w.writerow(["platform", "t", "group_mults", "bound", "endo_applies", "endo_composes", "seconds"])
        for name, r in rows:
            w.writerow([name, r.t, r.group_mults, 2 * r.t + 2, r.endo_applies, r.endo_composes, f"{r.seconds:.6f}"])
    else:
        print(f"{'platform':<10} {'t':>5} {'group-mults':>12} {'bound':>6} {'wall-time [s]':>14}")
        for name, r in rows:
            flag = "" if r.within_bound else "  EXCEEDS BOUND"
            print(f"{name:<10} {r.t:>5} {r.group_mults:>12} {2 * r.t + 2:>6} {r.seconds:>14.6f}{flag}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_attack(args) -> int:
    if args.config:
        ps = load_config(args.config)
    else:
        kw = {"group": "C2", "modulus": 3, "size": 2} if args.platform == "matrix" else {}
        ps = generate_params(args.platform, args.seed, toy=True, **kw)
    plat = ps.platform
    rng = random.Random(args.seed)
    m = args.planted or rng.randrange(1, args.bound + 1)
    a = transmission(plat, ps.g, ps.phi, m)
    if args.key and isinstance(plat, MatrixPlatform):
        n = rng.randrange(1, args.bound + 1)
        b = transmission(plat, ps.g, ps.phi, n)
        honest = derive_shared_key(plat, b, m, ps.g, ps.phi)
        res = attack_key_from_quadruple(ps.phi.hpow, ps.phi.hpow_inv, ps.g, a, b, args.bound)
        success = res.key is not None and res.key == honest
        print(f"planted m={m} n={n} recovered={res.recovered} trials={res.trials} "
              f"elapsed_ms={res.elapsed:.1f} key_match={success}")
        return EXIT_OK if success else EXIT_FAIL
    res = attack_exponent_bruteforce(plat, ps.g, ps.phi, a, args.bound)
    print(f"planted m={m} recovered={res.recovered} trials={res.trials} elapsed_ms={res.elapsed:.1f}")
    return EXIT_OK if res.recovered is not None else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdkex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("selftest", help="run invariant checks at test scale")
    p.add_argument("--platform", choices=PLATFORMS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("params", help="generate a parameter config file")
    p.add_argument("--platform", choices=PLATFORMS, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--toy", action="store_true", help="test-scale sizes")
    p.add_argument("--out", help="write to FILE instead of stdout")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("exchange", help="run one handshake over TCP")
    end = p.add_mutually_exclusive_group(required=True)
    end.add_argument("--listen", type=_addr, metavar="ADDR")
    end.add_argument("--connect", type=_addr, metavar="ADDR")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--ready-file", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_exchange)

    p = sub.add_parser("bench", help="count group multiplications of sd_power at n = 2^t")
    p.add_argument("--platform", choices=PLATFORMS)
    p.add_argument("--max-exp-bits", type=int, default=64, metavar="T")
    p.add_argument("--step", type=int, default=8)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("attack", help="brute-force a planted private exponent")
    p.add_argument("--platform", choices=PLATFORMS, default="modp")
    p.add_argument("--config", metavar="FILE")
    p.add_argument("--planted", type=int)
    p.add_argument("--bound", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--key", action="store_true", help="matrix only: recover the shared key")
    p.set_defaults(func=cmd_attack)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"sdkex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SDKexError as exc:
        print(f"sdkex: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
