"""Command-line entry point: ``hequery <command> ...``.

Client and server run in one process; the server side only ever receives a
backend built from public key material.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import complexity, dghv, gahi, hqp, ring, serialize
from .codec import Database, PlainRecord, load_database
from .cyclotomic import FieldContext, search_field_primes
from .errors import (DegreeTooSmall, EncodingError, FieldTooSmall, InvalidParams, KeyContextMismatch,
                     NotFound, SearchExhausted, SquareDiscriminant, UnsupportedOperation)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_FOUND = 0, 2, 3, 4

GAHI_KEYS = {"lam", "noise_bits", "secret_bits", "rand_bits", "pubkey_size"}
HQP_KEYS = {"n", "p", "q_bits", "w", "sigma"}

TABLE1 = {"db": ["1100", "1010", "1100", "1101", "1000"], "query": "1100",
          "I": [1, 0, 1, 0, 0], "S": [1, 1, 2, 2, 2],
          "Iprime": [[1], [0, 0], [0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0, 0]],
          "result": ["1100", "1100"], "count": 2}
TABLE2 = {"db": ["0010", "1011", "1001", "1011", "1100"], "query": "1011",
          "F": [0, 1, 0, 1, 0], "G": [0, 1, 1, 2, 2],
          "Fprime": [[0], [1, 0], [0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0, 0]],
          "result": ["1011", "1011"], "count": 2}


class UsageError(Exception):
    pass


def _load_params_file(path, scheme) -> dict:
    if path is None:
        return {}
    cfg = json.loads(Path(path).read_text())
    if not isinstance(cfg, dict):
        raise UsageError("params file must hold a JSON object")
    allowed = GAHI_KEYS if scheme == "gahi" else HQP_KEYS
    unknown = set(cfg) - allowed
    if unknown:
        raise UsageError(f"unknown {scheme} params: {', '.join(sorted(unknown))}")
    return cfg


def _parse_bits(text: str) -> PlainRecord:
    try:
        return PlainRecord.from_display(text)
    except ValueError as exc:
        raise EncodingError(str(exc)) from exc


def _write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- sessions
def _gahi_params(cfg: dict, db: Database | None, strict: bool) -> dghv.DghvParams:
    explicit = {k: cfg[k] for k in ("noise_bits", "secret_bits", "rand_bits") if k in cfg}
    lam = cfg.get("lam", 4)
    size = cfg.get("pubkey_size", 8)
    if explicit:
        base = dghv.DghvParams.from_lambda(lam, pubkey_size=size)
        kw = dict(noise_bits=base.noise_bits, secret_bits=base.secret_bits, rand_bits=base.rand_bits)
        kw.update(explicit)
        return dghv.DghvParams(pubkey_size=size, lam=lam, **kw)
    if db is not None:
        return gahi.advise_params(len(db), db.n_bits, lam=lam, pubkey_size=size, strict=strict)
    return dghv.DghvParams.from_lambda(lam, pubkey_size=size)


def _hqp_setup(cfg: dict, db: Database | None, strict: bool):
    n_bits = db.n_bits if db is not None else 4
    m = len(db) if db is not None else 5
    if "n" in cfg or "p" in cfg:
        if not ("n" in cfg and "p" in cfg):
            raise UsageError("hqp params need both n and p")
        fc = FieldContext(cfg["n"], cfg["p"])
    else:
        fc = hqp.choose_field(n_bits, m)
    if "q_bits" in cfg:
        rp = ring.RingParams.with_q_bits(fc.n, cfg["q_bits"], fc.p, w=cfg.get("w", 1 << 32),
                                         err_stddev=cfg.get("sigma", 3.2))
    else:
        rp = hqp.advise_ring(fc, m, strict, w=cfg.get("w", 1 << 32))
    return fc, rp


def _gahi_client(args, db):
    cfg = _load_params_file(args.params, "gahi")
    if args.keys:
        params, sk = serialize.load_dghv_secret(json.loads((Path(args.keys) / "secret.json").read_text()))
        params_pub, pk = serialize.load_dghv_public(json.loads((Path(args.keys) / "public.json").read_text()))
        if params != params_pub:
            raise KeyContextMismatch("secret and public key files disagree on params")
        return gahi.GahiClient(params, args.seed, keys=(sk, pk))
    return gahi.GahiClient(_gahi_params(cfg, db, args.strict_enc), args.seed)


def _hqp_client(args, db):
    cfg = _load_params_file(args.params, "hqp")
    if args.keys:
        rp, keys = serialize.load_ring_secret(json.loads((Path(args.keys) / "secret.json").read_text()))
        fc = FieldContext(rp.n, rp.t)
        return hqp.HqpClient(fc, rp, args.seed, keys=keys)
    fc, rp = _hqp_setup(cfg, db, args.strict_enc)
    return hqp.HqpClient(fc, rp, args.seed)


def gahi_session(db, query: PlainRecord, client, strict=False):
    be = client.backend()
    enc = client.encrypt_record(query)
    out, trace = gahi.run_select(db, enc, be, client.decrypt_number, strict)
    return out, trace, gahi.transcript(trace, client, out)


def hqp_session(db, query: PlainRecord, client, strict=False, precheck=False, no_leak=False):
    be = client.backend()
    ctx = hqp.build_context(db, client.field, be, strict)
    enc = client.encrypt_record(query)
    check = (lambda c: client.decrypt(c).is_zero()) if precheck else None
    out, trace = hqp.run_select(enc, ctx, reveal_count=client.decrypt_scalar,
                                precheck=check, no_leak=no_leak)
    return out, trace, hqp.transcript(trace, ctx, client, out)


# ---------------------------------------------------------------- commands
def cmd_keygen(args) -> int:
    db = load_database(args.db) if args.db else None
    out = Path(args.out or "keys")
    if args.scheme == "gahi":
        params = _gahi_params(_load_params_file(args.params, "gahi"), db, args.strict_enc)
        sk, pk = dghv.keygen(params, args.seed)
        sec, pub = serialize.dump_dghv_keys(params, sk, pk)
        fp = gahi.key_fingerprint(pk)
    else:
        fc, rp = _hqp_setup(_load_params_file(args.params, "hqp"), db, args.strict_enc)
        keys = ring.keygen(rp, args.seed)
        sec, pub = serialize.dump_ring_keys(rp, keys)
        fp = hqp.key_fingerprint(keys.public)
    _write_json(out / "secret.json", sec)
    _write_json(out / "public.json", pub)
    print(f"{args.scheme} keys written to {out}/ (fingerprint {fp})")
    return EXIT_OK


def cmd_field_find(args) -> int:
    report = search_field_primes(args.n, below=args.below, lower_bound=args.lower,
                                 stop_at_first=not args.all)
    data = report.to_json()
    if report.disc_is_square:
        data["error"] = f"disc(Phi_{args.n}) is a square; no prime keeps it irreducible"
    elif report.chosen_p is None:
        data["error"] = "no prime found in range"
    print(json.dumps(data, indent=2))
    if args.out:
        _write_json(args.out, data)
    return EXIT_DATA if "error" in data else EXIT_OK


def _require_db(args) -> Database:
    if not args.db:
        raise UsageError("--db is required")
    return load_database(args.db)


def cmd_query(args) -> int:
    db = _require_db(args)
    query = _parse_bits(args.bits)
    if args.scheme == "gahi":
        if args.precheck or args.no_leak:
            raise UsageError("--precheck and --no-leak apply to the hqp scheme")
        client = _gahi_client(args, db)
        _, _, tr = gahi_session(db, query, client, args.strict_enc)
    else:
        client = _hqp_client(args, db)
        try:
            _, _, tr = hqp_session(db, query, client, args.strict_enc, args.precheck, args.no_leak)
        except EncodingError as exc:
            # a non-constant count means the query value is not in the database
            raise EncodingError(f"{exc}; the query value is probably absent "
                                "(use --precheck to test membership first)") from exc
    matches = tr.get("result")
    print(f"matches: {tr['count']}")
    if matches is None:
        print("result is not a valid record sequence (query value absent?)")
    else:
        for i, r in enumerate(matches, 1):
            print(f"  {i}: {r}")
    if args.out:
        _write_json(args.out, tr)
        print(f"transcript: {args.out}")
    return EXIT_OK


def _cmd_modify(args, new: PlainRecord | None) -> int:
    if args.scheme != "gahi":
        raise UnsupportedOperation("update and delete are defined only for the gahi scheme")
    db = _require_db(args)
    query = _parse_bits(args.bits)
    client = _gahi_client(args, db)
    be = client.backend()
    I = gahi.indicators(db, client.encrypt_record(query), be)
    if new is None:
        view = gahi.delete(db, I, be)
    else:
        if new.n_bits != db.n_bits:
            raise EncodingError("replacement record has the wrong width")
        view = gahi.update(db, I, client.encrypt_record(new), be)
    shown = [PlainRecord(tuple(client.decrypt_bits(row))).display() for row in view]
    for i, r in enumerate(shown, 1):
        print(f"  {i}: {r}")
    if args.out:
        _write_json(args.out, {"rows": [serialize.dump_bits(client.params, row) for row in view],
                               "decrypted": shown})
    return EXIT_OK


def cmd_update(args) -> int:
    return _cmd_modify(args, _parse_bits(args.new))


def cmd_delete(args) -> int:
    return _cmd_modify(args, None)


def cmd_bench(args) -> int:
    m_values = tuple(int(x) for x in args.m.split(","))
    nb_values = tuple(int(x) for x in args.n_bits.split(","))
    rows = complexity.run_grid(nb_values, m_values, strict=args.strict_enc, seed=args.seed)
    report = complexity.complexity_report(rows)
    table = complexity.format_table(rows)
    print(table, end="")
    out = Path(args.out or "bench")
    # wall-clock timings are informational and vary run to run
    _write_json(out / "report.json", report)
    (out / "report.txt").write_text(table)
    print(f"report: {out}/report.json, {out}/report.txt")
    return EXIT_OK


def _check(name, got, want):
    ok = got == want
    print(f"  {name:8s} {got}  {'ok' if ok else f'EXPECTED {want}'}")
    return ok


def cmd_demo(args) -> int:
    if args.table == 1:
        t = TABLE1
        db = Database.from_bitstrings(t["db"])
        client = gahi.GahiClient(gahi.advise_params(len(db), db.n_bits, strict=args.strict_enc), args.seed)
        _, _, tr = gahi_session(db, _parse_bits(t["query"]), client, args.strict_enc)
        cols = ("I", "S", "Iprime", "result", "count")
    else:
        t = TABLE2
        db = Database.from_bitstrings(t["db"])
        fc = hqp.choose_field(db.n_bits, len(db))
        client = hqp.HqpClient(fc, hqp.advise_ring(fc, len(db), args.strict_enc), args.seed)
        _, _, tr = hqp_session(db, _parse_bits(t["query"]), client, args.strict_enc)
        cols = ("F", "G", "Fprime", "result", "count")
        print(f"field: Z_{fc.p}[x]/<Phi_{fc.n}>, degree {fc.degree}")
    print(f"query {t['query']} over {len(db)} records:")
    for i, r in enumerate(t["db"]):
        print(f"  R{i + 1} = {r}")
    ok = all([_check(c, tr[c], t[c]) for c in cols])
    print(f"min noise budget: {tr['min_noise_budget']} bits")
    if args.out:
        _write_json(args.out, tr)
    if not ok:
        print("demo values differ from the table")
        return EXIT_DATA
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scheme", choices=("gahi", "hqp"), default="gahi")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--db", help="CSV (id,bits) or JSON array of bit strings")
    common.add_argument("--params", help="JSON file of parameter overrides")
    common.add_argument("--keys", help="directory holding secret.json and public.json")
    common.add_argument("--strict-enc", action="store_true", help="encrypt server-known operands too")
    common.add_argument("--precheck", action="store_true", help="hqp: membership pre-check round")
    common.add_argument("--no-leak", action="store_true", help="hqp: skip the count round, return all m entries")
    common.add_argument("--out", help="output file or directory")

    p = argparse.ArgumentParser(prog="hequery", description="Encrypted database queries (DGHV and ring schemes).")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("keygen", parents=[common], help="generate and write a key pair").set_defaults(func=cmd_keygen)

    f = sub.add_parser("field-find", parents=[common], help="find primes keeping Phi_n irreducible")
    f.add_argument("n", type=int)
    f.add_argument("--below", type=int, default=None)
    f.add_argument("--lower", type=int, default=0)
    f.add_argument("--all", action="store_true", help="test every prime in range")
    f.set_defaults(func=cmd_field_find)

    q = sub.add_parser("query", parents=[common], help="run a select session")
    q.add_argument("bits", help="query record, big-endian bit string")
    q.set_defaults(func=cmd_query)

    u = sub.add_parser("update", parents=[common], help="replace matching records (gahi)")
    u.add_argument("bits")
    u.add_argument("--new", required=True, help="replacement record bits")
    u.set_defaults(func=cmd_update)

    d = sub.add_parser("delete", parents=[common], help="zero matching records (gahi)")
    d.add_argument("bits")
    d.set_defaults(func=cmd_delete)

    b = sub.add_parser("bench", parents=[common], help="operation-count grid for both protocols")
    b.add_argument("--m", default="2,4,8")
    b.add_argument("--n-bits", default="2,4,8")
    b.set_defaults(func=cmd_bench)

    dm = sub.add_parser("demo", parents=[common], help="reproduce a worked example table")
    dm.add_argument("--table", type=int, choices=(1, 2), required=True)
    dm.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except NotFound as exc:
        print(f"not found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (UsageError, InvalidParams, UnsupportedOperation, KeyContextMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EncodingError, FieldTooSmall, DegreeTooSmall, SquareDiscriminant, SearchExhausted,
            OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
