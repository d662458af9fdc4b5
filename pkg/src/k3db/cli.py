"""The `k3` command line."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .basket import CurveBasket, enumerate_fano_baskets, enumerate_k3_baskets, parse_basket
from .candidates import (
    NoCandidate,
    format_record,
    gorenstein_check,
    load_overrides,
    make_candidate,
    record_series,
)
from .db import (
    BuildReport,
    ChecksumMismatch,
    DatabaseIOError,
    FormatVersionMismatch,
    build,
    compute_centres,
    load,
    save,
    search,
)
from .projection import ImageNotInDatabase, projection_chains, verify_projection
from .qseries import NotPolynomial, clear_denominator, expr_expand
from .rr import hilbert

log = logging.getLogger("k3db")

OK, INVALID, EMPTY, VERIFY_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")
    if not out or any(w < 1 for w in out):
        raise UsageError(f"expected positive integers, got {text!r}")
    return out


def _basket(text: str, kind: str):
    try:
        if kind == "curve":
            # orbifold points carry only an order; accept "r" or "r/a"
            toks = [t for t in "".join(text.split()).split(",") if t]
            return CurveBasket(tuple(int(t.split("/")[0]) for t in toks))
        return parse_basket(text)
    except ValueError as e:
        raise UsageError(str(e))


def _record_json(rec) -> dict:
    return {
        "id": rec.id,
        "kind": rec.kind,
        "codim": rec.codim,
        "genus": rec.genus,
        "weights": list(rec.weights),
        "basket": rec.basket.as_lists(),
        "numerator": [[e, int(c)] for e, c in rec.numerator.sparse()],
        "degree": f"{rec.degree.numerator}/{rec.degree.denominator}",
        "centres": [
            {"sing": c.sing.as_list(), "type": 1 if c.type1 else 0, "image": c.image_id}
            for c in rec.centres
        ],
    }


def _emit(args, obj, text: str):
    if args.format == "json":
        print(json.dumps(obj))
    else:
        print(text)


def _load(path):
    try:
        return load(path)
    except DatabaseIOError as e:
        raise UsageError(str(e))


# --- commands --------------------------------------------------------------

def cmd_hilbert(args) -> int:
    B = _basket(args.basket, args.kind)
    series = hilbert(args.kind, args.genus, B)
    if args.weights:
        W = _ints(args.weights)
        try:
            N = clear_denominator(series, W)
        except NotPolynomial as e:
            log.error("%s", e)
            return EMPTY
        _emit(args, {"weights": W, "numerator": [[e, str(c)] for e, c in N.sparse()]}, N.format(args.order))
        return OK
    coeffs = expr_expand(series, args.terms)
    _emit(args, {"coefficients": [str(c) for c in coeffs]}, ", ".join(map(str, coeffs)))
    return OK


def cmd_candidate(args) -> int:
    B = _basket(args.basket, args.kind)
    overrides = load_overrides(args.overrides) if args.overrides else None
    try:
        rec = make_candidate(args.genus, B, args.kind, overrides)
    except NoCandidate as e:
        log.error("no candidate: %s (last weights %s)", e, list(e.weights))
        return EMPTY
    _emit(args, _record_json(rec), format_record(rec, args.order, show_centres=False))
    return OK


def cmd_baskets(args) -> int:
    if args.bound < 1:
        raise UsageError("--bound must be positive")
    if args.kind == "fano":
        bs = enumerate_fano_baskets(args.bound, include_empty=args.include_empty)
    else:
        bs = enumerate_k3_baskets(args.bound, include_empty=args.include_empty, with_genus=False)
    if args.format == "json":
        print(json.dumps({"count": len(bs), "baskets": [B.as_lists() for B in bs]}))
    else:
        for B in bs:
            print("[" + ", ".join(f"[ {s.r}, {s.a} ]" for s in B) + "]")
        print(f"count: {len(bs)}")
    return OK if bs else EMPTY


def cmd_db_build(args) -> int:
    if args.max_codim < 1 or args.jobs < 1:
        raise UsageError("--max-codim and --jobs must be positive")
    overrides = load_overrides(args.overrides) if args.overrides else None
    report = BuildReport()
    db = build(args.kind, args.max_codim, args.bound, args.jobs, overrides, report)
    if args.centres:
        db = compute_centres(db)
    save(db, args.out)
    hist = db.codim_histogram()
    log.info("no candidate: %d, dropped: %d, monotonicity violations: %d",
             len(report.failures), len(report.dropped), len(report.monotonicity))
    _emit(args, {"count": len(db), "codim": {str(k): v for k, v in hist.items()}},
          f"{len(db)} records; by codimension: " + ", ".join(f"{k}: {v}" for k, v in hist.items()))
    return OK if len(db) else EMPTY


def cmd_db_search(args) -> int:
    db = _load(args.file)
    found = search(
        db,
        index=args.index,
        weights=_ints(args.weights) if args.weights else None,
        codim=args.codim,
        genus=args.genus,
    )
    if args.format == "json":
        print(json.dumps({"count": len(found), "records": [_record_json(r) for r in found]}))
    else:
        for rec in found:
            print(format_record(rec, args.order))
            print()
        print(f"count: {len(found)}")
    return OK if found else EMPTY


def cmd_db_centres(args) -> int:
    db = _load(args.file)
    missing = []
    db = compute_centres(db, missing)
    save(db, args.out)
    for rec, s, _ in missing:
        log.info("record %d: Type 1 image of [%d,%d] is not in the database", rec.id, s.r, s.a)
    n = sum(1 for r in db if any(c.type1 for c in r.centres))
    _emit(args, {"count": len(db), "with_type1": n, "unresolved": len(missing)},
          f"{n} of {len(db)} records have a Type 1 centre; {len(missing)} images unresolved")
    return OK


def _chain_rows(chain) -> list[str]:
    rows = []
    for rec, c in chain:
        if c is None:
            rows.append(f"({rec.id}, {rec.codim})")
        else:
            s = c.sing
            rows.append(f"({rec.id}, {rec.codim}) [{s.r},{s.a},{s.r - s.a}] -> {c.image_id}")
    return rows


def cmd_db_chains(args) -> int:
    db = _load(args.file)
    if not db.metadata.get("centres"):
        db = compute_centres(db)
    starts = search(db, weights=_ints(args.weights))
    chains = []
    for rec in starts:
        try:
            chains += projection_chains(rec, db)
        except ImageNotInDatabase as e:
            log.error("%s", e)
            return EMPTY
    if args.format == "json":
        print(json.dumps([
            [{"id": r.id, "codim": r.codim, "sing": None if c is None else c.sing.as_list(),
              "image": None if c is None else c.image_id} for r, c in ch]
            for ch in chains
        ]))
    else:
        for k, ch in enumerate(chains, 1):
            print(f"Chain {k}:")
            for row in _chain_rows(ch):
                print("  " + row)
    return OK if chains else EMPTY


def cmd_verify(args) -> int:
    try:
        db = load(args.file)
    except DatabaseIOError as e:
        raise UsageError(str(e))
    except (FormatVersionMismatch, ChecksumMismatch) as e:
        log.error("%s", e)
        return VERIFY_FAILED
    if not db.metadata.get("centres"):
        db = compute_centres(db)
    problems = []
    for rec in db:
        if not gorenstein_check(rec.numerator, rec.weights, rec.kind):
            problems.append(f"record {rec.id}: numerator is not Gorenstein symmetric")
        if any(c < 0 for c in expr_expand(record_series(rec), 60)):
            problems.append(f"record {rec.id}: negative plurigenus")
        for c in rec.centres:
            if c.type1 and c.image_id is not None:
                if not verify_projection(rec, db.by_id(c.image_id), c.sing):
                    problems.append(f"record {rec.id}: projection from [{c.sing.r},{c.sing.a}] fails")
    for p in problems:
        log.error("%s", p)
    ok = not problems
    _emit(args, {"records": len(db), "problems": problems},
          f"{len(db)} records checked: {'ok' if ok else f'{len(problems)} problems'}")
    return OK if ok else VERIFY_FAILED


# --- parser ----------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--order", choices=("desc", "asc"), default="desc", help="polynomial term order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="k3", description="Graded rings of K3 surfaces and Fano 3-folds.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log reports to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hilbert", help="Hilbert series coefficients or cleared numerator")
    p.add_argument("--kind", choices=("curve", "k3", "fano"), required=True)
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--basket", default="")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--terms", type=int, default=10)
    g.add_argument("--weights")
    _common(p)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("candidate", help="deduce a weighted projective candidate")
    p.add_argument("--kind", choices=("k3", "fano"), default="k3")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--basket", default="")
    p.add_argument("--overrides")
    _common(p)
    p.set_defaults(func=cmd_candidate)

    p = sub.add_parser("baskets", help="enumerate baskets")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--kind", choices=("k3", "fano"), default="k3")
    p.add_argument("--include-empty", action=argparse.BooleanOptionalAction, default=True)
    _common(p)
    p.set_defaults(func=cmd_baskets)

    p = sub.add_parser("verify", help="re-check a database file")
    p.add_argument("--file", required=True)
    _common(p)
    p.set_defaults(func=cmd_verify)

    dbp = sub.add_parser("db", help="database operations").add_subparsers(dest="db_command", required=True)

    p = dbp.add_parser("build")
    p.add_argument("--max-codim", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--overrides")
    p.add_argument("--kind", choices=("k3", "fano"), default="k3")
    p.add_argument("--bound", type=int, default=20)
    p.add_argument("--centres", action=argparse.BooleanOptionalAction, default=True)
    _common(p)
    p.set_defaults(func=cmd_db_build)

    p = dbp.add_parser("search")
    p.add_argument("--file", required=True)
    p.add_argument("--index", type=int)
    p.add_argument("--weights")
    p.add_argument("--codim", type=int)
    p.add_argument("--genus", type=int)
    _common(p)
    p.set_defaults(func=cmd_db_search)

    p = dbp.add_parser("centres")
    p.add_argument("--file", required=True)
    p.add_argument("--out", required=True)
    _common(p)
    p.set_defaults(func=cmd_db_centres)

    p = dbp.add_parser("chains")
    p.add_argument("--file", required=True)
    p.add_argument("--weights", required=True)
    _common(p)
    p.set_defaults(func=cmd_db_chains)
    return parser


def _configure_logging(verbose: bool):
    # a handler of our own, so reports reach stderr whatever the root logger does
    for h in list(log.handlers):
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage; our convention is 1
        return OK if e.code == 0 else INVALID
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except UsageError as e:
        log.error("%s", e)
        return INVALID
    except (FormatVersionMismatch, ChecksumMismatch) as e:
        log.error("%s", e)
        return VERIFY_FAILED
    except OSError as e:
        log.error("%s", e)
        return INVALID
    except (ValueError, ArithmeticError) as e:
        log.error("invalid input: %s", e)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
