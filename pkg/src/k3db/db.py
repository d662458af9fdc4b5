"""Build, persist and query the candidate database."""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable

from .basket import Basket, QuotientSingularity, enumerate_fano_baskets, enumerate_k3_baskets, genus_scan
from .candidates import (
    CODIM_OFFSET,
    CandidateRecord,
    Centre,
    NoCandidate,
    Overrides,
    default_overrides,
    make_candidate,
    validate_weights,
)
from .projection import annotate, find_centres, project_data
from .qseries import Poly
from .rr import degree

__all__ = [
    "FORMAT",
    "FORMAT_VERSION",
    "DatabaseIOError",
    "FormatVersionMismatch",
    "ChecksumMismatch",
    "Database",
    "BuildReport",
    "build",
    "compute_centres",
    "save",
    "load",
    "dumps",
    "loads",
    "search",
]

log = logging.getLogger(__name__)

FORMAT = "k3db-jsonl"
FORMAT_VERSION = 1
MAX_GENUS = 30
MONOTONE_WINDOW = 3


class DatabaseIOError(OSError):
    pass


class FormatVersionMismatch(ValueError):
    pass


class ChecksumMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Database:
    records: tuple[CandidateRecord, ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {r.id: r for r in self.records})
        object.__setattr__(self, "_by_key", {r.key: r for r in self.records})

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def by_id(self, id_: int) -> CandidateRecord:
        return self._by_id[id_]

    def find(self, g: int, B: Basket, weights) -> CandidateRecord | None:
        return self._by_key.get((g, B, tuple(weights)))

    def codim_histogram(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for r in self.records:
            out[r.codim] = out.get(r.codim, 0) + 1
        return dict(sorted(out.items()))


@dataclass
class BuildReport:
    failures: list = field(default_factory=list)  # (g, B, reason, weights)
    dropped: list = field(default_factory=list)  # (record, centre, missing image)
    monotonicity: list = field(default_factory=list)  # (g, B, codim) found past the stop
    unscanned: list = field(default_factory=list)  # baskets with no minimal genus
    scan_depth: dict = field(default_factory=dict)  # genus steps above minimal -> count

    def merge(self, other: "BuildReport"):
        self.failures += other.failures
        self.dropped += other.dropped
        self.monotonicity += other.monotonicity
        self.unscanned += other.unscanned
        for k, v in other.scan_depth.items():
            self.scan_depth[k] = self.scan_depth.get(k, 0) + v


def _try(g, B, kind, overrides):
    try:
        rec = make_candidate(g, B, kind, overrides)
        return rec, rec.codim, None
    except NoCandidate as e:
        return None, len(e.weights) - CODIM_OFFSET[kind], e


def _basket_task(args) -> tuple[list[CandidateRecord], BuildReport]:
    B, kind, max_codim, overrides, window = args
    report = BuildReport()
    g0, _ = genus_scan(B, kind)
    if g0 is None:
        report.unscanned.append(B)
        return [], report
    out = []
    g = g0
    while g <= MAX_GENUS:
        rec, codim, err = _try(g, B, kind, overrides)
        if codim > max_codim:
            break
        if err is not None:
            report.failures.append((g, B, str(err), err.weights))
        else:
            out.append(rec)
            report.scan_depth[g - g0] = report.scan_depth.get(g - g0, 0) + 1
        g += 1
    for h in range(g + 1, min(g + window, MAX_GENUS) + 1):
        rec, codim, _ = _try(h, B, kind, overrides)
        if rec is not None and codim <= max_codim:
            report.monotonicity.append((h, B, codim))
    return out, report


def _sort_key(rec: CandidateRecord):
    return (rec.codim, sum(rec.weights), rec.weights, [(s.r, s.a) for s in rec.basket], rec.genus)


def _close_under_projection(records: list[CandidateRecord], report: BuildReport) -> list[CandidateRecord]:
    # records of codim >= 2 must find every Type I image among the others
    keep = {r.key: r for r in records}
    while True:
        drop = []
        for key, rec in keep.items():
            if rec.codim < 2:
                continue
            for c in find_centres(rec):
                if not c.type1:
                    continue
                image = project_data(rec.genus, rec.basket, rec.weights, c.sing)
                if image not in keep:
                    drop.append(key)
                    report.dropped.append((rec, c.sing, image))
                    break
        if not drop:
            break
        for key in drop:
            del keep[key]
    return list(keep.values())


def _name(rec: CandidateRecord, n: int) -> str:
    return f"c{rec.codim}({n})"


def _assign_ids(records: Iterable[CandidateRecord]) -> tuple[CandidateRecord, ...]:
    out, per_codim = [], {}
    for i, rec in enumerate(sorted(records, key=_sort_key), 1):
        per_codim[rec.codim] = per_codim.get(rec.codim, 0) + 1
        out.append(replace(rec, id=i, name=_name(rec, per_codim[rec.codim])))
    return tuple(out)


def build(
    kind: str = "k3",
    max_codim: int = 4,
    bound: int = 20,
    jobs: int = 1,
    overrides: Overrides | None = None,
    report: BuildReport | None = None,
    monotone_window: int = MONOTONE_WINDOW,
    baskets: Iterable[Basket] | None = None,
) -> Database:
    """All validated candidates of codimension <= max_codim.

    Each basket is scanned upward from its minimal genus until the
    codimension passes max_codim; the next `monotone_window` genera are
    then checked to confirm the codimension stays above it.
    """
    if kind not in ("k3", "fano"):
        raise ValueError(f"cannot build a {kind!r} database")
    if overrides is None:
        overrides = default_overrides()
    if report is None:
        report = BuildReport()
    if baskets is None:
        if kind == "k3":
            baskets = enumerate_k3_baskets(bound, with_genus=False)
        else:
            baskets = enumerate_fano_baskets(bound)
    tasks = [(B, kind, max_codim, overrides, monotone_window) for B in baskets]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_basket_task, tasks, chunksize=16))
    else:
        results = [_basket_task(t) for t in tasks]
    records = []
    for recs, rep in results:
        records += recs
        report.merge(rep)
    if kind == "k3":
        records = _close_under_projection(records, report)
    for g, B, reason, _ in report.failures:
        log.info("no candidate for g=%d basket=%s: %s", g, B, reason)
    for rec, s, image in report.dropped:
        log.info("dropped g=%d basket=%s weights=%s: image of [%d,%d] missing",
                 rec.genus, rec.basket, list(rec.weights), s.r, s.a)
    for g, B, codim in report.monotonicity:
        log.warning("codim %d reappears at g=%d for basket %s", codim, g, B)
    meta = {
        "kind": kind,
        "max_codim": max_codim,
        "bound": bound,
        "overrides_digest": overrides.digest,
        "centres": False,
    }
    return Database(_assign_ids(records), meta)


def compute_centres(db: Database, missing: list | None = None) -> Database:
    """Annotate every record with its centres and resolve Type I images."""
    def lookup(g, B, W):
        rec = db.find(g, B, W)
        return None if rec is None else rec.id

    out = []
    for rec in db.records:
        new, miss = annotate(rec, lookup)
        out.append(new)
        if missing is not None:
            missing += miss
    return Database(tuple(out), {**db.metadata, "centres": True})


# --- persistence -----------------------------------------------------------

def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _record_line(rec: CandidateRecord) -> str:
    obj = {
        "id": rec.id,
        "kind": rec.kind,
        "codim": rec.codim,
        "genus": rec.genus,
        "weights": list(rec.weights),
        "basket": rec.basket.as_lists(),
        "numerator": [[e, int(c)] for e, c in rec.numerator.sparse()],
        "degree": _frac_str(rec.degree),
        "centres": [
            {"sing": c.sing.as_list(), "type": 1 if c.type1 else 0, "image": c.image_id}
            for c in rec.centres
        ],
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


_META_KEYS = ("kind", "max_codim", "bound", "overrides_digest", "centres")


def dumps(db: Database) -> str:
    lines = [_record_line(r) + "\n" for r in db.records]
    digest = hashlib.sha256("".join(lines).encode("utf-8")).hexdigest()
    header = {"format": FORMAT, "version": FORMAT_VERSION}
    header.update({k: db.metadata.get(k) for k in _META_KEYS})
    header.update({"count": len(lines), "digest": digest})
    return json.dumps(header, separators=(",", ":"), ensure_ascii=False) + "\n" + "".join(lines)


def save(db: Database, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(db))
    except OSError as e:
        raise DatabaseIOError(f"cannot write {path}: {e}") from e


def _parse_record(obj: dict, validate: bool) -> CandidateRecord:
    kind = obj["kind"]
    B = Basket.of(tuple(x) for x in obj["basket"])
    W = tuple(obj["weights"])
    N = Poly.from_sparse((e, c) for e, c in obj["numerator"])
    deg = Fraction(obj["degree"])
    rec = CandidateRecord(
        kind=kind,
        genus=obj["genus"],
        basket=B,
        weights=W,
        numerator=N,
        codim=obj["codim"],
        degree=deg,
        id=obj["id"],
        centres=tuple(
            Centre(QuotientSingularity(*c["sing"]), bool(c["type"]), c["image"]) for c in obj["centres"]
        ),
    )
    if validate:
        expect = validate_weights(kind, rec.genus, B, W)
        if expect is None or expect != N:
            raise ChecksumMismatch(f"record {rec.id}: numerator does not match its data")
        if degree(kind, rec.genus, B) != deg:
            raise ChecksumMismatch(f"record {rec.id}: degree does not match its data")
        if rec.codim != len(W) - CODIM_OFFSET[kind]:
            raise ChecksumMismatch(f"record {rec.id}: codimension does not match its weights")
    return rec


def loads(text: str, validate: bool = True) -> Database:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatVersionMismatch("empty file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise FormatVersionMismatch(f"unreadable header: {e}") from e
    if header.get("format") != FORMAT or header.get("version") != FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"expected {FORMAT} v{FORMAT_VERSION}, got {header.get('format')} v{header.get('version')}"
        )
    body = lines[1:]
    digest = hashlib.sha256("".join(l + "\n" for l in body).encode("utf-8")).hexdigest()
    if digest != header.get("digest") or len(body) != header.get("count"):
        raise ChecksumMismatch("content digest does not match header")
    records = []
    for n, line in enumerate(body, 2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ChecksumMismatch(f"line {n}: {e}") from e
        records.append(_parse_record(obj, validate))
    per_codim = {}
    out = []
    for rec in records:
        per_codim[rec.codim] = per_codim.get(rec.codim, 0) + 1
        out.append(replace(rec, name=_name(rec, per_codim[rec.codim])))
    meta = {k: header.get(k) for k in _META_KEYS}
    return Database(tuple(out), meta)


def load(path, validate: bool = True) -> Database:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DatabaseIOError(f"cannot read {path}: {e}") from e
    return loads(text, validate)


# --- queries ---------------------------------------------------------------

def search(
    db: Database,
    index: int | None = None,
    indices: Iterable[int] | None = None,
    weights: Iterable[int] | None = None,
    contains_weights: Iterable[int] | None = None,
    codim: int | None = None,
    genus: int | None = None,
    numerator_degree: int | None = None,
    where: Callable[[CandidateRecord], bool] | None = None,
) -> list[CandidateRecord]:
    """Records satisfying every given condition.

    `index`: some basket point has this index; `indices`: the multiset of
    indices is exactly this; `contains_weights`: sub-multiset test.
    """
    from collections import Counter

    want_idx = None if indices is None else sorted(indices)
    want_w = None if weights is None else tuple(sorted(weights))
    sub_w = None if contains_weights is None else Counter(contains_weights)

    def ok(r: CandidateRecord) -> bool:
        if index is not None and index not in r.basket.indices:
            return False
        if want_idx is not None and sorted(r.basket.indices) != want_idx:
            return False
        if want_w is not None and r.weights != want_w:
            return False
        if sub_w is not None and sub_w - Counter(r.weights):
            return False
        if codim is not None and r.codim != codim:
            return False
        if genus is not None and r.genus != genus:
            return False
        if numerator_degree is not None and r.numerator.degree != numerator_degree:
            return False
        return where is None or where(r)

    return [r for r in db.records if ok(r)]
