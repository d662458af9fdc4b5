import hashlib
import json
from functools import lru_cache
from itertools import combinations
from math import gcd

import pytest

from k3db.basket import enumerate_k3_baskets
from k3db.candidates import gorenstein_check
from k3db.db import (
    ChecksumMismatch,
    Database,
    DatabaseIOError,
    FormatVersionMismatch,
    build,
    compute_centres,
    dumps,
    load,
    loads,
    save,
    search,
)
from k3db.projection import projection_chains, verify_projection
from k3db.qseries import expr_expand

SMALL = enumerate_k3_baskets(20, with_genus=False)[::97]


@pytest.fixture(scope="module")
def small_db():
    return compute_centres(build("k3", 4, baskets=SMALL))


# --- an independent list of K3 hypersurfaces -------------------------------

@lru_cache(maxsize=None)
def representable(d, ws):
    if d == 0:
        return True
    if d < 0 or not ws:
        return False
    return any(representable(d - k * ws[0], ws[1:]) for k in range(d // ws[0] + 1))


def quasi_smooth(ws, d):
    n = len(ws)
    for k in range(1, n + 1):
        for I in combinations(range(n), k):
            sub = tuple(ws[i] for i in I)
            if representable(d, sub):
                continue
            extra = sum(1 for e in range(n) if e not in I and representable(d - ws[e], sub))
            if extra < k:
                return False
    return True


def well_formed(ws, d):
    if any(gcd(*(ws[i] for i in I)) != 1 for I in combinations(range(4), 3)):
        return False
    return all(d % gcd(ws[i], ws[j]) == 0 for i, j in combinations(range(4), 2))


def k3_hypersurfaces(limit=66):
    # d = sum of weights; x_e^k needs k >= 2, so 2e <= d
    out = set()
    for a in range(1, limit):
        for b in range(a, limit):
            for c in range(b, limit):
                for e in range(c, min(limit, a + b + c + 1)):
                    ws, d = (a, b, c, e), a + b + c + e
                    if well_formed(ws, d) and quasi_smooth(ws, d):
                        out.add(ws)
    return out


def test_codim_one_records_are_the_hypersurfaces(k3_db):
    ours = {r.weights for r in k3_db if r.codim == 1}
    assert ours == k3_hypersurfaces()
    assert len(ours) == 95


# --- the full database -----------------------------------------------------

def test_counts(k3_db):
    assert len(k3_db) == 391
    assert k3_db.codim_histogram() == {1: 95, 2: 84, 3: 70, 4: 142}


def test_ids_and_order(k3_db):
    assert [r.id for r in k3_db] == list(range(1, 392))
    keys = [(r.codim, sum(r.weights), r.weights) for r in k3_db]
    assert keys == sorted(keys)
    assert len({r.key for r in k3_db}) == 391


def test_every_record_is_consistent(k3_db):
    for r in k3_db:
        assert gorenstein_check(r.numerator, r.weights, "k3")
        assert r.series().equals(r.series())
        coeffs = expr_expand(r.series(), 60)
        assert all(c.denominator == 1 and c >= 0 for c in coeffs)


def test_every_type1_centre_projects(k3_db):
    n = 0
    for r in k3_db:
        for c in r.centres:
            if c.type1 and c.image_id is not None:
                assert verify_projection(r, k3_db.by_id(c.image_id), c.sing)
                n += 1
    assert n > 0


def test_only_codim_one_images_unresolved(k3_build):
    _, _, _, missing = k3_build
    assert missing and all(rec.codim == 1 for rec, _, _ in missing)


def test_build_report(k3_build):
    _, report, _, _ = k3_build
    assert report.monotonicity == []
    assert len(report.failures) == 1
    # every record with an unprojectable Type I centre was dropped
    assert all(rec.codim >= 2 for rec, _, _ in report.dropped)


def test_search(k3_db):
    hits = search(k3_db, index=17)
    assert sorted(r.weights for r in hits) == [(2, 3, 5, 5, 7, 12, 17), (3, 4, 7, 10, 17)]
    assert len(search(k3_db, codim=1)) == 95
    assert [r.weights for r in search(k3_db, weights=[6, 5, 4, 3])] == [(3, 4, 5, 6)]
    assert all(5 in r.weights for r in search(k3_db, contains_weights=[5, 5]))
    assert search(k3_db, indices=[17]) == [r for r in hits if r.basket.indices == (17,)]
    assert (3, 4, 5, 6) in [r.weights for r in search(k3_db, numerator_degree=18, genus=-1)]
    assert search(k3_db, where=lambda r: False) == []


def test_chains(k3_db):
    start = search(k3_db, weights=[3, 4, 5, 6, 7, 10, 13])[0]
    chains = projection_chains(start, k3_db)
    assert [[r.weights for r, _ in ch] for ch in chains] == [
        [(3, 4, 5, 6, 7, 10, 13), (3, 4, 5, 6, 7, 10), (3, 4, 5, 6, 7), (3, 4, 5, 6)]
    ]


# --- persistence -----------------------------------------------------------

def test_round_trip_is_byte_identical(small_db, tmp_path):
    path = tmp_path / "db.jsonl"
    save(small_db, path)
    text = path.read_text(encoding="utf-8")
    again = load(path)
    assert dumps(again) == text
    assert again.records == small_db.records
    assert again.metadata == small_db.metadata


def test_schema(small_db):
    header, first = dumps(small_db).splitlines()[:2]
    h = json.loads(header)
    assert h["count"] == len(small_db) and len(h["digest"]) == 64
    rec = json.loads(first)
    assert list(rec) == ["id", "kind", "codim", "genus", "weights", "basket", "numerator", "degree", "centres"]
    assert "/" in rec["degree"]


def test_empty_database_round_trip():
    db = Database((), {"kind": "k3", "max_codim": 2, "bound": 3, "overrides_digest": "x", "centres": False})
    again = loads(dumps(db))
    assert len(again) == 0 and again.metadata == db.metadata


def test_tampering_detected(small_db):
    text = dumps(small_db)
    header, body = text.split("\n", 1)
    with pytest.raises(ChecksumMismatch):
        loads(header + "\n" + body.replace('"genus":-1', '"genus":0', 1))


def test_forged_record_detected(small_db):
    # a consistent digest does not rescue a record that fails revalidation
    lines = dumps(small_db).splitlines()
    rec = json.loads(lines[1])
    rec["weights"] = rec["weights"][:-1] + [rec["weights"][-1] + 1]
    lines[1] = json.dumps(rec, separators=(",", ":"))
    body = "".join(l + "\n" for l in lines[1:])
    h = json.loads(lines[0])
    h["digest"] = hashlib.sha256(body.encode()).hexdigest()
    with pytest.raises(ChecksumMismatch):
        loads(json.dumps(h, separators=(",", ":")) + "\n" + body)


def test_version_mismatch(small_db):
    text = dumps(small_db).replace('"version":1', '"version":2', 1)
    with pytest.raises(FormatVersionMismatch):
        loads(text)
    with pytest.raises(FormatVersionMismatch):
        loads("")


def test_missing_file(tmp_path):
    with pytest.raises(DatabaseIOError):
        load(tmp_path / "absent.jsonl")


def test_parallel_build_is_deterministic(small_db):
    par = compute_centres(build("k3", 4, jobs=2, baskets=SMALL))
    assert dumps(par) == dumps(small_db)


def test_fano_build_small():
    db = build("fano", 2, bound=4)
    assert len(db) > 0
    assert all(r.kind == "fano" and r.codim <= 2 for r in db)
    # the quartic threefold
    assert any(r.weights == (1, 1, 1, 1, 1) for r in db)


def test_unknown_kind():
    with pytest.raises(ValueError):
        build("curve", 2)
