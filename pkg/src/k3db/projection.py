"""Numerical Type I projections between candidate records."""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction
from typing import TYPE_CHECKING

from .basket import QuotientSingularity
from .candidates import CODIM_OFFSET, CandidateRecord, Centre, record_series
from .qseries import HilbertExpr, clear_denominator
from .rr import degree, hilbert

if TYPE_CHECKING:
    from .db import Database

__all__ = [
    "NotTypeI",
    "DegenerateDegree",
    "ImageNotInDatabase",
    "is_type1",
    "find_centres",
    "project_data",
    "project_type1",
    "projection_delta",
    "verify_projection",
    "projection_chains",
]


class NotTypeI(ValueError):
    pass


class DegenerateDegree(ValueError):
    pass


class ImageNotInDatabase(LookupError):
    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data


def is_type1(weights, s: QuotientSingularity, kind: str = "k3") -> bool:
    """r is a weight, and a, r-a are two further, distinct, weights."""
    rest = list(weights)
    if s.r not in rest:
        return False
    rest.remove(s.r)
    if kind == "fano":
        # the extra weight-1 coordinate of 1/r(1,a,r-a)
        if 1 not in rest:
            return False
        rest.remove(1)
    if s.a in rest:
        rest.remove(s.a)
        return (s.r - s.a) in rest
    return False


def find_centres(rec: CandidateRecord) -> list[Centre]:
    """Basket points whose index is a weight, one entry per distinct point type."""
    out = []
    for s in sorted(set(rec.basket)):
        if s.r in rec.weights:
            out.append(Centre(s, is_type1(rec.weights, s, rec.kind)))
    return out


def project_data(g, B, weights, s: QuotientSingularity):
    """(genus, basket, weights) of the image of a Type I projection from s."""
    r, a = s.r, s.a
    new = B.remove(s)
    for x, y in ((a, r % a), (r - a, r % (r - a))):
        if x > 1:
            new = new.add(QuotientSingularity.canonical(x, y))
    W = list(weights)
    W.remove(r)
    return g, new, tuple(W)


def project_type1(rec: CandidateRecord, centre: QuotientSingularity) -> CandidateRecord:
    if centre not in rec.basket or not is_type1(rec.weights, centre, rec.kind):
        raise NotTypeI(f"[{centre.r},{centre.a}] is not a Type I centre of this record")
    g, B, W = project_data(rec.genus, rec.basket, rec.weights, centre)
    d = degree(rec.kind, g, B)
    if d <= 0:
        raise DegenerateDegree(f"image degree {d} is not positive")
    N = clear_denominator(hilbert(rec.kind, g, B), W)
    return CandidateRecord(rec.kind, g, B, W, N, len(W) - CODIM_OFFSET[rec.kind], d)


def projection_delta(s: QuotientSingularity) -> HilbertExpr:
    """t^r / ((1 - t^r)(1 - t^a)(1 - t^(r-a)))."""
    return HilbertExpr.of([0] * s.r + [1], [s.r, s.a, s.r - s.a])


def verify_projection(before: CandidateRecord, after: CandidateRecord, centre: QuotientSingularity) -> bool:
    """Exact check of the series and degree drop across one projection."""
    lhs = record_series(before) - record_series(after)
    if not lhs.equals(projection_delta(centre)):
        return False
    r, a = centre.r, centre.a
    return before.degree - after.degree == Fraction(1, r * a * (r - a))


def projection_chains(rec: CandidateRecord, db: "Database") -> list[list[tuple[CandidateRecord, Centre | None]]]:
    """All maximal Type I chains from rec, as lists of (record, centre taken)."""
    chains = []

    def walk(cur, path):
        # a codim 1 record projects to codim 0, which no database holds
        steps = [c for c in sorted(cur.centres, key=lambda c: c.sing) if c.type1 and cur.codim > 1]
        if not steps:
            chains.append(path + [(cur, None)])
            return
        for c in steps:
            if c.image_id is None:
                g, B, W = project_data(cur.genus, cur.basket, cur.weights, c.sing)
                raise ImageNotInDatabase(
                    f"no record with genus {g}, basket {B}, weights {list(W)}", (g, B, W)
                )
            walk(db.by_id(c.image_id), path + [(cur, c)])

    walk(rec, [])
    return chains


def annotate(rec: CandidateRecord, lookup) -> tuple[CandidateRecord, list]:
    """Attach centres, resolving images through lookup(g, B, W) -> id or None."""
    centres, missing = [], []
    for c in find_centres(rec):
        if c.type1:
            key = project_data(rec.genus, rec.basket, rec.weights, c.sing)
            image = lookup(*key)
            if image is None:
                missing.append((rec, c.sing, key))
            c = replace(c, image_id=image)
        centres.append(c)
    return replace(rec, centres=tuple(centres)), missing
