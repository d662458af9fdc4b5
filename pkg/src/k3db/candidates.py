"""Deduce candidate weighted projective embeddings from numerical data."""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping

from .basket import Basket, QuotientSingularity, parse_basket
from .qseries import HilbertExpr, NotPolynomial, Poly, clear_denominator
from .rr import degree, hilbert, plurigenera

__all__ = [
    "A_INV",
    "NoCandidate",
    "Centre",
    "CandidateRecord",
    "Overrides",
    "load_overrides",
    "default_overrides",
    "constraint_failures",
    "gorenstein_check",
    "record_series",
    "validate_weights",
    "deduce_weights",
    "make_candidate",
    "format_record",
]

# a-invariant of the Gorenstein ring: N(t) has degree sum(W) + A_INV[kind]
A_INV = {"curve": 1, "k3": 0, "fano": -1}
# codim = #weights - CODIM_OFFSET[kind]
CODIM_OFFSET = {"curve": 2, "k3": 3, "fano": 4}

MAX_HORIZON = 400
MAX_WEIGHTS = 30
MAX_REPAIRS = 50


class NoCandidate(Exception):
    """No weight set passed validation; `weights` holds the last attempt."""

    def __init__(self, message: str, weights: tuple[int, ...] = ()):
        super().__init__(message)
        self.weights = tuple(weights)


@dataclass(frozen=True)
class Centre:
    sing: QuotientSingularity
    type1: bool
    image_id: int | None = None


@dataclass(frozen=True)
class CandidateRecord:
    kind: str
    genus: int
    basket: Basket
    weights: tuple[int, ...]
    numerator: Poly
    codim: int
    degree: Fraction
    id: int | None = None
    name: str | None = None
    centres: tuple[Centre, ...] = field(default=())

    @property
    def key(self):
        return (self.genus, self.basket, self.weights)

    def series(self) -> HilbertExpr:
        return record_series(self)

    def with_id(self, id_: int, name: str | None = None) -> "CandidateRecord":
        return replace(self, id=id_, name=name)


# --- overrides -------------------------------------------------------------

@dataclass(frozen=True)
class Overrides:
    """Forced extra weights keyed by (genus, basket)."""

    table: Mapping[tuple[int, Basket], tuple[int, ...]] = field(default_factory=dict)
    digest: str = hashlib.sha256(b"").hexdigest()

    def get(self, g: int, B: Basket) -> tuple[int, ...]:
        return tuple(self.table.get((g, B), ()))

    def __len__(self):
        return len(self.table)


def parse_overrides(text: str) -> Overrides:
    table = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(";")]
        if len(parts) != 3:
            raise ValueError(f"overrides line {lineno}: expected 'genus; basket; weights'")
        g = int(parts[0])
        B = parse_basket(parts[1])
        extra = tuple(sorted(int(w) for w in parts[2].split(",") if w.strip()))
        if not extra or any(w < 1 for w in extra):
            raise ValueError(f"overrides line {lineno}: weights must be positive")
        if (g, B) in table:
            raise ValueError(f"overrides line {lineno}: duplicate entry")
        table[(g, B)] = extra
    return Overrides(table, hashlib.sha256(text.encode()).hexdigest())


def load_overrides(path: str | Path) -> Overrides:
    return parse_overrides(Path(path).read_text(encoding="utf-8"))


def default_overrides() -> Overrides:
    text = resources.files("k3db").joinpath("data/overrides.txt").read_text(encoding="utf-8")
    return parse_overrides(text)


# --- validation ------------------------------------------------------------

def constraint_failures(weights, B: Basket) -> list[tuple]:
    """Singularity constraints on a weight multiset that do not hold.

    For each [r,a]: (i) a weight = a mod r, (ii) a different weight
    = -a mod r, (iii) a weight divisible by r.  Also (iv): when two or
    more basket points have index divisible by d, at least two weights
    are divisible by d, since a single coordinate point cannot carry
    both.
    """
    W = list(weights)
    bad = []
    residues: dict[int, Counter] = {}
    for k, s in enumerate(B):
        r = s.r
        res = residues.get(r)
        if res is None:
            res = residues[r] = Counter(w % r for w in W)
        a, b = s.a % r, (-s.a) % r
        na, nb = res[a], res[b]
        if not na:
            bad.append((k, "i"))
        paired = na >= 2 if a == b else (na and nb)
        # with (i) already failing, (ii) only asks for some weight = -a
        if (na and not paired) or (not na and not nb):
            bad.append((k, "ii"))
        if not res[0]:
            bad.append((k, "iii"))
    divisors = sorted({d for s in B for d in range(2, s.r + 1) if s.r % d == 0})
    for d in divisors:
        if sum(1 for s in B if s.r % d == 0) >= 2 and sum(1 for w in W if w % d == 0) < 2:
            bad.append((d, "iv"))
    return bad


def gorenstein_check(numerator: Poly, weights, kind: str) -> bool:
    """N(t) = (-1)^c t^(sigma + a_inv) N(1/t)."""
    sigma = sum(weights)
    top = sigma + A_INV[kind]
    if numerator.degree > top or top < 0:
        return False
    c = len(weights) - CODIM_OFFSET[kind]
    sign = -1 if c % 2 else 1
    return numerator == numerator.reflect(top) * sign


def validate_weights(kind: str, g: int, B: Basket, weights, series: HilbertExpr | None = None) -> Poly | None:
    """The numerator when `weights` passes the full predicate, else None."""
    W = sorted(weights)
    if not W:
        return None
    if series is None:
        series = hilbert(kind, g, B)
    try:
        N = clear_denominator(series, W)
    except NotPolynomial:
        return None
    if not N.is_integral() or N[0] != 1:
        return None
    first = next((c for c in N.coeffs[1:] if c), None)
    if first is None or first > 0:
        return None
    # nothing but relations can sit below twice the smallest weight
    if any(N[i] for i in range(1, 2 * W[0])):
        return None
    if N.degree != sum(W) + A_INV[kind]:
        return None
    if not gorenstein_check(N, W, kind):
        return None
    if constraint_failures(W, B):
        return None
    return N


# --- deduction -------------------------------------------------------------

def _residual(P: list[int], W, H: int) -> list[int]:
    Q = P[: H + 1]
    for w in W:
        for n in range(H, w - 1, -1):
            Q[n] -= Q[n - w]
    return Q


def _phase1(P: list[int], W: list[int], horizons: tuple[int, ...]) -> list[int]:
    W = sorted(W)
    while len(W) <= MAX_WEIGHTS:
        for H in horizons:
            Q = _residual(P, W, H)
            dp = next((d for d in range(1, H + 1) if Q[d] > 0), None)
            dm = next((d for d in range(1, H + 1) if Q[d] < 0), None)
            if dp is not None or dm is not None:
                break
        if dp is None or (dm is not None and dm < dp):
            return W
        W = sorted(W + [dp] * Q[dp])
    return W


def deduce_weights(g: int, B: Basket, kind: str = "k3", overrides: Overrides | None = None) -> tuple[int, ...]:
    """Weights of a candidate embedding; raises NoCandidate.

    Phase 1 reads generators off the residual series until the first
    relation shows up, phase 2 adds weights for the local orbifold
    coordinates, phase 3 drops any weight the predicate does not need.
    """
    B = B if isinstance(B, Basket) else Basket.of(B)
    max_r = max(B.indices, default=1)
    h0 = 3 * max_r + 12
    horizons = (h0, min(3 * h0, MAX_HORIZON))
    P = plurigenera(kind, g, B, horizons[-1])
    series = hilbert(kind, g, B)

    W = _phase1(P, [], horizons)
    forced = overrides.get(g, B) if overrides else ()
    if forced:
        W = _phase1(P, W + list(forced), horizons)

    for _ in range(MAX_REPAIRS):
        bad = constraint_failures(W, B)
        if not bad:
            break
        budget = 2 * max_r + sum(W)
        best = None
        for x in range(1, budget + 1):
            fixed = len(bad) - len(constraint_failures(W + [x], B))
            if fixed > 0 and (best is None or fixed > best[0]):
                best = (fixed, x)
        if best is None:
            raise NoCandidate(f"no repair within degree budget {budget}", tuple(W))
        W = _phase1(P, W + [best[1]], horizons)
    else:
        raise NoCandidate("singularity repairs did not converge", tuple(W))

    for w in sorted(set(W), reverse=True):
        if W.count(w) <= forced.count(w):
            continue
        trial = list(W)
        trial.remove(w)
        if validate_weights(kind, g, B, trial, series) is not None:
            W = trial

    if validate_weights(kind, g, B, W, series) is None:
        raise NoCandidate("weights fail validation", tuple(W))
    return tuple(W)


def record_series(rec: CandidateRecord) -> HilbertExpr:
    return HilbertExpr.of(rec.numerator, rec.weights)


def make_candidate(g: int, B, kind: str = "k3", overrides: Overrides | None = None) -> CandidateRecord:
    B = B if isinstance(B, Basket) else Basket.of(B)
    W = deduce_weights(g, B, kind, overrides)
    N = validate_weights(kind, g, B, W)
    codim = len(W) - CODIM_OFFSET[kind]
    if codim < 1:
        raise NoCandidate("codimension below 1", W)
    return CandidateRecord(kind, g, B, W, N, codim, degree(kind, g, B))


_KIND_LABEL = {"k3": "K3 surface", "fano": "Fano 3-fold"}


def format_record(rec: CandidateRecord, order: str = "desc", show_centres: bool = True) -> str:
    """Human-readable block: codimension, weights, numerator, basket."""
    head = f"Codimension {rec.codim} {_KIND_LABEL[rec.kind]}"
    if rec.id is not None:
        head += f", number {rec.id}"
        if rec.name:
            head += f", {rec.name}"
    lines = [
        head + " with data" if rec.id is None else head + ", with data",
        f"  Weights: [ {', '.join(map(str, rec.weights))} ]",
        f"  Numerator: {rec.numerator.format(order)}",
        "  Basket: " + ", ".join(f"[ {s.r}, {s.a} ]" for s in rec.basket),
    ]
    if show_centres:
        for k, c in enumerate(rec.centres, 1):
            s = c.sing
            desc = f"  Centre {k}: [ {s.r}, {s.a}, {s.r - s.a} ]"
            if c.type1:
                target = "?" if c.image_id is None else str(c.image_id)
                desc += f" has Type 1 projection to {target}"
            else:
                desc += " is unclassified"
            lines.append(desc)
    return "\n".join(lines)
