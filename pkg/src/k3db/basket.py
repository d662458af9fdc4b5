"""Cyclic quotient singularities, baskets and their enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator

__all__ = [
    "NotCoprime",
    "QuotientSingularity",
    "Basket",
    "CurveBasket",
    "inverse_mod",
    "parse_basket",
    "k3_rank",
    "k3_basket_valid",
    "fano_basket_valid",
    "singularities",
    "enumerate_k3_baskets",
    "enumerate_fano_baskets",
    "min_genus",
    "genus_scan",
    "find_eccentrics",
]

K3_MAX_RANK = 19
FANO_BOUND = 24


class NotCoprime(ValueError):
    pass


def inverse_mod(a: int, r: int) -> int:
    """The b in 1..r-1 with a*b = 1 mod r."""
    if r < 2 or not 1 <= a < r:
        raise ValueError(f"need 1 <= a < r, got a={a}, r={r}")
    if gcd(a, r) != 1:
        raise NotCoprime(f"{a} is not coprime to {r}")
    return pow(a, -1, r)


@dataclass(frozen=True, order=True)
class QuotientSingularity:
    """1/r(a, r-a), stored with a <= r/2."""

    r: int
    a: int

    def __post_init__(self):
        r, a = int(self.r), int(self.a)
        if r < 2:
            raise ValueError(f"index must be at least 2, got {r}")
        if not 1 <= a <= r - 1:
            raise ValueError(f"need 1 <= a <= r-1, got [{r},{a}]")
        if gcd(a, r) != 1:
            raise NotCoprime(f"[{r},{a}]: {a} is not coprime to {r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "a", min(a, r - a))

    @classmethod
    def canonical(cls, r: int, a: int) -> "QuotientSingularity":
        """Accepts any residue a mod r."""
        return cls(r, a % r)

    @property
    def b(self) -> int:
        return inverse_mod(self.a, self.r)

    def as_list(self) -> list[int]:
        return [self.r, self.a]

    def __str__(self):
        return f"{self.r}/{self.a}"


def _coerce_sing(s) -> QuotientSingularity:
    if isinstance(s, QuotientSingularity):
        return s
    r, a = s
    return QuotientSingularity(r, a)


@dataclass(frozen=True)
class Basket:
    elements: tuple[QuotientSingularity, ...] = ()

    def __post_init__(self):
        els = tuple(sorted(_coerce_sing(s) for s in self.elements))
        object.__setattr__(self, "elements", els)

    @classmethod
    def of(cls, items: Iterable = ()) -> "Basket":
        return cls(tuple(items))

    def __iter__(self) -> Iterator[QuotientSingularity]:
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __bool__(self):
        return bool(self.elements)

    def __lt__(self, other: "Basket"):
        return self.sort_key() < other.sort_key()

    @property
    def rank(self) -> int:
        return sum(s.r - 1 for s in self.elements)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(s.r for s in self.elements)

    def sort_key(self):
        return (self.rank, len(self.elements), [(s.r, s.a) for s in self.elements])

    def as_lists(self) -> list[list[int]]:
        return [s.as_list() for s in self.elements]

    def remove(self, s: QuotientSingularity) -> "Basket":
        els = list(self.elements)
        els.remove(s)
        return Basket(tuple(els))

    def add(self, *items) -> "Basket":
        return Basket(self.elements + tuple(_coerce_sing(s) for s in items))

    def __str__(self):
        return ",".join(str(s) for s in self.elements)


@dataclass(frozen=True)
class CurveBasket:
    """Orders r >= 2 of the orbifold points of a curve."""

    orders: tuple[int, ...] = ()

    def __post_init__(self):
        orders = tuple(sorted(int(r) for r in self.orders))
        if any(r < 2 for r in orders):
            raise ValueError("orbifold orders must be at least 2")
        object.__setattr__(self, "orders", orders)

    def __iter__(self):
        return iter(self.orders)

    def __len__(self):
        return len(self.orders)


def parse_basket(text: str) -> Basket:
    """Parse "2/1,5/1,13/3"; an empty string is the empty basket."""
    body = "".join(text.split())
    if not body:
        return Basket()
    items = []
    for tok in body.split(","):
        parts = tok.split("/")
        if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
            raise ValueError(f"bad basket token {tok!r}; expected r/a")
        items.append(QuotientSingularity(int(parts[0]), int(parts[1])))
    return Basket(tuple(items))


def k3_rank(B: Basket) -> int:
    return B.rank


def k3_basket_valid(B: Basket) -> bool:
    return B.rank <= K3_MAX_RANK


def fano_basket_valid(B: Basket, degree: Fraction | None = None, strict: bool = False) -> bool:
    if sum(Fraction(s.r) - Fraction(1, s.r) for s in B) >= FANO_BOUND:
        return False
    if strict:
        if degree is None:
            raise ValueError("strict check needs the degree")
        return sum(1 - Fraction(1, s.r) for s in B) < FANO_BOUND - 8 * Fraction(degree)
    return True


def singularities(max_r: int) -> list[QuotientSingularity]:
    """Every canonical [r,a] with 2 <= r <= max_r, in (r,a) order."""
    return [
        QuotientSingularity(r, a)
        for r in range(2, max_r + 1)
        for a in range(1, r // 2 + 1)
        if gcd(a, r) == 1
    ]


def _multisets(sings, cost, budget) -> list[tuple]:
    # all multisets (nondecreasing index sequences) with total cost < budget
    out = []
    cur = []

    def rec(start, spent):
        out.append(tuple(cur))
        for i in range(start, len(sings)):
            c = cost(sings[i])
            if spent + c < budget:
                cur.append(sings[i])
                rec(i, spent + c)
                cur.pop()

    rec(0, 0)
    return out


def enumerate_k3_baskets(
    bound: int, include_empty: bool = True, with_genus: bool = True
) -> list:
    """All K3 baskets of rank < bound, sorted by (rank, size, elements).

    Returns (basket, minimal genus) pairs, or bare baskets when
    `with_genus` is false.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    raw = _multisets(singularities(bound), lambda s: s.r - 1, bound)
    baskets = sorted((Basket(els) for els in raw), key=Basket.sort_key)
    if not include_empty:
        baskets = [B for B in baskets if B]
    if not with_genus:
        return baskets
    return [(B, min_genus(B)) for B in baskets]


def enumerate_fano_baskets(bound: Fraction | int = FANO_BOUND, include_empty: bool = True) -> list[Basket]:
    """Baskets of terminal 1/r(1,a,r-a) points with sum(r - 1/r) < bound."""
    bound = Fraction(bound)
    max_r = int(bound) + 1
    cost = lambda s: Fraction(s.r) - Fraction(1, s.r)
    raw = _multisets(singularities(max_r), cost, bound)
    baskets = sorted((Basket(els) for els in raw), key=Basket.sort_key)
    return baskets if include_empty else [B for B in baskets if B]


def genus_scan(B: Basket, kind: str = "k3", horizon: int = 20, genera: Iterable[int] | None = None):
    """Scan genera upward; return (minimal genus or None, eccentric genera).

    A genus is eccentric when its degree is positive but some
    coefficient P_1..P_horizon is negative.
    """
    from .rr import degree, plurigenera

    if genera is None:
        genera = range(-1, 3) if kind == "k3" else range(-2, 3)
    eccentric = []
    for g in genera:
        if degree(kind, g, B) <= 0:
            continue
        if min(plurigenera(kind, g, B, horizon)) < 0:
            eccentric.append(g)
            continue
        return g, eccentric
    return None, eccentric


def min_genus(B: Basket, horizon: int = 20, kind: str = "k3") -> int | None:
    return genus_scan(B, kind, horizon)[0]


def find_eccentrics(bound: int = 20, horizon: int = 20) -> list[tuple[int, Basket]]:
    """All (g, B) met during minimal-genus scans with positive degree but a negative P_n."""
    out = []
    for B in enumerate_k3_baskets(bound, with_genus=False):
        _, ecc = genus_scan(B, "k3", horizon)
        out.extend((g, B) for g in ecc)
    return out
