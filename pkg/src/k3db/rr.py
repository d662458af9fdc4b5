"""Orbifold Riemann-Roch: Hilbert series of curves, K3 surfaces and Fano 3-folds."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import lcm, prod

from .basket import Basket, CurveBasket, QuotientSingularity
from .qseries import HilbertExpr, Poly, expr_add

__all__ = [
    "KINDS",
    "OrthogonalityFailure",
    "NumericalData",
    "QuasistellarGraph",
    "hilbert_curve",
    "hilbert_curve_forms",
    "hilbert_k3",
    "hilbert_fano",
    "hilbert",
    "degree",
    "curve_degree",
    "plurigenera",
    "lattice_oracle",
]

KINDS = ("curve", "k3", "fano")


class OrthogonalityFailure(AssertionError):
    pass


@dataclass(frozen=True)
class NumericalData:
    kind: str
    genus: int
    basket: Basket | CurveBasket

    def series(self) -> HilbertExpr:
        return hilbert(self.kind, self.genus, self.basket)


def _as_basket(B) -> Basket:
    return B if isinstance(B, Basket) else Basket.of(B)


def _as_orders(B) -> tuple[int, ...]:
    if isinstance(B, CurveBasket):
        return B.orders
    if isinstance(B, Basket):
        return B.indices
    return CurveBasket(tuple(B)).orders


def _residue_weight(s: QuotientSingularity, i: int) -> Fraction:
    # bi mod r times its complement, over 2r
    k = (s.b * i) % s.r
    return Fraction(k * (s.r - k), 2 * s.r)


def _correction_numerators(B: Basket) -> dict[int, Poly]:
    """For each index r, the summed numerator of sum_i c(i) t^i over that r."""
    out: dict[int, Poly] = defaultdict(Poly)
    for s in B:
        out[s.r] = out[s.r] + Poly([0] + [_residue_weight(s, i) for i in range(1, s.r)])
    return out


def degree(kind: str, g: int, B) -> Fraction:
    """D^2 for a K3 surface, A^3 for a Fano 3-fold: 2g - 2 + sum b(r-b)/r."""
    if kind == "curve":
        return curve_degree(g, B)
    if kind not in ("k3", "fano"):
        raise ValueError(f"unknown kind {kind!r}")
    B = _as_basket(B)
    return Fraction(2 * g - 2) + sum((Fraction(s.b * (s.r - s.b), s.r) for s in B), Fraction(0))


def curve_degree(g: int, B) -> Fraction:
    """deg A for A = K_C + sum (r-1)/r P."""
    return Fraction(2 * g - 2) + sum((Fraction(r - 1, r) for r in _as_orders(B)), Fraction(0))


def hilbert_curve_forms(g: int, B) -> tuple[HilbertExpr, HilbertExpr]:
    """The orbifold canonical curve series in its two closed forms."""
    orders = _as_orders(B)
    first = HilbertExpr.of([1, g - 2, g - 2, 1], [1, 1])
    for r in orders:
        first = expr_add(first, HilbertExpr.of(Poly([0, 0] + [1] * (r - 1)), [1, r]))

    degA = curve_degree(g, orders)
    second = expr_add(
        HilbertExpr.of([1, -(g - 1), -1], [1]),
        HilbertExpr.of(Poly([0, degA]), [1, 1]),
    )
    for r in orders:
        frac = Poly([0] + [Fraction(r - i, r) for i in range(1, r)])
        second = expr_add(second, HilbertExpr.of(-frac, [r]))
    return first, second


def hilbert_curve(g: int, B=()) -> HilbertExpr:
    first, second = hilbert_curve_forms(g, B)
    if not first.equals(second):
        raise AssertionError(f"curve series forms disagree for g={g}, orders={_as_orders(B)}")
    return first


def _surface_like(g: int, B, extra: int) -> HilbertExpr:
    # extra = 0 for K3, 1 for Fano: one more (1 - t) in every denominator
    B = _as_basket(B)
    half = degree("k3", g, B) / 2
    ones = [1] * extra
    e = expr_add(
        HilbertExpr.of([1, 1], [1] + ones),
        HilbertExpr.of(Poly([0, half, half]), [1, 1, 1] + ones),
    )
    for r, num in sorted(_correction_numerators(B).items()):
        e = expr_add(e, HilbertExpr.of(-num, [r] + ones))
    return e


def hilbert_k3(g: int, B=()) -> HilbertExpr:
    return _surface_like(g, B, 0)


def hilbert_fano(g: int, B=()) -> HilbertExpr:
    return _surface_like(g, B, 1)


def hilbert(kind: str, g: int, B=()) -> HilbertExpr:
    if kind == "curve":
        return hilbert_curve(g, B)
    if kind == "k3":
        return hilbert_k3(g, B)
    if kind == "fano":
        return hilbert_fano(g, B)
    raise ValueError(f"unknown kind {kind!r}")


def plurigenera(kind: str, g: int, B, horizon: int) -> list[int]:
    """P_0..P_horizon as integers, via the periodic closed form.

    Agrees with expanding `hilbert(kind, g, B)`; it is just much faster.
    """
    if kind == "curve":
        orders = _as_orders(B)
        out = [1]
        for n in range(1, horizon + 1):
            v = g if n == 1 else (2 * n - 1) * (g - 1)
            v += sum((n * (r - 1)) // r for r in orders)
            out.append(v)
        return out
    B = _as_basket(B)
    D = degree("k3", g, B)
    L = lcm(*B.indices) if B else 1
    # everything scaled by M, so the arithmetic stays in machine-size ints
    M = lcm(2 * D.denominator, *(2 * r for r in B.indices))
    half = D.numerator * (M // D.denominator) // 2
    per = [0] * L
    for s in B:
        unit, b = M // (2 * s.r), s.b
        for n in range(L):
            k = (b * n) % s.r
            per[n] += k * (s.r - k) * unit
    if kind == "k3":
        out = [1]
        for n in range(1, horizon + 1):
            out.append(_int(2 * M + n * n * half - per[n % L], M))
        return out
    if kind != "fano":
        raise ValueError(f"unknown kind {kind!r}")
    cum = [0] * (L + 1)
    for n in range(1, L + 1):
        cum[n] = cum[n - 1] + per[n % L]
    out = []
    for n in range(horizon + 1):
        main = (2 * n + 1) * M + n * (n + 1) * (2 * n + 1) // 6 * half
        q, m = divmod(n, L)
        out.append(_int(main - q * cum[L] - cum[m], M))
    return out


def _int(x: int, M: int) -> int:
    q, rem = divmod(x, M)
    if rem:
        raise ArithmeticError(f"non-integral plurigenus {Fraction(x, M)}")
    return q


def _chain_multipliers(s: QuotientSingularity) -> list[Fraction]:
    r, b = s.r, s.b
    up = [Fraction(i * b, r) for i in range(1, r - b + 1)]
    down = [Fraction((b - j) * (r - b), r) for j in range(1, b)]
    return up + down


@dataclass(frozen=True)
class QuasistellarGraph:
    """Central vertex of square 2g-2 with one -2 chain per basket element."""

    genus: int
    basket: Basket

    def vertices(self):
        # (chain index, position) labels; the centre is (None, 0)
        out = [(None, 0)]
        for k, s in enumerate(self.basket):
            out += [(k, i) for i in range(1, s.r)]
        return out

    def gram(self) -> list[list[int]]:
        vs = self.vertices()
        idx = {v: n for n, v in enumerate(vs)}
        M = [[0] * len(vs) for _ in vs]
        M[0][0] = 2 * self.genus - 2
        for k, s in enumerate(self.basket):
            for i in range(1, s.r):
                n = idx[(k, i)]
                M[n][n] = -2
                if i + 1 < s.r:
                    m = idx[(k, i + 1)]
                    M[n][m] = M[m][n] = 1
            # the centre meets the vertex carrying the peak multiplier b(r-b)/r
            n = idx[(k, s.r - s.b)]
            M[0][n] = M[n][0] = 1
        return M

    def polarisation(self) -> list[Fraction]:
        """Coefficients of D = B + sum m_i E_i in the vertex basis."""
        D = [Fraction(1)]
        for s in self.basket:
            D += _chain_multipliers(s)
        return D


def _det(M) -> Fraction:
    A = [[Fraction(x) for x in row] for row in M]
    n, det = len(A), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    return det


def lattice_oracle(g: int, B) -> tuple[Fraction, int, Fraction]:
    """(D^2, rank, discriminant) computed from the quasistellar Gram matrix."""
    G = QuasistellarGraph(g, _as_basket(B))
    M = G.gram()
    D = G.polarisation()
    n = len(D)
    DM = [sum(D[i] * M[i][j] for i in range(n)) for j in range(n)]
    for j in range(1, n):
        if DM[j] != 0:
            raise OrthogonalityFailure(f"D.E_{j} = {DM[j]}")
    d2 = sum(DM[j] * D[j] for j in range(n))
    disc = abs(_det(M))
    expected = prod(s.r for s in G.basket) * abs(d2)
    if disc != expected:
        raise OrthogonalityFailure(f"Gram determinant {disc} differs from {expected}")
    return d2, n, prod(s.r for s in G.basket) * d2
