from fractions import Fraction

import pytest

from k3db.basket import QuotientSingularity, parse_basket
from k3db.candidates import CandidateRecord, make_candidate
from k3db.projection import (
    DegenerateDegree,
    NotTypeI,
    find_centres,
    is_type1,
    project_data,
    project_type1,
    projection_delta,
    verify_projection,
)
from k3db.qseries import Poly, expr_expand
from k3db.rr import degree

S = QuotientSingularity


@pytest.fixture(scope="module")
def start():
    return make_candidate(-1, parse_basket("2/1,5/1,13/3"))


def test_is_type1():
    W = (3, 4, 5, 6, 7, 10, 13)
    assert is_type1(W, S(13, 3))
    assert not is_type1(W, S(5, 1))  # no weight 1
    assert not is_type1((2, 1, 3), S(2, 1))  # needs two weights 1
    assert is_type1((1, 1, 2), S(2, 1))
    assert not is_type1((4, 5), S(7, 3))  # 7 itself missing


def test_fano_needs_weight_one():
    assert not is_type1((3, 4, 7), S(7, 3), kind="fano")
    assert is_type1((1, 3, 4, 7), S(7, 3), kind="fano")


def test_find_centres(start):
    cs = find_centres(start)
    assert [(c.sing, c.type1) for c in cs] == [(S(5, 1), False), (S(13, 3), True)]


def test_project_data(start):
    g, B, W = project_data(start.genus, start.basket, start.weights, S(13, 3))
    # 1/13(3,10) becomes 1/3(1,2) and 1/10(3,7)
    assert B == parse_basket("2/1,3/1,5/1,10/3")
    assert W == (3, 4, 5, 6, 7, 10)
    assert g == -1


def test_chain_steps(start):
    rec = start
    steps = [(S(13, 3), Fraction(1, 390)), (S(10, 3), Fraction(1, 210)), (S(7, 3), Fraction(1, 84))]
    weights = [(3, 4, 5, 6, 7, 10), (3, 4, 5, 6, 7), (3, 4, 5, 6)]
    for (s, drop), W in zip(steps, weights):
        image = project_type1(rec, s)
        assert image.weights == W
        assert rec.degree - image.degree == drop
        assert verify_projection(rec, image, s)
        assert (rec.series() - image.series()).equals(projection_delta(s))
        rec = image
    assert rec.numerator == make_candidate(-1, rec.basket).numerator


def test_projection_delta_series():
    s = S(5, 2)
    coeffs = list(expr_expand(projection_delta(s), 12))
    assert coeffs[:5] == [0] * 5 and coeffs[5] == 1


def test_not_type1(start):
    with pytest.raises(NotTypeI):
        project_type1(start, S(5, 1))
    with pytest.raises(NotTypeI):
        project_type1(start, S(7, 3))


def test_degenerate_degree():
    # D^2 = 1/6 and projecting from 1/3(1,2) removes exactly 1/6
    B = parse_basket("2/1,2/1,2/1,2/1,2/1,2/1,2/1,3/1")
    rec = CandidateRecord("k3", -1, B, (1, 2, 3, 4), Poly(), 1, degree("k3", -1, B))
    with pytest.raises(DegenerateDegree):
        project_type1(rec, S(3, 1))
