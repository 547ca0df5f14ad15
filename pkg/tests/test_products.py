import random
from fractions import Fraction

import pytest

from tropcalc.deltaforms import (DeltaForm, PSFunction, corner_locus, dP1,
                                 dP2, equal, ps_wedge)
from tropcalc.errors import NonGenericVector, NotTransversal
from tropcalc.integration import degree
from tropcalc.polyhedra import Polyhedron
from tropcalc.products import (cross, diagonal_wedge, transversal_wedge,
                               translated_wedge_check)
from tropcalc.superforms import Poly, Superform

from util import random_balanced, random_cycle, random_superform, standard_line

EPS = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 5), Fraction(1, 7),
       Fraction(1, 11)]


def line_through_origin(direction, weight=1):
    dx, dy = direction
    return DeltaForm.from_weights(
        2, 1, [(Polyhedron(2, [], [((dy, -dx), 0)]), weight)])


def x_axis(weight=1):
    return line_through_origin((1, 0), weight)


def y_axis(weight=1):
    return line_through_origin((0, 1), weight)


def origin(weight=1):
    return DeltaForm.from_weights(2, 2, [(Polyhedron.point((0, 0)), weight)])


def test_cross_of_lines_is_plane():
    a = cross(DeltaForm.full_space(1), DeltaForm.full_space(1))
    assert equal(a, DeltaForm.full_space(2))


def test_cross_types_and_weights():
    a = cross(DeltaForm.full_space(1, 2), origin(3))
    assert a.ptype == (0, 0, 2)
    line = Polyhedron(3, [], [((0, 1, 0), 0), ((0, 0, 1), 0)])
    assert equal(a, DeltaForm.from_weights(3, 2, [(line, 6)]))


def test_cross_leibniz():
    rng = random.Random(21)
    for _ in range(6):
        p1, q1 = rng.randint(0, 1), rng.randint(0, 1)
        a = DeltaForm(1, (p1, q1, 0),
                      [(Polyhedron.full_space(1),
                        random_superform(rng, 1, p1, q1))])
        p2 = rng.randint(0, 1)
        b = DeltaForm(2, (p2, 0, 0),
                      [(Polyhedron.full_space(2),
                        random_superform(rng, 2, p2, 0))])
        sign = -1 if (p1 + q1) % 2 else 1
        lhs = dP1(cross(a, b))
        rhs = cross(dP1(a), b) + cross(a, dP1(b)).scale(sign)
        assert equal(lhs, rhs)
        lhs2 = dP2(cross(a, b))
        rhs2 = cross(dP2(a), b) + cross(a, dP2(b)).scale(sign)
        assert equal(lhs2, rhs2)


def test_wedge_with_full_space_is_identity():
    rng = random.Random(23)
    for rank in (1, 2):
        for _ in range(3):
            codim = rng.randint(0, rank)
            b = random_balanced(rng, rank, 0, 0, codim)
            assert equal(diagonal_wedge(DeltaForm.full_space(rank), b), b)
            assert equal(diagonal_wedge(b, DeltaForm.full_space(rank)), b)


def test_lines_meet_in_origin():
    for w in (transversal_wedge(x_axis(), y_axis()),
              diagonal_wedge(x_axis(), y_axis())):
        assert equal(w, origin(1))


def test_lattice_index_multiplicity():
    # span of (1,0) and (1,2) has index 2 in Z^2
    w = transversal_wedge(x_axis(), line_through_origin((1, 2)))
    assert equal(w, origin(2))
    assert equal(diagonal_wedge(x_axis(), line_through_origin((1, 2))),
                 origin(2))


def test_parallel_disjoint_lines():
    shifted = DeltaForm.from_weights(
        2, 1, [(Polyhedron(2, [], [((0, 1), 1)]), 1)])
    assert diagonal_wedge(x_axis(), shifted).is_zero()
    assert transversal_wedge(x_axis(), shifted).is_zero()


def test_non_transversal_raises():
    with pytest.raises(NotTransversal):
        transversal_wedge(x_axis(), x_axis())
    with pytest.raises(NotTransversal):
        transversal_wedge(standard_line(), standard_line())


def test_tropical_lines_self_intersection():
    w = diagonal_wedge(standard_line(), standard_line())
    assert equal(w, origin(1))
    assert degree(w) == 1
    w2 = diagonal_wedge(standard_line(2), standard_line(3))
    assert degree(w2) == 6


def test_translated_wedge_matches_diagonal():
    assert translated_wedge_check(standard_line(), standard_line(),
                                  (1, 2), EPS)
    assert translated_wedge_check(x_axis(), line_through_origin((1, 2)),
                                  (0, 1), EPS)
    assert translated_wedge_check(x_axis(3), y_axis(2), (1, 1), EPS)


def test_translated_wedge_non_generic_vector():
    # translating along the line itself never makes the pair transversal
    with pytest.raises(NonGenericVector):
        translated_wedge_check(x_axis(), x_axis(), (1, 0), EPS)


def test_wedge_commutative_and_associative():
    rng = random.Random(29)
    for _ in range(4):
        a = random_cycle(rng, 2, 1)
        b = random_cycle(rng, 2, 1)
        assert equal(diagonal_wedge(a, b), diagonal_wedge(b, a))
    a = standard_line()
    b = x_axis()
    c = DeltaForm.full_space(2)
    assert equal(diagonal_wedge(diagonal_wedge(a, b), c),
                 diagonal_wedge(a, diagonal_wedge(b, c)))


def test_wedge_with_coefficients():
    # smooth factor slides through the intersection
    poly = Poly(2, {(0, 0): Fraction(5), (1, 0): Fraction(2),
                    (0, 2): Fraction(-1)})
    f = Superform.from_poly(poly)
    a = ps_wedge(DeltaForm(2, (0, 0, 0),
                           [(Polyhedron.full_space(2), f)]), x_axis())
    w = diagonal_wedge(a, y_axis())
    expected = origin(1).cells[0][0]
    val = poly.evaluate((Fraction(0), Fraction(0)))
    assert equal(w, DeltaForm(2, (0, 0, 2),
                              [(expected,
                                Superform.constant(2, val))]))
