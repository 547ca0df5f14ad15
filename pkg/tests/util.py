"""Shared generators for randomized tests."""

import random
from fractions import Fraction
from itertools import combinations

from tropcalc.deltaforms import (DeltaForm, PSFunction, corner_locus,
                                 ps_wedge)
from tropcalc.polyhedra import Polyhedron
from tropcalc.superforms import Poly, Superform


def random_poly(rng, rank, max_deg=2, nterms=3):
    terms = {}
    for _ in range(rng.randint(1, nterms)):
        e = [0] * rank
        for _ in range(rng.randint(0, max_deg)):
            e[rng.randrange(rank)] += 1
        terms[tuple(e)] = terms.get(tuple(e), 0) + Fraction(rng.randint(-3, 3))
    return Poly(rank, {e: c for e, c in terms.items() if c})


def random_superform(rng, rank, p, q, max_deg=2):
    terms = {}
    i_choices = list(combinations(range(rank), p))
    j_choices = list(combinations(range(rank), q))
    for _ in range(rng.randint(1, 3)):
        key = (rng.choice(i_choices), rng.choice(j_choices))
        poly = random_poly(rng, rank, max_deg)
        terms[key] = terms.get(key, Poly(rank)) + poly
    return Superform(rank, p, q, terms)


def random_pl(rng, rank, nterms=3, kind=None):
    """Random tropical polynomial as a piecewise linear function."""
    kind = kind or rng.choice(["max", "min"])
    rows = set()
    while len(rows) < nterms:
        rows.add(tuple(rng.randint(-2, 2) for _ in range(rank))
                 + (rng.randint(-2, 2),))
    return PSFunction.from_minmax(rank, kind, sorted(rows))


def random_ps(rng, rank, max_deg=3):
    """Piecewise polynomial: a PL function plus a global polynomial."""
    return random_pl(rng, rank) + PSFunction.from_poly(
        random_poly(rng, rank, max_deg))


def random_cycle(rng, rank, codim):
    """Balanced nonzero (0, 0, codim)-form via iterated corner loci."""
    while True:
        a = DeltaForm.full_space(rank, rng.choice([1, 1, 2]))
        for _ in range(codim):
            nxt = corner_locus(random_pl(rng, rank), a, assume_balanced=True)
            tries = 0
            while nxt.is_zero() and tries < 5:
                nxt = corner_locus(random_pl(rng, rank, nterms=rank + 1), a,
                                   assume_balanced=True)
                tries += 1
            a = nxt
            if a.is_zero():
                break
        if not a.is_zero():
            return a


def random_balanced(rng, rank, p, q, codim, max_deg=2):
    """Balanced (p, q, codim)-form: smooth global factor on a cycle."""
    cycle = random_cycle(rng, rank, codim)
    if p == 0 and q == 0:
        return cycle
    factor = DeltaForm(rank, (p, q, 0),
                       [(Polyhedron.full_space(rank),
                         random_superform(rng, rank, p, q, max_deg))])
    return ps_wedge(factor, cycle)


def standard_line(weight=1):
    """The balanced fan with rays (1,1), (-1,0), (0,-1) in the plane."""
    rays = [
        Polyhedron(2, [((-1, 0), 0)], [((1, -1), 0)]),
        Polyhedron(2, [((1, 0), 0)], [((0, 1), 0)]),
        Polyhedron(2, [((0, 1), 0)], [((1, 0), 0)]),
    ]
    return DeltaForm.from_weights(2, 1, [(r, weight) for r in rays])


def box(rank, lo=-5, hi=5):
    ineqs = []
    for i in range(rank):
        e = tuple(int(i == j) for j in range(rank))
        ineqs.append((e, hi))
        ineqs.append((tuple(-x for x in e), -lo))
    return Polyhedron(rank, ineqs)
