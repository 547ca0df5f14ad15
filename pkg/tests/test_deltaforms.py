import random
from fractions import Fraction

import pytest

from tropcalc.deltaforms import (DeltaForm, PSFunction, add, boundary1,
                                 boundary2, check_balanced, corner_locus,
                                 dP1, dP2, equal, j_delta, ps_wedge,
                                 tropical_pl_check)
from tropcalc.errors import NotBalanced, TypeMismatch
from tropcalc.linalg import identity_mat
from tropcalc.polyhedra import Polyhedron
from tropcalc.superforms import Poly, Superform

from util import (random_balanced, random_pl, random_ps, random_superform,
                  standard_line)


def half_line():
    return Polyhedron(1, [((-1,), 0)])


def origin(rank=1):
    return Polyhedron.point(tuple(0 for _ in range(rank)))


def test_equal_under_refinement():
    whole = DeltaForm.full_space(1)
    split = DeltaForm.from_weights(1, 0, [
        (Polyhedron(1, [((1,), 0)]), 1),
        (Polyhedron(1, [((-1,), 0)]), 1),
    ])
    assert equal(whole, split)
    assert not equal(whole, split.scale(2))
    # weight-0 cell added changes nothing
    padded = DeltaForm.from_weights(1, 0, [
        (Polyhedron.full_space(1), 1),
        (Polyhedron(1, [((1,), 0)]), 0),
    ])
    assert equal(whole, padded)


def test_equal_type_mismatch():
    a = DeltaForm.full_space(1)
    b = DeltaForm.from_weights(1, 1, [(origin(), 1)])
    with pytest.raises(TypeMismatch):
        equal(a, b)


def test_check_balanced_fixtures():
    ok, fails = check_balanced(standard_line())
    assert ok and not fails
    two_rays = DeltaForm.from_weights(2, 1, [
        (Polyhedron(2, [((-1, 0), 0)], [((0, 1), 0)]), 1),
        (Polyhedron(2, [((0, -1), 0)], [((1, 0), 0)]), 1),
    ])
    ok, fails = check_balanced(two_rays)
    assert not ok
    assert any(f.dim == 0 for f, _ in fails)


def test_check_balanced_ps_superform_is_balanced():
    rng = random.Random(1)
    for rank in (1, 2):
        f = random_superform(rng, rank, 1, 0)
        a = DeltaForm(rank, (1, 0, 0), [(Polyhedron.full_space(rank), f)])
        assert check_balanced(a)[0]


def test_dP_basic():
    x_form = DeltaForm(1, (0, 0, 0),
                       [(Polyhedron.full_space(1),
                         Superform.from_poly(Poly.var(1, 0)))])
    d = dP1(x_form)
    assert equal(d, DeltaForm(1, (1, 0, 0),
                              [(Polyhedron.full_space(1),
                                Superform.monomial(1, (0,), ()))]))
    assert dP1(DeltaForm.full_space(2, 5)).is_zero()
    rng = random.Random(2)
    for _ in range(6):
        a = random_balanced(rng, 2, 0, 1, 1)
        assert dP1(dP1(a)).is_zero()
        assert equal(dP1(dP2(a)), dP2(dP1(a)).scale(-1))


def test_boundary_half_line_fixtures():
    # d''x on the half-line [0, inf): the d'-boundary is +[{0}] in the sign
    # convention fixed by the current identity (see module docstring).
    a = DeltaForm(1, (0, 1, 0),
                  [(half_line(), Superform.monomial(1, (), (0,)))])
    b = boundary1(a)
    expected = DeltaForm(1, (0, 0, 1),
                         [(origin(), Superform.constant(1, 1))])
    assert equal(b, expected)
    # x d''x has no kink contribution at 0.
    c = DeltaForm(1, (0, 1, 0),
                  [(half_line(),
                    Superform.monomial(1, (), (0,), Poly.var(1, 0)))])
    assert boundary1(c).is_zero()
    # mirrored: d'x on the half-line has d''-boundary -[{0}].
    d = DeltaForm(1, (1, 0, 0),
                  [(half_line(), Superform.monomial(1, (0,), ()))])
    assert equal(boundary2(d),
                 DeltaForm(1, (0, 0, 1),
                           [(origin(), Superform.constant(1, -1))]))


def test_boundary_of_weights_is_zero():
    assert boundary1(standard_line()).is_zero()
    assert boundary2(standard_line()).is_zero()
    rng = random.Random(3)
    for _ in range(4):
        cyc = random_balanced(rng, 2, 0, 0, 1)
        assert boundary1(cyc).is_zero()
        assert boundary2(cyc).is_zero()


def test_boundary_requires_balanced():
    two_rays = DeltaForm.from_weights(2, 1, [
        (Polyhedron(2, [((-1, 0), 0)], [((0, 1), 0)]), 1),
        (Polyhedron(2, [((0, -1), 0)], [((1, 0), 0)]), 1),
    ])
    with pytest.raises(NotBalanced):
        boundary1(two_rays)


def test_boundary_basis_independence():
    rng = random.Random(5)
    for _ in range(5):
        a = random_balanced(rng, 2, 0, 1, 0)
        ref = boundary1(a)
        # scale-and-shear the tangent basis at every face
        bases = {}
        from tropcalc.deltaforms import _codim1_faces
        for key, (tau, _) in _codim1_faces(a).items():
            basis = [list(v) for v in tau.lattice.basis]
            if basis:
                basis[0] = [3 * x for x in basis[0]]
                if len(basis) > 1:
                    basis[1] = [x + y for x, y in zip(basis[0], basis[1])]
            bases[key] = basis
        alt = boundary1(a, tangent_bases=bases)
        assert equal(ref, alt)


def test_corner_locus_fixtures():
    phi = PSFunction.from_minmax(1, "max", [(1, 0), (0, 0)])
    div = corner_locus(phi, DeltaForm.full_space(1))
    assert equal(div, DeltaForm.from_weights(1, 1, [(origin(), 1)]))

    affine = PSFunction.from_minmax(1, "max", [(2, 1)])
    assert corner_locus(affine, DeltaForm.full_space(1)).is_zero()

    psi = PSFunction.from_minmax(1, "min", [(1, 0), (0, 0)])
    assert equal(corner_locus(psi, DeltaForm.full_space(1)), div.scale(-1))

    tline = PSFunction.from_minmax(2, "max", [(1, 0, 0), (0, 1, 0), (0, 0, 0)])
    div2 = corner_locus(tline, DeltaForm.full_space(2))
    assert equal(div2, standard_line())
    assert check_balanced(div2)[0]


def test_corner_locus_bilinear_and_local():
    rng = random.Random(7)
    phi = random_pl(rng, 2)
    psi = random_pl(rng, 2)
    a = DeltaForm.full_space(2)
    both = corner_locus(phi + psi, a)
    assert equal(both, add(corner_locus(phi, a), corner_locus(psi, a)))
    assert equal(corner_locus(phi.scale(3), a), corner_locus(phi, a).scale(3))


def test_corner_locus_commutative():
    rng = random.Random(11)
    for _ in range(4):
        phi = random_pl(rng, 2)
        psi = random_pl(rng, 2)
        a = DeltaForm.full_space(2)
        lhs = corner_locus(psi, corner_locus(phi, a))
        rhs = corner_locus(phi, corner_locus(psi, a))
        assert equal(lhs, rhs)


def test_ps_wedge_unit_and_bilinear():
    line = standard_line(2)
    one = PSFunction.from_poly(Poly.const(2, 1))
    assert equal(ps_wedge(one, line), line)
    factor = DeltaForm(2, (1, 0, 0),
                       [(Polyhedron.full_space(2),
                         Superform.monomial(2, (0,), (), Poly.var(2, 0)))])
    wedged = ps_wedge(factor, line)
    assert wedged.ptype == (1, 0, 1)
    assert equal(ps_wedge(factor, standard_line(1)).scale(2), wedged)


def test_ps_wedge_refinement_invariant():
    # Wedging with a PS factor given on a finer complex gives the same form.
    line = standard_line()
    coarse = PSFunction.from_poly(Poly.var(2, 0)).as_deltaform()
    fine_cells = [Polyhedron(2, [((1, 1), 0)]), Polyhedron(2, [((-1, -1), 0)])]
    fine = DeltaForm(2, (0, 0, 0),
                     [(c, Superform.from_poly(Poly.var(2, 0)))
                      for c in fine_cells])
    assert equal(ps_wedge(coarse, line), ps_wedge(fine, line))


def test_j_delta_involution():
    rng = random.Random(13)
    for _ in range(5):
        a = random_balanced(rng, 2, 1, 0, 1)
        assert equal(j_delta(j_delta(a)), a)


def test_tropical_pl_fixtures():
    phi = PSFunction.from_minmax(1, "max", [(1, 0), (0, 0)])
    assert tropical_pl_check(phi, DeltaForm.full_space(1))
    affine = PSFunction.from_minmax(2, "max", [(1, 1, 1)])
    assert tropical_pl_check(affine, standard_line())


def test_tropical_pl_random():
    rng = random.Random(17)
    for _ in range(4):
        rank = rng.randint(1, 2)
        phi = random_ps(rng, rank)
        alpha = random_balanced(rng, rank, 0, 0, rng.randint(0, 1))
        assert tropical_pl_check(phi, alpha)


def test_boundary_identities_random():
    rng = random.Random(19)
    for _ in range(4):
        rank = 2
        a = random_balanced(rng, rank, rng.randint(0, 1), 1, rng.randint(0, 1))
        assert boundary1(boundary1(a)).is_zero() or equal(
            boundary1(boundary1(a)),
            DeltaForm.zero(rank, boundary1(boundary1(a)).ptype))
        b1 = boundary1(a)
        b2 = boundary2(a)
        mixed = add(boundary2(b1), boundary1(b2))
        assert mixed.is_zero()
        assert add(boundary1(dP1(a)), dP1(boundary1(a))).is_zero()
        assert add(boundary2(dP2(a)), dP2(boundary2(a))).is_zero()
        four = add(add(boundary1(dP2(a)), dP1(boundary2(a))),
                   add(boundary2(dP1(a)), dP2(boundary1(a))))
        assert four.is_zero()


def test_psfunction_continuity_and_value():
    phi = PSFunction.from_minmax(2, "max", [(1, 0, 0), (0, 1, 0), (0, 0, 0)])
    assert phi.validate()
    assert phi.value((2, 1)) == 2
    assert phi.value((-1, -1)) == 0
    combo = phi + PSFunction.from_poly(Poly(2, {(2, 0): Fraction(1)}))
    assert combo.validate()
    assert combo.value((2, 1)) == 6


def test_translate():
    line = standard_line()
    moved = line.translate((1, 2))
    assert check_balanced(moved)[0]
    back = moved.translate((-1, -2))
    assert equal(line, back)
