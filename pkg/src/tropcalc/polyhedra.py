"""Integral R-affine polyhedra over Q, face lattices, and polyhedral complexes.

A polyhedron is held in a canonical H-representation: implicit equalities
extracted, equality rows in reduced echelon form scaled to primitive integer
vectors, inequalities reduced modulo the hull equations, scaled primitive,
deduplicated and made irredundant by exact LP.  Two polyhedra are equal iff
their canonical representations coincide, which makes semantic equality a
tuple comparison and lets complexes deduplicate cells by hashing.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import AmbientMismatch, DimensionMismatch, NotAFacet
from .linalg import (
    Lattice, dot, int_kernel, rat, sub_vec, vec,
)
from .lp import lp_feasible, lp_maximize, solve_lp

IntNormal = Tuple[int, ...]
Ineq = Tuple[IntNormal, Fraction]


def _primitive(normal: Sequence, offset) -> Optional[Ineq]:
    """Scale (normal, offset) by a positive rational to primitive integers."""
    normal = vec(normal)
    offset = rat(offset)
    if all(x == 0 for x in normal):
        return None
    denom = 1
    for x in normal:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in normal]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return (tuple(x // g for x in ints), offset * denom / g)


def _rref_eqs(eqs: Sequence[Tuple[Sequence, object]], rank_: int):
    """Reduced echelon form of equality rows, scaled to primitive integers.

    Returns (rows, pivots); each row is (normal, offset) with the pivot entry
    positive.  Inconsistent systems return None (callers check feasibility
    first, so this is defensive).
    """
    aug = [[rat(x) for x in a] + [rat(b)] for a, b in eqs]
    pivots: List[int] = []
    r = 0
    for c in range(rank_):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][rank_] != 0:
            return None
    rows = []
    for i, c in enumerate(pivots):
        prim = _primitive(aug[i][:rank_], aug[i][rank_])
        normal, offset = prim
        if normal[c] < 0:
            normal = tuple(-x for x in normal)
            offset = -offset
        rows.append((normal, offset))
    return rows, pivots


def _reduce_mod_eqs(normal: Sequence, offset, eq_rows, pivots):
    """Zero out the pivot coordinates of a normal using the hull equations."""
    a = list(vec(normal))
    b = rat(offset)
    for (erow, eoff), c in zip(eq_rows, pivots):
        if a[c] != 0:
            f = a[c] / erow[c]
            a = [x - f * y for x, y in zip(a, erow)]
            b -= f * eoff
    return tuple(a), b


class Polyhedron:
    """Nonempty integral R-affine polyhedron {x : A x <= b, E x = f}."""

    def __init__(self, ambient_rank: int, ineqs: Iterable = (), eqs: Iterable = ()):
        built = _build(ambient_rank, ineqs, eqs)
        if built is None:
            raise ValueError("polyhedron is empty")
        (self.ambient_rank, self.ineqs, self.eqs, self._pivots, self.dim,
         self._lattice, self.relint_point) = built
        self._key = (self.ambient_rank, self.eqs, self.ineqs)
        self._faces: Optional[Tuple["Polyhedron", ...]] = None
        self._bounded: Optional[bool] = None

    @staticmethod
    def try_new(ambient_rank: int, ineqs: Iterable = (), eqs: Iterable = ()):
        built = _build(ambient_rank, ineqs, eqs)
        if built is None:
            return None
        poly = Polyhedron.__new__(Polyhedron)
        (poly.ambient_rank, poly.ineqs, poly.eqs, poly._pivots, poly.dim,
         poly._lattice, poly.relint_point) = built
        poly._key = (poly.ambient_rank, poly.eqs, poly.ineqs)
        poly._faces = None
        poly._bounded = None
        return poly

    @staticmethod
    def full_space(ambient_rank: int) -> "Polyhedron":
        return Polyhedron(ambient_rank)

    @staticmethod
    def point(coords: Sequence) -> "Polyhedron":
        coords = vec(coords)
        r = len(coords)
        eqs = [(tuple(int(i == j) for j in range(r)), coords[i]) for i in range(r)]
        return Polyhedron(r, [], eqs)

    # -- basic queries ----------------------------------------------------

    @property
    def lattice(self) -> Lattice:
        return self._lattice

    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, Polyhedron) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Polyhedron(dim {self.dim} in R^{self.ambient_rank})"

    def contains(self, point: Sequence) -> bool:
        point = vec(point)
        if len(point) != self.ambient_rank:
            raise DimensionMismatch("point length != ambient rank")
        return (all(dot(a, point) <= b for a, b in self.ineqs)
                and all(dot(a, point) == b for a, b in self.eqs))

    def includes(self, other: "Polyhedron") -> bool:
        """Whether other is a subset of self (exact, via LP)."""
        if self.ambient_rank != other.ambient_rank:
            raise AmbientMismatch("ambient ranks differ")
        for a, b in self.eqs:
            ra, rb = _reduce_mod_eqs(a, b, other.eqs, other._pivots)
            if any(x != 0 for x in ra) or rb != 0:
                return False
        for a, b in self.ineqs:
            ra, rb = _reduce_mod_eqs(a, b, other.eqs, other._pivots)
            if all(x == 0 for x in ra):
                if rb < 0:
                    return False
                continue
            res = lp_maximize(other.ineqs, other.eqs, ra, self.ambient_rank)
            if res.status == "unbounded" or res.value > rb:
                return False
        return True

    def intersect(self, other: "Polyhedron") -> Optional["Polyhedron"]:
        if self.ambient_rank != other.ambient_rank:
            raise AmbientMismatch("ambient ranks differ")
        return Polyhedron.try_new(self.ambient_rank,
                                  self.ineqs + other.ineqs,
                                  self.eqs + other.eqs)

    def is_bounded(self) -> bool:
        if self._bounded is None:
            self._bounded = True
            for i in range(self.ambient_rank):
                obj = tuple(int(i == j) for j in range(self.ambient_rank))
                for sign in (1, -1):
                    o = tuple(sign * x for x in obj)
                    if lp_maximize(self.ineqs, self.eqs, o,
                                   self.ambient_rank).status == "unbounded":
                        self._bounded = False
                        return False
        return self._bounded

    def translate(self, v: Sequence) -> "Polyhedron":
        v = vec(v)
        ineqs = [(a, b + dot(a, v)) for a, b in self.ineqs]
        eqs = [(a, b + dot(a, v)) for a, b in self.eqs]
        return Polyhedron(self.ambient_rank, ineqs, eqs)

    # -- faces -------------------------------------------------------------

    def facets(self) -> List["Polyhedron"]:
        out = []
        for a, b in self.ineqs:
            f = Polyhedron.try_new(self.ambient_rank, self.ineqs,
                                   self.eqs + ((a, b),))
            if f is not None:
                out.append(f)
        return out

    def faces(self) -> Tuple["Polyhedron", ...]:
        """All faces of all dimensions, the polyhedron itself included."""
        if self._faces is None:
            seen: Dict[tuple, Polyhedron] = {self._key: self}
            stack = [self]
            while stack:
                cur = stack.pop()
                for f in cur.facets():
                    if f._key not in seen:
                        seen[f._key] = f
                        stack.append(f)
            self._faces = tuple(sorted(seen.values(), key=lambda p: (p.dim, p._key)))
        return self._faces

    def vertices(self) -> List[Tuple[Fraction, ...]]:
        return [f.relint_point for f in self.faces() if f.dim == 0]

    def parametrization(self):
        """(origin, basis): x = origin + sum t_i basis_i maps R^dim onto the hull."""
        return self.relint_point, self._lattice.basis


def _build(rank_: int, ineqs: Iterable, eqs: Iterable):
    raw_ineqs: List[Ineq] = []
    for a, b in ineqs:
        prim = _primitive(a, b)
        if prim is None:
            if rat(b) < 0:
                return None
            continue
        raw_ineqs.append(prim)
    raw_eqs: List[Ineq] = []
    for a, b in eqs:
        prim = _primitive(a, b)
        if prim is None:
            if rat(b) != 0:
                return None
            continue
        raw_eqs.append(prim)

    if lp_feasible(raw_ineqs, raw_eqs, rank_).status != "optimal":
        return None

    # Implicit equalities: inequalities that hold with equality everywhere.
    pending = list(raw_ineqs)
    strict: List[Ineq] = []
    for a, b in pending:
        res = lp_maximize(raw_ineqs, raw_eqs, tuple(-x for x in a), rank_)
        if res.status == "optimal" and -res.value == b:
            raw_eqs.append((a, b))
        else:
            strict.append((a, b))

    rref = _rref_eqs(raw_eqs, rank_)
    if rref is None:
        return None
    eq_rows, pivots = rref

    # Reduce inequalities modulo the hull, deduplicate, drop trivial ones.
    by_normal: Dict[IntNormal, Fraction] = {}
    for a, b in strict:
        ra, rb = _reduce_mod_eqs(a, b, eq_rows, pivots)
        prim = _primitive(ra, rb)
        if prim is None:
            continue  # valid on the hull; feasibility already checked
        na, nb = prim
        if na not in by_normal or nb < by_normal[na]:
            by_normal[na] = nb
    ineq_list = sorted(by_normal.items())

    # Irredundancy by exact LP, one inequality at a time.
    kept = list(ineq_list)
    i = 0
    while i < len(kept):
        a, b = kept[i]
        others = kept[:i] + kept[i + 1:]
        res = lp_maximize(others, eq_rows, a, rank_)
        if res.status == "optimal" and res.value <= b:
            kept.pop(i)
        else:
            i += 1

    basis = int_kernel([a for a, _ in eq_rows], rank_)
    lattice = Lattice(rank_, basis)
    dim = len(basis)

    relint = _relint_point(kept, eq_rows, rank_)
    return (rank_, tuple(kept), tuple(eq_rows), tuple(pivots), dim,
            lattice, relint)


def _relint_point(ineqs: Sequence[Ineq], eqs: Sequence[Ineq], rank_: int):
    """A rational point satisfying every inequality strictly."""
    if not ineqs:
        res = lp_feasible([], eqs, rank_)
        return res.point
    # Maximize slack t subject to a.x + t <= b, t <= 1 in rank+1 variables.
    ext_ineqs = [(tuple(a) + (1,), b) for a, b in ineqs]
    ext_ineqs.append((tuple(0 for _ in range(rank_)) + (1,), Fraction(1)))
    ext_eqs = [(tuple(a) + (0,), b) for a, b in eqs]
    obj = tuple(0 for _ in range(rank_)) + (1,)
    res = solve_lp(ext_ineqs, ext_eqs, obj, rank_ + 1)
    assert res.status == "optimal" and res.value > 0
    return res.point[:rank_]


def normal_vector(sigma: Polyhedron, tau: Polyhedron) -> IntNormal:
    """The lattice normal vector of the facet tau in sigma.

    An integer vector in N_sigma whose class generates N_sigma / N_tau and
    which points from tau into sigma.
    """
    if sigma.ambient_rank != tau.ambient_rank:
        raise AmbientMismatch("ambient ranks differ")
    if tau.dim != sigma.dim - 1 or not sigma.includes(tau):
        raise NotAFacet("tau is not a facet of sigma")
    hull_cut = Polyhedron.try_new(sigma.ambient_rank, sigma.ineqs,
                                  sigma.eqs + tau.eqs)
    if hull_cut is None or hull_cut != tau:
        raise NotAFacet("tau is not a facet of sigma")
    b_sigma = sigma.lattice.basis
    coords = []
    for v in tau.lattice.basis:
        from .linalg import lattice_coordinates
        c = lattice_coordinates(b_sigma, v, sigma.ambient_rank)
        assert c is not None and all(x.denominator == 1 for x in c)
        coords.append(tuple(int(x) for x in c))
    from .linalg import extend_to_unimodular, transpose
    full = extend_to_unimodular(coords, len(b_sigma))
    comp = tuple(row[-1] for row in full)  # last column completes the basis
    omega = tuple(
        sum(comp[i] * b_sigma[i][j] for i in range(len(b_sigma)))
        for j in range(sigma.ambient_rank))
    # Fix the sign from the facet-defining inequalities of sigma tight on tau.
    t = tau.relint_point
    sign = 0
    for a, b in sigma.ineqs:
        if dot(a, t) == b:
            s = dot(a, omega)
            if s != 0:
                cur = -1 if s > 0 else 1
                assert sign in (0, cur), "inconsistent facet orientation"
                sign = cur
    if sign == 0:
        # tau is cut by equations of tau itself relative to sigma's hull;
        # orient toward sigma's relative interior directly.
        diff = sub_vec(sigma.relint_point, t)
        s = _side_of(diff, omega, sigma, tau)
        sign = s
    if sign < 0:
        omega = tuple(-x for x in omega)
    _check_points_inward(sigma, tau, omega)
    return omega


def _side_of(diff, omega, sigma, tau):
    # Compare omega with the direction from tau into sigma using any
    # inequality of tau's hull not valid on sigma.
    for a, b in tau.eqs:
        if dot(a, sigma.relint_point) != b:
            s_omega = dot(a, omega)
            s_diff = dot(a, diff)
            if s_omega != 0 and s_diff != 0:
                return 1 if (s_omega > 0) == (s_diff > 0) else -1
    raise NotAFacet("could not orient the normal vector")


def _check_points_inward(sigma, tau, omega):
    t = tau.relint_point
    eps = Fraction(1)
    for a, b in sigma.ineqs:
        slack = b - dot(a, t)
        drift = dot(a, omega)
        if drift > 0:
            assert slack > 0, "normal vector points outside"
            eps = min(eps, slack / drift / 2)
    probe = tuple(x + eps * w for x, w in zip(t, omega))
    assert sigma.contains(probe)


class Complex:
    """A face-closed polyhedral complex."""

    def __init__(self, ambient_rank: int, cells: Iterable[Polyhedron],
                 close: bool = True, check: bool = False):
        self.ambient_rank = ambient_rank
        seen: Dict[tuple, Polyhedron] = {}
        stack = list(cells)
        for c in stack:
            if c.ambient_rank != ambient_rank:
                raise AmbientMismatch("cell rank != complex rank")
        if close:
            collected: Dict[tuple, Polyhedron] = {}
            for c in stack:
                for f in c.faces():
                    collected.setdefault(f.key(), f)
            seen = collected
        else:
            for c in stack:
                seen.setdefault(c.key(), c)
        self.cells: Tuple[Polyhedron, ...] = tuple(
            sorted(seen.values(), key=lambda p: (p.dim, p.key())))
        self._maximal: Optional[Tuple[Polyhedron, ...]] = None
        if check:
            self.validate()

    def __repr__(self):
        return f"Complex({len(self.cells)} cells in R^{self.ambient_rank})"

    def maximal_cells(self) -> Tuple[Polyhedron, ...]:
        if self._maximal is None:
            out = []
            for c in self.cells:
                if not any(d.dim > c.dim and d.includes(c) for d in self.cells):
                    out.append(c)
            self._maximal = tuple(out)
        return self._maximal

    def is_pure(self) -> bool:
        dims = {c.dim for c in self.maximal_cells()}
        return len(dims) <= 1

    def top_dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def cells_of_dim(self, d: int) -> List[Polyhedron]:
        return [c for c in self.cells if c.dim == d]

    def validate(self):
        keys = {c.key() for c in self.cells}
        for c in self.cells:
            for f in c.faces():
                assert f.key() in keys, "complex is not face-closed"
        cells = self.cells
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                inter = cells[i].intersect(cells[j])
                if inter is not None:
                    assert inter.key() in keys, \
                        "cells meet outside a common face"

    def refine_cell_by(self, cell: Polyhedron, hyperplanes) -> List[Polyhedron]:
        pieces = [cell]
        for a, b in hyperplanes:
            new: List[Polyhedron] = []
            for p in pieces:
                lo = Polyhedron.try_new(self.ambient_rank,
                                        p.ineqs + ((a, b),), p.eqs)
                hi = Polyhedron.try_new(self.ambient_rank,
                                        p.ineqs + ((tuple(-x for x in a), -b),),
                                        p.eqs)
                if lo is not None and hi is not None \
                        and lo.dim == p.dim and hi.dim == p.dim:
                    new.extend([lo, hi])
                else:
                    new.append(p)
            pieces = new
        return pieces


def hyperplanes_of(cells: Iterable[Polyhedron]) -> List[Ineq]:
    """All affine hyperplanes appearing in the cells' canonical constraints."""
    seen = {}
    for c in cells:
        for a, b in list(c.eqs) + list(c.ineqs):
            prim = _primitive(a, b)
            na, nb = prim
            for i, x in enumerate(na):
                if x != 0:
                    if x < 0:
                        na = tuple(-y for y in na)
                        nb = -nb
                    break
            seen.setdefault((na, nb), (na, nb))
    return sorted(seen.values())


def arrangement_complex(ambient_rank: int, cells: Sequence[Polyhedron]) -> Complex:
    """Refine arbitrary cells into a valid face-closed complex.

    Every cell is split along every hyperplane supporting a constraint of any
    cell, so the resulting pieces pairwise intersect in common faces.
    """
    planes = hyperplanes_of(cells)
    tmp = Complex(ambient_rank, [], close=False)
    pieces: List[Polyhedron] = []
    for c in cells:
        relevant = [h for h in planes
                    if c.intersect(Polyhedron(ambient_rank, (), (h,))) is not None]
        pieces.extend(tmp.refine_cell_by(c, relevant))
    return Complex(ambient_rank, pieces)


def common_refinement(c1: Complex, c2: Complex) -> Complex:
    """Pairwise intersections of cells plus their face closure."""
    if c1.ambient_rank != c2.ambient_rank:
        raise AmbientMismatch("ambient ranks differ")
    out = []
    for a in c1.cells:
        for b in c2.cells:
            inter = a.intersect(b)
            if inter is not None:
                out.append(inter)
    return Complex(c1.ambient_rank, out)


def refine_within(complex_: Complex, other_cells: Sequence[Polyhedron]) -> Complex:
    """Refine a complex by the constraint hyperplanes of other cells,
    keeping its own support."""
    planes = hyperplanes_of(other_cells)
    pieces: List[Polyhedron] = []
    for c in complex_.maximal_cells():
        relevant = [h for h in planes
                    if c.intersect(Polyhedron(complex_.ambient_rank, (), (h,)))
                    is not None]
        pieces.extend(complex_.refine_cell_by(c, relevant))
    return Complex(complex_.ambient_rank, pieces)


class AffineForm:
    """Integral affine form a.x + c with integer a and rational c."""

    def __init__(self, linear: Sequence, constant):
        self.linear = tuple(int(x) for x in linear)
        self.constant = rat(constant)

    def value(self, x: Sequence) -> Fraction:
        return dot(self.linear, x) + self.constant


def decomposition_of_pl(forms: Sequence[AffineForm], kind: str):
    """Regions of R^r where one affine form attains the max (resp. min).

    Returns (complex, labels) with labels mapping each maximal cell to the
    index of the attaining form.
    """
    if not forms:
        raise ValueError("need at least one affine form")
    if kind not in ("max", "min"):
        raise ValueError("kind must be 'max' or 'min'")
    r = len(forms[0].linear)
    sign = 1 if kind == "max" else -1
    regions = []
    for i, f in enumerate(forms):
        ineqs = []
        for j, g in enumerate(forms):
            if i == j:
                continue
            # f >= g (max) or f <= g (min):  sign*(g - f).x <= sign*(cf - cg)
            a = tuple(sign * (gj - fj) for fj, gj in zip(f.linear, g.linear))
            b = sign * (f.constant - g.constant)
            ineqs.append((a, b))
        cell = Polyhedron.try_new(r, ineqs)
        if cell is not None and cell.dim == r:
            regions.append((cell, i))
    seen = {}
    for cell, i in regions:
        seen.setdefault(cell.key(), (cell, i))
    cells = [cell for cell, _ in seen.values()]
    cx = Complex(r, cells)
    labels = {cell.key(): i for cell, i in seen.values()}
    return cx, labels


def eliminate_coordinates(ineqs: Sequence[Ineq], eqs: Sequence[Ineq],
                          rank_: int, drop: Sequence[int]):
    """Fourier-Motzkin elimination of the listed coordinates.

    Returns (ineqs, eqs, kept_indices) over the remaining coordinates in
    their original order.
    """
    cur_ineqs = [(list(vec(a)), rat(b)) for a, b in ineqs]
    cur_eqs = [(list(vec(a)), rat(b)) for a, b in eqs]
    alive = list(range(rank_))
    for target in sorted(drop, reverse=True):
        pos = alive.index(target)
        pivot_eq = next((e for e in cur_eqs if e[0][pos] != 0), None)
        if pivot_eq is not None:
            pa, pb = pivot_eq
            cur_eqs.remove(pivot_eq)
            def subst(row, off):
                f = row[pos] / pa[pos]
                return ([x - f * y for x, y in zip(row, pa)], off - f * pb)
            cur_eqs = [subst(a, b) for a, b in cur_eqs]
            cur_ineqs = [subst(a, b) for a, b in cur_ineqs]
        else:
            ups = [(a, b) for a, b in cur_ineqs if a[pos] > 0]
            downs = [(a, b) for a, b in cur_ineqs if a[pos] < 0]
            keeps = [(a, b) for a, b in cur_ineqs if a[pos] == 0]
            new = list(keeps)
            for ua, ub in ups:
                for da, db in downs:
                    # Combine to cancel the pivot coordinate.
                    cu = -da[pos]
                    cd = ua[pos]
                    row = [cu * x + cd * y for x, y in zip(ua, da)]
                    new.append((row, cu * ub + cd * db))
            cur_ineqs = new
        for a, _ in cur_ineqs:
            del a[pos]
        for a, _ in cur_eqs:
            del a[pos]
        alive.pop(pos)
    out_ineqs = [(tuple(a), b) for a, b in cur_ineqs]
    out_eqs = [(tuple(a), b) for a, b in cur_eqs]
    return out_ineqs, out_eqs, alive
