"""Graded integral closure on the monomial class.

With an injective grading, the homogeneous elements of a finitely generated
monomial algebra base[M] are the scalar multiples of its monomials, and
graded integral closure is exactly monoid saturation: sat(M) = cone(M)
intersected with the group generated by M.  The routines here compute
saturations with a certified generating set (every point of the generator
zonotope is enumerated, which generates by the Gordan argument), decide
memberships exactly through the cone/lattice model, and verify the
intersection and Laurent-extension laws.

Monoid membership for *unsaturated* monoids is an integer program; it is
decided here only for positively graded instances, where a strictly
positive functional certifies a coefficient bound.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import kernel, linalg
from .errors import GradescentError, UndecidableHereError, UnsupportedLayerError
from .gval import ValuationPoint
from .grading import INF, value_cmp, value_min

MAX_DIM = 4


@dataclass(frozen=True)
class MonomialAlgebra:
    """base[M] for a finitely generated monoid M inside the exponent lattice
    of a monomial graded field with injective grading."""

    field: object  # GradedField (monomial)
    generators: tuple

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        gens = tuple(g for g in gens if any(g))
        object.__setattr__(self, "generators", gens)
        if self.field is not None and self.field.exts:
            raise UnsupportedLayerError("monomial algebras need a monomial field")
        if self.dim > MAX_DIM:
            raise UndecidableHereError(f"dimension {self.dim} > {MAX_DIM}")

    @property
    def dim(self):
        if self.generators:
            return len(self.generators[0])
        if self.field is not None:
            return self.field.mono.rank()
        return 0

    def group_basis(self):
        """HNF basis of gp(M)."""
        return linalg.hnf_rows(self.generators)

    def cone(self):
        return linalg.Cone(self.dim, [tuple(Fraction(x) for x in g)
                                      for g in self.generators])

    def contains_saturated(self, u):
        """Membership in sat(M) = cone(M) & gp(M); equals membership in M
        itself when M is saturated."""
        u = tuple(int(x) for x in u)
        basis, pivots = self.group_basis()
        if not linalg.lattice_member(basis, pivots, u):
            return False
        return self.cone().contains(tuple(Fraction(x) for x in u))

    def __eq__(self, other):
        if not isinstance(other, MonomialAlgebra):
            return NotImplemented
        return self.field == other.field and set(self.generators) == set(other.generators)

    def __hash__(self):
        return hash((self.dim, len(self.generators)))


def monoid_equal_saturated(A, B):
    """Equality of two saturated monoids via mutual generator membership."""
    return (all(B.contains_saturated(g) for g in A.generators)
            and all(A.contains_saturated(g) for g in B.generators))


def _zonotope_box(gens, dim):
    lo = [0] * dim
    hi = [0] * dim
    for g in gens:
        for i, x in enumerate(g):
            if x > 0:
                hi[i] += x
            else:
                lo[i] += x
    return lo, hi


def saturate(A):
    """The saturation of A: a certified finite generating set of
    cone(M) & gp(M), reduced to its irreducible elements.

    Certification: the monoid is generated by its points in the generator
    zonotope {sum t_i g_i : t_i in [0,1]}, whose coordinate bounding box is
    enumerated exactly."""
    gens = A.generators
    if not gens:
        return A
    dim = A.dim
    lo, hi = _zonotope_box(gens, dim)
    basis, pivots = A.group_basis()
    eqs, ineqs = A.cone().integer_constraints()
    pts = kernel.box_points(lo, hi, eqs, ineqs, basis, pivots)
    pts = [p for p in pts if any(p)]
    reduced = _reduce_generators(pts)
    return MonomialAlgebra(A.field, tuple(reduced))


def _reduce_generators(pts):
    """Drop points that split as a sum of two strictly smaller points of the
    set (by l1 norm, so the induction is sound even with lineality)."""
    def norm(p):
        return sum(abs(x) for x in p)

    pts = sorted(set(pts), key=lambda p: (norm(p), p))
    ptset = set(pts)
    out = []
    for p in pts:
        np = norm(p)
        redundant = False
        for a in pts:
            na = norm(a)
            if na >= np:
                break
            if na == 0:
                continue
            rem = tuple(x - y for x, y in zip(p, a))
            if any(rem) and norm(rem) < np and rem in ptset:
                redundant = True
                break
        if not redundant:
            out.append(p)
    return out


def integral_closure_in(A, lattice_rows):
    """Graded integral closure of A inside the monomial algebra of a larger
    lattice: {u in L : n*u in M for some n >= 1} = cone(M) & L."""
    gens = A.generators
    if not gens:
        return MonomialAlgebra(A.field, ())
    dim = A.dim
    lattice_rows = [tuple(int(x) for x in r) for r in lattice_rows]
    basis, pivots = linalg.hnf_rows(lattice_rows)
    # generating zonotope of cone & L: scale the generators into L first
    scaled = []
    for g in gens:
        n = _lattice_multiple(lattice_rows, g)
        if n is None:
            raise UndecidableHereError("generator is outside the span of the lattice")
        scaled.append(tuple(n * x for x in g))
    lo, hi = _zonotope_box(scaled, dim)
    eqs, ineqs = A.cone().integer_constraints()
    pts = kernel.box_points(lo, hi, eqs, ineqs, basis, pivots)
    pts = [p for p in pts if any(p)]
    return MonomialAlgebra(A.field, tuple(_reduce_generators(pts)))


def positively_graded_bound(A):
    """A strictly positive rational functional on the generators, or None.
    Existence makes unsaturated monoid membership decidable by bounded
    search."""
    gens = A.generators
    if not gens:
        return None
    dim = A.dim
    phi = linalg.solve_relations(
        dim, eqs=(), nonneg=[tuple(Fraction(x) for x in g) for g in gens],
        strict_pos=[tuple(Fraction(x) for x in g) for g in gens])
    return phi


def monoid_member(A, u):
    """Exact membership of u in the (possibly unsaturated) monoid M.

    Unit directions coming from +-generator pairs are split off as a
    sublattice; the remainder must be positively graded modulo that
    sublattice, which certifies a coefficient-sum bound for the search.
    Other shapes raise: never a wrong answer."""
    u = tuple(int(x) for x in u)
    if not any(u):
        return True
    gens = list(A.generators)
    if not gens:
        return False
    gen_set = set(gens)
    pairs = [g for g in gens if tuple(-x for x in g) in gen_set]
    u_basis, u_piv = linalg.hnf_rows(pairs)
    rest = [g for g in gens if g not in set(pairs)]

    def in_units(w):
        if not u_basis:
            return not any(w)
        return linalg.lattice_member(u_basis, u_piv, w)

    if in_units(u):
        return True
    if not rest:
        return False
    dim = A.dim
    phi = linalg.solve_relations(
        dim,
        eqs=[tuple(Fraction(x) for x in b) for b in u_basis],
        nonneg=[tuple(Fraction(x) for x in g) for g in rest],
        strict_pos=[tuple(Fraction(x) for x in g) for g in rest])
    if phi is None:
        raise UndecidableHereError(
            "monoid membership is decided only modulo unit pairs with a "
            "positive grading on the remainder")
    target = linalg.vdot(phi, tuple(Fraction(x) for x in u))
    if target < 0:
        return False
    step = min(linalg.vdot(phi, tuple(Fraction(x) for x in g)) for g in rest)
    budget = int(target / step)

    found = [False]

    def dfs(start, point, remaining):
        if found[0]:
            return
        if in_units(tuple(a - b for a, b in zip(u, point))):
            found[0] = True
            return
        if remaining == 0:
            return
        for gi in range(start, len(rest)):
            nxt = tuple(a + b for a, b in zip(point, rest[gi]))
            dfs(gi, nxt, remaining - 1)
            if found[0]:
                return

    dfs(0, (0,) * dim, budget)
    return found[0]


def is_saturated(A):
    """Is A integrally closed in its graded fraction field?"""
    sat = saturate(A)
    return all(monoid_member(A, g) for g in sat.generators)


@dataclass(frozen=True)
class LawReport:
    """Outcome of one of the closure laws, with both sides for reporting."""

    holds: bool
    lhs: tuple
    rhs: tuple


def closure_intersection_law(family, lattice_rows):
    """Verify: closure of the intersection equals the intersection of the
    closures, for a family of algebras integrally closed in their graded
    fraction fields.  Unsaturated inputs are rejected (the hypothesis is
    critical)."""
    family = list(family)
    if not family:
        raise GradescentError("empty family")
    for A in family:
        if not is_saturated(A):
            raise GradescentError(
                "closure_intersection_law requires integrally closed inputs")
    dim = family[0].dim
    lattice_rows = [tuple(int(x) for x in r) for r in lattice_rows]
    # intersection monoid of saturated algebras: intersect cones and groups
    inter_group = [tuple(r) for r in family[0].group_basis()[0]]
    for A in family[1:]:
        inter_group = linalg.lattice_intersection(
            inter_group, [tuple(r) for r in A.group_basis()[0]])
    all_ineqs = []
    all_eqs = []
    for A in family:
        eqs, ineqs = A.cone().integer_constraints()
        all_eqs.extend(eqs)
        all_ineqs.extend(ineqs)
    inter_gens = _cone_lattice_generators(dim, all_eqs, all_ineqs, inter_group)
    inter_algebra = MonomialAlgebra(family[0].field, tuple(inter_gens))
    lhs = integral_closure_in(inter_algebra, lattice_rows) if inter_gens else \
        MonomialAlgebra(family[0].field, ())
    rhs_closures = [integral_closure_in(A, lattice_rows) for A in family]
    # intersection of the closures: again saturated, intersect cone/lattice
    rg = [tuple(r) for r in rhs_closures[0].group_basis()[0]]
    r_eqs, r_ineqs = [], []
    for C in rhs_closures:
        eqs, ineqs = C.cone().integer_constraints()
        r_eqs.extend(eqs)
        r_ineqs.extend(ineqs)
        rg = linalg.lattice_intersection(rg, [tuple(r) for r in C.group_basis()[0]]) \
            if C is not rhs_closures[0] else rg
    rhs_gens = _cone_lattice_generators(dim, r_eqs, r_ineqs, rg)
    rhs_algebra = MonomialAlgebra(family[0].field, tuple(rhs_gens))
    holds = monoid_equal_saturated(lhs, rhs_algebra)
    return LawReport(holds, lhs.generators, rhs_algebra.generators)


def _lattice_multiple(lattice_rows, vec):
    """Smallest n >= 1 with n*vec in the lattice, or None outside the span."""
    sol = linalg.solve_linear([tuple(Fraction(x) for x in r) for r in lattice_rows],
                              tuple(Fraction(x) for x in vec))
    if sol is None:
        return None
    n = 1
    for c in sol:
        n = n * c.denominator // __import__("math").gcd(n, c.denominator)
    return n


def _cone_lattice_generators(dim, eqs, ineqs, lattice_rows):
    """Certified generators of (cone cut out by the constraints) & lattice.

    The cone is first intersected with the Q-span of the lattice so that
    every ray admits a lattice multiple; the zonotope of those multiples
    then generates by the Gordan argument."""
    if not lattice_rows:
        return []
    span_eqs = linalg.nullspace([tuple(Fraction(x) for x in r) for r in lattice_rows])
    all_eqs = [tuple(Fraction(x) for x in e) for e in eqs] + list(span_eqs)
    ray_gens = linalg.cone_rays_from_constraints(
        dim, all_eqs, [tuple(Fraction(x) for x in r) for r in ineqs])
    basis, pivots = linalg.hnf_rows(lattice_rows)
    scaled = []
    for ray in ray_gens:
        iv = linalg._int_clear(ray)
        if not any(iv):
            continue
        n = _lattice_multiple(lattice_rows, iv)
        if n is None:
            raise GradescentError("span-restricted ray escaped the lattice span")
        scaled.append(tuple(n * x for x in iv))
    if not scaled:
        return []
    lo, hi = _zonotope_box(scaled, dim)
    eq_int = [linalg._int_clear(e) for e in all_eqs]
    pts = kernel.box_points(lo, hi, eq_int, ineqs, basis, pivots)
    return _reduce_generators([p for p in pts if any(p)])


def laurent_closedness(B, extra_vars):
    """Laurent extension law: for saturated B, the monoid B + Z^n stays
    saturated."""
    if not is_saturated(B):
        raise GradescentError("laurent_closedness requires a saturated input")
    dim = B.dim
    n = int(extra_vars)
    ext_gens = [g + (0,) * n for g in B.generators]
    for i in range(n):
        unit = [0] * (dim + n)
        unit[dim + i] = 1
        ext_gens.append(tuple(unit))
        ext_gens.append(tuple(-x for x in unit))
    ext = MonomialAlgebra(None, tuple(ext_gens))
    sat = saturate(ext)
    holds = monoid_equal_saturated(ext, sat)
    return LawReport(holds, ext.generators, sat.generators)


def fa_closedness(A, f_vars):
    """The F*A closedness law: A saturated, the F-directions fully inverted.
    Independence from A is structural in this model (the F-directions are
    fresh lattice coordinates, so the sum is direct by construction)."""
    return laurent_closedness(A, f_vars)


def interlem_check(family, t_directions, box=3):
    """Intersection commutes with the Laurent extension: the intersection of
    the F*A_j equals F*(intersection of the A_j).

    Verified as exact point sets on a box.  Certified for monoids with
    nonnegative generators, where a point's coefficient-sum is bounded by
    the box: enumeration misses nothing."""
    family = list(family)
    if not family:
        raise GradescentError("empty family")
    dim = family[0].dim
    n = int(t_directions)
    for A in family:
        for g in A.generators:
            if any(x < 0 for x in g):
                raise UndecidableHereError(
                    "interlem check is certified for nonnegative generators only")
    lo = [0] * dim + [-box] * n
    hi = [box] * (dim + n)
    budget = sum(hi) - sum(lo)
    ext_sets = []
    for A in family:
        gens = [g + (0,) * n for g in A.generators]
        for i in range(n):
            unit = [0] * (dim + n)
            unit[dim + i] = 1
            gens.append(tuple(unit))
            gens.append(tuple(-x for x in unit))
        ext_sets.append(kernel.monoid_points(gens, budget, lo, hi))
    lhs = set.intersection(*ext_sets)
    base_sets = [kernel.monoid_points(list(A.generators), budget, lo[:dim], hi[:dim])
                 for A in family]
    inter_base = set.intersection(*base_sets)
    from itertools import product

    rhs = set()
    for p in inter_base:
        for tail in product(range(-box, box + 1), repeat=n):
            rhs.add(p + tail)
    holds = lhs == rhs
    return LawReport(holds, tuple(sorted(lhs - rhs)), tuple(sorted(rhs - lhs)))


# ---------------------------------------------------------------------------
# homogeneous bases of torsion-free modules over graded valuation rings


@dataclass(frozen=True)
class GradedModulePresentation:
    """Finitely many generating columns of homogeneous elements inside a
    free graded module over a graded valuation ring."""

    point: ValuationPoint
    ambient_rank: int
    columns: tuple  # tuple of columns; each column a tuple of elements


def _basis_with_pivots(pres):
    point = pres.point
    v = point.valuation
    n = pres.ambient_rank
    cols = [list(col) for col in pres.columns]
    for col in cols:
        if len(col) != n:
            raise GradescentError("column length does not match the ambient rank")
    basis = []
    pivot_rows = []
    used_rows = set()
    while True:
        best = None
        for ci, col in enumerate(cols):
            for ri in range(n):
                if ri in used_rows:
                    continue
                x = col[ri]
                if x.is_zero():
                    continue
                val = v.eval(x)
                if best is None or value_cmp(val, best[0]) < 0:
                    best = (val, ci, ri)
        if best is None:
            break
        _, ci, ri = best
        pivot_col = cols.pop(ci)
        pivot = pivot_col[ri]
        pinv = pivot.inverse()
        for col in cols:
            x = col[ri]
            if x.is_zero():
                continue
            f = x * pinv  # stays in O: v(x) >= v(pivot) by pivot minimality
            for i in range(n):
                if not pivot_col[i].is_zero():
                    col[i] = col[i] - f * pivot_col[i]
        basis.append(tuple(pivot_col))
        pivot_rows.append(ri)
        used_rows.add(ri)
        cols = [col for col in cols if any(not x.is_zero() for x in col)]
    return basis, pivot_rows


def homogeneous_basis(pres):
    """A homogeneous basis of the submodule generated by the columns, by
    valuated elimination: the pivot is an entry of minimal value, so every
    elimination multiplier stays in the valuation ring."""
    return _basis_with_pivots(pres)[0]


def module_rank(pres):
    """Rank over the graded fraction field = number of elimination pivots."""
    return len(_basis_with_pivots(pres)[0])


def span_solve(pres, column):
    """Coefficients in O expressing the column over the computed basis, or
    None.  The pivot staircase forces each coefficient in turn."""
    basis, pivot_rows = _basis_with_pivots(pres)
    point = pres.point
    K = point.valuation.field
    n = pres.ambient_rank
    work = list(column)
    coeffs = []
    for b, ri in zip(basis, pivot_rows):
        x = work[ri]
        if x.is_zero():
            coeffs.append(K.zero())
            continue
        c = x / b[ri]
        if not point.in_ring(c):
            return None
        coeffs.append(c)
        for i in range(n):
            if not b[i].is_zero():
                work[i] = work[i] - c * b[i]
    if any(not x.is_zero() for x in work):
        return None
    return coeffs
