"""Graded polynomial rings K[g^-1 T]: homogeneity, Euclidean division, gcd,
factorization into monic irreducible homogeneous elements, splitting
extensions, and minimal homogeneous polynomials.

A polynomial is homogeneous of grading gamma when every term a_i T^i
satisfies rho(a_i) * g^i = gamma.  Every nonzero homogeneous ideal of the
univariate ring is principal with a unique monic homogeneous generator, and
monic homogeneous elements factor uniquely into monic irreducible
homogeneous ones; the routines here make all of that effective at desk
scale.

Multivariate polynomials support arithmetic and homogeneity detection only;
division, gcd, factorization and splitting are univariate.
"""

from dataclasses import dataclass

from . import basefield as bf
from . import linalg
from .errors import (
    FactorRangeError,
    GradescentError,
    GradingMismatchError,
    UndecidableHereError,
)
from .gfield import (
    AlgebraicLayer,
    FieldEmbedding,
    GradedField,
    HomogeneousElement,
    RationalLayer,
)

INHOMOGENEOUS = "no"
ZERO_GRADING = "zero"


class GradedPolynomial:
    """Polynomial over a graded field with graded variables.

    terms: {exponent tuple: nonzero HomogeneousElement}.
    """

    __slots__ = ("field", "variables", "terms")

    def __init__(self, field, variables, terms):
        self.field = field
        self.variables = tuple((name, g) for name, g in variables)
        clean = {}
        for exps, coeff in terms.items():
            if not isinstance(coeff, HomogeneousElement):
                coeff = field.scalar(coeff)
            if coeff.field != field:
                raise GradescentError("coefficient from a different field")
            if not coeff.is_zero():
                clean[tuple(int(e) for e in exps)] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_coeffs(cls, field, varname, g, coeffs):
        """Univariate polynomial from a low-degree-first coefficient list."""
        return cls(field, [(varname, g)],
                   {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def zero(cls, field, variables):
        return cls(field, variables, {})

    # -- structure ------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_univariate(self):
        return len(self.variables) == 1

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def coeffs(self):
        """Univariate view: low-degree-first coefficient list."""
        self._require_univariate()
        d = self.degree()
        out = [self.field.zero()] * (d + 1)
        for (i,), c in self.terms.items():
            out[i] = c
        return out

    def _require_univariate(self):
        if not self.is_univariate():
            raise UndecidableHereError("operation is univariate-only")

    def leading_coeff(self):
        self._require_univariate()
        if self.is_zero():
            return self.field.zero()
        return self.terms[(self.degree(),)]

    def is_monic(self):
        return self.leading_coeff() == self.field.one()

    def map_coeffs(self, fn, field=None, variables=None):
        field = field or self.field
        variables = variables or self.variables
        return GradedPolynomial(field, variables,
                                {e: fn(c) for e, c in self.terms.items()})

    # -- ring operations -----------------------------------------------------

    def _check_compatible(self, other):
        if self.field != other.field or self.variables != other.variables:
            raise GradescentError("polynomials in different rings")

    def __add__(self, other):
        self._check_compatible(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            terms[e] = c if s is None else s + c
        return GradedPolynomial(self.field, self.variables, terms)

    def __neg__(self):
        return GradedPolynomial(self.field, self.variables,
                                {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HomogeneousElement):
            return GradedPolynomial(self.field, self.variables,
                                    {e: c * other for e, c in self.terms.items()})
        self._check_compatible(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                s = terms.get(e)
                terms[e] = prod if s is None else s + prod
        return GradedPolynomial(self.field, self.variables, terms)

    def scale(self, c):
        return self * (c if isinstance(c, HomogeneousElement) else self.field.scalar(c))

    def __eq__(self, other):
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        return (self.field == other.field and self.variables == other.variables
                and self.terms == other.terms)

    def __hash__(self):
        return hash((len(self.terms), self.variables))

    def evaluate(self, *points):
        """Full evaluation at homogeneous elements (one per variable)."""
        if len(points) != len(self.variables):
            raise GradescentError("wrong number of evaluation points")
        out = self.field.zero()
        for e, c in self.terms.items():
            term = c
            for x, k in zip(points, e):
                term = term * x ** k
            out = out + term
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                (n if k == 1 else f"{n}^{k}")
                for (n, _), k in zip(self.variables, e) if k
            )
            cs = repr(c)
            if mono:
                parts.append(mono if cs == "1" else f"({cs})*{mono}")
            else:
                parts.append(cs)
        return " + ".join(parts)


def is_homogeneous(f):
    """The common grading of all terms, "zero" for the zero polynomial, or
    "no" when term gradings disagree."""
    if f.is_zero():
        return ZERO_GRADING
    grading = None
    for e, c in f.terms.items():
        g = c.grading
        for (_, vg), k in zip(f.variables, e):
            if k:
                g = g * vg ** k
        if grading is None:
            grading = g
        elif grading != g:
            return INHOMOGENEOUS
    return grading


def _require_homogeneous(f):
    g = is_homogeneous(f)
    if g == INHOMOGENEOUS:
        raise GradingMismatchError("inhomogeneous polynomial")
    return g


def divide(f, g):
    """Euclidean division f = q*g + rem with deg rem < deg g, in one graded
    variable.  Homogeneity of f and g forces homogeneity of q and rem."""
    f._require_univariate()
    g._require_univariate()
    if f.variables != g.variables or f.field != g.field:
        raise GradescentError("polynomials in different rings")
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    _require_homogeneous(f)
    _require_homogeneous(g)
    fc = f.coeffs()
    gc = g.coeffs()
    lead_inv = gc[-1].inverse()
    q = [f.field.zero()] * max(0, len(fc) - len(gc) + 1)
    while len(fc) >= len(gc) and any(not c.is_zero() for c in fc):
        if fc[-1].is_zero():
            fc.pop()
            continue
        c = fc[-1] * lead_inv
        d = len(fc) - len(gc)
        q[d] = c
        for i in range(len(gc)):
            if not gc[i].is_zero():
                fc[d + i] = fc[d + i] - c * gc[i]
        fc.pop()
    name, vg = f.variables[0]
    qp = GradedPolynomial.from_coeffs(f.field, name, vg, q)
    rp = GradedPolynomial.from_coeffs(f.field, name, vg, fc)
    return qp, rp


def poly_gcd(f, g):
    """Monic gcd of univariate homogeneous polynomials."""
    a, b = f, g
    while not b.is_zero():
        a, b = b, divide(a, b)[1]
    if a.is_zero():
        return a
    return a.scale(a.leading_coeff().inverse())


def monic_generator(gens):
    """The unique monic homogeneous generator of the ideal generated by the
    given univariate homogeneous polynomials."""
    gens = [f for f in gens if not f.is_zero()]
    if not gens:
        raise GradescentError("monic_generator of the zero ideal")
    acc = gens[0]
    for f in gens[1:]:
        acc = poly_gcd(acc, f)
    return acc.scale(acc.leading_coeff().inverse())


def derivative(f):
    f._require_univariate()
    name, vg = f.variables[0]
    terms = {}
    for (i,), c in f.terms.items():
        if i:
            terms[(i - 1,)] = c * f.field.scalar(i)
    return GradedPolynomial(f.field, [(name, vg)], terms)


# ---------------------------------------------------------------------------
# factorization


def factor(f):
    """Factor a univariate homogeneous polynomial into monic irreducible
    homogeneous elements.

    Returns (unit, [(irreducible, multiplicity), ...]) with
    f = unit * prod p_i^{e_i}.  Exact on the decidable class: monomial
    coefficient fields (any supported base), and towers of algebraic layers
    over these (Trager norms).  Rational-layer coefficient fields raise
    FactorRangeError.
    """
    f._require_univariate()
    if f.is_zero():
        raise GradescentError("factor of the zero polynomial")
    _require_homogeneous(f)
    K = f.field
    for layer in K.exts:
        if isinstance(layer, RationalLayer):
            raise FactorRangeError(
                "factorization over rational-layer coefficient fields")
    unit = f.leading_coeff()
    monic = f.scale(unit.inverse())
    factors = _factor_monic(monic)
    # recover multiplicities by exact division (robust against duplicates)
    out = []
    rest = monic
    for p in _dedupe_polys(factors):
        mult = 0
        while True:
            q, r = divide(rest, p)
            if not r.is_zero():
                break
            rest = q
            mult += 1
        if mult:
            out.append((p, mult))
    if rest.degree() != 0:
        raise GradescentError("internal factorization inconsistency")
    return unit, out


def _dedupe_polys(polys):
    out = []
    for p in polys:
        if not any(p == q for q in out):
            out.append(p)
    return out


def _factor_monic(f):
    """Irreducible monic homogeneous factors of monic homogeneous f (with
    repetitions but not necessarily exact multiplicities)."""
    K = f.field
    name, g = f.variables[0]
    d = f.degree()
    if d <= 0:
        return []
    if d == 1:
        return [f]
    coeffs = f.coeffs()
    # step 1: strip powers of T
    s = min(i for i, c in enumerate(coeffs) if not c.is_zero())
    T = GradedPolynomial.from_coeffs(K, name, g, [K.zero(), K.one()])
    if s:
        rest = GradedPolynomial.from_coeffs(K, name, g, coeffs[s:])
        return [T] * s + _factor_monic(rest)
    # step 2: minimal power of the variable grading inside rho(K^x)
    rho = K.grading_image()
    N = rho.power_order(g)
    if N is None:
        raise GradescentError(
            "homogeneous polynomial with impossible support pattern")
    if N > 1:
        sub_terms = {}
        for (i,), c in f.terms.items():
            if i % N:
                raise GradescentError("support pattern violates grading lattice")
            sub_terms[(i // N,)] = c
        h = GradedPolynomial(K, [(name, g ** N)], sub_terms)
        return [
            GradedPolynomial(K, [(name, g)],
                             {(i * N,): c for (i,), c in p.terms.items()})
            for p in _factor_monic(h)
        ]
    # step 3: the variable grading is realized by a unit; factor over the
    # tower by induction on algebraic layers
    if not K.exts:
        return _factor_monomial_base(f)
    return _factor_over_algebraic(f)


def witness_for_grading(K, g):
    """A homogeneous unit of K of grading g built from tower generators, or
    None.  Solves integer coordinates on the grading lattice."""
    gens = []
    elements = []
    for b in K.mono.basis:
        gens.append(b)
        elements.append(K.chi(b))
    for layer in K.exts:
        gens.append(layer.grading)
        elements.append(K.gen(layer.name))
    if not gens:
        return K.one() if g.is_one() else None
    from math import lcm

    den = 1
    for v in gens:
        for x in v.exponents:
            den = lcm(den, x.denominator)
    for x in g.exponents:
        den = lcm(den, x.denominator)
    rows = [tuple(int(x * den) for x in v.exponents) for v in gens]
    target = tuple(int(x * den) for x in g.exponents)
    sol = linalg.integer_solve(rows, target)
    if sol is None:
        return None
    out = K.one()
    for e, x in zip(sol, elements):
        if e:
            out = out * x ** e
    return out


def _factor_monomial_base(f):
    """Factor over a pure monomial field by ungrading to the base field."""
    K = f.field
    name, g = f.variables[0]
    gamma = _require_homogeneous(f)
    w = witness_for_grading(K, g)
    w_gamma = witness_for_grading(K, gamma)
    if w is None or w_gamma is None:
        raise GradescentError("missing grading witness on the monomial lattice")
    base = K.base
    scalars = []
    for i, c in enumerate(f.coeffs()):
        c1 = c * w ** i / w_gamma if not c.is_zero() else None
        if c1 is None:
            scalars.append(base.zero())
        else:
            if not c1.grading.is_one():
                raise GradescentError("ungrading failed to reach degree 1")
            scalars.append(_as_base_scalar(c1))
    base_factors = bf.factor_monic(base, scalars)
    out = []
    for coeffs1, mult in base_factors:
        e = len(coeffs1) - 1
        # regrade: S = T/w, multiply by w^e
        graded = []
        for i, c in enumerate(coeffs1):
            graded.append(K.scalar(c) * w ** (e - i))
        p = GradedPolynomial.from_coeffs(K, name, g, graded)
        out.extend([p] * mult)
    return out


def _as_base_scalar(elt):
    """The base-field scalar underlying a 1-graded monomial-field element."""
    K = elt.field
    data = elt.data
    for j in range(K.level, 0, -1):
        layer = K.exts[j - 1]
        if isinstance(layer, RationalLayer):
            raise FactorRangeError("scalar extraction through a rational layer")
        if any(x is not None for x in data[1:]):
            raise GradescentError("element is not a base scalar")
        data = data[0]
    c, coords = data
    if any(coords):
        raise GradescentError("element is not a base scalar")
    return c


def _lift_poly(f, L):
    """Lift a polynomial to a tower extension L of its field via inclusion."""
    inc = FieldEmbedding(f.field, L)
    return f.map_coeffs(inc.apply, field=L)


def _factor_over_algebraic(f):
    """Trager-style factorization over K = K0[t]/(p): factor the norm over
    K0 and pull factors back through gcds."""
    K = f.field
    name, g = f.variables[0]
    # squarefree part first
    df = derivative(f)
    if df.is_zero():
        raise FactorRangeError("inseparable polynomial over a tower")
    sq = poly_gcd(f, df)
    if sq.degree() > 0:
        part1 = _factor_over_algebraic(divide(f, sq)[0])
        part2 = _factor_over_algebraic(sq)
        return part1 + part2
    for shift in range(0, 8):
        shifted = f if shift == 0 else _shift_by_generator(f, shift)
        if shifted is None:
            break
        norm = _tower_norm(shifted)
        dn = derivative(norm)
        if poly_gcd(norm, dn).degree() == 0:
            norm_factors = _factor_monic(norm)
            out = []
            for q in _dedupe_polys(norm_factors):
                qL = _lift_poly(q, K)
                h = poly_gcd(shifted, qL)
                if h.degree() >= 1:
                    out.append(_unshift(h, shift, f))
            total = sum(p.degree() for p in out)
            if total != f.degree():
                raise GradescentError("norm factorization lost degree")
            return out
    raise FactorRangeError("no squarefree norm shift available")


def _shift_by_generator(f, s):
    """f(T + s*w*t) for the top generator t, with w a monomial unit fixing
    the grading; None when no such w exists."""
    K = f.field
    name, g = f.variables[0]
    layer = K.exts[-1]
    w = witness_for_grading(K.prefix(K.level - 1), g / layer.grading)
    if w is None:
        return None
    inc = FieldEmbedding(K.prefix(K.level - 1), K)
    delta = inc.apply(w) * K.gen(layer.name) * K.scalar(s)
    T = GradedPolynomial.from_coeffs(K, name, g, [K.zero(), K.one()])
    shiftp = GradedPolynomial.from_coeffs(K, name, g, [delta, K.one()])
    out = GradedPolynomial.zero(K, f.variables)
    for (i,), c in f.terms.items():
        term = GradedPolynomial.from_coeffs(K, name, g, [K.one()])
        for _ in range(i):
            term = term * shiftp
        out = out + term.scale(c)
    return out


def _unshift(h, s, f_orig):
    if s == 0:
        return h
    K = h.field
    name, g = h.variables[0]
    layer = K.exts[-1]
    w = witness_for_grading(K.prefix(K.level - 1), g / layer.grading)
    inc = FieldEmbedding(K.prefix(K.level - 1), K)
    delta = inc.apply(w) * K.gen(layer.name) * K.scalar(-s)
    shiftp = GradedPolynomial.from_coeffs(K, name, g, [delta, K.one()])
    out = GradedPolynomial.zero(K, h.variables)
    for (i,), c in h.terms.items():
        term = GradedPolynomial.from_coeffs(K, name, g, [K.one()])
        for _ in range(i):
            term = term * shiftp
        out = out + term.scale(c)
    return out


def _tower_norm(f):
    """Norm of f from K = K0[t]/(p) down to K0, as the determinant of the
    multiplication-by-f matrix over K0[T]."""
    K = f.field
    K0 = K.prefix(K.level - 1)
    layer = K.exts[-1]
    d = layer.degree
    name, g = f.variables[0]
    # entries: multiplication by f on the basis 1..t^(d-1); each entry is a
    # univariate polynomial in T over K0, stored as a coefficient list
    from .gfield import _d_grading

    minpoly = [
        HomogeneousElement(K0, cdata, _d_grading(K0, K0.level, cdata))
        if cdata is not None else K0.zero()
        for cdata in layer.minpoly
    ]
    zero0 = K0.zero()
    deg_f = f.degree()

    def tcoeffs(elt):
        """Element of K as a list of K0-components 0..d-1."""
        if elt.is_zero():
            return [zero0] * d
        data = elt.data
        comps = []
        for k in range(d):
            cd = data[k] if k < len(data) else None
            if cd is None:
                comps.append(zero0)
            else:
                comps.append(HomogeneousElement(K0, cd, _d_grading(K0, K0.level, cd)))
        return comps

    # f as a matrix-valued polynomial: for each T-degree i, the K0-matrix of
    # multiplication by coeff_i on the t-basis
    mats = []
    for i in range(deg_f + 1):
        c = f.terms.get((i,))
        if c is None:
            mats.append(None)
            continue
        cols = []
        tpow = K.one()
        gen = K.gen(layer.name)
        for k in range(d):
            cols.append(tcoeffs(c * tpow))
            tpow = tpow * gen
        mats.append(cols)  # cols[k][row]
    # matrix over K0[T]: entry (row, col) = sum_i mats[i][col][row] T^i
    entries = [[[zero0] * (deg_f + 1) for _ in range(d)] for _ in range(d)]
    for i, cols in enumerate(mats):
        if cols is None:
            continue
        for col in range(d):
            for row in range(d):
                entries[row][col][i] = cols[col][row]
    det = _poly_matrix_det(K0, entries)
    out = GradedPolynomial.from_coeffs(K0, name, g, det)
    lead = out.leading_coeff()
    return out.scale(lead.inverse())


def _poly_matrix_det(K0, entries):
    """Determinant of a matrix of coefficient lists (cofactor expansion)."""
    n = len(entries)
    if n == 1:
        return list(entries[0][0])
    det = [K0.zero()]
    for col in range(n):
        top = entries[0][col]
        if all(c.is_zero() for c in top):
            continue
        minor = [[entries[r][c] for c in range(n) if c != col]
                 for r in range(1, n)]
        sub = _poly_matrix_det(K0, minor)
        prod = _coeff_list_mul(K0, top, sub)
        if col % 2:
            prod = [-c for c in prod]
        det = _coeff_list_add(K0, det, prod)
    return det


def _coeff_list_mul(K0, a, b):
    out = [K0.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if y.is_zero():
                continue
            out[i + j] = out[i + j] + x * y
    return out


def _coeff_list_add(K0, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else K0.zero()
        y = b[i] if i < len(b) else K0.zero()
        out.append(x + y)
    return out


# ---------------------------------------------------------------------------
# splitting fields


def algebraic_extension(K, name, f, check_irreducible=True):
    """Adjoin a root of a monic irreducible homogeneous univariate f over K.

    Returns the extended field; the construction is refused when f is not
    monic homogeneous irreducible (graded-field axiom would fail)."""
    f._require_univariate()
    if f.field != K:
        raise GradescentError("defining polynomial over the wrong field")
    g = _require_homogeneous(f)
    if g == ZERO_GRADING or f.degree() < 1:
        raise GradescentError("defining polynomial must be nonconstant")
    if not f.is_monic():
        raise GradescentError("defining polynomial must be monic")
    if check_irreducible:
        _, factors = factor(f)
        if len(factors) != 1 or factors[0][1] != 1:
            raise GradescentError(
                f"reducible minimal polynomial: {f!r} factors as {factors!r}")
    _, vg = f.variables[0]
    coeffs = f.coeffs()
    minpoly_data = tuple(c.data for c in coeffs)
    return K._with_algebraic_layer_raw(name, vg, minpoly_data)


def split(f):
    """Splitting data: a finite extension tower L/K and homogeneous roots
    x_1..x_d in L with f = unit * prod (T - x_i).

    Factor pieces are processed one at a time so that tower norms stay at
    degree (piece degree) x (layer degree)."""
    f._require_univariate()
    if f.is_zero():
        raise GradescentError("split of the zero polynomial")
    _require_homogeneous(f)
    K = f.field
    unit = f.leading_coeff()
    L = K
    roots = []
    fresh = 0
    pending = [f.scale(unit.inverse())]
    guard = 4 * f.degree() + 8
    while pending:
        guard -= 1
        if guard <= 0:
            raise GradescentError("split failed to terminate")
        piece = pending.pop()
        if piece.field != L:
            piece = _lift_poly(piece, L)
        if piece.degree() <= 0:
            continue
        _, factors = factor(piece)
        if len(factors) == 1 and factors[0][1] == 1 and factors[0][0].degree() >= 2:
            # irreducible piece: adjoin a root and peel it off
            q = factors[0][0]
            fresh += 1
            L = algebraic_extension(L, f"_s{fresh}", q, check_irreducible=False)
            gen = L.gen(f"_s{fresh}")
            qL = _lift_poly(q, L)
            lin = GradedPolynomial.from_coeffs(L, q.variables[0][0],
                                               q.variables[0][1], [-gen, L.one()])
            quot, rem = divide(qL, lin)
            if not rem.is_zero():
                raise GradescentError("adjoined generator is not a root")
            roots.append(gen)
            pending.append(quot)
        else:
            for q, mult in factors:
                if q.degree() == 1:
                    roots.extend([-q.coeffs()[0]] * mult)
                else:
                    pending.extend([q] * mult)
    # re-express earlier roots inside the final tower
    if L != K:
        lifted = []
        for x in roots:
            if x.field != L:
                lifted.append(FieldEmbedding(x.field, L).apply(x))
            else:
                lifted.append(x)
        roots = lifted
    return L, roots


# ---------------------------------------------------------------------------
# minimal homogeneous polynomials


@dataclass(frozen=True)
class MinimalPolynomialRecord:
    element: HomogeneousElement
    over: GradedField
    f_x: GradedPolynomial


def _flatten_to_level(L, data, level):
    """Components of data over the prefix at `level`, indexed by tuples of
    t-exponents of the algebraic layers above it."""
    j = L.level
    comps = {(): data}
    for jj in range(j, level, -1):
        layer = L.exts[jj - 1]
        if isinstance(layer, RationalLayer):
            raise UndecidableHereError("rational layer above the base of a finite extension")
        new = {}
        for idx, d in comps.items():
            if d is None:
                continue
            for k in range(layer.degree):
                cd = d[k] if k < len(d) else None
                if cd is not None:
                    new[(k,) + idx] = cd
        comps = new
    return comps


def minimal_polynomial(x, over):
    """The minimal homogeneous polynomial of x over a subtower `over`.

    x must live in a finite extension of `over` (algebraic layers only).
    Computed by homogeneous linear algebra on the powers of x; minimal
    degree makes the result irreducible automatically.
    """
    L = x.field
    K = over
    if L.context != K.context or L.base != K.base or L.mono != K.mono:
        raise UndecidableHereError("minimal polynomial only along tower prefixes")
    if L.exts[:len(K.exts)] != K.exts:
        raise UndecidableHereError("fields are not prefix-compatible")
    for layer in L.exts[len(K.exts):]:
        if isinstance(layer, RationalLayer):
            raise UndecidableHereError("element of an infinite extension")
    if x.is_zero():
        raise GradescentError("minimal polynomial of zero")
    from .gfield import _d_grading

    level = K.level
    deg = 1
    for layer in L.exts[level:]:
        deg *= layer.degree
    basis_idx = sorted(_power_index_space(L, level))
    # coordinate vectors of powers of x over K
    powers = [L.one()]
    for _ in range(deg):
        powers.append(powers[-1] * x)
    rows = []
    for p in powers:
        comp = _flatten_to_level(L, p.data, level) if not p.is_zero() else {}
        row = []
        for idx in basis_idx:
            cd = comp.get(idx)
            if cd is None:
                row.append(K.zero())
            else:
                row.append(HomogeneousElement(K, cd, _d_grading(K, level, cd)))
        rows.append(row)
    # find minimal n with x^n dependent on lower powers (over K)
    for n in range(1, deg + 1):
        sol = _solve_over_field(K, rows[:n], rows[n])
        if sol is not None:
            coeffs = [-c for c in sol] + [K.one()]
            name = "T"
            f_x = GradedPolynomial.from_coeffs(K, name, x.grading, coeffs)
            _require_homogeneous(f_x)
            return MinimalPolynomialRecord(x, K, f_x)
    raise GradescentError("no minimal polynomial found below the degree bound")


def _power_index_space(L, level):
    """Index tuples (k_low..k_top) for the monomial basis of the algebraic
    layers above `level`, matching _flatten_to_level's key orientation."""
    idx = [()]
    for layer in reversed(L.exts[level:]):
        idx = [t + (k,) for t in idx for k in range(layer.degree)]
    return idx


def _solve_base_linear(base, rows, rhs):
    """Solve sum_i x_i rows[i] = rhs over an abstract base field, or None."""
    if not rows:
        return () if all(base.is_zero(c) for c in rhs) else None
    k = len(rows)
    n = len(rows[0])
    aug = [[rows[i][j] for i in range(k)] + [rhs[j]] for j in range(n)]
    piv_rows = []
    r = 0
    for c in range(k + 1):
        pr = None
        for i in range(r, n):
            if not base.is_zero(aug[i][c]):
                pr = i
                break
        if pr is None:
            continue
        if c == k:
            return None  # pivot lands in the rhs column
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = base.inv(aug[r][c])
        aug[r] = [base.mul(inv, x) for x in aug[r]]
        for i in range(n):
            if i != r and not base.is_zero(aug[i][c]):
                f = aug[i][c]
                aug[i] = [base.sub(x, base.mul(f, y)) for x, y in zip(aug[i], aug[r])]
        piv_rows.append((r, c))
        r += 1
        if r == n:
            break
    sol = [base.zero()] * k
    for r, c in piv_rows:
        sol[c] = aug[r][k]
    return sol


def minimal_polynomial(x, over):
    """The minimal homogeneous polynomial of x over a subtower `over`.

    x must lie in a finite extension of `over` by algebraic layers, with
    `over` a monomial field (so that the forced coefficient gradings reduce
    the power relation to scalar linear algebra over the base field).  The
    output is monic homogeneous of minimal degree, hence irreducible.
    """
    L = x.field
    K = over
    if L.context != K.context or L.base != K.base or L.mono != K.mono:
        raise UndecidableHereError("minimal polynomial only along tower prefixes")
    if L.exts[:len(K.exts)] != K.exts:
        raise UndecidableHereError("fields are not prefix-compatible")
    for layer in L.exts[len(K.exts):]:
        if isinstance(layer, RationalLayer):
            raise UndecidableHereError("element of an infinite extension")
    for layer in K.exts:
        if isinstance(layer, RationalLayer):
            raise UndecidableHereError("coefficient field with a rational layer")
        raise UndecidableHereError("coefficient field must be a monomial field")
    if x.is_zero():
        raise GradescentError("minimal polynomial of zero")
    from .gfield import _d_grading

    base = K.base
    level = K.level
    deg = 1
    for layer in L.exts[level:]:
        deg *= layer.degree
    basis_idx = _power_index_space(L, level)
    pos = {idx: i for i, idx in enumerate(basis_idx)}
    g = x.grading

    def comp_scalars(p):
        """K-components of a power of x: (lattice coords, base scalar) per
        basis index; None where zero."""
        out = [None] * len(basis_idx)
        if p.is_zero():
            return out
        for idx, cdata in _flatten_to_level(L, p.data, level).items():
            coeff, coords = cdata  # K is a monomial field: data is a monomial
            out[pos[idx]] = (coords, coeff)
        return out

    powers = [L.one()]
    for _ in range(deg):
        powers.append(powers[-1] * x)
    comp = [comp_scalars(p) for p in powers]
    for n in range(1, deg + 1):
        # unknown c_j of forced grading g^(n-j); positions without a lattice
        # witness are forced to zero
        wits = []
        cols = []
        for j in range(n):
            w = witness_for_grading(K, g ** (n - j))
            if w is not None:
                wits.append((j, w))
        rows = []
        rhs = []
        consistent = True
        for bpos in range(len(basis_idx)):
            target = comp[n][bpos]
            row_entries = []
            for j, w in wits:
                entry = comp[j][bpos]
                if entry is None:
                    row_entries.append(base.zero())
                    continue
                prod = HomogeneousElement(K, (entry[1], entry[0]),
                                          _d_grading(K, 0, (entry[1], entry[0]))) * w
                row_entries.append(prod.data[0] if prod.data else base.zero())
            trg = base.zero() if target is None else target[1]
            # lattice consistency: nonzero entries must share the target's
            # monomial; gradings force this, but verify cheaply
            rows.append(row_entries)
            rhs.append(trg)
        if not consistent:
            continue
        # transpose into solver convention (rows = unknown vectors)
        mat = [[rows[b][i] for b in range(len(basis_idx))] for i in range(len(wits))]
        sol = _solve_base_linear(base, mat, rhs)
        if sol is None:
            continue
        coeffs = [K.zero()] * n + [K.one()]
        for (j, w), z in zip(wits, sol):
            if not base.is_zero(z):
                coeffs[j] = -(K.scalar(z) * w)
        f_x = GradedPolynomial.from_coeffs(K, "T", g, coeffs)
        _require_homogeneous(f_x)
        # confirm it annihilates x (guards the lattice-consistency shortcut)
        inc = FieldEmbedding(K, L)
        val = L.zero()
        for i, c in enumerate(f_x.coeffs()):
            if not c.is_zero():
                val = val + inc.apply(c) * x ** i
        if val.is_zero():
            return MinimalPolynomialRecord(x, K, f_x)
    raise GradescentError("no minimal polynomial found below the degree bound")
