"""Graded valuations on graded fields.

Additive convention throughout: a valuation takes homogeneous elements to
Q^r with the lexicographic order (v(0) = oo), is linear on the monomial
lattice, follows the Gauss (min) rule on rational layers and base function
variables, and extends to algebraic layers only in validated classes
(totally ramified single-slope, or irreducible-residue).  The valuation
ring O_v consists of the homogeneous elements of value >= 0 and sums
thereof; 'in the ring' is decided per homogeneous element.

Points of P_{K/k} are valuations trivial on an embedded subfield k.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import lcm

from . import linalg
from .errors import (
    GradescentError,
    UndecidableHereError,
    UnsupportedLayerError,
)
from .gfield import (
    AlgebraicLayer,
    FieldEmbedding,
    FieldSquare,
    GradedField,
    HomogeneousElement,
    RationalLayer,
    embedded_coordinate_span,
    general_position,
    laurent_coordinates,
    field_coordinate_span,
    coord_dim,
)
from .grading import INF, ValueGroup, value_add, value_cmp, value_min, value_scale


def _zero_value(rank):
    return (Fraction(0),) * rank


def _pad(value, rank):
    if value is INF:
        return INF
    value = tuple(Fraction(x) for x in value)
    if len(value) > rank:
        raise GradescentError("value rank overflow")
    return value + (Fraction(0),) * (rank - len(value))


class GradedValuation:
    """A graded valuation presented by values on the tower generators."""

    __slots__ = ("field", "rank", "mono_values", "base_var_values", "ext_values")

    def __init__(self, field, rank, mono_values=(), base_var_values=None,
                 ext_values=None):
        self.field = field
        self.rank = int(rank)
        mv = tuple(_pad(v, rank) for v in mono_values)
        if len(mv) != field.mono.rank():
            raise GradescentError("one value per monomial basis vector required")
        self.mono_values = mv
        bv = dict(base_var_values or {})
        self.base_var_values = {
            name: _pad(bv.get(name, _zero_value(rank)), rank)
            for name in field.base.variables
        }
        ev = dict(ext_values or {})
        vals = {}
        for layer in field.exts:
            if layer.name in ev and ev[layer.name] is not None:
                vals[layer.name] = _pad(ev[layer.name], rank)
            else:
                vals[layer.name] = None  # unsupported / unassigned
        self.ext_values = vals

    @property
    def value_group(self):
        return ValueGroup(self.rank)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, elt):
        return self.eval(elt)

    def eval(self, elt):
        if not isinstance(elt, HomogeneousElement) or elt.field != self.field:
            raise GradescentError("element of a different field")
        if elt.is_zero():
            return INF
        return self._eval_data(self.field.level, elt.data)

    def _eval_data(self, j, data):
        if data is None:
            return INF
        if j == 0:
            c, coords = data
            val = self._eval_base(c)
            for q, v in zip(coords, self.mono_values):
                if q:
                    val = value_add(val, value_scale(q, v))
            return val
        layer = self.field.exts[j - 1]
        tval = self.ext_values[layer.name]
        if isinstance(layer, RationalLayer):
            if tval is None:
                raise UnsupportedLayerError(f"no value assigned to {layer.name}")
            num, den = data
            return value_add(self._gauss(j - 1, num, tval),
                             value_scale(-1, self._gauss(j - 1, den, tval)))
        if any(x is not None for x in data[1:]):
            if tval is None:
                raise UnsupportedLayerError(
                    f"algebraic layer {layer.name} has no validated assignment")
            return self._gauss(j - 1, data, tval)
        return self._eval_data(j - 1, data[0])

    def _gauss(self, j, coeffs, tval):
        best = INF
        for i, c in enumerate(coeffs):
            if c is None:
                continue
            v = value_add(self._eval_data(j, c), value_scale(i, tval))
            if value_cmp(v, best) < 0:
                best = v
        return best

    def _eval_base(self, c):
        base = self.field.base
        if base.kind in ("Q", "Fp"):
            return _zero_value(self.rank)
        num, den = c
        return value_add(self._gauss_base(num), value_scale(-1, self._gauss_base(den)))

    def _gauss_base(self, poly):
        base = self.field.base
        best = INF
        for exps in poly:
            v = _zero_value(self.rank)
            for e, name in zip(exps, base.variables):
                if e:
                    v = value_add(v, value_scale(e, self.base_var_values[name]))
            if value_cmp(v, best) < 0:
                best = v
        return best

    # -- derived data ---------------------------------------------------------

    def generator_values(self):
        """(label, value) pairs over all tower generators."""
        out = []
        for name in self.field.base.variables:
            out.append((("var", name), self.base_var_values[name]))
        for i, b in enumerate(self.field.mono.basis):
            out.append((("mono", i), self.mono_values[i]))
        for layer in self.field.exts:
            out.append((("ext", layer.name), self.ext_values[layer.name]))
        return out

    def value_lattice_rows(self):
        """Value vectors of the tower generators (rational rank data)."""
        rows = [v for _, v in self.generator_values() if v is not None]
        return rows

    def __eq__(self, other):
        if not isinstance(other, GradedValuation):
            return NotImplemented
        return (self.field == other.field and self.rank == other.rank
                and self.mono_values == other.mono_values
                and self.base_var_values == other.base_var_values
                and self.ext_values == other.ext_values)

    def __hash__(self):
        return hash((self.field, self.rank, self.mono_values))

    def __repr__(self):
        parts = []
        for label, v in self.generator_values():
            name = label[1] if label[0] != "mono" else f"X({self.field.mono.basis[label[1]]})"
            from .grading import value_str

            parts.append(f"v({name})={value_str(v) if v is not None else '?'}")
        return "val[" + ", ".join(parts) + "]"

    @classmethod
    def trivial(cls, field):
        return cls(field, 0, [()] * field.mono.rank(),
                   {n: () for n in field.base.variables},
                   {l.name: () for l in field.exts})

    def with_rank(self, rank):
        """Same valuation with values padded into Q^rank."""
        if rank < self.rank:
            raise GradescentError("cannot shrink the value rank")
        return GradedValuation(
            self.field, rank, [_pad(v, rank) for v in self.mono_values],
            {n: _pad(v, rank) for n, v in self.base_var_values.items()},
            {n: (None if v is None else _pad(v, rank))
             for n, v in self.ext_values.items()},
        )


@dataclass(frozen=True)
class ValuationPoint:
    """A point of P_{K/k}: a graded valuation on K trivial on the embedded k."""

    valuation: GradedValuation
    over: FieldEmbedding

    def __post_init__(self):
        if self.over.target != self.valuation.field:
            raise GradescentError("base embedding does not land in the valued field")
        from .gfield import _tower_generators

        for gen in _tower_generators(self.over.source):
            img = self.over.apply(gen)
            if value_cmp(self.valuation.eval(img), _zero_value(self.valuation.rank)) != 0:
                raise GradescentError("valuation is not trivial on the base subfield")

    @property
    def field(self):
        return self.valuation.field

    def eval(self, elt):
        return self.valuation.eval(elt)

    def in_ring(self, elt):
        """f in O_v, i.e. v(f) >= 0 (0 included: v(0) = oo)."""
        v = self.valuation.eval(elt)
        return v is INF or value_cmp(v, _zero_value(self.valuation.rank)) >= 0


def in_ring(point, elt):
    return point.in_ring(elt)


# ---------------------------------------------------------------------------
# construction helpers


def trivial_point(K, over=None):
    emb = over if over is not None else FieldEmbedding(
        GradedField.monomial_field(K.context, K.base), K)
    return ValuationPoint(GradedValuation.trivial(K), emb)


def monomial_valuation(K, mono_values, rank, base_var_values=None, ext_values=None):
    return GradedValuation(K, rank, mono_values, base_var_values, ext_values)


def gauss_extend(v, variables):
    """Extend a valuation to rational layers T_1..T_n with prescribed values.

    variables: sequence of (name, grading, value).  The value rank grows as
    needed; the result satisfies the Gauss (min) rule and is multiplicative.
    """
    K = v.field
    rank = v.rank
    for _, _, val in variables:
        rank = max(rank, len(tuple(val)))
    L = K
    ext_values = {n: (None if w is None else w) for n, w in v.ext_values.items()}
    for name, grading, val in variables:
        L = L.with_rational_layer(name, grading)
        ext_values[name] = _pad(val, rank)
    return GradedValuation(
        L, rank, [_pad(x, rank) for x in v.mono_values],
        {n: _pad(x, rank) for n, x in v.base_var_values.items()},
        ext_values,
    )


def restrict(v, emb):
    """Restriction of a valuation along a field embedding, re-presented by
    values on the source's tower generators.

    Exact on the decidable class (generator images that are Laurent
    monomials in an injectively graded target, where homogeneous elements
    are single monomials and no Gauss cancellation can occur)."""
    src = emb.source
    if emb.target != v.field:
        raise GradescentError("embedding does not land in the valued field")
    mono_values = [v.eval(emb.images[("mono", i)])
                   for i in range(src.mono.rank())]
    base_var_values = {name: v.eval(emb.images[("var", name)])
                       for name in src.base.variables}
    ext_values = {}
    for layer in src.exts:
        ext_values[layer.name] = v.eval(emb.images[("ext", layer.name)])
    return GradedValuation(src, v.rank, mono_values, base_var_values, ext_values)


def restrict_point(point, emb, over=None):
    """Restrict a ValuationPoint along K -> L; `over` defaults to the same
    base subfield embedded into the source."""
    w = restrict(point.valuation, emb)
    if over is None:
        over = FieldEmbedding(point.over.source, emb.source)
    return ValuationPoint(w, over)


# ---------------------------------------------------------------------------
# domination on the monomial class


@dataclass(frozen=True)
class MonomialLocalRing:
    """base[M] localized at the homogeneous prime of a face: the monoid
    generators are lattice vectors of the field's monomial subgroup, and
    `face` lists the generator indices that stay invertible."""

    field: GradedField
    generators: tuple
    face: frozenset

    def __post_init__(self):
        object.__setattr__(self, "generators",
                           tuple(tuple(int(x) for x in g) for g in self.generators))
        object.__setattr__(self, "face", frozenset(self.face))
        for i in self.face:
            if not 0 <= i < len(self.generators):
                raise GradescentError("face index out of range")


def dominates(point, ring):
    """Does the valuation ring of `point` dominate the local ring?

    O_v >= R_p needs v >= 0 on the monoid and v = 0 on the face; domination
    additionally pulls the maximal ideal back correctly, which on this class
    means v > 0 on the non-face generators."""
    v = point.valuation
    zero = _zero_value(v.rank)
    gens = ring.generators
    for i, g in enumerate(gens):
        val = _eval_lattice(v, ring.field, g)
        c = value_cmp(val, zero)
        if i in ring.face:
            if c != 0:
                return False
        else:
            if c <= 0:
                return False
    return True


def _eval_lattice(v, K, lattice_vec):
    """Value of the monomial with the given mono-subgroup coordinates."""
    val = _zero_value(v.rank)
    for q, w in zip(lattice_vec, v.mono_values):
        if q:
            val = value_add(val, value_scale(q, w))
    return val


def find_dominating_valuation(ring, over=None):
    """A lex monomial valuation whose ring dominates the given local ring,
    built by refining the face structure level by level."""
    K = ring.field
    m = K.mono.rank()
    face_vecs = [ring.generators[i] for i in sorted(ring.face)]
    other = [g for i, g in enumerate(ring.generators) if i not in ring.face]
    rows = linalg.lex_functional(
        m,
        zeros=face_vecs,
        nonneg=list(ring.generators),
        negs=[tuple(-x for x in g) for g in other],
    ) if other else [tuple(Fraction(0) for _ in range(m))]
    if rows is None:
        raise GradescentError("face structure admits no refining valuation")
    rank = len(rows)
    mono_values = []
    for i in range(m):
        unit = [0] * m
        unit[i] = 1
        mono_values.append(tuple(linalg.vdot(row, unit) for row in rows))
    v = GradedValuation(K, rank, mono_values)
    emb = over if over is not None else FieldEmbedding(
        GradedField.monomial_field(K.context, K.base), K)
    return ValuationPoint(v, emb)


# ---------------------------------------------------------------------------
# lifting across field squares (the surjectivity mechanism)


@dataclass(frozen=True)
class NonLiftableCertificate:
    """Witness that a point of P_{K/k} has no preimage in P_{L/l}: a set t
    of K-elements independent over k but dependent over l, carrying a
    valuation of rational rank exceeding trdeg_l(l(t))."""

    point: ValuationPoint
    t_elements: tuple
    rational_rank: int
    trdeg_over_l: int

    def is_arithmetically_valid(self):
        return self.rational_rank > self.trdeg_over_l


def square_general_position(sq):
    k_to_L = sq.l_to_L.compose(sq.k_to_l)
    return general_position(sq.l_to_L, sq.K_to_L, k_to_L)


def lift_along_square(sq, point):
    """Lift a point of P_{K/k} to a point of P_{L/l} restricting back to it.

    Constructive when l and K are in general position (choose a
    transcendence basis of l, give it Gauss value 0, solve for a linear
    extension of the values); otherwise the non-liftability certificate is
    returned instead."""
    if not square_general_position(sq):
        return witness_nonsurjectivity(sq)
    v = point.valuation
    if v.field != sq.K:
        raise GradescentError("point does not live on the square's K")
    L = sq.L
    dim = coord_dim(L)
    # equations: values on K-generator images; zero on l-generator images
    rows = []
    rhs_per_coord = [[] for _ in range(v.rank)]
    K_gens = _generator_images_coords(sq.K_to_L)
    l_gens = _generator_images_coords(sq.l_to_L)
    for vec, val in zip(K_gens["vecs"], _generator_value_list(v)):
        rows.append(vec)
        for j in range(v.rank):
            rhs_per_coord[j].append(val[j])
    for vec in l_gens["vecs"]:
        rows.append(vec)
        for j in range(v.rank):
            rhs_per_coord[j].append(Fraction(0))
    phi_rows = []
    cols = list(zip(*rows)) if rows else []
    for j in range(v.rank):
        sol = linalg.solve_linear(cols, rhs_per_coord[j]) if cols else None
        if sol is None:
            raise GradescentError("value extension system inconsistent")
        phi_rows.append(tuple(sol))
    w = _valuation_from_linear_map(L, phi_rows)
    over = sq.l_to_L if isinstance(sq.l_to_L, FieldEmbedding) else None
    return ValuationPoint(w, sq.l_to_L)


def _generator_value_list(v):
    vals = []
    for name in v.field.base.variables:
        vals.append(v.base_var_values[name])
    for i in range(v.field.mono.rank()):
        vals.append(v.mono_values[i])
    for layer in v.field.exts:
        val = v.ext_values[layer.name]
        if val is None:
            raise UnsupportedLayerError("cannot lift an unassigned layer value")
        vals.append(val)
    return vals


def _generator_images_coords(emb):
    labels = []
    vecs = []
    src = emb.source
    for name in src.base.variables:
        labels.append(("var", name))
    for i in range(src.mono.rank()):
        labels.append(("mono", i))
    for layer in src.exts:
        labels.append(("ext", layer.name))
    for label in labels:
        img = emb.images[label]
        vec = laurent_coordinates(img)
        if vec is None:
            raise UndecidableHereError("generator image is not a Laurent monomial")
        vecs.append(vec)
    return {"labels": list(zip(labels, vecs)), "vecs": vecs}


def _valuation_from_linear_map(L, phi_rows):
    """Valuation on L whose generator values are phi applied to their
    coordinate vectors."""
    rank = len(phi_rows)
    c = len(L.base.variables)
    mono_values = []
    base_var_values = {}
    ext_values = {}
    for i, name in enumerate(L.base.variables):
        vec = _unit_vec(coord_dim(L), i)
        base_var_values[name] = tuple(linalg.vdot(row, vec) for row in phi_rows)
    for i, b in enumerate(L.mono.basis):
        vec = laurent_coordinates(L.chi(b))
        mono_values.append(tuple(linalg.vdot(row, vec) for row in phi_rows))
    for layer in L.exts:
        if isinstance(layer, RationalLayer):
            vec = laurent_coordinates(L.gen(layer.name))
            ext_values[layer.name] = tuple(linalg.vdot(row, vec) for row in phi_rows)
        else:
            ext_values[layer.name] = None
    return GradedValuation(L, rank, mono_values, base_var_values, ext_values)


def _unit_vec(n, i):
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return tuple(v)


def witness_nonsurjectivity(sq):
    """A point of P_{K/k} with no preimage in P_{L/l}, plus the Abhyankar
    certificate.  Requires general position to fail."""
    if square_general_position(sq):
        raise GradescentError("general position holds; no witness exists")
    k_to_L = sq.l_to_L.compose(sq.k_to_l)
    v_k = embedded_coordinate_span(k_to_L)
    v_l = embedded_coordinate_span(sq.l_to_L)
    K_data = _generator_images_coords(sq.K_to_L)
    # greedy: grow a set independent over k until it goes dependent over l
    chosen = []   # (label, coord vec in L)
    span_k = list(v_k)
    span_l = list(v_l) + list(v_k)
    t_labels = None
    for (label, vec) in K_data["labels"]:
        if linalg.qrank(span_k + [vec]) == linalg.qrank(span_k):
            continue
        if linalg.qrank(span_l + [vec]) == linalg.qrank(span_l):
            chosen.append((label, vec))
            t_labels = list(chosen)
            break
        chosen.append((label, vec))
        span_k.append(vec)
        span_l.append(vec)
    if t_labels is None:
        raise GradescentError("failed to extract a dependence witness set")
    n = len(t_labels)
    # lex values: t_i gets the i-th standard value; solve for a linear map
    # on K's own coordinates vanishing on k
    K = sq.K
    dimK = coord_dim(K)
    k_in_K = embedded_coordinate_span(sq.k_to_K)
    # coordinates of the chosen generators inside K itself
    own = {}
    for name in K.base.variables:
        own[("var", name)] = laurent_coordinates(K.base_variable(name))
    for i, b in enumerate(K.mono.basis):
        own[("mono", i)] = laurent_coordinates(K.chi(b))
    for layer in K.exts:
        if isinstance(layer, RationalLayer):
            own[("ext", layer.name)] = laurent_coordinates(K.gen(layer.name))
    rows = [own[label] for label, _ in t_labels] + list(k_in_K)
    phi_rows = []
    cols = list(zip(*rows))
    for j in range(n):
        rhs = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        rhs += [Fraction(0)] * len(k_in_K)
        sol = linalg.solve_linear(cols, rhs)
        if sol is None:
            raise GradescentError("witness value system inconsistent")
        phi_rows.append(tuple(sol))
    w = _valuation_from_linear_map(K, phi_rows)
    pt = ValuationPoint(w, sq.k_to_K)
    t_elements = tuple(_element_for_label(K, label) for label, _ in t_labels)
    rank_l = linalg.qrank(list(v_l) + [vec for _, vec in t_labels]) - linalg.qrank(v_l)
    return NonLiftableCertificate(pt, t_elements, n, rank_l)


def _element_for_label(K, label):
    kind, key = label
    if kind == "var":
        return K.base_variable(key)
    if kind == "mono":
        return K.chi(K.mono.basis[key])
    return K.gen(key)


# ---------------------------------------------------------------------------
# extensions to algebraic layers


def extend_algebraic(v, L):
    """All extensions of v to L = K[t]/(f) in the supported classes.

    Newton polygon analysis of the minimal polynomial: a single slope is
    required; the extension is unique and Gauss-evaluable either when
    totally ramified (slope denominator = degree) or when the residue
    polynomial is irreducible over the graded residue field.  Reducible
    residues raise UnsupportedLayerError (multiple extensions would need
    completion-side machinery)."""
    K = v.field
    if L.prefix(L.level - 1) != K:
        raise GradescentError("L must extend the valued field by one layer")
    layer = L.exts[-1]
    if not isinstance(layer, AlgebraicLayer):
        raise GradescentError("top layer is not algebraic")
    from .gfield import _d_grading

    d = layer.degree
    coeff_vals = []
    for i, cdata in enumerate(layer.minpoly):
        if cdata is None:
            coeff_vals.append(None)
            continue
        coeff = HomogeneousElement(K, cdata, _d_grading(K, K.level, cdata))
        coeff_vals.append(v.eval(coeff))
    # Newton polygon: points (i, v(a_i)); single slope means every point
    # lies on or above the segment from (0, v(a_0)) to (d, 0)
    if coeff_vals[0] is None or coeff_vals[0] is INF:
        raise UnsupportedLayerError("zero constant term in a minimal polynomial")
    lam = value_scale(Fraction(1, d), coeff_vals[0])
    for i in range(1, d):
        if coeff_vals[i] is None or coeff_vals[i] is INF:
            continue
        # need v(a_i) >= (d - i) * lam, strict single-slope on the hull
        if value_cmp(coeff_vals[i], value_scale(d - i, lam)) < 0:
            raise UnsupportedLayerError("multi-slope Newton polygon")
    # totally ramified test: order of lam modulo the value lattice of v
    e = _value_order(v, lam)
    if e == d:
        return [_extended(v, L, layer, lam)]
    # residue test: normalize by a monomial of value lam and factor the
    # residue polynomial over the graded residue field
    if not _residue_irreducible(v, L, layer, coeff_vals, lam):
        raise UnsupportedLayerError(
            "residue polynomial splits: extension not in the supported class")
    return [_extended(v, L, layer, lam)]


def _extended(v, L, layer, lam):
    ext_values = dict(v.ext_values)
    ext_values[layer.name] = lam
    return GradedValuation(L, v.rank, v.mono_values, v.base_var_values, ext_values)


def _value_order(v, lam):
    """Least e >= 1 with e*lam in the value lattice of v's generators, or a
    sentinel larger than any layer degree when lam is not in the Q-span."""
    rows = [r for r in v.value_lattice_rows() if any(x != 0 for x in r)]
    den = 1
    for r in rows + [lam]:
        for x in r:
            den = lcm(den, Fraction(x).denominator)
    int_rows = [tuple(int(x * den) for x in r) for r in rows]
    target = tuple(int(x * den) for x in lam)
    if not int_rows:
        return 1 if all(x == 0 for x in target) else 1 << 30
    basis, pivots = linalg.hnf_rows(int_rows)
    for e in range(1, 64):
        if linalg.lattice_member(basis, pivots, tuple(e * x for x in target)):
            return e
    return 1 << 30


def _residue_irreducible(v, L, layer, coeff_vals, lam):
    """Factor the residue of the minimal polynomial over the graded residue
    field of v (a monomial field over the same base)."""
    K = v.field
    if K.exts:
        raise UnsupportedLayerError("residue analysis only over monomial fields")
    if any(value_cmp(val, _zero_value(v.rank)) != 0
           for val in v.base_var_values.values()):
        raise UnsupportedLayerError("residue analysis needs trivial function-variable values")
    # monomial m with v(m) = lam (for normalization)
    m_coords = _monomial_with_value(v, lam)
    if m_coords is None:
        raise UnsupportedLayerError("no monomial of the slope value")
    from .gpoly import GradedPolynomial, factor
    from .gfield import _d_grading

    # residue field: monomials of value 0
    ker = _value_kernel_sublattice(v)
    res_field = GradedField.monomial_field(K.context, K.base, ker)
    d = layer.degree
    res_coeffs = []
    for i, cdata in enumerate(layer.minpoly):
        if cdata is None:
            res_coeffs.append(res_field.zero())
            continue
        val = coeff_vals[i]
        if value_cmp(val, value_scale(d - i, lam)) > 0:
            res_coeffs.append(res_field.zero())
            continue
        # residue of a_i / m^(d-i): a monomial of value 0
        c, coords = cdata
        shifted = tuple(a - (d - i) * b for a, b in zip(coords, m_coords))
        g = K.context.one()
        for q, bvec in zip(shifted, K.mono.basis):
            if q:
                g = g * bvec ** q
        if not ker.contains(g):
            raise UnsupportedLayerError("residue monomial escapes the residue lattice")
        res_coeffs.append(res_field.monomial(c, g))
    tgrad = layer.grading
    mgrad = K.context.one()
    for q, bvec in zip(m_coords, K.mono.basis):
        if q:
            mgrad = mgrad * bvec ** q
    rf = GradedPolynomial.from_coeffs(res_field, "S", tgrad / mgrad, res_coeffs)
    _, factors = factor(rf)
    return len(factors) == 1 and factors[0][1] == 1


def _monomial_with_value(v, lam):
    rows = v.mono_values
    den = 1
    for r in list(rows) + [lam]:
        for x in r:
            den = lcm(den, Fraction(x).denominator)
    int_rows = [tuple(int(x * den) for x in r) for r in rows]
    target = tuple(int(x * den) for x in lam)
    return linalg.integer_solve(int_rows, target)


def _value_kernel_sublattice(v):
    """Sublattice of the mono subgroup with value zero."""
    K = v.field
    m = K.mono.rank()
    rows = []
    den = 1
    for val in v.mono_values:
        for x in val:
            den = lcm(den, Fraction(x).denominator)
    for j in range(v.rank):
        rows.append([int(v.mono_values[i][j] * den) for i in range(m)])
    kernel = linalg.integer_kernel(rows) if rows else [
        tuple(1 if i == j else 0 for j in range(m)) for i in range(m)]
    gens = []
    for vec in kernel:
        g = K.context.one()
        for q, b in zip(vec, K.mono.basis):
            if q:
                g = g * b ** q
        gens.append(g)
    from .grading import GradingSubgroup

    return GradingSubgroup(K.context, gens)


def unique_extension_torsion(point, L):
    """The unique extension of a point along a torsion monomial enlargement:
    every homogeneous element of L has a positive power in K, so values are
    forced by division."""
    v = point.valuation
    K = v.field
    if L.context != K.context or L.base != K.base or L.exts != K.exts:
        raise UndecidableHereError("torsion extension only for monomial enlargements")
    mono_values = []
    for b in L.mono.basis:
        n = K.mono.power_order(b)
        if n is None:
            raise UndecidableHereError("quotient is not torsion")
        big = b ** n
        val = _eval_lattice_via_subgroup(v, K, big)
        mono_values.append(value_scale(Fraction(1, n), val))
    w = GradedValuation(L, v.rank, mono_values, v.base_var_values,
                        {l.name: v.ext_values[l.name] for l in L.exts})
    over = FieldEmbedding(point.over.source, L)
    return ValuationPoint(w, over)


def _eval_lattice_via_subgroup(v, K, g):
    coords = K._mono_coords(g)
    if coords is None:
        raise GradescentError("element outside the source lattice")
    return _eval_lattice(v, K, coords)


def abhyankar_check(point, K=None):
    """(rational rank of the value group, trdeg over the base, ok flag)."""
    from .gfield import trdeg as trdeg_op

    v = point.valuation
    K = K or v.field
    rows = [r for r in v.value_lattice_rows() if any(x != 0 for x in r)]
    rank = linalg.qrank(rows)
    t, _ = trdeg_op(point.over if point.over.target == K else FieldEmbedding(
        point.over.source, K))
    return rank, t, rank <= t
