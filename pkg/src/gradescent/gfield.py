"""Graded fields as extension towers, and exact arithmetic on their
homogeneous elements.

A graded field is presented as a tower

    base field  ->  base[H]  ->  layer_1  ->  ...  ->  layer_n

where base is Q, F_p or a rational function field over one of these (all
1-graded), base[H] is the group field on a finitely generated subgroup H of
the grading group (its homogeneous elements are the monomials c*chi(h)), and
each further layer adjoins either a transcendental homogeneous generator of
prescribed grading (rational layer, the field being the graded fraction
field) or a root of a monic irreducible homogeneous polynomial (algebraic
layer).

Homogeneous elements are kept in a normal form mirroring the tower:
monomials at the bottom, reduced fractions with monic denominators at
rational layers, representatives of degree < deg(f) at algebraic layers.
Equality of elements is equality of normal forms; equality of fields is
presentation equality.  Everything is immutable.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import basefield as bf
from . import linalg
from .errors import (
    ContextMismatchError,
    GradescentError,
    GradingMismatchError,
    UndecidableHereError,
    UnsupportedLayerError,
)
from .grading import GradingElement, GradingSubgroup

INFINITE = math.inf


@dataclass(frozen=True, slots=True)
class RationalLayer:
    name: str
    grading: GradingElement


@dataclass(frozen=True, slots=True)
class AlgebraicLayer:
    name: str
    grading: GradingElement
    minpoly: tuple  # coefficient data at the level below, low degree first, monic

    @property
    def degree(self):
        return len(self.minpoly) - 1


class GradedField:
    """A graded field presented by its tower."""

    __slots__ = ("context", "base", "mono", "exts", "_prefixes")

    def __init__(self, context, base, mono=None, exts=()):
        self.context = context
        self.base = base
        self.mono = mono if mono is not None else GradingSubgroup(context, ())
        self.exts = tuple(exts)
        self._prefixes = {}

    # -- construction -----------------------------------------------------

    @classmethod
    def monomial_field(cls, context, base, subgroup=None):
        return cls(context, base, subgroup)

    def with_rational_layer(self, name, grading):
        self._check_fresh_name(name)
        return GradedField(self.context, self.base, self.mono,
                           self.exts + (RationalLayer(name, grading),))

    def _with_algebraic_layer_raw(self, name, grading, minpoly_data):
        """Internal: append an algebraic layer from validated coefficient
        data.  Irreducibility is the caller's responsibility (gpoly checks it
        at the public construction point)."""
        self._check_fresh_name(name)
        return GradedField(self.context, self.base, self.mono,
                           self.exts + (AlgebraicLayer(name, grading, tuple(minpoly_data)),))

    def _check_fresh_name(self, name):
        if name in self.generator_names():
            raise GradescentError(f"generator name {name!r} already used")

    def generator_names(self):
        names = list(self.base.variables)
        names.extend(layer.name for layer in self.exts)
        return names

    def prefix(self, level):
        """The tower truncated to the first `level` extension layers."""
        if level == len(self.exts):
            return self
        if level not in self._prefixes:
            self._prefixes[level] = GradedField(self.context, self.base,
                                                self.mono, self.exts[:level])
        return self._prefixes[level]

    @property
    def level(self):
        return len(self.exts)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, GradedField):
            return NotImplemented
        return (self.context == other.context and self.base == other.base
                and self.mono == other.mono and self.exts == other.exts)

    def __hash__(self):
        return hash((self.context, self.base, tuple(l.name for l in self.exts)))

    def __repr__(self):
        s = repr(self.base)
        if not self.mono.is_trivial():
            s += f"[{self.mono!r}]"
        for layer in self.exts:
            if isinstance(layer, RationalLayer):
                s += f"({layer.name}:{layer.grading})"
            else:
                s += f"[{layer.name}:{layer.grading}; deg {layer.degree}]"
        return s

    # -- grading data -------------------------------------------------------

    def grading_image(self):
        """rho(K^x): the subgroup of G realized by homogeneous units."""
        gens = list(self.mono.basis)
        for layer in self.exts:
            gens.append(layer.grading)
        return GradingSubgroup(self.context, gens)

    # -- element constructors ------------------------------------------------

    def zero(self):
        return HomogeneousElement(self, None, None)

    def scalar(self, c):
        c = self.base.coerce(c)
        if self.base.is_zero(c):
            return self.zero()
        data = self._lift((c, (0,) * self.mono.rank()), 0, self.level)
        return HomogeneousElement(self, data, self.context.one())

    def one(self):
        return self.scalar(1)

    def chi(self, g):
        """The monomial unit of grading g (g must lie in the mono subgroup)."""
        coords = self._mono_coords(g)
        if coords is None:
            raise GradescentError(f"{g} is not in the monomial subgroup")
        data = self._lift((self.base.one(), coords), 0, self.level)
        return HomogeneousElement(self, data, g)

    def monomial(self, c, g):
        return self.scalar(c) * self.chi(g)

    def base_variable(self, name):
        c = self.base.variable(name)
        data = self._lift((c, (0,) * self.mono.rank()), 0, self.level)
        return HomogeneousElement(self, data, self.context.one())

    def gen(self, name):
        """The generator of the named extension layer, as an element."""
        for j, layer in enumerate(self.exts):
            if layer.name == name:
                below_one = self._one_data(j)
                if isinstance(layer, RationalLayer):
                    data = ((None, below_one), (below_one,))
                elif layer.degree == 1:
                    # the generator of a degree-1 layer is -minpoly[0]
                    return HomogeneousElement(
                        self,
                        self._lift(_d_neg(self, j, layer.minpoly[0]), j, self.level),
                        layer.grading,
                    )
                else:
                    entries = [None] * layer.degree
                    entries[1] = below_one
                    data = tuple(entries)
                return HomogeneousElement(self, self._lift(data, j + 1, self.level),
                                          layer.grading)
        raise GradescentError(f"no extension layer named {name!r}")

    def _mono_coords(self, g):
        if g.context != self.context:
            raise ContextMismatchError("grading from another context")
        sub = self.mono
        exps = tuple(x * sub.denominator for x in g.exponents)
        if any(x.denominator != 1 for x in exps):
            return None
        return linalg.lattice_coords(sub.basis_rows, sub.pivots, tuple(int(x) for x in exps))

    def _one_data(self, level):
        return self._lift((self.base.one(), (0,) * self.mono.rank()), 0, level)

    def _lift(self, data, frm, to):
        for j in range(frm, to):
            layer = self.exts[j]
            if data is None:
                continue
            if isinstance(layer, RationalLayer):
                data = ((data,), (self._one_data(j),))
            else:
                entries = [None] * layer.degree
                entries[0] = data
                data = tuple(entries)
        return data


# ---------------------------------------------------------------------------
# data-level arithmetic
#
# Data at level j (j extension layers active):
#   level 0:   (base coefficient, mono coordinate tuple)     -- a monomial
#   rational:  (num, den) coefficient tuples over level j-1, den monic,
#              gcd(num, den) = 1
#   algebraic: tuple of length deg(f) over level j-1
# The zero element is None at any level.


def _d_is_zero(data):
    return data is None


def _d_add(K, j, a, b):
    if a is None:
        return b
    if b is None:
        return a
    if j == 0:
        c1, h1 = a
        c2, h2 = b
        if h1 != h2:
            raise GradingMismatchError("adding monomials of different gradings")
        c = K.base.add(c1, c2)
        return None if K.base.is_zero(c) else (c, h1)
    layer = K.exts[j - 1]
    if isinstance(layer, RationalLayer):
        n1, d1 = a
        n2, d2 = b
        num = _dp_add(K, j - 1,
                      _dp_mul(K, j - 1, n1, d2),
                      _dp_mul(K, j - 1, n2, d1))
        den = _dp_mul(K, j - 1, d1, d2)
        return _rat_normalize(K, j - 1, num, den)
    out = tuple(_d_add(K, j - 1, x, y) for x, y in zip(a, b))
    return None if all(x is None for x in out) else out


def _d_neg(K, j, a):
    if a is None:
        return None
    if j == 0:
        return (K.base.neg(a[0]), a[1])
    layer = K.exts[j - 1]
    if isinstance(layer, RationalLayer):
        return (tuple(_d_neg(K, j - 1, c) for c in a[0]), a[1])
    return tuple(_d_neg(K, j - 1, c) for c in a)


def _d_mul(K, j, a, b):
    if a is None or b is None:
        return None
    if j == 0:
        c = K.base.mul(a[0], b[0])
        if K.base.is_zero(c):
            return None
        return (c, tuple(x + y for x, y in zip(a[1], b[1])))
    layer = K.exts[j - 1]
    if isinstance(layer, RationalLayer):
        return _rat_normalize(K, j - 1,
                              _dp_mul(K, j - 1, a[0], b[0]),
                              _dp_mul(K, j - 1, a[1], b[1]))
    prod = _dp_mul(K, j - 1, a, b)
    red = _dp_rem(K, j - 1, list(prod), list(layer.minpoly))
    return _alg_pack(layer, red)


def _d_inv(K, j, a):
    if a is None:
        raise ZeroDivisionError("inverse of zero")
    if j == 0:
        return (K.base.inv(a[0]), tuple(-x for x in a[1]))
    layer = K.exts[j - 1]
    if isinstance(layer, RationalLayer):
        return _rat_normalize(K, j - 1, a[1], a[0])
    # extended Euclid against the minimal polynomial
    s = _dp_inverse_mod(K, j - 1, list(a), list(layer.minpoly))
    return _alg_pack(layer, s)


def _alg_pack(layer, coeffs):
    entries = list(coeffs) + [None] * (layer.degree - len(coeffs))
    entries = entries[:layer.degree]
    return None if all(x is None for x in entries) else tuple(entries)


def _rat_normalize(K, j, num, den):
    """Reduce num/den over level j: cancel the gcd, make den monic."""
    num = _dp_trim(num)
    den = _dp_trim(den)
    if not den:
        raise ZeroDivisionError("zero denominator in rational layer")
    if not num:
        return None
    g = _dp_gcd(K, j, list(num), list(den))
    if len(g) > 1:
        num = _dp_div_exact(K, j, list(num), g)
        den = _dp_div_exact(K, j, list(den), g)
    lead = den[-1]
    lead_inv = _d_inv(K, j, lead)
    num = tuple(_d_mul(K, j, c, lead_inv) if c is not None else None for c in num)
    den = tuple(_d_mul(K, j, c, lead_inv) if c is not None else None for c in den)
    return (num, den)


# polynomial helpers over data coefficients (univariate, low degree first)


def _dp_trim(f):
    f = list(f)
    while f and f[-1] is None:
        f.pop()
    return tuple(f)


def _dp_add(K, j, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else None
        b = g[i] if i < len(g) else None
        out.append(_d_add(K, j, a, b))
    return _dp_trim(out)


def _dp_mul(K, j, f, g):
    f = _dp_trim(f)
    g = _dp_trim(g)
    if not f or not g:
        return ()
    out = [None] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a is None:
            continue
        for k, b in enumerate(g):
            if b is None:
                continue
            out[i + k] = _d_add(K, j, out[i + k], _d_mul(K, j, a, b))
    return _dp_trim(out)


def _dp_divmod(K, j, f, g):
    f = list(_dp_trim(f))
    g = list(_dp_trim(g))
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    q = [None] * max(0, len(f) - len(g) + 1)
    lead_inv = _d_inv(K, j, g[-1])
    while len(f) >= len(g) and f:
        c = _d_mul(K, j, f[-1], lead_inv)
        d = len(f) - len(g)
        q[d] = c
        for i in range(len(g)):
            if g[i] is not None:
                f[d + i] = _d_add(K, j, f[d + i], _d_neg(K, j, _d_mul(K, j, c, g[i])))
        while f and f[-1] is None:
            f.pop()
    return _dp_trim(q), _dp_trim(f)


def _dp_rem(K, j, f, g):
    return _dp_divmod(K, j, f, g)[1]


def _dp_div_exact(K, j, f, g):
    q, r = _dp_divmod(K, j, f, g)
    if r:
        raise GradescentError("inexact polynomial division in tower")
    return q


def _dp_gcd(K, j, f, g):
    a, b = _dp_trim(f), _dp_trim(g)
    while b:
        a, b = b, _dp_rem(K, j, list(a), list(b))
    if not a:
        return ()
    lead_inv = _d_inv(K, j, a[-1])
    return tuple(_d_mul(K, j, c, lead_inv) if c is not None else None for c in a)


def _dp_inverse_mod(K, j, f, mod):
    """Inverse of f modulo mod via the extended Euclidean algorithm."""
    r0, r1 = _dp_trim(mod), _dp_trim(f)
    one = K._one_data(j)
    s0, s1 = (), (one,)
    while r1:
        q, r = _dp_divmod(K, j, list(r0), list(r1))
        r0, r1 = r1, r
        s0, s1 = s1, _dp_add(K, j, s0, _dp_mul(K, j, q, tuple(_d_neg(K, j, c) if c is not None else None for c in s1)))
    if len(r0) != 1:
        raise ZeroDivisionError("element not invertible modulo minimal polynomial")
    lead_inv = _d_inv(K, j, r0[0])
    return tuple(_d_mul(K, j, c, lead_inv) if c is not None else None for c in s0)


def _d_grading(K, j, data):
    """Grading of nonzero data at level j, as a GradingElement."""
    if data is None:
        return None
    if j == 0:
        coords = data[1]
        g = K.context.one()
        basis = K.mono.basis
        for c, b in zip(coords, basis):
            if c:
                g = g * b ** c
        return g
    layer = K.exts[j - 1]
    if isinstance(layer, RationalLayer):
        num, den = data
        gn = _first_term_grading(K, j - 1, num, layer.grading)
        gd = _first_term_grading(K, j - 1, den, layer.grading)
        return gn / gd
    return _first_term_grading(K, j - 1, data, layer.grading)


def _first_term_grading(K, j, coeffs, var_grading):
    for i, c in enumerate(coeffs):
        if c is not None:
            return _d_grading(K, j, c) * var_grading ** i
    raise GradescentError("grading of zero")


def _d_validate(K, j, data):
    """Check homogeneity of data: every nonzero coefficient pattern must
    yield the same total grading.  Returns the grading."""
    if data is None:
        return None
    if j == 0:
        if K.base.is_zero(data[0]):
            raise GradescentError("zero coefficient stored in monomial")
        return _d_grading(K, 0, data)
    layer = K.exts[j - 1]
    if isinstance(layer, RationalLayer):
        num, den = data
        gn = _poly_validate(K, j - 1, num, layer.grading)
        gd = _poly_validate(K, j - 1, den, layer.grading)
        return gn / gd
    return _poly_validate(K, j - 1, data, layer.grading)


def _poly_validate(K, j, coeffs, var_grading):
    grading = None
    for i, c in enumerate(coeffs):
        if c is None:
            continue
        g = _d_validate(K, j, c) * var_grading ** i
        if grading is None:
            grading = g
        elif grading != g:
            raise GradingMismatchError("inhomogeneous tower element")
    if grading is None:
        raise GradescentError("empty coefficient list")
    return grading


def _d_key(K, j, data):
    """Fully hashable canonical form of data (function-field coefficients
    contain dicts, which must be frozen)."""
    if data is None:
        return None
    if j == 0:
        c, h = data
        if isinstance(c, tuple) and len(c) == 2 and isinstance(c[0], dict):
            c = (tuple(sorted(c[0].items())), tuple(sorted(c[1].items())))
        return (c, h)
    layer = K.exts[j - 1]
    if isinstance(layer, RationalLayer):
        return (
            tuple(_d_key(K, j - 1, c) for c in data[0]),
            tuple(_d_key(K, j - 1, c) for c in data[1]),
        )
    return tuple(_d_key(K, j - 1, c) for c in data)


# ---------------------------------------------------------------------------
# public element wrapper


class HomogeneousElement:
    """A homogeneous element of a graded field, in tower normal form."""

    __slots__ = ("field", "data", "grading")

    def __init__(self, field, data, grading):
        self.field = field
        self.data = data
        self.grading = grading

    def is_zero(self):
        return self.data is None

    def _coerce(self, other):
        if isinstance(other, HomogeneousElement):
            if other.field != self.field:
                raise GradescentError("elements of different graded fields")
            return other
        return self.field.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.grading != other.grading:
            raise GradingMismatchError(
                f"cannot add gradings {self.grading} and {other.grading}")
        data = _d_add(self.field, self.field.level, self.data, other.data)
        if data is None:
            return self.field.zero()
        return HomogeneousElement(self.field, data, self.grading)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __neg__(self):
        if self.is_zero():
            return self
        return HomogeneousElement(self.field, _d_neg(self.field, self.field.level, self.data),
                                  self.grading)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return self.field.zero()
        data = _d_mul(self.field, self.field.level, self.data, other.data)
        if data is None:
            return self.field.zero()
        return HomogeneousElement(self.field, data, self.grading * other.grading)

    __rmul__ = __mul__
    __radd__ = __add__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero element")
        data = _d_inv(self.field, self.field.level, self.data)
        return HomogeneousElement(self.field, data, self.grading.inverse())

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        acc = self.field.one()
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def __eq__(self, other):
        if not isinstance(other, HomogeneousElement):
            return NotImplemented
        return self.field == other.field and self.data == other.data

    def __hash__(self):
        return hash((_d_key(self.field, self.field.level, self.data),))

    def validate(self):
        g = _d_validate(self.field, self.field.level, self.data)
        if not self.is_zero() and g != self.grading:
            raise GradingMismatchError("stored grading differs from computed grading")
        return self

    def __repr__(self):
        return _d_str(self.field, self.field.level, self.data)


def _d_str(K, j, data):
    if data is None:
        return "0"
    if j == 0:
        c, h = data
        cs = K.base.to_str(c)
        g = _d_grading(K, 0, (K.base.one(), h))
        if g.is_one():
            return cs
        mono = f"X({g})"
        return mono if cs == "1" else f"{cs}*{mono}"
    layer = K.exts[j - 1]
    name = layer.name
    if isinstance(layer, RationalLayer):
        num, den = data
        ns = _poly_str(K, j - 1, num, name)
        ds = _poly_str(K, j - 1, den, name)
        return ns if ds == "1" else f"({ns})/({ds})"
    return _poly_str(K, j - 1, data, name)


def _poly_str(K, j, coeffs, name):
    parts = []
    for i, c in enumerate(coeffs):
        if c is None:
            continue
        cs = _d_str(K, j, c)
        if i == 0:
            parts.append(cs)
        else:
            v = name if i == 1 else f"{name}^{i}"
            parts.append(v if cs == "1" else f"({cs})*{v}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# homogeneous arithmetic entry point (spec surface)


def hom_arith(a, b, op):
    """Arithmetic dispatcher: op in {"add", "mul", "inv"} (b ignored for inv)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    raise GradescentError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# the ungrading transfer


class UngradedView:
    """Reversible 1-graded view of a field through grading witnesses.

    Each needed grading g must come with a homogeneous unit witness(g); an
    element a is represented by a / witness(rho(a)), a 1-graded element, and
    the round trip multiplies the witness back.
    """

    def __init__(self, field, witnesses):
        self.field = field
        self.witnesses = {}
        for g, w in witnesses.items():
            if isinstance(g, GradingElement):
                key = g.exponents
            else:
                key = tuple(Fraction(x) for x in g)
            if w.is_zero():
                raise GradescentError("witness must be a unit")
            if w.grading.exponents != key:
                raise GradingMismatchError("witness grading mismatch")
            self.witnesses[key] = w

    def _witness(self, g):
        w = self.witnesses.get(g.exponents)
        if w is None:
            raise UndecidableHereError(f"no witness for grading {g}")
        return w

    def ungrade(self, a):
        if a.is_zero():
            return a
        return a / self._witness(a.grading)

    def regrade(self, a1, g):
        if a1.is_zero():
            return a1
        return a1 * self._witness(g)


def ungrade(field, witnesses):
    return UngradedView(field, witnesses)


# ---------------------------------------------------------------------------
# embeddings and squares


class FieldEmbedding:
    """Grading- and relation-preserving map between graded fields, given by
    images of the tower generators.

    images: dict with keys ("var", name) for base function variables,
    ("mono", i) for the i-th canonical basis vector of the mono subgroup, and
    ("ext", name) for extension layers.  Missing keys default to the
    identity-shaped inclusion when the target tower literally extends the
    source tower.
    """

    __slots__ = ("source", "target", "images")

    def __init__(self, source, target, images=None, check=True):
        self.source = source
        self.target = target
        self.images = dict(images or {})
        if source.context != target.context:
            raise ContextMismatchError("embedding across contexts")
        self._fill_defaults()
        if check:
            self._validate()

    def _fill_defaults(self):
        src, tgt = self.source, self.target
        for name in src.base.variables:
            self.images.setdefault(("var", name),
                                   tgt.base_variable(name) if name in tgt.base.variables else None)
        for i, b in enumerate(src.mono.basis):
            if ("mono", i) not in self.images:
                if tgt.mono.contains(b):
                    self.images[("mono", i)] = tgt.chi(b)
                else:
                    self.images[("mono", i)] = None
        for layer in src.exts:
            if ("ext", layer.name) not in self.images:
                if layer.name in [l.name for l in tgt.exts]:
                    self.images[("ext", layer.name)] = tgt.gen(layer.name)
                else:
                    self.images[("ext", layer.name)] = None
        missing = [k for k, v in self.images.items() if v is None]
        if missing:
            raise GradescentError(f"embedding misses images for {missing}")

    def _validate(self):
        src = self.source
        if src.base.characteristic != self.target.base.characteristic:
            raise GradescentError("characteristic mismatch")
        for name in src.base.variables:
            img = self.images[("var", name)]
            if not img.grading.is_one():
                raise GradingMismatchError(f"image of 1-graded {name} must be 1-graded")
        for i, b in enumerate(src.mono.basis):
            img = self.images[("mono", i)]
            if img.grading != b:
                raise GradingMismatchError(f"monomial basis image grading mismatch at {b}")
        for j, layer in enumerate(src.exts):
            img = self.images[("ext", layer.name)]
            if img.grading != layer.grading:
                raise GradingMismatchError(f"generator {layer.name} image grading mismatch")
            if isinstance(layer, AlgebraicLayer):
                acc = self.target.zero()
                below = src.prefix(j)
                for i, cdata in enumerate(layer.minpoly):
                    if cdata is None:
                        continue
                    g = _d_grading(below, j, cdata)
                    coeff = HomogeneousElement(below, cdata, g)
                    acc = acc + self.apply(coeff, level=j) * img ** i
                if not acc.is_zero():
                    raise GradescentError(
                        f"minimal polynomial of {layer.name} does not vanish on its image")

    def apply(self, elt, level=None):
        """Image of a homogeneous element (of the source or a source prefix)."""
        src = self.source if level is None else self.source.prefix(level)
        if elt.is_zero():
            return self.target.zero()
        return self._apply_data(src, src.level, elt.data)

    def _apply_data(self, src, j, data):
        if data is None:
            return self.target.zero()
        if j == 0:
            c, coords = data
            out = self._apply_base(c)
            for i, e in enumerate(coords):
                if e:
                    out = out * self.images[("mono", i)] ** e
            return out
        layer = src.exts[j - 1]
        img = self.images[("ext", layer.name)]
        if isinstance(layer, RationalLayer):
            num, den = data
            nv = self._apply_poly(src, j - 1, num, img)
            dv = self._apply_poly(src, j - 1, den, img)
            return nv / dv
        return self._apply_poly(src, j - 1, data, img)

    def _apply_poly(self, src, j, coeffs, img):
        out = self.target.zero()
        for i, c in enumerate(coeffs):
            if c is None:
                continue
            out = out + self._apply_data(src, j, c) * img ** i
        return out

    def _apply_base(self, c):
        sb, tgt = self.source.base, self.target
        if sb.kind in ("Q", "Fp"):
            return tgt.scalar(c)
        num, den = c
        nv = self._apply_base_poly(num)
        dv = self._apply_base_poly(den)
        return nv / dv

    def _apply_base_poly(self, poly):
        sb, tgt = self.source.base, self.target
        out = tgt.zero()
        for exps, coeff in poly.items():
            term = tgt.scalar(coeff)
            for name, e in zip(sb.variables, exps):
                if e:
                    term = term * self.images[("var", name)] ** e
            out = out + term
        return out

    @classmethod
    def identity(cls, field):
        return cls(field, field, check=False)

    @classmethod
    def inclusion(cls, source, target):
        """Inclusion when the target tower extends the source tower."""
        return cls(source, target)

    def compose(self, inner):
        """self o inner (inner applied first)."""
        if inner.target != self.source:
            raise GradescentError("non-composable embeddings")
        images = {}
        for key, img in inner.images.items():
            images[key] = self.apply(img)
        return FieldEmbedding(inner.source, self.target, images, check=False)

    def __repr__(self):
        return f"Embedding({self.source!r} -> {self.target!r})"


@dataclass(frozen=True)
class FieldSquare:
    """Commuting square of graded fields: k -> l, k -> K, l -> L, K -> L."""

    k: GradedField
    l: GradedField
    K: GradedField
    L: GradedField
    k_to_l: FieldEmbedding
    k_to_K: FieldEmbedding
    l_to_L: FieldEmbedding
    K_to_L: FieldEmbedding

    def __post_init__(self):
        pairs = [
            (self.k_to_l, self.k, self.l),
            (self.k_to_K, self.k, self.K),
            (self.l_to_L, self.l, self.L),
            (self.K_to_L, self.K, self.L),
        ]
        for emb, s, t in pairs:
            if emb.source != s or emb.target != t:
                raise GradescentError("square edges inconsistent with corner fields")
        left = self.l_to_L.compose(self.k_to_l)
        right = self.K_to_L.compose(self.k_to_K)
        for gen in _tower_generators(self.k):
            if left.apply(gen) != right.apply(gen):
                raise GradescentError("field square does not commute")


def _tower_generators(K):
    gens = []
    for name in K.base.variables:
        gens.append(K.base_variable(name))
    for b in K.mono.basis:
        gens.append(K.chi(b))
    for layer in K.exts:
        gens.append(K.gen(layer.name))
    return gens


# ---------------------------------------------------------------------------
# extension invariants: degree, independence, transcendence degree


def degree(L, K):
    """Degree of L over K for tower-prefix shaped pairs, else oo/error.

    Finite exactly when L adds only algebraic layers and a finite-index
    monomial enlargement to K's tower.
    """
    if L.context != K.context:
        raise UndecidableHereError("degree across grading contexts")
    if L.base != K.base:
        if (L.base.characteristic == K.base.characteristic
                and set(K.base.variables) < set(L.base.variables)):
            return INFINITE  # fresh 1-graded function variables
        raise UndecidableHereError("degree only for towers over compatible bases")
    # monomial part: index of K.mono inside L.mono (if finite)
    if not all(L.mono.contains_root_closure(b) for b in K.mono.basis):
        raise UndecidableHereError("monomial parts not nested")
    for b in K.mono.basis:
        if not L.mono.contains(b):
            raise UndecidableHereError("monomial part of K not inside L")
    if K.mono.rank() != L.mono.rank():
        return INFINITE
    idx = _lattice_index(L.mono, K.mono)
    if idx is None:
        return INFINITE
    if K.exts != L.exts[:len(K.exts)]:
        raise UndecidableHereError("towers are not prefix-compatible")
    d = idx
    for layer in L.exts[len(K.exts):]:
        if isinstance(layer, RationalLayer):
            return INFINITE
        d *= layer.degree
    return d


def _lattice_index(big, small):
    """Index [big : small] for same-rank subgroups, or None if infinite."""
    coords = []
    for b in small.basis:
        exps = tuple(x * big.denominator for x in b.exponents)
        if any(x.denominator != 1 for x in exps):
            return None
        c = linalg.lattice_coords(big.basis_rows, big.pivots,
                                  tuple(int(x) for x in exps))
        if c is None:
            return None
        coords.append(c)
    if len(coords) < big.rank():
        return None
    diag, _, _ = linalg.smith_normal_form(coords)
    idx = 1
    for d in diag:
        idx *= abs(d)
    return idx if idx else None


# coordinate model: the decidable class consists of Laurent monomials in the
# base function variables, the monomial units and the rational-layer
# generators.  Coordinates live in Q^(c + e + m): function-variable
# exponents, rational-generator exponents, then the grading part.


def coord_dim(K):
    return len(K.base.variables) + sum(
        1 for l in K.exts if isinstance(l, RationalLayer)) + K.context.rank


def _rational_layer_index(K):
    idx = {}
    n = 0
    for layer in K.exts:
        if isinstance(layer, RationalLayer):
            idx[layer.name] = n
            n += 1
    return idx


def laurent_coordinates(elt):
    """Coordinate vector of a Laurent-monomial element, or None if the
    element is not (visibly) a Laurent monomial in the tower generators."""
    K = elt.field
    if elt.is_zero():
        return None
    c = len(K.base.variables)
    ridx = _rational_layer_index(K)
    e = len(ridx)
    m = K.context.rank
    vec = [Fraction(0)] * (c + e + m)
    ok = _laurent_walk(K, K.level, elt.data, vec, ridx)
    if not ok:
        return None
    # grading part: total grading of the element
    for i, q in enumerate(elt.grading.exponents):
        vec[c + e + i] = q
    return tuple(vec)


def _laurent_walk(K, j, data, vec, ridx):
    """Accumulate u- and T-exponents; returns False outside the class."""
    if j == 0:
        cdata = data[0]
        if K.base.kind == "FunFld":
            num, den = cdata
            if len(num) != 1 or len(den) != 1:
                return False
            ne = next(iter(num))
            de = next(iter(den))
            for i in range(len(K.base.variables)):
                vec[i] += Fraction(ne[i] - de[i])
        return True
    layer = K.exts[j - 1]
    if isinstance(layer, AlgebraicLayer):
        # only elements of the prefix are decomposable
        if any(x is not None for x in data[1:]):
            return False
        return _laurent_walk(K, j - 1, data[0], vec, ridx)
    num, den = data
    nterms = [(i, x) for i, x in enumerate(num) if x is not None]
    dterms = [(i, x) for i, x in enumerate(den) if x is not None]
    if len(nterms) != 1 or len(dterms) != 1:
        return False
    (ni, nc), (di, dc) = nterms[0], dterms[0]
    pos = len(K.base.variables) + ridx[layer.name]
    vec[pos] += Fraction(ni - di)
    if not _laurent_walk(K, j - 1, nc, vec, ridx):
        return False
    neg = [Fraction(0)] * len(vec)
    if not _laurent_walk(K, j - 1, dc, neg, ridx):
        return False
    for i in range(len(vec)):
        vec[i] -= neg[i]
    return True


def field_coordinate_span(K):
    """Spanning vectors of the coordinate space contributed by K's own
    transcendence generators (function variables, rational generators, and
    the monomial lattice)."""
    c = len(K.base.variables)
    ridx = _rational_layer_index(K)
    e = len(ridx)
    m = K.context.rank
    dim = c + e + m
    vecs = []
    for i in range(c):
        v = [Fraction(0)] * dim
        v[i] = Fraction(1)
        vecs.append(tuple(v))
    for layer in K.exts:
        if isinstance(layer, RationalLayer):
            v = [Fraction(0)] * dim
            v[c + ridx[layer.name]] = Fraction(1)
            for i, q in enumerate(layer.grading.exponents):
                v[c + e + i] = q
            vecs.append(tuple(v))
    for b in K.mono.basis:
        v = [Fraction(0)] * dim
        for i, q in enumerate(b.exponents):
            v[c + e + i] = q
        vecs.append(tuple(v))
    return vecs


def embedded_coordinate_span(embedding):
    """Coordinate vectors (in the target's space) of the images of the
    source's transcendence generators.  Raises UndecidableHereError if an
    image is not a Laurent monomial."""
    src = embedding.source
    vecs = []
    gens = []
    for name in src.base.variables:
        gens.append(embedding.images[("var", name)])
    for i, _ in enumerate(src.mono.basis):
        gens.append(embedding.images[("mono", i)])
    for layer in src.exts:
        if isinstance(layer, RationalLayer):
            gens.append(embedding.images[("ext", layer.name)])
    for img in gens:
        v = laurent_coordinates(img)
        if v is None:
            raise UndecidableHereError(
                "embedded generator is not a Laurent monomial; outside the decidable class")
        vecs.append(v)
    return vecs


def algebraically_independent(elements, over=None):
    """Exact algebraic-independence test on the decidable class.

    `over` is a FieldEmbedding into the elements' common field (or None for
    the prime field / trivial grading).  Decided by Q-rank of the coordinate
    vectors modulo the subfield's coordinate span.
    """
    if not elements:
        return True
    K = elements[0].field
    vecs = []
    for x in elements:
        if x.field != K:
            raise GradescentError("elements of different fields")
        if x.is_zero():
            raise GradescentError("zero element in independence query")
        v = laurent_coordinates(x)
        if v is None:
            raise UndecidableHereError(
                "element outside the Laurent-monomial decidable class")
        vecs.append(v)
    base_span = embedded_coordinate_span(over) if over is not None else []
    r_with = linalg.qrank(base_span + vecs)
    r_base = linalg.qrank(base_span)
    return r_with - r_base == len(elements)


def trdeg(embedding):
    """Transcendence degree of target over source along an embedding, with a
    transcendence basis realized by tower generators.

    Returns (value, basis_elements) where basis_elements splits as the
    1-graded part first, then grading-carrying generators.
    """
    K = embedding.target
    sub = embedded_coordinate_span(embedding)
    own = field_coordinate_span(K)
    gens = _coordinate_generators(K)
    chosen = []
    cur = list(sub)
    r = linalg.qrank(cur)
    for vec, elt in gens:
        r2 = linalg.qrank(cur + [vec])
        if r2 > r:
            cur.append(vec)
            chosen.append(elt)
            r = r2
    total = linalg.qrank(sub + own) - linalg.qrank(sub)
    if total != len(chosen):
        raise GradescentError("internal transcendence-basis inconsistency")
    one_part = [x for x in chosen if x.grading.is_one()]
    grading_part = [x for x in chosen if not x.grading.is_one()]
    return total, one_part + grading_part


def _coordinate_generators(K):
    """(coordinate vector, element) pairs for K's transcendence generators,
    1-graded generators first so transcendence bases split as in the
    dimension formula."""
    out = []
    for name in K.base.variables:
        elt = K.base_variable(name)
        out.append((laurent_coordinates(elt), elt))
    for layer in K.exts:
        if isinstance(layer, RationalLayer) and layer.grading.is_one():
            elt = K.gen(layer.name)
            out.append((laurent_coordinates(elt), elt))
    for layer in K.exts:
        if isinstance(layer, RationalLayer) and not layer.grading.is_one():
            elt = K.gen(layer.name)
            out.append((laurent_coordinates(elt), elt))
    for b in K.mono.basis:
        elt = K.chi(b)
        out.append((laurent_coordinates(elt), elt))
    return out


def trdeg_formula(embedding):
    """The two-part dimension count: 1-component transcendence degree plus
    the Q-rank of the grading quotient.  Computed structurally (not via the
    coordinate model) so tests can compare it against trdeg()."""
    K, k = embedding.target, embedding.source
    from .grading import quotient_q_rank

    grading_rank = quotient_q_rank(K.grading_image(), k.grading_image())
    # 1-component: the kernel of the grading projection inside each span
    sub = embedded_coordinate_span(embedding)
    own = field_coordinate_span(K)
    c_e = coord_dim(K) - K.context.rank
    sub_ker = _span_kernel(sub, c_e)
    all_ker = _span_kernel(sub + own, c_e)
    one_component = linalg.qrank(all_ker) - linalg.qrank(sub_ker)
    return grading_rank + one_component


def _span_kernel(vecs, keep):
    """Basis of the subspace of span(vecs) with vanishing coordinates from
    position `keep` on."""
    if not vecs:
        return []
    basis, _ = linalg.rref(vecs)
    if len(basis[0]) <= keep:
        return list(basis)
    tail = [v[keep:] for v in basis]
    combos = linalg.nullspace(_transpose(tail))
    out = []
    for combo in combos:
        v = [Fraction(0)] * len(basis[0])
        for c, row in zip(combo, basis):
            if c:
                for i, x in enumerate(row):
                    v[i] += c * x
        out.append(tuple(v))
    return out


def _transpose(rows):
    if not rows:
        return []
    return [tuple(r[i] for r in rows) for i in range(len(rows[0]))]


def general_position(l_emb, K_emb, k_emb):
    """Are l and K in general position inside a common L over k?

    All three arguments are embeddings into the same field L; decided by the
    transcendence-degree additivity criterion on the decidable class.
    """
    L = l_emb.target
    if K_emb.target != L or k_emb.target != L:
        raise GradescentError("embeddings must share the target field")
    v_l = embedded_coordinate_span(l_emb)
    v_K = embedded_coordinate_span(K_emb)
    v_k = embedded_coordinate_span(k_emb)
    rk = linalg.qrank(v_k)
    lhs = linalg.qrank(v_k + v_l + v_K) - rk
    rhs = (linalg.qrank(v_k + v_l) - rk) + (linalg.qrank(v_k + v_K) - rk)
    return lhs == rhs


# ---------------------------------------------------------------------------
# restriction of the grading: K_H, the degree-H part


def restrict_grading(K, H):
    """The graded subfield K_H of degrees in H, with its embedding into K.

    Exact on monomial/rational towers; algebraic layers are rejected
    explicitly (they sit outside this operation's decidable class).
    """
    for layer in K.exts:
        if isinstance(layer, AlgebraicLayer):
            raise UnsupportedLayerError(
                f"restrict_grading is exact on the monomial/rational class; "
                f"algebraic layer {layer.name!r} rejected")
    ctx = K.context
    m = ctx.rank
    c = len(K.base.variables)
    ridx = _rational_layer_index(K)
    e = len(ridx)
    # coordinate lattice of monomials: u-units, T-units, mono basis
    coord_gens = []
    labels = []
    for i in range(c):
        v = [Fraction(0)] * (c + e)
        v[i] = Fraction(1)
        coord_gens.append(tuple(v) + (Fraction(0),) * m)
        labels.append(("u", i))
    for layer in K.exts:
        if isinstance(layer, RationalLayer):
            v = [Fraction(0)] * (c + e)
            v[c + ridx[layer.name]] = Fraction(1)
            coord_gens.append(tuple(v) + layer.grading.exponents)
            labels.append(("T", layer.name))
    for b in K.mono.basis:
        coord_gens.append((Fraction(0),) * (c + e) + b.exponents)
        labels.append(("chi", b))
    # The grading of a monomial with coordinate vector v is its tail part.
    # We need the sublattice {v : tail(v) in H}.
    den = 1
    for v in coord_gens:
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
    for brow in H.basis:
        for x in brow.exponents:
            den = den * x.denominator // math.gcd(den, x.denominator)
    k_count = len(coord_gens)
    # solve over Z: x in Z^k, y in Z^h with sum x_i tail_i - sum y_j H_j = 0
    rows = []
    hbasis = [b.exponents for b in H.basis]
    for t in range(m):
        row = [int(coord_gens[i][c + e + t] * den) for i in range(k_count)]
        row += [-int(hb[t] * den) for hb in hbasis]
        rows.append(row)
    kernel = linalg.integer_kernel(rows) if rows else []
    sub_vectors = []
    for ker in kernel:
        x = ker[:k_count]
        if all(v == 0 for v in x):
            continue
        vec = [Fraction(0)] * (c + e + m)
        for i, cx in enumerate(x):
            if cx:
                for t in range(c + e + m):
                    vec[t] += cx * coord_gens[i][t]
        sub_vectors.append(tuple(vec))
    # split: pure-grading vectors enlarge the monomial subgroup; mixed
    # vectors become rational generators given by monomial expressions
    den2 = 1
    for v in sub_vectors:
        for x in v:
            den2 = den2 * x.denominator // math.gcd(den2, x.denominator)
    int_rows = [tuple(int(x * den2) for x in v) for v in sub_vectors]
    basis_rows, _ = linalg.hnf_rows(int_rows)
    basis_vecs = [tuple(Fraction(x, den2) for x in row) for row in basis_rows]
    mono_gens = []
    mixed = []
    for v in basis_vecs:
        if all(x == 0 for x in v[:c + e]):
            mono_gens.append(GradingElement(ctx, v[c + e:]))
        elif all(x == 0 for x in v[c:c + e]) and all(x == 0 for x in v[c + e:]):
            continue  # pure function-variable vector: already inside the base
        else:
            mixed.append(v)
    new_mono = GradingSubgroup(ctx, mono_gens)
    KH = GradedField.monomial_field(ctx, K.base, new_mono)
    images = {}
    for i, b in enumerate(new_mono.basis):
        images[("mono", i)] = K.chi(b) if K.mono.contains(b) else None
    # mixed vectors need integer exponents on u/T to be monomials of K
    gen_count = 0
    mixed_images = []
    for v in mixed:
        if any(x.denominator != 1 for x in v[:c + e]):
            raise UnsupportedLayerError(
                "fractional generator exponents in the restricted field")
        g = GradingElement(ctx, v[c + e:])
        name = f"_h{gen_count}"
        gen_count += 1
        KH = KH.with_rational_layer(name, g)
        mixed_images.append((name, v))
    # monomial images for the chi-part of new_mono that used fractional or
    # composite coordinates: build them explicitly as monomials of K
    for i, b in enumerate(new_mono.basis):
        if images.get(("mono", i)) is None:
            images[("mono", i)] = _monomial_from_vector(
                K, (Fraction(0),) * (c + e) + b.exponents, ridx)
    for name, v in mixed_images:
        images[("ext", name)] = _monomial_from_vector(K, v, ridx)
    emb = FieldEmbedding(KH, K, images)
    return KH, emb


def _monomial_from_vector(K, v, ridx):
    """The monomial of K with the given coordinate vector."""
    c = len(K.base.variables)
    e = len(ridx)
    out = K.one()
    for i, name in enumerate(K.base.variables):
        if v[i]:
            out = out * K.base_variable(name) ** int(v[i])
    for layer in K.exts:
        if isinstance(layer, RationalLayer):
            q = v[c + ridx[layer.name]]
            if q:
                out = out * K.gen(layer.name) ** int(q)
    tail = GradingElement(K.context, v[c + e:])
    chi_part = tail / out.grading
    if not chi_part.is_one():
        out = out * K.chi(chi_part)
    return out


