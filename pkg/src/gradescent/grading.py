"""The grading group, its finitely generated subgroups, and ordered value
groups.

The grading group G is modeled as a free Q-vector space over declared formal
generators r_1..r_m (multiplicatively independent), written multiplicatively:
an element g = prod r_i**q_i is stored as its exponent vector (q_1..q_m) with
exact rationals.  Subgroups are Z-lattices of such vectors.  Value groups are
Q**r with the lexicographic order, written additively, with a formal infinity
for the value of zero.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

from . import linalg
from .errors import ContextMismatchError, GradescentError


@dataclass(frozen=True, slots=True)
class GradingContext:
    """Formal multiplicative generators of G; all elements reference one."""

    generator_names: tuple

    def __post_init__(self):
        names = tuple(self.generator_names)
        if len(set(names)) != len(names):
            raise GradescentError(f"duplicate grading generator names: {names}")
        object.__setattr__(self, "generator_names", names)

    @property
    def rank(self):
        return len(self.generator_names)

    def one(self):
        return GradingElement(self, (Fraction(0),) * self.rank)

    def generator(self, name):
        i = self.generator_names.index(name)
        exps = [Fraction(0)] * self.rank
        exps[i] = Fraction(1)
        return GradingElement(self, tuple(exps))

    def element(self, exponents):
        return GradingElement(self, tuple(Fraction(x) for x in exponents))

    def parse(self, text):
        """Parse multiplicative notation like ``r^2*s^-1`` or ``1``."""
        text = text.strip()
        exps = [Fraction(0)] * self.rank
        if text in ("1", ""):
            return GradingElement(self, tuple(exps))
        for part in text.split("*"):
            m = re.fullmatch(r"\s*([A-Za-z_]\w*)(?:\^(-?\d+(?:/\d+)?))?\s*", part)
            if not m:
                raise GradescentError(f"bad grading element syntax: {text!r}")
            name, exp = m.group(1), m.group(2)
            if name not in self.generator_names:
                raise GradescentError(f"unknown grading generator {name!r}")
            exps[self.generator_names.index(name)] += Fraction(exp or 1)
        return GradingElement(self, tuple(exps))


@dataclass(frozen=True, slots=True)
class GradingElement:
    """An element of G as a rational exponent vector (multiplicative writing)."""

    context: GradingContext
    exponents: tuple

    def _check(self, other):
        if self.context is not other.context and self.context != other.context:
            raise ContextMismatchError("grading elements from different contexts")

    def __mul__(self, other):
        self._check(other)
        return GradingElement(
            self.context, tuple(a + b for a, b in zip(self.exponents, other.exponents))
        )

    def __truediv__(self, other):
        self._check(other)
        return GradingElement(
            self.context, tuple(a - b for a, b in zip(self.exponents, other.exponents))
        )

    def __pow__(self, n):
        n = Fraction(n)
        return GradingElement(self.context, tuple(a * n for a in self.exponents))

    def inverse(self):
        return GradingElement(self.context, tuple(-a for a in self.exponents))

    def is_one(self):
        return all(e == 0 for e in self.exponents)

    def __str__(self):
        if self.is_one():
            return "1"
        parts = []
        for name, e in zip(self.context.generator_names, self.exponents):
            if e == 0:
                continue
            if e == 1:
                parts.append(name)
            else:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    __repr__ = __str__


class GradingSubgroup:
    """Finitely generated subgroup of G, held as a normalized lattice basis.

    Internally all generators are scaled by a common denominator so the
    subgroup becomes an integer lattice; the Hermite form of that lattice is
    the canonical basis.  Membership (over Z) and root-closure membership
    (over Q) are decided exactly.
    """

    __slots__ = ("context", "denominator", "basis_rows", "pivots", "_qspan")

    def __init__(self, context, generators=()):
        self.context = context
        gens = []
        for g in generators:
            if isinstance(g, GradingElement):
                if g.context != context:
                    raise ContextMismatchError("subgroup generator in wrong context")
                gens.append(g.exponents)
            else:
                gens.append(tuple(Fraction(x) for x in g))
        den = 1
        for v in gens:
            for x in v:
                den = lcm(den, x.denominator)
        self.denominator = den
        int_rows = [tuple(int(x * den) for x in v) for v in gens]
        self.basis_rows, self.pivots = linalg.hnf_rows(int_rows)
        self._qspan = linalg.rref([tuple(Fraction(x) for x in r) for r in self.basis_rows])[0]

    @property
    def basis(self):
        """Canonical basis as GradingElements."""
        den = Fraction(1, self.denominator)
        return tuple(
            GradingElement(self.context, tuple(Fraction(x) * den for x in row))
            for row in self.basis_rows
        )

    def rank(self):
        return len(self.basis_rows)

    def is_trivial(self):
        return not self.basis_rows

    def _scaled(self, g):
        """g as a vector in the internal integer scale, or None if it cannot
        be integral there (hence not a lattice member)."""
        exps = tuple(x * self.denominator for x in g.exponents)
        if any(x.denominator != 1 for x in exps):
            return None
        return tuple(int(x) for x in exps)

    def contains(self, g):
        """Z-lattice membership of a GradingElement."""
        if g.context != self.context:
            raise ContextMismatchError("membership query in wrong context")
        v = self._scaled(g)
        if v is None:
            return False
        return linalg.lattice_member(self.basis_rows, self.pivots, v)

    def contains_root_closure(self, g):
        """Membership in the root closure: some positive power lies in the
        subgroup, which for finitely generated subgroups of Q^m is exactly
        Q-span membership."""
        if g.context != self.context:
            raise ContextMismatchError("membership query in wrong context")
        v = tuple(x * self.denominator for x in g.exponents)
        return linalg._reduce_against(self._qspan, v) is None

    def power_order(self, g):
        """Least n >= 1 with g**n in the subgroup, or None."""
        if not self.contains_root_closure(g):
            return None
        v = tuple(x * self.denominator for x in g.exponents)
        sol = linalg.solve_linear([linalg.qvec(r) for r in self.basis_rows], v)
        if sol is None:
            return None
        return reduce(lcm, (c.denominator for c in sol), 1)

    def join(self, other):
        """Subgroup generated by both."""
        return GradingSubgroup(self.context, self.basis + other.basis)

    def intersect(self, other):
        """Intersection as subgroups of G."""
        den = lcm(self.denominator, other.denominator)
        rows_a = [tuple(x * (den // self.denominator) for x in r) for r in self.basis_rows]
        rows_b = [tuple(x * (den // other.denominator) for x in r) for r in other.basis_rows]
        inter = linalg.lattice_intersection(rows_a, rows_b)
        return GradingSubgroup(
            self.context,
            [tuple(Fraction(x, den) for x in row) for row in inter],
        )

    def __eq__(self, other):
        if not isinstance(other, GradingSubgroup):
            return NotImplemented
        return self.context == other.context and all(
            other.contains(b) for b in self.basis
        ) and all(self.contains(b) for b in other.basis)

    def __hash__(self):
        return hash((self.context, len(self.basis_rows)))

    def __repr__(self):
        gens = ", ".join(str(b) for b in self.basis)
        return f"<{gens}>" if gens else "<1>"


def subgroup_membership(g, H):
    """True iff g lies in the subgroup generated by H's basis over Z."""
    return H.contains(g)


def root_closure_membership(g, H):
    """True iff some positive power of g lies in H."""
    return H.contains_root_closure(g)


def quotient_q_rank(K_img, k_img):
    """dim_Q of span(K_img) / (span(k_img) intersect span(K_img))."""
    if K_img.context != k_img.context:
        raise ContextMismatchError("rank query in wrong context")
    stacked = [b.exponents for b in K_img.basis] + [b.exponents for b in k_img.basis]
    return linalg.qrank(stacked) - linalg.qrank([b.exponents for b in k_img.basis])


# ---------------------------------------------------------------------------
# value groups


class Infinity:
    """Formal value of 0; bigger than everything, absorbing under addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "oo"


INF = Infinity()


@dataclass(frozen=True, slots=True)
class ValueGroup:
    """Q^r with the lexicographic order, additive notation."""

    rank: int

    def zero(self):
        return (Fraction(0),) * self.rank

    def element(self, xs):
        xs = tuple(Fraction(x) for x in xs)
        if len(xs) != self.rank:
            raise GradescentError(f"value of rank {len(xs)} in Q^{self.rank}")
        return xs


def value_cmp(a, b):
    """Lex comparison of values; INF is the top element."""
    if a is INF:
        return 0 if b is INF else 1
    if b is INF:
        return -1
    return linalg.lex_cmp(a, b)


def value_add(a, b):
    if a is INF or b is INF:
        return INF
    la, lb = len(a), len(b)
    if la != lb:
        r = max(la, lb)
        a = a + (Fraction(0),) * (r - la)
        b = b + (Fraction(0),) * (r - lb)
    return tuple(x + y for x, y in zip(a, b))


def value_scale(n, a):
    if a is INF:
        return INF
    n = Fraction(n)
    return tuple(n * x for x in a)


def value_min(values):
    best = INF
    for v in values:
        if value_cmp(v, best) < 0:
            best = v
    return best


def value_str(a):
    if a is INF:
        return "oo"
    if len(a) == 1:
        return str(a[0])
    return "(" + ",".join(str(x) for x in a) + ")"
