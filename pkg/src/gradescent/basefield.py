"""Exact base fields: Q, prime fields F_p, and rational function fields in
finitely many 1-graded variables over these.

Field elements are plain Python data: Fractions for Q, ints for F_p, and
(num, den) pairs of multivariate polynomials for function fields, kept in
lowest terms with the denominator normalized to leading coefficient 1.
Multivariate polynomials are dicts {exponent tuple: coefficient}.

The univariate polynomial helpers at the bottom (coefficient lists, low
degree first) serve the graded polynomial ring; factorization is certified
at desk scale: rational-root + Mignotte-bounded divisor search over Q,
exhaustive search over F_p, and a restricted certified range over function
fields.  Out-of-range inputs raise FactorRangeError, never a wrong answer.
"""

from fractions import Fraction
from math import gcd, isqrt, lcm

from .errors import FactorRangeError, GradescentError


# ---------------------------------------------------------------------------
# field classes


class RationalField:
    kind = "Q"
    characteristic = 0
    variables = ()

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / a

    def div(self, a, b):
        return a / b

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def coerce(self, x):
        return Fraction(x)

    def to_str(self, a):
        return str(a)

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")


class PrimeField:
    kind = "Fp"
    variables = ()

    def __init__(self, p):
        if p < 2 or any(p % q == 0 for q in range(2, isqrt(p) + 1)):
            raise GradescentError(f"{p} is not prime")
        self.p = p
        self.characteristic = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def eq(self, a, b):
        return (a - b) % self.p == 0

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by p")
            return self.from_int(x.numerator) * self.inv(self.from_int(x.denominator)) % self.p
        return int(x) % self.p

    def to_str(self, a):
        return str(a % self.p)

    def __repr__(self):
        return f"F{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))


# multivariate polynomials: dict {exps: coeff} over a coefficient field


def p_zero():
    return {}


def p_const(field, c, nvars):
    return {} if field.is_zero(c) else {(0,) * nvars: c}


def p_var(field, i, nvars):
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): field.one()}


def p_add(field, f, g):
    out = dict(f)
    for e, c in g.items():
        s = field.add(out.get(e, field.zero()), c)
        if field.is_zero(s):
            out.pop(e, None)
        else:
            out[e] = s
    return out


def p_neg(field, f):
    return {e: field.neg(c) for e, c in f.items()}

def p_sub(field, f, g):
    return p_add(field, f, p_neg(field, g))


def p_mul(field, f, g):
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            s = field.add(out.get(e, field.zero()), field.mul(c1, c2))
            if field.is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
    return out


def p_scale(field, c, f):
    if field.is_zero(c):
        return {}
    return {e: field.mul(c, x) for e, x in f.items()}


def p_lead(f):
    """Leading (exponent, coeff) in lexicographic exponent order."""
    e = max(f)
    return e, f[e]


def p_is_const(f):
    return all(all(x == 0 for x in e) for e in f)


def _p_degree_in(f, var):
    return max((e[var] for e in f), default=-1)


def _p_as_univariate(f, var, nvars):
    """View f as univariate in `var` with multivariate coefficients."""
    coeffs = {}
    for e, c in f.items():
        d = e[var]
        rest = e[:var] + (0,) + e[var + 1:]
        coeffs.setdefault(d, {})[rest] = c
    top = max(coeffs, default=-1)
    return [coeffs.get(i, {}) for i in range(top + 1)]


def _p_from_univariate(field, coeffs, var):
    out = {}
    for i, ci in enumerate(coeffs):
        for e, c in ci.items():
            ee = list(e)
            ee[var] += i
            out[tuple(ee)] = c
    return out


def p_gcd(field, f, g, nvars):
    """Multivariate gcd via primitive recursion on the number of variables.
    Intended for 1-2 variables at desk scale."""
    if not f:
        return _p_normalize_lead(field, g)
    if not g:
        return _p_normalize_lead(field, f)
    if nvars == 0:
        return {(): field.one()}
    var = nvars - 1
    if _p_degree_in(f, var) == 0 and _p_degree_in(g, var) == 0:
        # both free of this variable: recurse as (nvars-1)-variate
        fr = {e[:-1]: c for e, c in f.items()}
        gr = {e[:-1]: c for e, c in g.items()}
        h = p_gcd(field, fr, gr, nvars - 1)
        return {e + (0,): c for e, c in h.items()}
    fu = _p_as_univariate(f, var, nvars)
    gu = _p_as_univariate(g, var, nvars)
    cf = _content(field, fu, nvars)
    cg = _content(field, gu, nvars)
    fu = [_p_exact_div(field, c, cf, nvars) for c in fu]
    gu = [_p_exact_div(field, c, cg, nvars) for c in gu]
    h = _primitive_prs(field, fu, gu, nvars)
    cont = p_gcd(field, cf, cg, nvars)
    out = p_mul(field, _p_from_univariate(field, h, var), cont)
    return _p_normalize_lead(field, out)


def _content(field, ucoeffs, nvars):
    c = {}
    for x in ucoeffs:
        c = p_gcd(field, c, x, nvars)
    return c


def _p_exact_div(field, f, g, nvars):
    """Exact multivariate division f / g (g must divide f)."""
    if not f:
        return {}
    q, r = _p_divmod_multi(field, f, g, nvars)
    if r:
        raise GradescentError("inexact polynomial division")
    return q


def _p_divmod_multi(field, f, g, nvars):
    """Division in lex term order; exact when g | f."""
    q = {}
    r = dict(f)
    ge, gc = p_lead(g)
    guard = len(f) * (len(g) + 2) + 10_000
    while r and guard:
        guard -= 1
        re, rc = p_lead(r)
        diff = tuple(a - b for a, b in zip(re, ge))
        if any(d < 0 for d in diff):
            break
        c = field.div(rc, gc)
        q[diff] = field.add(q.get(diff, field.zero()), c)
        r = p_sub(field, r, p_mul(field, {diff: c}, g))
    return q, r


def _pseudo_rem(field, a, b):
    """Pseudo-remainder: some power of lead(b) times a, reduced mod b."""
    db = len(b) - 1
    b_lead = b[-1]
    r = [dict(c) for c in a]
    while len(r) - 1 >= db and any(r):
        top = r[-1]
        r = [p_mul(field, b_lead, c) for c in r]
        shift = len(r) - 1 - db
        for i in range(db + 1):
            r[shift + i] = p_sub(field, r[shift + i], p_mul(field, top, b[i]))
        while r and not r[-1]:
            r.pop()
    return r


def _primitive_prs(field, fu, gu, nvars):
    """Primitive Euclid on univariate views with polynomial coefficients."""
    a, b = fu, gu
    if len(a) < len(b):
        a, b = b, a
    while any(b):
        r = _pseudo_rem(field, a, b)
        cont = _content(field, r, nvars)
        if cont:
            r = [_p_exact_div(field, c, cont, nvars) for c in r]
        a, b = b, r
    cont = _content(field, a, nvars)
    if cont:
        a = [_p_exact_div(field, c, cont, nvars) for c in a]
    return a


def _p_normalize_lead(field, f):
    """Scale so the lex-leading coefficient is 1."""
    if not f:
        return {}
    _, c = p_lead(f)
    return p_scale(field, field.inv(c), f)


class FunctionField:
    """Rational function field base(u_1..u_c); elements are reduced
    (num, den) pairs of multivariate polynomial dicts, den lex-monic."""

    kind = "FunFld"

    def __init__(self, base, variables):
        if not isinstance(base, (RationalField, PrimeField)):
            raise GradescentError("function field base must be Q or F_p")
        self.base = base
        self.variables = tuple(variables)
        self.characteristic = base.characteristic
        self._n = len(self.variables)

    def _norm(self, num, den):
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return ({}, p_const(self.base, self.base.one(), self._n))
        g = p_gcd(self.base, num, den, self._n)
        if not p_is_const(g):
            num = _p_exact_div(self.base, num, g, self._n)
            den = _p_exact_div(self.base, den, g, self._n)
        _, dc = p_lead(den)
        if not self.base.eq(dc, self.base.one()):
            inv = self.base.inv(dc)
            num = p_scale(self.base, inv, num)
            den = p_scale(self.base, inv, den)
        return (num, den)

    def zero(self):
        return ({}, p_const(self.base, self.base.one(), self._n))

    def one(self):
        one = p_const(self.base, self.base.one(), self._n)
        return (one, dict(one))

    def from_int(self, n):
        return (p_const(self.base, self.base.from_int(n), self._n),
                p_const(self.base, self.base.one(), self._n))

    def variable(self, name):
        i = self.variables.index(name)
        return (p_var(self.base, i, self._n),
                p_const(self.base, self.base.one(), self._n))

    def add(self, a, b):
        n = p_add(self.base, p_mul(self.base, a[0], b[1]), p_mul(self.base, b[0], a[1]))
        return self._norm(n, p_mul(self.base, a[1], b[1]))

    def sub(self, a, b):
        n = p_sub(self.base, p_mul(self.base, a[0], b[1]), p_mul(self.base, b[0], a[1]))
        return self._norm(n, p_mul(self.base, a[1], b[1]))

    def mul(self, a, b):
        return self._norm(p_mul(self.base, a[0], b[0]), p_mul(self.base, a[1], b[1]))

    def neg(self, a):
        return (p_neg(self.base, a[0]), a[1])

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("inverse of 0")
        return self._norm(a[1], a[0])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return not a[0]

    def eq(self, a, b):
        return a[0] == b[0] and a[1] == b[1]

    def coerce(self, x):
        if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], dict):
            return self._norm(dict(x[0]), dict(x[1]))
        c = self.base.coerce(x)
        return (p_const(self.base, c, self._n),
                p_const(self.base, self.base.one(), self._n))

    def to_str(self, a):
        num = _poly_str(self.base, a[0], self.variables)
        den = _poly_str(self.base, a[1], self.variables)
        return num if den == "1" else f"({num})/({den})"

    def __repr__(self):
        return f"{self.base!r}({','.join(self.variables)})"

    def __eq__(self, other):
        return (isinstance(other, FunctionField) and other.base == self.base
                and other.variables == self.variables)

    def __hash__(self):
        return hash(("FunFld", self.base, self.variables))


def _poly_str(field, f, names):
    if not f:
        return "0"
    terms = []
    for e in sorted(f, reverse=True):
        c = f[e]
        mono = "*".join(
            (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
        )
        cs = field.to_str(c)
        if mono:
            terms.append(mono if cs == "1" else f"{cs}*{mono}")
        else:
            terms.append(cs)
    return " + ".join(terms)


# ---------------------------------------------------------------------------
# univariate polynomials over a base field: coefficient lists, low degree
# first, no trailing zeros


def u_trim(field, f):
    while f and field.is_zero(f[-1]):
        f.pop()
    return f


def u_deg(f):
    return len(f) - 1


def u_add(field, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else field.zero()
        b = g[i] if i < len(g) else field.zero()
        out.append(field.add(a, b))
    return u_trim(field, out)


def u_sub(field, f, g):
    return u_add(field, f, [field.neg(x) for x in g])


def u_mul(field, f, g):
    if not f or not g:
        return []
    out = [field.zero()] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if field.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = field.add(out[i + j], field.mul(a, b))
    return u_trim(field, out)


def u_scale(field, c, f):
    if field.is_zero(c):
        return []
    return u_trim(field, [field.mul(c, x) for x in f])


def u_divmod(field, f, g):
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    f = list(f)
    q = [field.zero()] * max(0, len(f) - len(g) + 1)
    inv_lead = field.inv(g[-1])
    while len(f) >= len(g) and f:
        c = field.mul(f[-1], inv_lead)
        d = len(f) - len(g)
        q[d] = c
        for i in range(len(g)):
            f[d + i] = field.sub(f[d + i], field.mul(c, g[i]))
        f = u_trim(field, f)
    return u_trim(field, q), f


def u_monic(field, f):
    if not f:
        return []
    return u_scale(field, field.inv(f[-1]), f)


def u_gcd(field, f, g):
    a, b = list(f), list(g)
    while b:
        _, r = u_divmod(field, a, b)
        a, b = b, r
    return u_monic(field, a)


def u_eval(field, f, x):
    acc = field.zero()
    for c in reversed(f):
        acc = field.add(field.mul(acc, x), c)
    return acc


def u_derivative(field, f):
    return u_trim(field, [field.mul(field.from_int(i), f[i]) for i in range(1, len(f))])


def u_pow_mod(field, f, n, mod):
    result = [field.one()]
    base = u_divmod(field, f, mod)[1]
    while n:
        if n & 1:
            result = u_divmod(field, u_mul(field, result, base), mod)[1]
        base = u_divmod(field, u_mul(field, base, base), mod)[1]
        n >>= 1
    return result


# ---------------------------------------------------------------------------
# factorization of monic univariate polynomials over base fields


_SEARCH_CAP = 3_000_000


def factor_monic(field, f):
    """Factor a monic univariate polynomial into monic irreducibles.

    Returns a list of (factor, multiplicity).  Raises FactorRangeError when
    the input leaves the certified desk range.
    """
    if not f or not field.eq(f[-1], field.one()):
        raise GradescentError("factor_monic needs a monic nonzero polynomial")
    if u_deg(f) == 0:
        return []
    if isinstance(field, RationalField):
        return _factor_sqfree_wrap(field, f, _factor_sqfree_q)
    if isinstance(field, PrimeField):
        return _factor_sqfree_wrap(field, f, _factor_sqfree_fp)
    if isinstance(field, FunctionField):
        return _factor_sqfree_wrap(field, f, _factor_sqfree_funfld)
    raise GradescentError(f"no factorization over {field!r}")


def _coeff_key(field, coeffs):
    """Hashable canonical form of a coefficient list."""
    out = []
    for c in coeffs:
        if isinstance(c, tuple) and len(c) == 2 and isinstance(c[0], dict):
            out.append((tuple(sorted(c[0].items())), tuple(sorted(c[1].items()))))
        else:
            out.append(c)
    return tuple(out)


def _factor_sqfree_wrap(field, f, sqfree_method):
    """Squarefree decomposition, then factor each squarefree part."""
    found = []
    seen = set()

    def record(fac):
        key = _coeff_key(field, fac)
        if key not in seen:
            seen.add(key)
            found.append(fac)

    rest = list(f)
    guard = u_deg(f) + 2
    while u_deg(rest) > 0 and guard:
        guard -= 1
        d = u_derivative(field, rest)
        if not d:
            # inseparable part: x -> x^p substitution (F_p only at desk scale)
            p = field.characteristic
            if p == 0 or any(i % p and not field.is_zero(c) for i, c in enumerate(rest)):
                raise FactorRangeError("inseparable polynomial outside desk range")
            sub = [rest[i] for i in range(0, len(rest), p)]
            for g, _ in _factor_sqfree_wrap(field, sub, sqfree_method):
                record(g)
            rest = []
            break
        g = u_gcd(field, rest, d)
        sqfree = u_divmod(field, rest, g)[0]
        for fac in sqfree_method(field, u_monic(field, sqfree)):
            record(fac)
        rest = g
    # true multiplicities by exact division
    result = []
    remaining = list(f)
    for fac in found:
        m = 0
        while True:
            q, r = u_divmod(field, remaining, fac)
            if r:
                break
            remaining = q
            m += 1
        if m:
            result.append((fac, m))
    if u_deg(remaining) != 0:
        raise GradescentError("internal factorization inconsistency")
    return result


def _factor_sqfree_fp(field, f):
    """Exhaustive factorization of a monic polynomial over F_p.  Trial
    division by increasing degree: any divisor found at the current degree is
    automatically irreducible because all smaller factors are already out."""
    p = field.p
    if p ** min(u_deg(f) // 2 + 1, 5) > _SEARCH_CAP:
        raise FactorRangeError(f"F_{p} divisor search too large")
    factors = []
    rest = list(f)
    d = 1
    while u_deg(rest) >= 2 * d:
        found = False
        for cand in _fp_monic_polys(field, d):
            q, r = u_divmod(field, rest, cand)
            if not r:
                factors.append(cand)
                rest = q
                found = True
                break
        if not found:
            d += 1
    if u_deg(rest) > 0:
        factors.append(rest)
    return factors


def _fp_monic_polys(field, d):
    p = field.p
    for code in range(p ** d):
        coeffs = []
        c = code
        for _ in range(d):
            coeffs.append(c % p)
            c //= p
        yield coeffs + [1]


def _factor_sqfree_q(field, f):
    """Squarefree monic factorization over Q via the integer model."""
    if u_deg(f) > 8:
        raise FactorRangeError("degree > 8 over Q")
    # substitute x = y/c to get a monic integer polynomial
    den = 1
    for c in f:
        den = lcm(den, Fraction(c).denominator)
    d = u_deg(f)
    zf = [int(f[i] * den ** (d - i)) for i in range(d + 1)]  # monic in y
    zfactors = _zfactor_sqfree(zf)
    out = []
    for zg in zfactors:
        e = len(zg) - 1
        g = [Fraction(zg[i], den ** (e - i)) for i in range(e + 1)]
        out.append(g)
    return out


def _zfactor_sqfree(f):
    """Factor a squarefree monic integer polynomial (low-first coeffs) into
    monic integer irreducibles.  Certified bounded search with a Mignotte
    coefficient bound and divisor/mod-p pruning."""
    factors = []
    rest = list(f)
    # strip x factors
    while rest and rest[0] == 0:
        factors.append([0, 1])
        rest = rest[1:]
    # rational (integer) roots
    changed = True
    while changed and len(rest) > 2:
        changed = False
        for r in _int_divisors(rest[0]):
            if _zeval(rest, r) == 0:
                factors.append([-r, 1])
                rest = _zdiv_exact(rest, [-r, 1])
                changed = True
                break
    if len(rest) == 2:
        factors.append(rest)
        return factors
    if len(rest) <= 1:
        return factors
    d = len(rest) - 1
    for e in range(2, d // 2 + 1):
        found = True
        while found and len(rest) - 1 >= 2 * e:
            found = False
            for g in _zdivisor_candidates(rest, e):
                q, ok = _zdivmod_check(rest, g)
                if ok:
                    factors.append(g)
                    rest = q
                    found = True
                    break
    if len(rest) > 1:
        factors.append(rest)
    return factors


def _int_divisors(a0):
    if a0 == 0:
        return [0]
    a0 = abs(a0)
    divs = []
    i = 1
    while i * i <= a0:
        if a0 % i == 0:
            divs.extend((i, -i, a0 // i, -(a0 // i)))
        i += 1
    return sorted(set(divs), key=abs)


def _zeval(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def _zdiv_exact(f, g):
    q, ok = _zdivmod_check(f, g)
    if not ok:
        raise GradescentError("inexact integer polynomial division")
    return q


def _zdivmod_check(f, g):
    """(quotient, divides?) for monic g over Z."""
    f = list(f)
    q = [0] * (len(f) - len(g) + 1)
    while len(f) >= len(g) and any(f):
        if len(f) < len(g):
            break
        c = f[-1]
        d = len(f) - len(g)
        q[d] = c
        for i in range(len(g)):
            f[d + i] -= c * g[i]
        while f and f[-1] == 0:
            f.pop()
    return q, not any(f)


def _mignotte_bound(f, e):
    """Bound on the coefficients of any monic degree-e divisor of monic f."""
    norm2_sq = sum(c * c for c in f)
    norm = isqrt(norm2_sq) + 1
    binom = 1
    best = norm
    for i in range(e + 1):
        cand = binom * norm + binom  # C(e,i)*|f|_2 + C(e-1,i-1)  (coarsened)
        best = max(best, cand)
        binom = binom * (e - i) // (i + 1)
    return best


def _zdivisor_candidates(f, e):
    """Candidate monic integer divisors of degree e of squarefree monic f
    with f(0) != 0.  Complete: constant term runs over the divisors of f(0),
    middle coefficients over the Mignotte bound, and every candidate must
    reduce mod p to a divisor of f mod p, so iteration steps by p."""
    bound = _mignotte_bound(f, e)
    consts = [c for c in _int_divisors(f[0]) if abs(c) <= bound]
    p = _pick_prune_prime(f)
    fp = PrimeField(p)
    residues = _fp_divisor_residues(fp, u_trim(fp, [c % p for c in f]), e)
    p2 = next(q for q in (7, 11, 13, 17, 19, 23) if q != p and f[0] % q != 0)
    fp2 = PrimeField(p2)
    residues2 = _fp_divisor_residues(fp2, u_trim(fp2, [c % p2 for c in f]), e)
    per_mid = 2 * bound // p + 2
    total = len(residues) * len(consts) * per_mid ** (e - 1)
    if total > _SEARCH_CAP:
        raise FactorRangeError(f"divisor search space {total} too large")
    for res in residues:
        c_opts = [c for c in consts if c % p == res[0]]
        if not c_opts:
            continue
        mid_ranges = []
        for i in range(1, e):
            lo = -bound + (res[i] - (-bound)) % p
            mid_ranges.append(range(lo, bound + 1, p))
        for mids in _product(mid_ranges):
            for c0 in c_opts:
                g = [c0, *mids, 1]
                if tuple(x % p2 for x in g) in residues2:
                    yield g


def _product(ranges):
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for tail in _product(ranges[1:]):
            yield (head, *tail)


def _pick_prune_prime(f):
    for p in (7, 11, 13, 17, 19):
        if f[0] % p != 0:
            return p
    return 23


def _fp_divisor_residues(fp, f_mod, e):
    """All monic degree-e divisors of f over F_p, as coefficient tuples."""
    facs = []
    for g, m in _factor_sqfree_wrap(fp, u_monic(fp, f_mod), _factor_sqfree_fp):
        facs.extend([g] * m)
    out = set()

    def rec(i, acc):
        if u_deg(acc) > e:
            return
        if i == len(facs):
            if u_deg(acc) == e:
                out.add(tuple(acc))
            return
        rec(i + 1, acc)
        rec(i + 1, u_mul(fp, acc, facs[i]))

    rec(0, [fp.one()])
    return out


def _factor_sqfree_funfld(field, f):
    """Certified range over function fields: linear factors by root search,
    quadratics by square-discriminant, cubics fall to linear search."""
    d = u_deg(f)
    if d == 1:
        return [list(f)]
    roots = _funfld_roots(field, f)
    factors = []
    rest = list(f)
    for r in roots:
        lin = [field.neg(r), field.one()]
        q, rem = u_divmod(field, rest, lin)
        if not rem:
            factors.append(lin)
            rest = q
    d = u_deg(rest)
    if d <= 0:
        return factors
    if d == 1:
        factors.append(rest)
    elif d == 2:
        if field.characteristic == 2:
            raise FactorRangeError("quadratics over char-2 function fields")
        # x^2 + bx + c irreducible iff b^2-4c is not a square
        b, c = rest[1], rest[0]
        disc = field.sub(field.mul(b, b), field.mul(field.from_int(4), c))
        s = _funfld_sqrt(field, disc)
        if s is None:
            factors.append(rest)
        else:
            half = field.inv(field.from_int(2))
            r1 = field.mul(half, field.sub(s, b))
            r2 = field.mul(half, field.neg(field.add(s, b)))
            factors.append([field.neg(r1), field.one()])
            factors.append([field.neg(r2), field.one()])
    elif d == 3:
        factors.append(rest)  # cubic with no roots in the field is irreducible
    else:
        raise FactorRangeError(
            f"degree-{d} factorization over {field!r} outside desk range"
        )
    return factors


def _funfld_roots(field, f):
    """All roots of monic f in a rational function field.

    One function variable: the rational root theorem over the UFD base[u]
    gives num/den up to a scalar, which is then pinned by specializing u at a
    good rational point.  Several variables: complete only for constant
    coefficients; anything else is out of the certified range.
    """
    base = field.base
    if all(p_is_const(c[0]) and p_is_const(c[1]) for c in f):
        # the scalar field is algebraically closed inside base(u): all roots
        # of a scalar polynomial are scalars
        consts = [base.div(c[0].get((0,) * field._n, base.zero()),
                           c[1].get((0,) * field._n, base.one())) for c in f]
        return [field.coerce(r) for r in _scalar_roots(base, consts)]
    if field._n != 1:
        raise FactorRangeError("root search in multivariate function fields")
    # clear denominators: F_i = f_i * den are polynomials in u
    den = p_const(base, base.one(), 1)
    for c in f:
        g = p_gcd(base, den, c[1], 1)
        den = _p_exact_div(base, p_mul(base, den, c[1]), g, 1)
    F = [p_mul(base, c[0], _p_exact_div(base, den, c[1], 1)) for c in f]
    if not F[0]:
        shifted, rem = u_divmod(field, f, [field.zero(), field.one()])
        roots = [field.zero()]
        if u_deg(shifted) >= 1:
            roots += _funfld_roots(field, u_monic(field, shifted))
        return roots
    num_cands = _monic_divisors_1var(base, F[0])
    den_cands = _monic_divisors_1var(base, F[-1])
    u0 = _good_sample_point(base, [F[0], F[-1]] + [c[1] for c in f])
    spec = [base.div(u_eval_point(base, c[0], u0), u_eval_point(base, c[1], u0))
            for c in f]
    spec_roots = _scalar_roots(base, spec)
    roots = []
    seen = set()
    for nu in num_cands:
        nu0 = u_eval_point(base, nu, u0)
        if base.is_zero(nu0):
            continue
        for de in den_cands:
            de0 = u_eval_point(base, de, u0)
            if base.is_zero(de0):
                continue
            for rho in spec_roots:
                q = base.div(base.mul(rho, de0), nu0)
                if base.is_zero(q):
                    continue
                cand = field._norm(p_scale(base, q, nu), dict(de))
                key = (tuple(sorted(cand[0].items())), tuple(sorted(cand[1].items())))
                if key in seen:
                    continue
                seen.add(key)
                if field.is_zero(u_eval(field, f, cand)):
                    roots.append(cand)
    return roots


def _scalar_roots(base, coeffs):
    roots = []
    coeffs = u_monic(base, u_trim(base, list(coeffs)))
    if u_deg(coeffs) < 1:
        return roots
    for g, _ in factor_monic(base, coeffs):
        if u_deg(g) == 1:
            roots.append(base.neg(g[0]))
    return roots


def u_eval_point(base, poly, u0):
    """Evaluate a univariate polynomial dict at a base-field point."""
    acc = base.zero()
    for e, c in poly.items():
        acc = base.add(acc, base.mul(c, _base_pow(base, u0, e[0])))
    return acc


def _base_pow(base, x, n):
    acc = base.one()
    for _ in range(n):
        acc = base.mul(acc, x)
    return acc


def _good_sample_point(base, polys):
    """A base-field point where none of the given u-polynomials vanish."""
    k = 1
    tried = 0
    while True:
        x = base.from_int(k)
        if all(not base.is_zero(u_eval_point(base, p, x)) for p in polys if p):
            return x
        k += 1
        tried += 1
        if base.characteristic and tried >= base.characteristic:
            raise FactorRangeError("no good sample point in small prime field")


def _monic_divisors_1var(base, poly):
    """All monic divisors in base[u] of a univariate polynomial dict."""
    d = max(e[0] for e in poly)
    coeffs = [base.zero()] * (d + 1)
    for e, c in poly.items():
        coeffs[e[0]] = c
    coeffs = u_monic(base, coeffs)
    irr = factor_monic(base, coeffs) if u_deg(coeffs) >= 1 else []
    divs = [[base.one()]]
    for g, m in irr:
        new = []
        for div in divs:
            acc = list(div)
            for _ in range(m + 1):
                new.append(list(acc))
                acc = u_mul(base, acc, g)
        divs = new
    out = []
    seen = set()
    for div in divs:
        px = {(i,): c for i, c in enumerate(div) if not base.is_zero(c)}
        key = tuple(sorted((e[0], str(c)) for e, c in px.items()))
        if key not in seen:
            seen.add(key)
            out.append(px)
    return out


def scalar_sqrt(base, c):
    """Square root of a scalar in Q or F_p, or None."""
    if isinstance(base, RationalField):
        c = Fraction(c)
        if c < 0:
            return None
        rn, rd = isqrt(c.numerator), isqrt(c.denominator)
        if rn * rn == c.numerator and rd * rd == c.denominator:
            return Fraction(rn, rd)
        return None
    if isinstance(base, PrimeField):
        c = c % base.p
        for y in range(base.p):
            if (y * y - c) % base.p == 0:
                return y
        return None
    raise GradescentError(f"no scalar sqrt over {base!r}")


def _poly_sqrt_1var(base, poly):
    """Monic square root of a monic univariate polynomial dict, or None."""
    d = max(e[0] for e in poly)
    if d % 2:
        return None
    coeffs = [base.zero()] * (d + 1)
    for e, c in poly.items():
        coeffs[e[0]] = c
    h = d // 2
    root = [base.zero()] * (h + 1)
    root[h] = base.one()
    # match coefficients from the top down
    for i in range(h - 1, -1, -1):
        # coefficient of x^(h+i) in root^2: 2*root[i] + sum_{i<j<h+i-j...}
        s = base.zero()
        for j in range(i + 1, h):
            k = h + i - j
            if i < j <= k < len(root) and j <= k:
                term = base.mul(root[j], root[k])
                if j != k:
                    term = base.mul(base.from_int(2), term)
                s = base.add(s, term)
        target = coeffs[h + i]
        root[i] = base.div(base.sub(target, s), base.from_int(2))
    if u_mul(base, root, root) == u_trim(base, list(coeffs)):
        return root
    return None


def _funfld_sqrt(field, z):
    """Square root of a function-field element, or None."""
    base = field.base
    num, den = z
    if not num:
        return field.zero()
    if p_is_const(num) and p_is_const(den):
        c = base.div(num.get((0,) * field._n, base.zero()),
                     den.get((0,) * field._n, base.one()))
        s = scalar_sqrt(base, c)
        return None if s is None else field.coerce(s)
    if field._n != 1:
        raise FactorRangeError("sqrt in multivariate function fields")
    if field.characteristic == 2:
        raise FactorRangeError("sqrt over char-2 function fields")
    _, lc = p_lead(num)
    s_lc = scalar_sqrt(base, lc)
    if s_lc is None:
        return None
    num_monic = p_scale(base, base.inv(lc), num)
    rn = _poly_sqrt_1var(base, num_monic)
    rd = _poly_sqrt_1var(base, den)
    if rn is None or rd is None:
        return None
    nroot = {(i,): base.mul(s_lc, c) for i, c in enumerate(rn) if not base.is_zero(c)}
    droot = {(i,): c for i, c in enumerate(rd) if not base.is_zero(c)}
    return field._norm(nroot, droot)
