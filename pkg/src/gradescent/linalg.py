"""Exact linear algebra over Q and Z.

Everything here works on tuples of Fractions (rational vectors) or tuples of
ints (lattice vectors).  No floating point anywhere.  These routines back the
grading-lattice arithmetic, the cone computations used for monomial integral
closures, and the lexicographic-functional searches that decide chart
membership questions for birational spaces.
"""

from fractions import Fraction
from math import gcd


# ---------------------------------------------------------------------------
# rational vectors and matrices (rows = tuples of Fractions)


def qvec(xs):
    return tuple(Fraction(x) for x in xs)


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a):
    c = Fraction(c)
    return tuple(c * x for x in a)


def vdot(a, b):
    s = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def is_zero_vec(a):
    return all(x == 0 for x in a)


def rref(rows):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    mat = [list(qvec(r)) for r in rows]
    if not mat:
        return [], []
    n = len(mat[0])
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r]], pivots


def qrank(rows):
    return len(rref(rows)[0])


def in_qspan(rows, v):
    """Is v in the Q-span of the given rows?"""
    base, _ = rref(rows)
    return _reduce_against(base, qvec(v)) is None


def _reduce_against(rref_rows, v):
    """Reduce v against rref rows; return the residue or None if it vanishes."""
    v = list(v)
    for row in rref_rows:
        c = next(i for i, x in enumerate(row) if x != 0)
        if v[c] != 0:
            f = v[c]
            for i in range(c, len(v)):
                if row[i]:
                    v[i] -= f * row[i]
    return None if all(x == 0 for x in v) else tuple(v)


def solve_linear(rows, rhs):
    """One solution x of  sum_i x_i * rows[i] = rhs, or None.

    Row-combination convention: unknowns are coefficients of the given rows.
    """
    rows = [qvec(r) for r in rows]
    rhs = qvec(rhs)
    if not rows:
        return () if is_zero_vec(rhs) else None
    n = len(rows[0])
    k = len(rows)
    # Solve via augmented transpose: columns are the rows, target rhs.
    aug = [[rows[i][j] for i in range(k)] + [rhs[j]] for j in range(n)]
    red, pivots = rref(aug)
    sol = [Fraction(0)] * k
    for row, p in zip(red, pivots):
        if p == k:
            return None  # pivot in the rhs column: inconsistent
        sol[p] = row[k]
    return tuple(sol)


def nullspace(rows):
    """Basis of {x : sum_i x_i rows[i] applied...}; here: right-kernel of the
    matrix whose rows are given, i.e. vectors v with rows @ v = 0."""
    rows = [qvec(r) for r in rows]
    if not rows:
        return []
    n = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[fc]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# integer lattices (rows = tuples of ints)


def ivec(xs):
    out = []
    for x in xs:
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"not an integer: {x}")
            out.append(int(x))
        else:
            out.append(int(x))
    return tuple(out)


def _vec_content(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive(v):
    """Divide an integer vector by its content (0 stays 0)."""
    g = _vec_content(v)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def hnf_rows(rows):
    """Row-style Hermite normal form of the lattice spanned by integer rows.

    Returns (basis, pivot_cols): basis rows with strictly increasing pivot
    columns, positive pivots, entries above each pivot reduced.
    """
    mat = [list(ivec(r)) for r in rows if not all(x == 0 for x in r)]
    if not mat:
        return [], []
    n = len(mat[0])
    basis = []
    for c in range(n):
        carrier = None
        rest = []
        for row in mat:
            if row[c] != 0:
                if carrier is None:
                    carrier = row
                else:
                    # Euclidean step to kill row[c]
                    while row[c] != 0:
                        q = carrier[c] // row[c]
                        for j in range(n):
                            carrier[j] -= q * row[j]
                        carrier, row = row, carrier
                    rest.append(row)
            else:
                rest.append(row)
        if carrier is not None:
            if carrier[c] < 0:
                carrier = [-x for x in carrier]
            basis.append((c, carrier))
        mat = [r for r in rest if any(r)]
    # reduce above pivots
    out = [row for _, row in basis]
    pivots = [c for c, _ in basis]
    for i in range(len(out) - 1, -1, -1):
        c = pivots[i]
        p = out[i][c]
        for k in range(i):
            q = out[k][c] // p
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], out[i])]
    return [tuple(r) for r in out], pivots


def lattice_member(basis, pivots, v):
    """Is integer vector v in the lattice given by HNF (basis, pivots)?"""
    v = list(ivec(v))
    for row, c in zip(basis, pivots):
        if v[c] != 0:
            q, r = divmod(v[c], row[c])
            if r != 0:
                return False
            for j in range(len(v)):
                v[j] -= q * row[j]
    return all(x == 0 for x in v)


def lattice_coords(basis, pivots, v):
    """Integer coordinates of v w.r.t. an HNF basis, or None."""
    v = list(ivec(v))
    coords = []
    for row, c in zip(basis, pivots):
        if v[c] != 0:
            q, r = divmod(v[c], row[c])
            if r != 0:
                return None
            coords.append(q)
            for j in range(len(v)):
                v[j] -= q * row[j]
        else:
            coords.append(0)
    if any(v):
        return None
    return tuple(coords)


def column_hnf_transform(mat):
    """Column HNF with transform: returns (H, U) with mat @ U = H, U unimodular.

    mat is a list of rows; columns are transformed.  Zero columns of H sit on
    the right; the matching columns of U span the integer kernel.
    """
    m = len(mat)
    n = len(mat[0]) if m else 0
    H = [list(ivec(r)) for r in mat]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col_op(j, k, q):
        # col_j -= q * col_k
        for i in range(m):
            H[i][j] -= q * H[i][k]
        for i in range(n):
            U[i][j] -= q * U[i][k]

    def col_swap(j, k):
        for i in range(m):
            H[i][j], H[i][k] = H[i][k], H[i][j]
        for i in range(n):
            U[i][j], U[i][k] = U[i][k], U[i][j]

    def col_neg(j):
        for i in range(m):
            H[i][j] = -H[i][j]
        for i in range(n):
            U[i][j] = -U[i][j]

    row = 0
    col = 0
    while row < m and col < n:
        # find a nonzero entry in this row at column >= col
        nz = [j for j in range(col, n) if H[row][j] != 0]
        if not nz:
            row += 1
            continue
        # Euclidean reduction across the row
        while len(nz) > 1:
            nz.sort(key=lambda j: abs(H[row][j]))
            j0 = nz[0]
            for j in nz[1:]:
                q = H[row][j] // H[row][j0]
                if q:
                    col_op(j, j0, q)
            nz = [j for j in range(col, n) if H[row][j] != 0]
        j0 = nz[0]
        if j0 != col:
            col_swap(col, j0)
        if H[row][col] < 0:
            col_neg(col)
        row += 1
        col += 1
    return H, U


def integer_kernel(mat):
    """Basis of {x in Z^n : mat @ x = 0} (mat given as rows)."""
    if not mat:
        return []
    n = len(mat[0])
    H, U = column_hnf_transform(mat)
    out = []
    for j in range(n):
        if all(H[i][j] == 0 for i in range(len(H))):
            out.append(tuple(U[i][j] for i in range(n)))
    return out


def lattice_intersection(rows_a, rows_b):
    """Generators of the intersection of two integer lattices (given by rows)."""
    rows_a = [ivec(r) for r in rows_a]
    rows_b = [ivec(r) for r in rows_b]
    if not rows_a or not rows_b:
        return []
    n = len(rows_a[0])
    ka, kb = len(rows_a), len(rows_b)
    # columns: coefficients (a | b); rows: ambient coordinates
    mat = [[rows_a[i][j] for i in range(ka)] + [-rows_b[i][j] for i in range(kb)]
           for j in range(n)]
    gens = []
    for ker in integer_kernel(mat):
        pt = [0] * n
        for i in range(ka):
            if ker[i]:
                for j in range(n):
                    pt[j] += ker[i] * rows_a[i][j]
        if any(pt):
            gens.append(tuple(pt))
    basis, _ = hnf_rows(gens)
    return basis


def smith_normal_form(mat):
    """Smith normal form: returns (diag, U, V) with U @ mat @ V diagonal.

    diag is the list of invariant factors (possibly with trailing zeros
    trimmed); U and V are unimodular, returned as lists of rows.
    """
    A = [list(ivec(r)) for r in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_op(i, k, q):
        for j in range(n):
            A[i][j] -= q * A[k][j]
        for j in range(m):
            U[i][j] -= q * U[k][j]

    def col_op(j, k, q):
        for i in range(m):
            A[i][j] -= q * A[i][k]
        for i in range(n):
            V[i][j] -= q * V[i][k]

    def row_swap(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def col_swap(j, k):
        for i in range(m):
            A[i][j], A[i][k] = A[i][k], A[i][j]
        for i in range(n):
            V[i][j], V[i][k] = V[i][k], V[i][j]

    t = 0
    while t < min(m, n):
        # find pivot: smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        row_swap(t, best[0])
        col_swap(t, best[1])
        dirty = False
        for i in range(t + 1, m):
            q = A[i][t] // A[t][t]
            if q:
                row_op(i, t, q)
            if A[i][t] != 0:
                dirty = True
        for j in range(t + 1, n):
            q = A[t][j] // A[t][t]
            if q:
                col_op(j, t, q)
            if A[t][j] != 0:
                dirty = True
        if dirty:
            continue
        # divisibility fix-up: A[t][t] must divide the rest of the block
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % A[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(t, offender, -1)  # add offender row to pivot row
            continue
        if A[t][t] < 0:
            for j in range(n):
                A[t][j] = -A[t][j]
            for j in range(m):
                U[t][j] = -U[t][j]
        t += 1
    diag = [A[i][i] for i in range(min(m, n))]
    while diag and diag[-1] == 0:
        diag.pop()
    return diag, U, V


# ---------------------------------------------------------------------------
# linear feasibility with strict inequalities (Fourier-Motzkin, exact)


def solve_relations(n, eqs=(), nonneg=(), strict_pos=()):
    """Find x in Q^n with a.x == 0, b.x >= 0, c.x > 0 for the given vector
    families, or None.  Small systems only; exhaustive Fourier-Motzkin."""
    cons = []  # (vector as list of Fractions, kind) kind: 0 '=',1 '>=',2 '>'
    for a in eqs:
        cons.append((list(qvec(a)), 0))
    for b in nonneg:
        cons.append((list(qvec(b)), 1))
    for c in strict_pos:
        cons.append((list(qvec(c)), 2))
    return _fm_solve(n, cons)


def _fm_solve(n, cons):
    # eliminate equalities by substitution first
    cons = [(list(v), k) for v, k in cons]
    subst = []  # (var, expr_row) meaning x_var = expr . x  (expr[var] == 0)
    changed = True
    while changed:
        changed = False
        for idx, (v, k) in enumerate(cons):
            if k != 0:
                continue
            piv = next((i for i in range(n) if v[i] != 0), None)
            cons.pop(idx)
            if piv is None:
                continue
            coef = v[piv]
            expr = [-x / coef for x in v]
            expr[piv] = Fraction(0)
            subst.append((piv, expr))
            for w, _ in cons:
                if w[piv] != 0:
                    f = w[piv]
                    for i in range(n):
                        w[i] += f * expr[i]
                    w[piv] = Fraction(0)
            changed = True
            break
    # now only >= / > constraints remain; eliminate variables one by one
    active = sorted({i for v, _ in cons for i in range(n) if v[i] != 0})
    order = list(active)
    stack = []  # (var, lows, highs) for back-substitution
    for var in order:
        lows, highs, rest = [], [], []
        for v, k in cons:
            if v[var] > 0:
                lows.append((v, k))    # x_var >= -(rest)/coef (or >)
            elif v[var] < 0:
                highs.append((v, k))
            else:
                rest.append((v, k))
        new = list(rest)
        for lv, lk in lows:
            for hv, hk in highs:
                # combine: eliminate var; result strict if either parent strict
                a = lv[var]
                b = -hv[var]
                w = [b * lv[i] + a * hv[i] for i in range(n)]
                w[var] = Fraction(0)
                kk = 2 if (lk == 2 or hk == 2) else 1
                if all(x == 0 for x in w):
                    if kk == 2:
                        return None
                    continue
                new.append((w, kk))
        stack.append((var, lows, highs))
        cons = _dedupe(new)
    # only constant rows remain; a strict one is a contradiction
    for v, k in cons:
        if k == 2 and all(x == 0 for x in v):
            return None
    x = [Fraction(0)] * n
    for var, lows, highs in reversed(stack):
        lo, lo_strict = None, False
        hi, hi_strict = None, False
        for v, k in lows:
            val = -sum(v[i] * x[i] for i in range(n) if i != var) / v[var]
            if lo is None or val > lo:
                lo, lo_strict = val, (k == 2)
            elif val == lo and k == 2:
                lo_strict = True
        for v, k in highs:
            val = -sum(v[i] * x[i] for i in range(n) if i != var) / v[var]
            if hi is None or val < hi:
                hi, hi_strict = val, (k == 2)
            elif val == hi and k == 2:
                hi_strict = True
        x[var] = _pick_in_interval(lo, lo_strict, hi, hi_strict)
        if x[var] is None:
            return None
    # apply substitutions in reverse
    for var, expr in reversed(subst):
        x[var] = sum(expr[i] * x[i] for i in range(n))
    return tuple(x)


def _dedupe(cons):
    seen = {}
    for v, k in cons:
        key = _normalized_key(v)
        if key in seen:
            old_v, old_k = seen[key]
            seen[key] = (old_v, max(old_k, k))
        else:
            seen[key] = (v, k)
    return list(seen.values())


def _normalized_key(v):
    piv = next((x for x in v if x != 0), None)
    if piv is None:
        return ("zero",)
    return tuple(x / piv for x in v) + (piv > 0,)


def _pick_in_interval(lo, lo_strict, hi, hi_strict):
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_strict or hi_strict)):
            return None
        if lo == hi:
            return lo
        return (lo + hi) / 2
    if lo is not None:
        return lo + 1 if lo_strict else lo
    if hi is not None:
        return hi - 1 if hi_strict else hi
    return Fraction(0)


# ---------------------------------------------------------------------------
# lexicographic functional search
#
# Decides: is there a linear map phi : Q^n -> Q^r (any finite r, lex order)
# with phi(z) = 0 for z in zeros, phi(g) >=lex 0 for g in nonneg, and
# phi(m) <lex 0 for every m in negs?  Greedy level-by-level construction;
# at each level one takes a relative-interior direction, which is optimal
# because feasible directions form a convex cone.


def lex_functional(n, zeros, nonneg, negs):
    """Return the rows of a witness map (list of vectors), or None."""
    zeros = [qvec(z) for z in zeros]
    undet_pos = [qvec(g) for g in nonneg]
    undet_neg = [qvec(m) for m in negs]
    rows = []
    guard = len(undet_pos) + len(undet_neg) + 1
    while undet_neg:
        if guard == 0:
            return None
        guard -= 1
        weak = undet_pos + [vscale(-1, x) for x in undet_neg]
        witnesses = []
        neg_progress = False
        for m in undet_neg:
            w = solve_relations(n, eqs=zeros, nonneg=weak, strict_pos=[vscale(-1, m)])
            if w is not None:
                witnesses.append(w)
                neg_progress = True
        for g in undet_pos:
            w = solve_relations(n, eqs=zeros, nonneg=weak, strict_pos=[g])
            if w is not None:
                witnesses.append(w)
        if not witnesses:
            return None  # every feasible direction is stuck at 0 on all targets
        psi = witnesses[0]
        for w in witnesses[1:]:
            psi = vadd(psi, w)
        rows.append(psi)
        undet_pos = [g for g in undet_pos if vdot(psi, g) == 0]
        undet_neg = [m for m in undet_neg if vdot(psi, m) == 0]
    return rows if rows else [qvec([0] * n)]


def lex_cmp(a, b):
    """Lexicographic comparison of rational tuples, padding with zeros."""
    la, lb = len(a), len(b)
    for i in range(max(la, lb)):
        x = a[i] if i < la else Fraction(0)
        y = b[i] if i < lb else Fraction(0)
        if x != y:
            return -1 if x < y else 1
    return 0


# ---------------------------------------------------------------------------
# polyhedral cones (rational), double description at desk scale


def dual_rays(n, ineqs, eqs=()):
    """Generators of {y : y.a >= 0 for a in ineqs, y.e = 0 for e in eqs}.

    Returns (lin_basis, rays): the cone is span(lin_basis) + cone(rays).
    Naive incremental double description; fine for desk dimensions.
    """
    lin = [qvec(v) for v in _standard_basis(n)]
    rays = []
    for e in eqs:
        lin, rays = _dd_step(lin, rays, qvec(e), equality=True)
    for a in ineqs:
        lin, rays = _dd_step(lin, rays, qvec(a), equality=False)
    return lin, rays


def _standard_basis(n):
    return [tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)]


def _dd_step(lin, rays, a, equality):
    # split lineality against the hyperplane a.y = 0
    carrier = None
    new_lin = []
    for b in lin:
        d = vdot(a, b)
        if d == 0:
            new_lin.append(b)
        elif carrier is None:
            carrier = (b, d)
        else:
            # make b orthogonal to a using the carrier
            cb, cd = carrier
            new_lin.append(vsub(b, vscale(d / cd, cb)))
    extra_rays = list(rays)
    if carrier is not None:
        cb, cd = carrier
        if cd < 0:
            cb, cd = vscale(-1, cb), -cd
        # project old rays onto the hyperplane along the carrier, keep carrier
        extra_rays = [vsub(r, vscale(vdot(a, r) / cd, cb)) for r in rays]
        if equality:
            pass  # the carrier direction is killed entirely
        else:
            extra_rays.append(cb)
        rays_pos, rays_zero, rays_neg = [], extra_rays, []
    else:
        rays_pos = [r for r in extra_rays if vdot(a, r) > 0]
        rays_zero = [r for r in extra_rays if vdot(a, r) == 0]
        rays_neg = [r for r in extra_rays if vdot(a, r) < 0]
    if carrier is None:
        if equality:
            combined = []
            for rp in rays_pos:
                for rn in rays_neg:
                    combined.append(_ray_combine(a, rp, rn))
            rays_zero.extend(combined)
            new_rays = rays_zero
        else:
            new_rays = rays_pos + rays_zero
            for rp in rays_pos:
                for rn in rays_neg:
                    new_rays.append(_ray_combine(a, rp, rn))
    else:
        new_rays = rays_zero
    return new_lin, _dedupe_rays(new_rays)


def _ray_combine(a, rp, rn):
    # positive combination lying on a.y = 0
    return vadd(vscale(vdot(a, rp), rn), vscale(-vdot(a, rn), rp))


def _dedupe_rays(rays):
    out = []
    seen = set()
    for r in rays:
        if is_zero_vec(r):
            continue
        piv = next(x for x in r if x != 0)
        key = tuple(x / abs(piv) for x in r)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


class Cone:
    """Rational polyhedral cone, from generators; supports exact membership.

    Internally stores the dual description: equalities cutting out the linear
    span and inequalities (rays of the dual cone).
    """

    __slots__ = ("dim", "generators", "eq_normals", "ineq_normals")

    def __init__(self, dim, generators):
        self.dim = dim
        self.generators = [qvec(g) for g in generators]
        lin, rays = dual_rays(dim, self.generators)
        self.eq_normals = lin
        self.ineq_normals = rays

    def contains(self, v):
        v = qvec(v)
        return all(vdot(e, v) == 0 for e in self.eq_normals) and all(
            vdot(r, v) >= 0 for r in self.ineq_normals
        )

    def integer_constraints(self):
        """(eqs, ineqs) as integer row tuples, for the enumeration kernels."""
        eqs = [_int_clear(e) for e in self.eq_normals]
        ineqs = [_int_clear(r) for r in self.ineq_normals]
        return eqs, ineqs


def _int_clear(v):
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    w = tuple(int(x * den) for x in v)
    return primitive(w) if any(w) else w


def cone_rays_from_constraints(n, eqs, ineqs):
    """Generators (lineality + rays) of a cone given by constraints."""
    lin, rays = dual_rays(n, ineqs, eqs)
    gens = []
    for b in lin:
        gens.append(b)
        gens.append(vscale(-1, b))
    gens.extend(rays)
    return gens


def integer_solve(rows, target):
    """One integer solution x of  sum_i x_i * rows[i] = target, or None."""
    rows = [ivec(r) for r in rows]
    target = ivec(target)
    if not rows:
        return () if all(x == 0 for x in target) else None
    k = len(rows)
    n = len(rows[0])
    # matrix with columns indexed by unknowns: M x = target, M[j][i] = rows[i][j]
    M = [[rows[i][j] for i in range(k)] for j in range(n)]
    diag, U, V = smith_normal_form(M)
    # M = U^-1 D V^-1, solve D y = U target, then x = V y
    b = [sum(U[i][j] * target[j] for j in range(n)) for i in range(n)]
    y = [0] * k
    for i in range(k):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if i < n and b[i] != 0:
                return None
            continue
        if i < n:
            if b[i] % d != 0:
                return None
            y[i] = b[i] // d
    for i in range(len(diag), n):
        if b[i] != 0:
            return None
    x = [sum(V[i][j] * y[j] for j in range(k)) for i in range(k)]
    # verify (cheap insurance against convention slips)
    for j in range(n):
        if sum(x[i] * rows[i][j] for i in range(k)) != target[j]:
            return None
    return tuple(x)
