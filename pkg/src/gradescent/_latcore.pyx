# cython: language_level=3
"""Compiled lattice enumeration kernels (twin of ``_latcore_py``).

All inputs are small integers; the Python wrapper in ``kernel.py`` checks
magnitude bounds before calling in, so C long arithmetic cannot overflow.
"""

from libc.stdlib cimport malloc, free

BACKEND = "cython"


def box_points(lo, hi, eq_rows, ineq_rows, hnf_basis, hnf_pivots):
    cdef int n = len(lo)
    cdef int n_eq = len(eq_rows)
    cdef int n_in = len(ineq_rows)
    cdef bint use_lattice = hnf_basis is not None
    cdef int n_h = len(hnf_basis) if use_lattice else 0

    cdef long *clo = <long *> malloc(n * sizeof(long))
    cdef long *chi = <long *> malloc(n * sizeof(long))
    cdef long *ceq = <long *> malloc(max(1, n_eq * n) * sizeof(long))
    cdef long *cin = <long *> malloc(max(1, n_in * n) * sizeof(long))
    cdef long *chnf = <long *> malloc(max(1, n_h * n) * sizeof(long))
    cdef long *cpiv = <long *> malloc(max(1, n_h) * sizeof(long))
    cdef long *pt = <long *> malloc(max(1, n) * sizeof(long))
    cdef long *work = <long *> malloc(max(1, n) * sizeof(long))
    if clo == NULL or chi == NULL or ceq == NULL or cin == NULL \
            or chnf == NULL or cpiv == NULL or pt == NULL or work == NULL:
        raise MemoryError()

    cdef int i, j
    for i in range(n):
        clo[i] = lo[i]
        chi[i] = hi[i]
    for i in range(n_eq):
        for j in range(n):
            ceq[i * n + j] = eq_rows[i][j]
    for i in range(n_in):
        for j in range(n):
            cin[i * n + j] = ineq_rows[i][j]
    for i in range(n_h):
        for j in range(n):
            chnf[i * n + j] = hnf_basis[i][j]
        cpiv[i] = hnf_pivots[i]

    out = []
    cdef int depth = 0
    cdef long s, q, r
    cdef int k, c
    cdef bint ok
    # iterative nested loop over the box
    for i in range(n):
        pt[i] = clo[i]
    if n == 0:
        free(clo); free(chi); free(ceq); free(cin)
        free(chnf); free(cpiv); free(pt); free(work)
        return [()]
    while True:
        ok = True
        for i in range(n_eq):
            s = 0
            for j in range(n):
                s += ceq[i * n + j] * pt[j]
            if s != 0:
                ok = False
                break
        if ok:
            for i in range(n_in):
                s = 0
                for j in range(n):
                    s += cin[i * n + j] * pt[j]
                if s < 0:
                    ok = False
                    break
        if ok and use_lattice:
            for j in range(n):
                work[j] = pt[j]
            for k in range(n_h):
                c = <int> cpiv[k]
                if work[c] != 0:
                    q = work[c] / chnf[k * n + c]
                    r = work[c] - q * chnf[k * n + c]
                    # emulate Python divmod for negative values
                    if r != 0 and ((r < 0) != (chnf[k * n + c] < 0)):
                        q -= 1
                        r += chnf[k * n + c]
                    if r != 0:
                        ok = False
                        break
                    for j in range(c, n):
                        work[j] -= q * chnf[k * n + j]
            if ok:
                for j in range(n):
                    if work[j] != 0:
                        ok = False
                        break
        if ok:
            out.append(tuple([pt[i] for i in range(n)]))
        # advance odometer
        depth = n - 1
        while depth >= 0:
            pt[depth] += 1
            if pt[depth] <= chi[depth]:
                break
            pt[depth] = clo[depth]
            depth -= 1
        if depth < 0:
            break
    free(clo); free(chi); free(ceq); free(cin)
    free(chnf); free(cpiv); free(pt); free(work)
    out.sort()
    return out


cdef void _monoid_rec(int start, int budget, int n, int n_gens,
                      long *gens, long *pt, long *lo, long *hi,
                      set found):
    cdef int i, gi
    cdef bint inside = True
    for i in range(n):
        if pt[i] < lo[i] or pt[i] > hi[i]:
            inside = False
            break
    if inside:
        found.add(tuple([pt[i] for i in range(n)]))
    if budget == 0:
        return
    for gi in range(start, n_gens):
        for i in range(n):
            pt[i] += gens[gi * n + i]
        _monoid_rec(gi, budget - 1, n, n_gens, gens, pt, lo, hi, found)
        for i in range(n):
            pt[i] -= gens[gi * n + i]


def monoid_points(gens, max_total, lo, hi):
    cdef int n = len(lo)
    cdef int n_gens = len(gens)
    cdef long *cg = <long *> malloc(max(1, n_gens * n) * sizeof(long))
    cdef long *pt = <long *> malloc(max(1, n) * sizeof(long))
    cdef long *clo = <long *> malloc(max(1, n) * sizeof(long))
    cdef long *chi = <long *> malloc(max(1, n) * sizeof(long))
    if cg == NULL or pt == NULL or clo == NULL or chi == NULL:
        raise MemoryError()
    cdef int i, j
    for i in range(n_gens):
        for j in range(n):
            cg[i * n + j] = gens[i][j]
    for i in range(n):
        pt[i] = 0
        clo[i] = lo[i]
        chi[i] = hi[i]
    found = set()
    _monoid_rec(0, max_total, n, n_gens, cg, pt, clo, chi, found)
    free(cg); free(pt); free(clo); free(chi)
    return found
