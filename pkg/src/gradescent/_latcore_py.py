"""Pure-Python lattice enumeration kernels.

Twin of the compiled module ``gradescent._latcore``; same API, same results.
These two loops dominate the runtime of the integral-closure and chart
machinery, which is why a compiled twin exists at all.
"""

BACKEND = "python"


def box_points(lo, hi, eq_rows, ineq_rows, hnf_basis, hnf_pivots):
    """Integer points u in the box [lo, hi] with

    - eq . u == 0 for every row in eq_rows,
    - ineq . u >= 0 for every row in ineq_rows,
    - u in the lattice described by the HNF rows (empty basis = zero lattice
      membership is skipped when hnf_basis is None).

    Returns a sorted list of tuples.
    """
    n = len(lo)
    out = []
    point = [0] * n

    def in_lattice(v):
        w = list(v)
        for row, c in zip(hnf_basis, hnf_pivots):
            if w[c]:
                q, r = divmod(w[c], row[c])
                if r:
                    return False
                for j in range(c, n):
                    w[j] -= q * row[j]
        return not any(w)

    def rec(i):
        if i == n:
            u = tuple(point)
            for row in eq_rows:
                if sum(a * b for a, b in zip(row, u)) != 0:
                    return
            for row in ineq_rows:
                if sum(a * b for a, b in zip(row, u)) < 0:
                    return
            if hnf_basis is None or in_lattice(u):
                out.append(u)
            return
        for x in range(lo[i], hi[i] + 1):
            point[i] = x
            rec(i + 1)

    rec(0)
    out.sort()
    return out


def monoid_points(gens, max_total, lo, hi):
    """Points of the monoid generated by ``gens`` reachable with coefficient
    sum <= max_total, clipped to the box [lo, hi].  Exhaustive DFS over
    multisets of generators (non-decreasing index), so the result is exactly
    {sum c_i g_i : c_i >= 0, sum c_i <= max_total} intersect box.
    """
    n = len(lo)
    found = set()
    point = [0] * n

    def in_box(p):
        return all(lo[i] <= p[i] <= hi[i] for i in range(n))

    def rec(start, budget):
        if in_box(point):
            found.add(tuple(point))
        if budget == 0:
            return
        for gi in range(start, len(gens)):
            g = gens[gi]
            for j in range(n):
                point[j] += g[j]
            rec(gi, budget - 1)
            for j in range(n):
                point[j] -= g[j]

    rec(0, max_total)
    return found
