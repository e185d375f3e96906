"""Kernel selection: compiled lattice core when available, pure Python otherwise.

Set ``GRADESCENT_PURE_PYTHON=1`` to force the fallback.  The compiled kernel
works on C longs; callers here guard magnitudes so that every intermediate
dot product stays far below 2**62, falling back to Python ints otherwise.
"""

import os

from . import _latcore_py

_impl = _latcore_py
if not os.environ.get("GRADESCENT_PURE_PYTHON"):
    try:
        from . import _latcore as _compiled

        _impl = _compiled
    except ImportError:
        pass

_SAFE = 1 << 40  # per-entry bound keeping long dot products overflow-free


def backend_name():
    return _impl.BACKEND


def _small(values):
    return all(-_SAFE < v < _SAFE for v in values)


def box_points(lo, hi, eq_rows=(), ineq_rows=(), hnf_basis=None, hnf_pivots=None):
    """Integer points of a box, filtered by equalities, inequalities and an
    optional HNF lattice membership test.  See ``_latcore_py.box_points``."""
    lo = [int(x) for x in lo]
    hi = [int(x) for x in hi]
    eq_rows = [tuple(int(x) for x in r) for r in eq_rows]
    ineq_rows = [tuple(int(x) for x in r) for r in ineq_rows]
    basis = None if hnf_basis is None else [tuple(int(x) for x in r) for r in hnf_basis]
    pivots = None if hnf_basis is None else list(hnf_pivots)
    flat = lo + hi + [x for r in eq_rows for x in r] + [x for r in ineq_rows for x in r]
    if basis:
        flat += [x for r in basis for x in r]
    impl = _impl if _small(flat) else _latcore_py
    return impl.box_points(lo, hi, eq_rows, ineq_rows, basis, pivots)


def monoid_points(gens, max_total, lo, hi):
    """Exhaustive bounded monoid enumeration (oracle-grade); see twin module."""
    gens = [tuple(int(x) for x in g) for g in gens]
    lo = [int(x) for x in lo]
    hi = [int(x) for x in hi]
    flat = lo + hi + [x * (max_total + 1) for g in gens for x in g]
    impl = _impl if _small(flat) else _latcore_py
    return impl.monoid_points(gens, int(max_total), lo, hi)
