"""Numba-jitted numeric kernels.

Mirrors ``_kernels_numpy``; see that module for the reference semantics.
All inputs are expected to be contiguous float64 arrays.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def bspline_design(u, knots, order, num_basis):
    """Dense design matrix of the ``num_basis`` kept B-splines at points ``u``.

    ``u`` must already be clamped to the basis domain [knots[order-1+...]];
    de Boor's recursion evaluates the ``order`` nonzero splines per point.
    """
    n = u.shape[0]
    m = order
    lo = knots[m]
    step = knots[m + 1] - knots[m]
    out = np.zeros((n, num_basis))
    work = np.empty(2 * m)
    for r in range(n):
        x = u[r]
        # even spacing: locate the cell directly, clamp to interior cells
        j = m + int((x - lo) / step)
        if j < m:
            j = m
        if j > num_basis:
            j = num_basis
        # de Boor: work[0:m] become the order-m splines with full indices
        # j-m+1 .. j, i.e. kept columns j-m .. j-1
        work[0] = 1.0
        for i in range(1, m):
            for q in range(i):
                work[m + q] = work[q]
            work[0] = 0.0
            for q in range(1, i + 1):
                idx = j + q
                right = knots[idx]
                left = knots[idx - i]
                factor = work[m + q - 1] / (right - left)
                work[q - 1] += factor * (right - x)
                work[q] = factor * (x - left)
        for q in range(m):
            out[r, j - m + q] = work[q]
    return out


@njit(cache=True)
def penta_ldl(b0, b1, b2):
    """LDL' factorization of a symmetric pentadiagonal matrix.

    Bands: b0 diagonal (n), b1 first superdiagonal (n-1), b2 second (n-2).
    Returns (d, l1, l2) with B = L diag(d) L', L unit lower, bandwidth 2.
    """
    n = b0.shape[0]
    d = np.empty(n)
    l1 = np.zeros(max(n - 1, 0))
    l2 = np.zeros(max(n - 2, 0))
    for i in range(n):
        if i >= 2:
            l2[i - 2] = b2[i - 2] / d[i - 2]
        if i >= 1:
            t = b1[i - 1]
            if i >= 2:
                t -= d[i - 2] * l1[i - 2] * l2[i - 2]
            l1[i - 1] = t / d[i - 1]
        di = b0[i]
        if i >= 1:
            di -= d[i - 1] * l1[i - 1] * l1[i - 1]
        if i >= 2:
            di -= d[i - 2] * l2[i - 2] * l2[i - 2]
        d[i] = di
    return d, l1, l2


@njit(cache=True)
def penta_solve(d, l1, l2, rhs):
    """Solve B x = rhs given the LDL' factors from :func:`penta_ldl`."""
    n = d.shape[0]
    x = np.empty(n)
    for i in range(n):
        t = rhs[i]
        if i >= 1:
            t -= l1[i - 1] * x[i - 1]
        if i >= 2:
            t -= l2[i - 2] * x[i - 2]
        x[i] = t
    for i in range(n):
        x[i] /= d[i]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= l1[i] * x[i + 1]
        if i + 2 < n:
            x[i] -= l2[i] * x[i + 2]
    return x


@njit(cache=True)
def penta_solve_mat(d, l1, l2, rhs):
    """Column-wise :func:`penta_solve` for a 2-D right-hand side."""
    n, k = rhs.shape
    x = np.empty((n, k))
    for i in range(n):
        for c in range(k):
            t = rhs[i, c]
            if i >= 1:
                t -= l1[i - 1] * x[i - 1, c]
            if i >= 2:
                t -= l2[i - 2] * x[i - 2, c]
            x[i, c] = t
    for i in range(n):
        for c in range(k):
            x[i, c] /= d[i]
    for i in range(n - 1, -1, -1):
        for c in range(k):
            if i + 1 < n:
                x[i, c] -= l1[i] * x[i + 1, c]
            if i + 2 < n:
                x[i, c] -= l2[i] * x[i + 2, c]
    return x


@njit(cache=True)
def penta_inv_bands(d, l1, l2):
    """Central three bands of B**-1 from the LDL' factors.

    Backward recursion of Hutchinson & de Hoog (1985); only the bands
    inside the bandwidth of B are produced, which is all a trace against
    another pentadiagonal matrix needs.
    """
    n = d.shape[0]
    ib0 = np.zeros(n)
    ib1 = np.zeros(max(n - 1, 0))
    ib2 = np.zeros(max(n - 2, 0))
    for i in range(n - 1, -1, -1):
        if i + 2 < n:
            ib2[i] = -(l1[i] * ib1[i + 1] + l2[i] * ib0[i + 2])
        if i + 1 < n:
            s = l1[i] * ib0[i + 1]
            if i + 2 < n:
                s += l2[i] * ib1[i + 1]
            ib1[i] = -s
        v = 1.0 / d[i]
        if i + 1 < n:
            v -= l1[i] * ib1[i]
        if i + 2 < n:
            v -= l2[i] * ib2[i]
        ib0[i] = v
    return ib0, ib1, ib2
