"""Plain numpy fallback kernels.

Reference implementations of the hot loops; selected when numba is
unavailable or ``GAMROC_NUMBA=0``. The B-spline design matrix is fully
vectorized (Cox-de Boor order raising on the whole point set); the
banded recursions are inherently sequential and run as Python loops,
vectorized across right-hand sides where possible.
"""

import numpy as np


def bspline_design(u, knots, order, num_basis):
    """Dense design matrix of the ``num_basis`` kept B-splines at points ``u``.

    Same contract as the numba version: ``u`` pre-clamped to [lo, hi] where
    lo = knots[order], hi = knots[num_basis + 1].
    """
    m = order
    L = knots.shape[0]
    hi = knots[num_basis + 1]
    # order-1 indicators on all L-1 knot cells
    B = ((u[:, None] >= knots[None, :-1]) & (u[:, None] < knots[None, 1:])).astype(
        np.float64
    )
    at_hi = u == hi
    if np.any(at_hi):
        # right endpoint belongs to the last interior cell
        B[at_hi, :] = 0.0
        B[at_hi, num_basis] = 1.0
    for k in range(2, m + 1):
        # raise order: L-k+1 splines of order k-1 -> L-k splines of order k
        left = knots[: L - k]
        d1 = knots[k - 1 : L - 1] - left
        d2 = knots[k:] - knots[1 : L - k + 1]
        a = (u[:, None] - left[None, :]) / d1[None, :]
        b = (knots[None, k:] - u[:, None]) / d2[None, :]
        B = a * B[:, : L - k] + b * B[:, 1 : L - k + 1]
    # full spline indices 0..num_basis+1; keep 1..num_basis
    return np.ascontiguousarray(B[:, 1 : num_basis + 1])


def penta_ldl(b0, b1, b2):
    """LDL' factorization of a symmetric pentadiagonal matrix (see numba twin)."""
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
            di -= d[i - 1] * l1[i - 1] ** 2
        if i >= 2:
            di -= d[i - 2] * l2[i - 2] ** 2
        d[i] = di
    return d, l1, l2


def penta_solve_mat(d, l1, l2, rhs):
    """Solve B X = rhs (2-D rhs) given LDL' factors; vectorized across columns."""
    n = d.shape[0]
    x = np.array(rhs, dtype=np.float64, copy=True)
    for i in range(1, n):
        x[i] -= l1[i - 1] * x[i - 1]
        if i >= 2:
            x[i] -= l2[i - 2] * x[i - 2]
    x /= d[:, None]
    for i in range(n - 2, -1, -1):
        x[i] -= l1[i] * x[i + 1]
        if i + 2 < n:
            x[i] -= l2[i] * x[i + 2]
    return x


def penta_solve(d, l1, l2, rhs):
    """Solve B x = rhs for a single right-hand side."""
    return penta_solve_mat(d, l1, l2, rhs[:, None])[:, 0]


def penta_inv_bands(d, l1, l2):
    """Central three bands of B**-1 (Hutchinson & de Hoog backward recursion)."""
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
