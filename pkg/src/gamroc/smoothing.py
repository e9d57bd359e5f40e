"""Weighted natural cubic smoothing splines with df-targeted smoothing.

Implements the Reinsch/Green-Silverman banded formulation: for sorted
distinct abscissas the fit solves

    minimize  sum_i w_i (z_i - f(x_i))^2  +  lam * integral f''(t)^2 dt

via the pentadiagonal system (R + lam Q' W^-1 Q) g = Q' z and
f = z - lam W^-1 Q g. The smoothing parameter is not exposed by degrees
of freedom directly; ``lam`` is found by bisecting log-lam in
[1e-8, 1e8] (60 iterations) until trace of the smoother matrix hits the
requested df, using trace(S) = 2 + trace(B^-1 R) which costs O(n) per
evaluation through the banded inverse kernels.

Tied abscissas are pooled into their weighted means with summed weights,
which leaves the weighted objective unchanged. Targets df <= 2 (and
inputs with fewer than 4 distinct abscissas) fall back to the exact
weighted linear fit, the lam -> infinity limit of the spline.
"""

import numpy as np

from ._accel import kernels

LAMBDA_LO = 1e-8
LAMBDA_HI = 1e8
BISECT_ITERS = 60
DF_TOL = 0.05


class WeightedCubicSmoother:
    """Reusable weighted smoother for one abscissa vector.

    Construction pays the lam search once; :meth:`smooth` then costs one
    O(n) banded solve per target vector, so backfitting sweeps can reuse
    the factorization.
    """

    def __init__(self, x, weights, target_df):
        x = np.asarray(x, dtype=np.float64)
        w = np.asarray(weights, dtype=np.float64)
        if x.shape != w.shape or x.ndim != 1:
            raise ValueError("x and weights must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise ValueError("non-finite input to smoother")
        if np.any(w < 0) or not np.any(w > 0):
            raise ValueError("weights must be nonnegative and not all zero")

        self._obs_w = w
        self.ux, self._inv = np.unique(x, return_inverse=True)
        uw = np.bincount(self._inv, weights=w)
        # zero-weight pool points would blow up W^-1; give them negligible mass
        self.uw = np.maximum(uw, 1e-12 * uw.max())
        self.n_unique = self.ux.size
        self.target_df = float(target_df)
        self.fallback_linear = False
        self.at_bound = False

        if self.n_unique < 4 or self.target_df <= 2.0:
            self.fallback_linear = self.n_unique >= 4
            self._setup_linear()
        else:
            self._setup_spline()

    # -- construction -----------------------------------------------------

    def _setup_linear(self):
        nu = self.n_unique
        if nu == 1:
            self._mode = "constant"
            self.lam = np.inf
            self.df = 1.0
            return
        self._mode = "linear"
        self.lam = np.inf
        self.df = 2.0
        A = np.column_stack([np.ones(nu), self.ux])
        self._A = A
        self._AtW = A.T * self.uw
        self._M = self._AtW @ A

    def _setup_spline(self):
        self._mode = "spline"
        ux, uw = self.ux, self.uw
        h = np.diff(ux)
        wi = 1.0 / uw
        self._q1 = 1.0 / h[:-1]
        self._q2 = -1.0 / h[:-1] - 1.0 / h[1:]
        self._q3 = 1.0 / h[1:]
        self._r0 = (h[:-1] + h[1:]) / 3.0
        self._r1 = h[1:-1] / 6.0
        q1, q2, q3 = self._q1, self._q2, self._q3
        nu = self.n_unique
        self._c0 = q1**2 * wi[: nu - 2] + q2**2 * wi[1 : nu - 1] + q3**2 * wi[2:]
        self._c1 = q2[:-1] * q1[1:] * wi[1 : nu - 2] + q3[:-1] * q2[1:] * wi[2 : nu - 1]
        self._c2 = q3[:-2] * q1[2:] * wi[2 : nu - 2]

        target = min(self.target_df, float(nu) - 1e-9)
        lo, hi = np.log(LAMBDA_LO), np.log(LAMBDA_HI)
        t_lo = self._trace_at(np.exp(lo))
        t_hi = self._trace_at(np.exp(hi))
        if target >= t_lo:
            lam, self.at_bound = np.exp(lo), True
        elif target <= t_hi:
            lam, self.at_bound = np.exp(hi), True
        else:
            for _ in range(BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                if self._trace_at(np.exp(mid)) > target:
                    lo = mid
                else:
                    hi = mid
            lam = np.exp(0.5 * (lo + hi))
        self.lam = float(lam)
        self._factor = self._factorize(self.lam)
        self.df = 2.0 + self._band_trace(self._factor)

    def _factorize(self, lam):
        b0 = self._r0 + lam * self._c0
        b1 = self._r1 + lam * self._c1
        b2 = lam * self._c2
        return kernels.penta_ldl(b0, b1, b2)

    def _band_trace(self, factor):
        ib0, ib1, _ = kernels.penta_inv_bands(*factor)
        return float(ib0 @ self._r0 + 2.0 * (ib1 @ self._r1))

    def _trace_at(self, lam):
        return 2.0 + self._band_trace(self._factorize(lam))

    # -- fitting ----------------------------------------------------------

    def _pool(self, z):
        z = np.asarray(z, dtype=np.float64)
        return np.bincount(self._inv, weights=self._obs_w * z) / self.uw

    def smooth(self, z):
        """Fitted values at the original (unsorted, possibly tied) points."""
        fu = self.smooth_unique(self._pool(z))
        return fu[self._inv]

    def smooth_unique(self, uz):
        """Fitted values at the distinct abscissas given pooled targets."""
        if self._mode == "constant":
            return uz.copy()
        if self._mode == "linear":
            coef = np.linalg.solve(self._M, self._AtW @ uz)
            return self._A @ coef
        q1, q2, q3 = self._q1, self._q2, self._q3
        nu = self.n_unique
        rhs = q1 * uz[: nu - 2] + q2 * uz[1 : nu - 1] + q3 * uz[2:]
        gam = kernels.penta_solve(*self._factor, rhs)
        qg = np.zeros(nu)
        qg[: nu - 2] += q1 * gam
        qg[1 : nu - 1] += q2 * gam
        qg[2:] += q3 * gam
        return uz - self.lam * qg / self.uw

    def hat_unique(self):
        """Dense smoother matrix S on the distinct abscissas (O(n^2) build)."""
        nu = self.n_unique
        if self._mode == "constant":
            return np.ones((1, 1))
        if self._mode == "linear":
            return self._A @ np.linalg.solve(self._M, self._AtW)
        q1, q2, q3 = self._q1, self._q2, self._q3
        QT = np.zeros((nu - 2, nu))
        ii = np.arange(nu - 2)
        QT[ii, ii] = q1
        QT[ii, ii + 1] = q2
        QT[ii, ii + 2] = q3
        G = kernels.penta_solve_mat(*self._factor, QT)
        QG = np.zeros((nu, nu))
        QG[: nu - 2] += q1[:, None] * G
        QG[1 : nu - 1] += q2[:, None] * G
        QG[2:] += q3[:, None] * G
        return np.eye(nu) - self.lam * QG / self.uw[:, None]

    def se_unique(self):
        """Pointwise SE of the fit at distinct abscissas, Var(z_u) = 1/w_u."""
        S = self.hat_unique()
        return np.sqrt(np.maximum((S**2 / self.uw[None, :]).sum(axis=1), 0.0))
