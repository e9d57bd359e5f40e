"""B-spline bases on evenly spaced knots and difference penalty matrices.

The basis of ``K`` splines of order ``m`` over [lo, hi] is built on
``K + m + 2`` evenly spaced knots: the interior grid splits [lo, hi]
into ``K - m + 1`` equal cells and ``m`` extra knots extend the grid on
each side at the same spacing (uniform extension, no coincident knots).
Out-of-range evaluation points are clamped to [lo, hi], so predictions
outside the training range use the boundary basis values.
"""

from dataclasses import dataclass

import numpy as np

from ._accel import kernels


@dataclass(frozen=True)
class KnotVector:
    """Evenly spaced knot grid carrying the basis geometry."""

    lo: float
    hi: float
    knots: np.ndarray  # length num_basis + order + 2
    order: int
    num_basis: int

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.num_basis - self.order + 1)


@dataclass(frozen=True)
class BSplineBasis:
    """Order-``m`` B-spline basis with ``K = num_basis`` functions on [lo, hi]."""

    knot_vector: KnotVector
    num_basis: int

    @property
    def lo(self) -> float:
        return self.knot_vector.lo

    @property
    def hi(self) -> float:
        return self.knot_vector.hi

    @property
    def order(self) -> int:
        return self.knot_vector.order


@dataclass(frozen=True)
class PenaltyMatrix:
    """P = D'D for the order-``d`` difference operator D on K coefficients."""

    dim: int
    order: int
    entries: np.ndarray  # (K, K), symmetric positive semidefinite


def build_basis(lo: float, hi: float, K: int = 10, m: int = 4) -> BSplineBasis:
    """Construct an order-``m`` basis of ``K`` splines on [lo, hi].

    Raises
    ------
    ValueError
        If ``lo >= hi`` (invalid domain) or ``K < m`` (too few basis
        functions for the requested order).
    """
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError("domain endpoints must be finite")
    if lo >= hi:
        raise ValueError(f"invalid domain: lo={lo!r} must be < hi={hi!r}")
    if m < 1:
        raise ValueError(f"spline order must be >= 1, got {m}")
    if K < m:
        raise ValueError(f"too few basis functions: K={K} < m={m}")
    step = (hi - lo) / (K - m + 1)
    idx = np.arange(K + m + 2, dtype=np.float64)
    knots = lo + (idx - m) * step
    kv = KnotVector(lo=float(lo), hi=float(hi), knots=knots, order=m, num_basis=K)
    return BSplineBasis(knot_vector=kv, num_basis=K)


def eval_basis_matrix(basis: BSplineBasis, xs) -> np.ndarray:
    """Evaluate the basis at ``xs``; row i holds the K values at xs[i].

    Points outside [lo, hi] are clamped to the boundary, so every row
    sums to 1 (partition of unity).
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1:
        xs = xs.ravel()
    if not np.all(np.isfinite(xs)):
        raise ValueError("evaluation points must be finite")
    kv = basis.knot_vector
    u = np.clip(xs, kv.lo, kv.hi)
    return kernels.bspline_design(
        np.ascontiguousarray(u), kv.knots, kv.order, kv.num_basis
    )


def difference_penalty(K: int, order: int = 1) -> PenaltyMatrix:
    """Difference penalty P = D'D so that b'Pb sums squared coefficient differences.

    ``order`` 1 penalizes first differences (constants unpenalized);
    ``order`` 2 penalizes second differences (constants and linear ramps
    unpenalized).
    """
    if order not in (1, 2):
        raise ValueError(f"penalty order must be 1 or 2, got {order}")
    if K < order + 1:
        raise ValueError(f"dimension too small: K={K} needs at least {order + 1}")
    D = np.diff(np.eye(K), n=order, axis=0)
    P = D.T @ D
    return PenaltyMatrix(dim=K, order=order, entries=P)
