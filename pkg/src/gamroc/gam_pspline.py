"""Simultaneous additive-logistic estimation with penalized B-splines.

All component coefficient blocks are estimated jointly by penalized
IRLS (Newton on the penalized log-likelihood): the objective is the
Bernoulli log-likelihood minus 0.5 * sum_j lam_j * b_j' P b_j with P
the difference penalty (order 1 by default). Identifiability comes from
a sum-to-zero constraint on each component's fitted values over the
training rows, imposed through a null-space reparametrization, so
component means are absorbed into the intercept exactly.

Smoothing-parameter selection (`select_lambda_aic`) fits one shared
lambda per grid value and keeps the AIC minimizer, AIC = deviance +
2 * df_scale * effective_df, ties broken toward the larger lambda.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import OneClassError
from .logistic_glm import WEIGHT_FLOOR, bernoulli_deviance, sigmoid
from .spline_basis import BSplineBasis, build_basis, difference_penalty, eval_basis_matrix

DEFAULT_LAMBDA_GRID = np.logspace(-4.0, 4.0, 13)
SEPARATION_BOUND = 1e3


@dataclass(frozen=True)
class PsplineFit:
    alpha: float
    beta: tuple  # per-feature coefficient vectors, length K each
    bases: tuple  # per-feature BSplineBasis (shared K, m configuration)
    lambdas: np.ndarray
    converged: bool
    penalized_loglik: float
    deviance: float
    effective_df: float
    aic: float
    separation: bool = False
    ridged: bool = False
    penalized_deviance_path: tuple = ()  # after each accepted Newton step

    def predict(self, X_new) -> np.ndarray:
        X_new = np.atleast_2d(np.asarray(X_new, dtype=np.float64))
        eta = np.full(X_new.shape[0], self.alpha)
        for j, (basis, bj) in enumerate(zip(self.bases, self.beta)):
            eta += eval_basis_matrix(basis, X_new[:, j]) @ bj
        return eta


def penalized_loglik(beta_all, alpha, X_bases, y, lambdas, P) -> float:
    """l(y; beta) - 0.5 * sum_j lam_j * b_j' P b_j evaluated directly."""
    y = np.asarray(y, dtype=np.float64)
    lambdas = np.broadcast_to(np.asarray(lambdas, dtype=np.float64), (len(beta_all),))
    eta = np.full(y.size, float(alpha))
    penalty = 0.0
    for bj, Bj, lam in zip(beta_all, X_bases, lambdas):
        bj = np.asarray(bj, dtype=np.float64)
        if Bj.shape[1] != bj.size:
            raise ValueError("coefficient block does not match its basis matrix")
        eta += Bj @ bj
        penalty += lam * float(bj @ P @ bj)
    p = np.clip(sigmoid(eta), 1e-12, 1.0 - 1e-12)
    ll = float(np.sum(y * np.log(p) + (1.0 - y) * np.log1p(-p)))
    return ll - 0.5 * penalty


def _null_space_of_vector(c):
    """Orthonormal basis of {v : c'v = 0} (K x (K-1)), deterministic."""
    c = np.asarray(c, dtype=np.float64)
    _, _, vt = np.linalg.svd(c[None, :])
    return vt[1:].T


def fit_pspline(
    X,
    y,
    lambdas=1.0,
    K: int = 10,
    m: int = 4,
    penalty_order: int = 1,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> PsplineFit:
    """Penalized IRLS fit of the additive logistic model.

    ``lambdas`` may be a scalar (shared) or one value per feature.
    Converges when the max-norm of the penalized score drops below
    ``tol``; rank problems fall back to a 1e-8 ridge (flagged).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if y.min() == y.max():
        raise OneClassError("both classes must be present in y")
    if n <= 5 * p:
        warnings.warn(
            f"n={n} <= 5 * {p} features; penalized fit may not converge", stacklevel=2
        )
    lambdas = np.broadcast_to(np.asarray(lambdas, dtype=np.float64), (p,)).copy()
    if np.any(lambdas < 0):
        raise ValueError("lambdas must be nonnegative")

    P = difference_penalty(K, penalty_order).entries
    bases = []
    blocks = []  # constrained design blocks B_j Z_j
    Zs = []
    for j in range(p):
        basis = build_basis(X[:, j].min(), X[:, j].max(), K=K, m=m)
        Bj = eval_basis_matrix(basis, X[:, j])
        Z = _null_space_of_vector(Bj.sum(axis=0))
        bases.append(basis)
        blocks.append(Bj @ Z)
        Zs.append(Z)
    design = np.column_stack([np.ones(n)] + blocks)
    q = design.shape[1]
    slices = []
    start = 1
    for j in range(p):
        slices.append(slice(start, start + K - 1))
        start += K - 1

    pen = np.zeros((q, q))
    for j in range(p):
        pen[slices[j], slices[j]] = lambdas[j] * (Zs[j].T @ P @ Zs[j])

    ybar = y.mean()
    theta = np.zeros(q)
    theta[0] = np.log(ybar / (1.0 - ybar))
    eta = design @ theta
    pdev = bernoulli_deviance(y, sigmoid(eta)) + theta @ pen @ theta
    pdev_path = [float(pdev)]

    converged = False
    ridged = False
    separation = False
    for _ in range(max_iter):
        prob = sigmoid(eta)
        grad = design.T @ (y - prob) - pen @ theta
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
        w = np.clip(prob * (1.0 - prob), WEIGHT_FLOOR, None)
        H = design.T @ (w[:, None] * design) + pen
        try:
            delta = np.linalg.solve(H, grad)
            if not np.all(np.isfinite(delta)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            delta = np.linalg.solve(H + 1e-8 * np.eye(q), grad)
            ridged = True

        step = 1.0
        improved = False
        for _ in range(11):
            theta_new = theta + step * delta
            eta_new = design @ theta_new
            pdev_new = bernoulli_deviance(y, sigmoid(eta_new)) + theta_new @ pen @ theta_new
            if pdev_new <= pdev + 1e-12:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        theta, eta, pdev = theta_new, eta_new, pdev_new
        pdev_path.append(float(pdev))
        if np.max(np.abs(theta)) > SEPARATION_BOUND:
            separation = True
            break

    dev = bernoulli_deviance(y, sigmoid(eta))
    if dev < 1e-6:
        separation = True
        converged = False

    prob = sigmoid(eta)
    w = np.clip(prob * (1.0 - prob), WEIGHT_FLOOR, None)
    XtWX = design.T @ (w[:, None] * design)
    try:
        edf = float(np.trace(np.linalg.solve(XtWX + pen, XtWX)))
    except np.linalg.LinAlgError:
        edf = float(np.trace(np.linalg.solve(XtWX + pen + 1e-8 * np.eye(q), XtWX)))
        ridged = True

    beta = tuple(Zs[j] @ theta[slices[j]] for j in range(p))
    pll = float(-0.5 * dev - 0.5 * (theta @ pen @ theta))
    # deviance = -2 ll up to the saturated-model constant, which is 0 for
    # binary y, so ll = -dev / 2 exactly
    return PsplineFit(
        alpha=float(theta[0]),
        beta=beta,
        bases=tuple(bases),
        lambdas=lambdas,
        converged=converged and not separation,
        penalized_loglik=pll,
        deviance=dev,
        effective_df=edf,
        aic=dev + 2.0 * edf,
        separation=separation,
        ridged=ridged,
        penalized_deviance_path=tuple(pdev_path),
    )


def predict_pspline(fit: PsplineFit, X_new) -> np.ndarray:
    """Linear predictor on new rows (clamped to each feature's basis range)."""
    return fit.predict(X_new)


def select_lambda_aic(
    X,
    y,
    grid=None,
    K: int = 10,
    m: int = 4,
    df_scale: float = 1.0,
    **fit_kwargs,
) -> PsplineFit:
    """Shared-lambda grid search minimizing deviance + 2 * df_scale * edf.

    Ties (within 1e-9) break toward the larger lambda. Raises if every
    grid fit fails.
    """
    grid = DEFAULT_LAMBDA_GRID if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("lambda grid must be nonempty")
    best = None
    min_aic = np.inf
    failures = []
    for lam in np.sort(grid):
        try:
            fit = fit_pspline(X, y, lambdas=lam, K=K, m=m, **fit_kwargs)
        except (np.linalg.LinAlgError, FloatingPointError) as exc:  # pragma: no cover
            failures.append((lam, exc))
            continue
        aic = fit.deviance + 2.0 * df_scale * fit.effective_df
        # ascending lambda, so accepting ties hands them to the larger value
        if aic <= min_aic + 1e-9:
            best = fit
        min_aic = min(min_aic, aic)
    if best is None:
        raise RuntimeError(f"all {grid.size} lambda fits failed: {failures}")
    return best
