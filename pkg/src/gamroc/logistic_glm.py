"""Linear logistic regression via IRLS with backward elimination.

Newton/IRLS with step-halving on deviance increases; near-separable
data is reported through the ``separation`` flag on the returned fit
(the fit is still returned, ``converged`` honest) rather than raised.
Rank-deficient weighted systems fall back to a 1e-8 ridge and are
flagged. AIC used for elimination can carry a df inflation factor
(``df_scale``), applied to the penalty term only; the stored ``aic``
field is always the raw deviance + 2 * n_params.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import OneClassError

WEIGHT_FLOOR = 1e-10
PROB_EPS = 1e-12
SEPARATION_BOUND = 1e3
MAX_HALVINGS = 10


@dataclass(frozen=True)
class GlmFit:
    coefficients: np.ndarray  # intercept first, then one per kept feature
    converged: bool
    iterations: int
    deviance: float
    aic: float
    kept_features: tuple
    separation: bool
    ridged: bool
    n_features_in: int
    deviance_path: tuple = ()  # deviance after each accepted Newton step


def sigmoid(eta):
    """Numerically stable logistic function exp(eta) / (1 + exp(eta))."""
    eta = np.asarray(eta, dtype=np.float64)
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def bernoulli_deviance(y, p):
    """-2 * Bernoulli log-likelihood, probabilities clipped to [eps, 1-eps]."""
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if y.shape != p.shape:
        raise ValueError(f"length mismatch: y has {y.shape}, p has {p.shape}")
    p = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
    return float(-2.0 * np.sum(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def _check_binary(y):
    y = np.asarray(y, dtype=np.float64)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("y must be binary in {0, 1}")
    if y.min() == y.max():
        raise OneClassError("both classes must be present in y")
    return y


def _solve_with_ridge(H, g):
    try:
        delta = np.linalg.solve(H, g)
        if np.all(np.isfinite(delta)):
            return delta, False
    except np.linalg.LinAlgError:
        pass
    Hr = H + 1e-8 * np.eye(H.shape[0])
    return np.linalg.solve(Hr, g), True


def fit_glm_irls(
    X,
    y,
    max_iter: int = 100,
    tol: float = 1e-8,
    separation_bound: float = SEPARATION_BOUND,
    features=None,
) -> GlmFit:
    """Maximum-likelihood logistic fit of intercept + X[:, features].

    ``features`` defaults to all columns; pass an empty sequence for an
    intercept-only model. Deterministic: identical inputs give identical
    output.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = _check_binary(y)
    n, p_all = X.shape
    if n != y.shape[0]:
        raise ValueError("X and y have different numbers of rows")
    if not np.all(np.isfinite(X)):
        raise ValueError("X must be finite")
    kept = tuple(range(p_all)) if features is None else tuple(int(j) for j in features)
    Z = np.column_stack([np.ones(n), X[:, list(kept)]]) if kept else np.ones((n, 1))
    k = Z.shape[1]
    if n <= k:
        warnings.warn(f"n={n} <= {k} parameters; fit may be unstable", stacklevel=2)

    ybar = y.mean()
    beta = np.zeros(k)
    beta[0] = np.log(ybar / (1.0 - ybar))
    eta = Z @ beta
    dev = bernoulli_deviance(y, sigmoid(eta))
    dev_path = [dev]

    converged = False
    separation = False
    ridged = False
    it = 0
    for it in range(1, max_iter + 1):
        p = sigmoid(eta)
        grad = Z.T @ (y - p)
        if np.max(np.abs(grad)) < tol:
            converged = True
            it -= 1
            break
        w = np.clip(p * (1.0 - p), WEIGHT_FLOOR, None)
        H = Z.T @ (w[:, None] * Z)
        delta, used_ridge = _solve_with_ridge(H, grad)
        ridged = ridged or used_ridge

        step = 1.0
        for _ in range(MAX_HALVINGS + 1):
            beta_new = beta + step * delta
            eta_new = Z @ beta_new
            dev_new = bernoulli_deviance(y, sigmoid(eta_new))
            if dev_new <= dev + 1e-12:
                break
            step *= 0.5
        else:
            break  # no acceptable step: stop, flagged non-converged
        beta, eta, dev = beta_new, eta_new, dev_new
        dev_path.append(dev)

        if np.max(np.abs(beta)) > separation_bound:
            separation = True
            break

    # perfect separation: deviance pinned to the clipping floor with the
    # MLE at infinity; the coefficient-bound check alone can miss it when
    # the gradient underflows first
    p = sigmoid(eta)
    if dev < 1e-6 and np.all((y == 1) == (p > 0.5)):
        separation = True
        converged = False

    return GlmFit(
        coefficients=beta,
        converged=converged and not separation,
        iterations=it,
        deviance=dev,
        aic=dev + 2.0 * k,
        kept_features=kept,
        separation=separation,
        ridged=ridged,
        n_features_in=p_all,
        deviance_path=tuple(dev_path),
    )


def predict_scores(fit: GlmFit, X_new) -> np.ndarray:
    """Linear predictor eta for new rows (monotone in probability).

    Accepts either the kept-feature design or the full original design,
    from which the kept columns are selected.
    """
    X_new = np.atleast_2d(np.asarray(X_new, dtype=np.float64))
    k = len(fit.kept_features)
    if k == 0:
        return np.full(X_new.shape[0], fit.coefficients[0])
    if X_new.shape[1] == k:
        Z = X_new
    elif X_new.shape[1] == fit.n_features_in:
        Z = X_new[:, list(fit.kept_features)]
    else:
        raise ValueError(
            f"expected {k} (kept) or {fit.n_features_in} (full) columns, "
            f"got {X_new.shape[1]}"
        )
    return fit.coefficients[0] + Z @ fit.coefficients[1:]


def backward_eliminate(
    X, y, df_scale: float = 1.0, max_iter: int = 100, tol: float = 1e-8
) -> GlmFit:
    """Backward elimination by AIC starting from the full model.

    Repeatedly drops the single feature whose removal most decreases
    AIC = deviance + 2 * df_scale * n_params; stops when no removal
    decreases it. May reduce to the intercept-only model.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    kept = list(range(X.shape[1]))

    def scaled_aic(fit):
        return fit.deviance + 2.0 * df_scale * (len(fit.kept_features) + 1)

    current = fit_glm_irls(X, y, max_iter=max_iter, tol=tol, features=kept)
    current_aic = scaled_aic(current)
    while kept:
        best_fit, best_aic, best_j = None, None, None
        for j in kept:
            trial = [f for f in kept if f != j]
            fit_j = fit_glm_irls(X, y, max_iter=max_iter, tol=tol, features=trial)
            aic_j = scaled_aic(fit_j)
            if best_aic is None or aic_j < best_aic:
                best_fit, best_aic, best_j = fit_j, aic_j, j
        if best_aic is not None and best_aic < current_aic:
            kept.remove(best_j)
            current, current_aic = best_fit, best_aic
        else:
            break
    return current
