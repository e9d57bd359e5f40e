"""Backfitting for weighted additive models and local scoring.

The inner loop (``backfit``) cycles weighted smoothing-spline updates of
per-feature partial residuals, re-centering each component to weighted
mean zero and absorbing the mean into the intercept, until no component
changes by more than the tolerance.

``local_scoring`` wraps the inner loop in an IRLS outer loop for binary
responses: working response z = eta + (y - p) / (p (1 - p)), weights
p (1 - p), refit, repeat until the relative deviance change is below
tolerance. Steps that would increase the deviance are halved toward the
previous iterate (up to 10 times) so the recorded deviance path is
non-increasing.

Each smoother is specified by target degrees of freedom; the smoothing
parameter realizing it is found per feature at the current weights (see
``smoothing``). Component evaluation between design points is linear
interpolation with constant extension outside the training range.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import OneClassError
from .logistic_glm import WEIGHT_FLOOR, bernoulli_deviance, sigmoid
from .smoothing import WeightedCubicSmoother

DEFAULT_DF = 4.0
COMPONENT_BOUND = 1e3


@dataclass(frozen=True)
class SmoothComponent:
    """One fitted additive term f_j, tabulated at the distinct training x."""

    feature_index: int
    design_x: np.ndarray
    fitted_values: np.ndarray
    target_df: float
    lam: float
    df: float
    se_at_design: np.ndarray | None = None

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=np.float64), self.design_x, self.fitted_values)


@dataclass(frozen=True)
class AdditiveFit:
    """Fitted additive model: intercept plus centered per-feature smooths."""

    alpha: float
    components: tuple
    converged: bool
    outer_iterations: int
    deviance: float
    effective_df: float
    separation: bool = False
    n_obs: int = 0
    deviance_path: tuple = ()  # accepted outer-iteration deviances

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        eta = np.full(X.shape[0], self.alpha)
        for comp in self.components:
            eta += comp(X[:, comp.feature_index])
        return eta


def _weighted_mean(v, w):
    return float(np.sum(w * v) / np.sum(w))


def smooth_weighted(x, target, weights, target_df: float) -> SmoothComponent:
    """Weighted smoothing-spline fit at the requested df, centered to
    weighted mean zero (the absorbed constant belongs to the intercept).

    Fewer than 4 distinct x values fall back to a weighted linear fit.
    """
    target = np.asarray(target, dtype=np.float64)
    if not np.all(np.isfinite(target)):
        raise ValueError("non-finite target")
    sm = WeightedCubicSmoother(x, weights, target_df)
    if sm.n_unique < 4:
        warnings.warn(
            f"only {sm.n_unique} distinct x values; using weighted linear fit",
            stacklevel=2,
        )
    fitted = sm.smooth(target)
    center = _weighted_mean(fitted, sm._obs_w)
    fu = sm.smooth_unique(sm._pool(target)) - center
    return SmoothComponent(
        feature_index=0,
        design_x=sm.ux,
        fitted_values=fu,
        target_df=float(target_df),
        lam=sm.lam,
        df=sm.df,
    )


def backfit(
    X,
    z,
    weights,
    dfs=None,
    tol: float = 1e-6,
    max_sweeps: int = 50,
    features=None,
) -> AdditiveFit:
    """Cycle per-feature smoother updates of partial residuals.

    Initializes the intercept at the weighted mean of ``z`` and every
    component at zero; sweeps j = 1..p until the largest change in any
    component's fitted values drops below ``tol`` (or ``max_sweeps``).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    z = np.asarray(z, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    n = z.size
    feats = list(range(X.shape[1])) if features is None else list(features)
    p = len(feats)
    dfs = _as_df_list(dfs, p)

    smoothers = [WeightedCubicSmoother(X[:, j], w, df) for j, df in zip(feats, dfs)]
    alpha = _weighted_mean(z, w)
    F = np.zeros((p, n))
    FU = [np.zeros(sm.n_unique) for sm in smoothers]
    total = np.zeros(n)

    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        max_change = 0.0
        for i, sm in enumerate(smoothers):
            partial = z - alpha - (total - F[i])
            fu = sm.smooth_unique(sm._pool(partial))
            f_new = fu[sm._inv]
            center = _weighted_mean(f_new, w)
            f_new -= center
            fu -= center
            alpha += center
            max_change = max(max_change, float(np.max(np.abs(f_new - F[i]))))
            total += f_new - F[i]
            F[i] = f_new
            FU[i] = fu
        if max_change < tol:
            converged = True
            break

    resid = z - alpha - total
    components = tuple(
        SmoothComponent(
            feature_index=feats[i],
            design_x=sm.ux,
            fitted_values=FU[i],
            target_df=dfs[i],
            lam=sm.lam,
            df=sm.df,
        )
        for i, sm in enumerate(smoothers)
    )
    edf = 1.0 + sum(sm.df - 1.0 for sm in smoothers)
    return AdditiveFit(
        alpha=alpha,
        components=components,
        converged=converged,
        outer_iterations=sweeps,
        deviance=float(np.sum(w * resid**2)),
        effective_df=edf,
        n_obs=n,
    )


def _as_df_list(dfs, p):
    if dfs is None:
        return [DEFAULT_DF] * p
    if np.isscalar(dfs):
        return [float(dfs)] * p
    dfs = [float(d) for d in dfs]
    if len(dfs) != p:
        raise ValueError(f"expected {p} df values, got {len(dfs)}")
    return dfs


def local_scoring(
    X,
    y,
    dfs=None,
    features=None,
    tol: float = 1e-6,
    max_outer: int = 25,
    inner_tol: float = 1e-6,
    max_sweeps: int = 50,
    compute_se: bool = True,
) -> AdditiveFit:
    """Additive logistic fit: IRLS outer loop, backfitting inner loop.

    Stops when the relative deviance change is below ``tol`` or after
    ``max_outer`` iterations. Near-separation (deviance collapsing to
    the clipping floor or a component exceeding a norm bound) is flagged
    on the fit with ``converged=False``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if y.min() == y.max():
        raise OneClassError("both classes must be present in y")
    feats = list(range(X.shape[1])) if features is None else list(features)
    p = len(feats)
    n = y.size
    if p and n < 10 * p:
        warnings.warn(f"n={n} < 10 * {p} features; additive fit may be unstable", stacklevel=2)
    dfs = _as_df_list(dfs, p)

    ybar = y.mean()
    alpha = float(np.log(ybar / (1.0 - ybar)))
    eta = np.full(n, alpha)
    dev = bernoulli_deviance(y, sigmoid(eta))
    dev_path = [dev]
    state = None  # (alpha, components tuple, inner fit, eta)
    converged = False
    separation = False
    outer = 0

    for outer in range(1, max_outer + 1):
        prob = sigmoid(eta)
        w = np.clip(prob * (1.0 - prob), WEIGHT_FLOOR, None)
        z = eta + (y - prob) / w
        inner = backfit(
            X, z, w, dfs=dfs, tol=inner_tol, max_sweeps=max_sweeps, features=feats
        )
        alpha_new = inner.alpha
        comps_new = inner.components
        eta_new = _eval_eta(X, alpha_new, comps_new)
        dev_new = bernoulli_deviance(y, sigmoid(eta_new))

        # halve toward the previous iterate if the deviance rose
        for _ in range(10):
            if dev_new <= dev + 1e-12:
                break
            alpha_new = 0.5 * (alpha_new + alpha)
            comps_new = tuple(
                _blend(cn, co) for cn, co in zip(comps_new, state[1])
            ) if state is not None else tuple(_scale(c, 0.5) for c in comps_new)
            eta_new = _eval_eta(X, alpha_new, comps_new)
            dev_new = bernoulli_deviance(y, sigmoid(eta_new))
        if dev_new > dev + 1e-12:
            break  # no improving step; keep previous state

        state = (alpha_new, comps_new, inner, eta_new)
        rel_change = abs(dev - dev_new) / max(abs(dev), 1e-12)
        alpha, eta, dev = alpha_new, eta_new, dev_new
        dev_path.append(dev)

        if any(np.max(np.abs(c.fitted_values)) > COMPONENT_BOUND for c in comps_new):
            separation = True
            break
        if dev < 1e-6:
            separation = True
            break
        if rel_change < tol:
            converged = True
            break

    if state is None:  # no outer step improved: intercept-only result
        components: tuple = tuple()
        edf = 1.0
    else:
        alpha, comps_new, inner, eta = state
        components = comps_new
        edf = inner.effective_df
        if compute_se:
            components = _attach_se(components, X, eta, feats)

    return AdditiveFit(
        alpha=alpha,
        components=components,
        converged=converged and not separation,
        outer_iterations=outer,
        deviance=dev,
        effective_df=edf,
        separation=separation,
        n_obs=n,
        deviance_path=tuple(dev_path),
    )


def _eval_eta(X, alpha, components):
    eta = np.full(X.shape[0], alpha)
    for comp in components:
        eta += comp(X[:, comp.feature_index])
    return eta


def _scale(comp: SmoothComponent, s: float) -> SmoothComponent:
    return SmoothComponent(
        feature_index=comp.feature_index,
        design_x=comp.design_x,
        fitted_values=s * comp.fitted_values,
        target_df=comp.target_df,
        lam=comp.lam,
        df=comp.df,
        se_at_design=comp.se_at_design,
    )


def _blend(new: SmoothComponent, old: SmoothComponent) -> SmoothComponent:
    return SmoothComponent(
        feature_index=new.feature_index,
        design_x=new.design_x,
        fitted_values=0.5 * (new.fitted_values + old.fitted_values),
        target_df=new.target_df,
        lam=new.lam,
        df=new.df,
        se_at_design=new.se_at_design,
    )


def _attach_se(components, X, eta, feats):
    """SE bands from the final-weight smoother matrices (approximate).

    Var(f_hat) is taken as diag(S W^-1 S') with W the converged IRLS
    weights and Var(z) = 1/w, the classical local-scoring approximation.
    """
    prob = sigmoid(eta)
    w = np.clip(prob * (1.0 - prob), WEIGHT_FLOOR, None)
    out = []
    for comp in components:
        sm = WeightedCubicSmoother(X[:, comp.feature_index], w, comp.target_df)
        se = sm.se_unique()
        out.append(
            SmoothComponent(
                feature_index=comp.feature_index,
                design_x=comp.design_x,
                fitted_values=comp.fitted_values,
                target_df=comp.target_df,
                lam=comp.lam,
                df=comp.df,
                se_at_design=se,
            )
        )
    return tuple(out)


def stepwise_components(
    X,
    y,
    df_options=(2.0, 4.0),
    df_scale: float = 1.4,
    **fit_kwargs,
) -> AdditiveFit:
    """Greedy per-feature choice among omit / df options by scaled AIC.

    One full pass over features (holding the other features' current
    choices fixed), then a refit of the chosen configuration. AIC is
    deviance + 2 * df_scale * effective_df; ties within 1e-9 prefer the
    smaller-df option, with omission smallest.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    p = X.shape[1]
    fit_kwargs.pop("compute_se", None)
    config = {j: max(df_options) for j in range(p)}

    def fit_for(cfg, se=False):
        feats = sorted(j for j, d in cfg.items() if d is not None)
        if not feats:
            y_arr = np.asarray(y, dtype=np.float64)
            ybar = y_arr.mean()
            a = float(np.log(ybar / (1.0 - ybar)))
            dev = bernoulli_deviance(y_arr, np.full(y_arr.size, ybar))
            return AdditiveFit(
                alpha=a, components=tuple(), converged=True, outer_iterations=0,
                deviance=dev, effective_df=1.0, n_obs=y_arr.size,
            )
        return local_scoring(
            X, y, dfs=[cfg[j] for j in feats], features=feats,
            compute_se=se, **fit_kwargs,
        )

    def scaled_aic(fit):
        return fit.deviance + 2.0 * df_scale * fit.effective_df

    current = fit_for(config)
    current_aic = scaled_aic(current)
    for j in range(p):
        # candidate order small-df first so ties resolve toward less complexity
        for option in (None, *sorted(df_options)):
            if option == config[j]:
                continue
            trial = dict(config)
            trial[j] = option
            fit_t = fit_for(trial)
            aic_t = scaled_aic(fit_t)
            if aic_t < current_aic - 1e-9:
                config, current, current_aic = trial, fit_t, aic_t
            elif abs(aic_t - current_aic) <= 1e-9 and _df_of(option) < _df_of(config[j]):
                config, current, current_aic = trial, fit_t, aic_t
    return fit_for(config, se=True)


def _df_of(option):
    return 0.0 if option is None else float(option)


def component_curves(fit: AdditiveFit, grid_size: int = 100):
    """Equispaced per-feature grids of (x, f_hat, se) over training ranges."""
    out = []
    for comp in fit.components:
        gx = np.linspace(comp.design_x[0], comp.design_x[-1], grid_size)
        fhat = comp(gx)
        if comp.se_at_design is not None:
            se = np.interp(gx, comp.design_x, comp.se_at_design)
        else:
            se = np.full(grid_size, np.nan)
        out.append((comp.feature_index, gx, fhat, se))
    return out
