"""Threshold-free evaluation: ROC curves, AUC, partial AUC, ROC averaging.

AUC is the Mann-Whitney statistic (ties count 1/2), computed from
average ranks; it equals the trapezoidal area under the staircase ROC
curve, where tied score groups move diagonally. Curves across
replications are combined by vertical averaging: true-positive rates
are interpolated on a fixed false-positive-rate grid and averaged, with
normal-approximation 95% pointwise intervals.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OneClassError


@dataclass(frozen=True)
class RocCurve:
    """Monotone staircase from (0,0) to (1,1) with threshold provenance.

    ``thresholds[k]`` is the cut c of point k under the rule "positive
    if score >= c" (+inf for the initial (0,0) point).
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    n_pos: int
    n_neg: int


@dataclass(frozen=True)
class AveragedRoc:
    fpr_grid: np.ndarray
    mean_tpr: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    n_curves: int


def _check_scores_labels(scores, labels):
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be 1-D of equal length")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be binary in {0, 1}")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise OneClassError("ROC evaluation needs both classes present")
    return s, y, n_pos, n_neg


def roc_curve(scores, labels) -> RocCurve:
    """Staircase ROC over all cut points; tied scores move diagonally."""
    s, y, n_pos, n_neg = _check_scores_labels(scores, labels)
    order = np.argsort(-s, kind="mergesort")
    s_sorted = s[order]
    y_sorted = y[order]
    # indices where a tie group of sorted scores ends
    last_in_group = np.nonzero(np.diff(s_sorted))[0]
    group_ends = np.r_[last_in_group, s_sorted.size - 1]
    tp = np.cumsum(y_sorted)[group_ends]
    fp = group_ends + 1.0 - tp
    fpr = np.r_[0.0, fp / n_neg]
    tpr = np.r_[0.0, tp / n_pos]
    thresholds = np.r_[np.inf, s_sorted[group_ends]]
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, n_pos=n_pos, n_neg=n_neg)


def _average_ranks(s):
    order = np.argsort(s, kind="mergesort")
    sorted_s = s[order]
    # average 1-based rank within each tie group
    boundaries = np.r_[0, np.nonzero(np.diff(sorted_s))[0] + 1, s.size]
    ranks_sorted = np.empty(s.size)
    for a, b in zip(boundaries[:-1], boundaries[1:]):
        ranks_sorted[a:b] = 0.5 * (a + 1 + b)
    ranks = np.empty(s.size)
    ranks[order] = ranks_sorted
    return ranks


def auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg) with ties counted 1/2."""
    s, y, n_pos, n_neg = _check_scores_labels(scores, labels)
    ranks = _average_ranks(s)
    rank_sum_pos = ranks[y == 1].sum()
    return float((rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def trapezoid_area(curve: RocCurve) -> float:
    """Trapezoidal area under the staircase; equals :func:`auc` on same data."""
    return float(np.trapezoid(curve.tpr, curve.fpr))


def partial_auc(curve: RocCurve, fpr_lo: float, fpr_hi: float) -> float:
    """Area under the curve restricted to [fpr_lo, fpr_hi].

    The staircase is treated as a polyline; tpr at the cut boundaries is
    linearly interpolated.
    """
    if not (0.0 <= fpr_lo < fpr_hi <= 1.0):
        raise ValueError(f"invalid fpr range [{fpr_lo}, {fpr_hi}]")
    x, y = curve.fpr, curve.tpr
    inside = (x >= fpr_lo) & (x <= fpr_hi)
    xs = np.r_[fpr_lo, x[inside], fpr_hi]
    ys = np.r_[np.interp(fpr_lo, x, y), y[inside], np.interp(fpr_hi, x, y)]
    keep = np.argsort(xs, kind="mergesort")
    return float(np.trapezoid(ys[keep], xs[keep]))


def interp_tpr(curve: RocCurve, fprs) -> np.ndarray:
    """tpr at given fpr values; at a vertical jump the upper value is taken."""
    q = np.atleast_1d(np.asarray(fprs, dtype=np.float64))
    x, y = curve.fpr, curve.tpr
    idx = np.searchsorted(x, q, side="right")
    out = np.empty(q.size)
    exact = (idx > 0) & (x[np.minimum(idx, x.size) - 1] == q)
    out[exact] = y[idx[exact] - 1]
    rest = ~exact
    if np.any(rest):
        i = np.clip(idx[rest], 1, x.size - 1)
        x0, x1 = x[i - 1], x[i]
        y0, y1 = y[i - 1], y[i]
        t = (q[rest] - x0) / np.where(x1 > x0, x1 - x0, 1.0)
        out[rest] = y0 + t * (y1 - y0)
    return out


def sensitivity_at_fpr(curve: RocCurve, fpr: float) -> float:
    """Linear interpolation of tpr at one false-positive rate."""
    if not 0.0 <= fpr <= 1.0:
        raise ValueError("fpr must be in [0, 1]")
    return float(interp_tpr(curve, fpr)[0])


def average_roc(curves, grid_size: int = 101) -> AveragedRoc:
    """Vertical averaging of ROC curves with 95% pointwise intervals."""
    curves = list(curves)
    if not curves:
        raise ValueError("average_roc needs at least one curve")
    grid = np.linspace(0.0, 1.0, grid_size)
    tprs = np.vstack([interp_tpr(c, grid) for c in curves])
    mean = tprs.mean(axis=0)
    n = len(curves)
    sd = tprs.std(axis=0, ddof=1) if n > 1 else np.zeros(grid_size)
    half = 1.96 * sd / np.sqrt(n)
    return AveragedRoc(
        fpr_grid=grid,
        mean_tpr=mean,
        ci_lo=np.clip(mean - half, 0.0, 1.0),
        ci_hi=np.clip(mean + half, 0.0, 1.0),
        n_curves=n,
    )


def curve_to_text(curve: RocCurve) -> str:
    """Columnar serialization (fpr, tpr, threshold), one point per line."""
    lines = ["fpr\ttpr\tthreshold"]
    for f, t, c in zip(curve.fpr, curve.tpr, curve.thresholds):
        lines.append(f"{float(f)!r}\t{float(t)!r}\t{float(c)!r}")
    return "\n".join(lines) + "\n"
