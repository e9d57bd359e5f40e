"""Experiment orchestration: simulation and CSV-resampling benchmarks.

Runs every requested method on each replication's training draw, scores
the held-out rows with the linear predictor (AUC is invariant to the
monotone probability map, and the linear scale avoids saturation),
and records one row per (replication, method) -- failures carry an
error code, never silently dropped. Per-replication data and RNG
streams are derived from the root seed with ``SeedSequence`` spawn
keys, so parallel and sequential execution produce identical
non-timing output.

Timing wraps the fit call only (monotonic clock); one discarded
warm-up fit per method per process absorbs JIT compilation.
"""

import csv
import logging
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .gam_backfit import component_curves, local_scoring, stepwise_components
from .gam_pspline import fit_pspline, select_lambda_aic
from .gamboost import boost_fit, predict_boost
from .logistic_glm import backward_eliminate, fit_glm_irls, predict_scores
from .roc_eval import RocCurve, average_roc, auc, interp_tpr, partial_auc, roc_curve
from .simgen import Dataset, GeneratorSpec, gen_dataset

log = logging.getLogger(__name__)

METHOD_NAMES = (
    "glm",
    "glm_step",
    "backfit",
    "backfit_step",
    "pspline",
    "pspline_aic",
    "gamboost",
)
ADDITIVE_CURVE_METHODS = ("backfit", "backfit_step")
SENS_FPRS = (0.05, 0.10, 0.15)

RECORD_FIELDS = (
    "rep",
    "method",
    "auc",
    "pauc_0_0.1",
    "sens_0.05",
    "sens_0.10",
    "sens_0.15",
    "oracle_auc",
    "fit_seconds",
    "converged",
    "error",
    "df_raw",
    "df_scaled",
    "n_selected",
    "selected",
)
TIMING_FIELDS = ("fit_seconds",)


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str  # "simulate" or "resample"
    methods: tuple = METHOD_NAMES
    reps: int = 100
    seed: int = 0
    df_scale: float = 1.4
    # simulate
    set_id: int = 1
    dim: int = 5
    train_n: int = 100
    test_n: int = 1000
    # resample
    train_frac: float = 0.9
    # execution
    jobs: int = 1
    roc_grid_size: int = 101
    output_dir: str | None = None

    def __post_init__(self):
        if self.mode not in ("simulate", "resample"):
            raise ValueError(f"mode must be simulate or resample, got {self.mode!r}")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        bad = [m for m in self.methods if m not in METHOD_NAMES]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {METHOD_NAMES}")
        if not 0.0 < self.train_frac < 1.0:
            raise ValueError("train_frac must be in (0, 1)")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    records: tuple  # one dict per (rep, method), rep-major order
    avg_roc: dict  # method -> AveragedRoc
    components: dict  # method -> list of (feature, grid_x, fhat, se) from rep 0
    summary: dict  # method -> summary stats dict


@dataclass(frozen=True)
class FittedMethod:
    score: object  # callable X -> linear predictor
    converged: bool
    selected: tuple | None
    df_raw: float
    df_scaled: float
    curves: object = None  # callable () -> component curve list, or None


def _scaled(df_raw, cfg):
    return cfg.df_scale * df_raw


def _fit_glm(X, y, cfg):
    fit = fit_glm_irls(X, y)
    k = len(fit.kept_features) + 1.0
    return FittedMethod(
        score=lambda Xn: predict_scores(fit, Xn),
        converged=fit.converged,
        selected=None,
        df_raw=k,
        df_scaled=_scaled(k, cfg),
    )


def _fit_glm_step(X, y, cfg):
    fit = backward_eliminate(X, y, df_scale=cfg.df_scale)
    k = len(fit.kept_features) + 1.0
    return FittedMethod(
        score=lambda Xn: predict_scores(fit, Xn),
        converged=fit.converged,
        selected=tuple(fit.kept_features),
        df_raw=k,
        df_scaled=_scaled(k, cfg),
    )


def _fit_backfit(X, y, cfg):
    fit = local_scoring(X, y)
    return FittedMethod(
        score=fit.predict,
        converged=fit.converged,
        selected=None,
        df_raw=fit.effective_df,
        df_scaled=_scaled(fit.effective_df, cfg),
        curves=lambda: component_curves(fit),
    )


def _fit_backfit_step(X, y, cfg):
    fit = stepwise_components(X, y, df_scale=cfg.df_scale)
    return FittedMethod(
        score=fit.predict,
        converged=fit.converged,
        selected=tuple(c.feature_index for c in fit.components),
        df_raw=fit.effective_df,
        df_scaled=_scaled(fit.effective_df, cfg),
        curves=lambda: component_curves(fit),
    )


def _fit_pspline(X, y, cfg):
    fit = fit_pspline(X, y, lambdas=1.0)
    return FittedMethod(
        score=fit.predict,
        converged=fit.converged,
        selected=None,
        df_raw=fit.effective_df,
        df_scaled=_scaled(fit.effective_df, cfg),
    )


def _fit_pspline_aic(X, y, cfg):
    fit = select_lambda_aic(X, y, df_scale=cfg.df_scale)
    return FittedMethod(
        score=fit.predict,
        converged=fit.converged,
        selected=None,
        df_raw=fit.effective_df,
        df_scaled=_scaled(fit.effective_df, cfg),
    )


def _fit_gamboost(X, y, cfg):
    fit = boost_fit(X, y)
    used = tuple(sorted(set(fit.selected_sequence[: fit.chosen_step].tolist())))
    df = float(fit.edf_path[fit.chosen_step])
    return FittedMethod(
        score=lambda Xn: predict_boost(fit, Xn),
        converged=not fit.stalled,
        selected=used,
        df_raw=df,
        df_scaled=df,  # df inflation is not part of the boosting protocol
    )


_REGISTRY = {
    "glm": _fit_glm,
    "glm_step": _fit_glm_step,
    "backfit": _fit_backfit,
    "backfit_step": _fit_backfit_step,
    "pspline": _fit_pspline,
    "pspline_aic": _fit_pspline_aic,
    "gamboost": _fit_gamboost,
}


def time_fit(method: str, X, y, cfg: ExperimentConfig):
    """Fit one method, returning (FittedMethod, wall seconds of the fit only)."""
    fit_fn = _REGISTRY[method]
    t0 = time.perf_counter()
    fitted = fit_fn(X, y, cfg)
    return fitted, time.perf_counter() - t0


_WARMED: set = set()


def warm_up(methods, cfg=None):
    """One discarded fit per method so JIT/caching stays out of timings."""
    cfg = cfg or ExperimentConfig(mode="simulate", methods=tuple(methods), reps=1)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(0)))
    X = rng.uniform(-1.0, 1.0, size=(48, 2))
    y = (rng.random(48) < 1.0 / (1.0 + np.exp(-2.0 * X[:, 0]))).astype(np.float64)
    if y.min() == y.max():  # pragma: no cover
        y[0] = 1.0 - y[0]
    for name in methods:
        if name in _WARMED:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                _REGISTRY[name](X, y, cfg)
            except Exception:  # pragma: no cover - warm-up is best effort
                pass
        _WARMED.add(name)


def _derived_seed(seed, *key):
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _blank_record(rep, method):
    return {
        "rep": rep,
        "method": method,
        "auc": float("nan"),
        "pauc_0_0.1": float("nan"),
        "sens_0.05": float("nan"),
        "sens_0.10": float("nan"),
        "sens_0.15": float("nan"),
        "oracle_auc": float("nan"),
        "fit_seconds": float("nan"),
        "converged": False,
        "error": "",
        "df_raw": float("nan"),
        "df_scaled": float("nan"),
        "n_selected": -1,
        "selected": None,
    }


def _run_rep_methods(cfg, rep, train_X, train_y, test_X, test_y, oracle):
    records = []
    curves = {}
    comp_curves = {}
    for name in cfg.methods:
        rec = _blank_record(rep, name)
        rec["oracle_auc"] = oracle
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                fitted, seconds = time_fit(name, train_X, train_y, cfg)
                scores = np.asarray(fitted.score(test_X), dtype=np.float64)
            curve = roc_curve(scores, test_y)
            rec["auc"] = auc(scores, test_y)
            rec["pauc_0_0.1"] = partial_auc(curve, 0.0, 0.1)
            sens = interp_tpr(curve, np.asarray(SENS_FPRS))
            rec["sens_0.05"], rec["sens_0.10"], rec["sens_0.15"] = map(float, sens)
            rec["fit_seconds"] = seconds
            rec["converged"] = bool(fitted.converged)
            rec["df_raw"] = float(fitted.df_raw)
            rec["df_scaled"] = float(fitted.df_scaled)
            if fitted.selected is not None:
                rec["n_selected"] = len(fitted.selected)
                rec["selected"] = tuple(fitted.selected)
            curves[name] = (curve.fpr, curve.tpr)
            if rep == 0 and name in ADDITIVE_CURVE_METHODS and fitted.curves:
                comp_curves[name] = fitted.curves()
        except Exception as exc:
            rec["error"] = f"{type(exc).__name__}: {exc}"
        records.append(rec)
    return records, curves, comp_curves


def _simulate_rep(args):
    cfg, rep = args
    spec_tr = GeneratorSpec(cfg.set_id, cfg.dim, cfg.train_n, _derived_seed(cfg.seed, rep, 0))
    spec_te = GeneratorSpec(cfg.set_id, cfg.dim, cfg.test_n, _derived_seed(cfg.seed, rep, 1))
    train = gen_dataset(spec_tr)
    test = gen_dataset(spec_te)
    oracle = auc(test.oracle_eta, test.y)
    return _run_rep_methods(cfg, rep, train.X, train.y, test.X, test.y, oracle)


_RESAMPLE_DATA: dict = {}


def _stratified_split(y, train_frac, rng):
    train_idx = []
    test_idx = []
    for cls in (0.0, 1.0):
        idx = np.nonzero(y == cls)[0]
        perm = idx[rng.permutation(idx.size)]
        n_train = int(np.floor(train_frac * idx.size))
        train_idx.append(perm[:n_train])
        test_idx.append(perm[n_train:])
    return np.sort(np.concatenate(train_idx)), np.sort(np.concatenate(test_idx))


def _resample_rep(args):
    cfg, rep = args
    data = _RESAMPLE_DATA["dataset"]
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(cfg.seed, spawn_key=(rep,)))
    )
    tr, te = _stratified_split(data.y, cfg.train_frac, rng)
    return _run_rep_methods(
        cfg, rep, data.X[tr], data.y[tr], data.X[te], data.y[te], float("nan")
    )


def _pool_init(cfg, dataset=None):
    if dataset is not None:
        _RESAMPLE_DATA["dataset"] = dataset
    warm_up(cfg.methods, cfg)


def _collect(cfg, rep_fn, init_args):
    jobs = [(cfg, r) for r in range(cfg.reps)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(
            max_workers=cfg.jobs, initializer=_pool_init, initargs=init_args
        ) as pool:
            results = list(pool.map(rep_fn, jobs))
    else:
        _pool_init(*init_args)
        results = [rep_fn(j) for j in jobs]

    records = []
    curves_by_method = {m: [] for m in cfg.methods}
    components = {}
    for rep_records, rep_curves, rep_components in results:
        records.extend(rep_records)
        for m, (fpr, tpr) in rep_curves.items():
            curves_by_method[m].append((fpr, tpr))
        for m, cc in rep_components.items():
            components.setdefault(m, cc)

    avg = {}
    for m, pairs in curves_by_method.items():
        if pairs:
            cs = [
                RocCurve(fpr=f, tpr=t, thresholds=np.full(f.size, np.nan), n_pos=0, n_neg=0)
                for f, t in pairs
            ]
            avg[m] = average_roc(cs, grid_size=cfg.roc_grid_size)
    return ExperimentReport(
        config=cfg,
        records=tuple(records),
        avg_roc=avg,
        components=components,
        summary=_summarize(cfg, records),
    )


def run_simulation(cfg: ExperimentConfig, spec: GeneratorSpec | None = None) -> ExperimentReport:
    """Fresh train/test draws per replication; every method fit on each."""
    if spec is not None:
        cfg = replace(cfg, set_id=spec.set_id, dim=spec.d, train_n=spec.n, seed=spec.seed)
    if cfg.mode != "simulate":
        cfg = replace(cfg, mode="simulate")
    return _collect(cfg, _simulate_rep, (cfg,))


def run_resampling(cfg: ExperimentConfig, dataset: Dataset) -> ExperimentReport:
    """Stratified train/test resampling of a fixed dataset."""
    if cfg.mode != "resample":
        cfg = replace(cfg, mode="resample")
    y = dataset.y
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if min(n_pos, n_neg) < 2:
        raise ValueError(
            f"class-too-small: need >= 2 per class, got {n_pos} positive / {n_neg} negative"
        )
    _RESAMPLE_DATA["dataset"] = dataset
    return _collect(cfg, _resample_rep, (cfg, dataset))


def _summarize(cfg, records):
    out = {}
    for m in cfg.methods:
        rows = [r for r in records if r["method"] == m]
        ok = [r for r in rows if not r["error"]]
        aucs = np.array([r["auc"] for r in ok], dtype=np.float64)
        secs = np.array([r["fit_seconds"] for r in ok], dtype=np.float64)
        stats = {
            "n_records": len(rows),
            "n_failed": len(rows) - len(ok),
            "auc_mean": float(np.mean(aucs)) if aucs.size else float("nan"),
            "auc_sd": float(np.std(aucs, ddof=1)) if aucs.size > 1 else 0.0,
            "auc_q25": float(np.quantile(aucs, 0.25)) if aucs.size else float("nan"),
            "auc_median": float(np.median(aucs)) if aucs.size else float("nan"),
            "auc_q75": float(np.quantile(aucs, 0.75)) if aucs.size else float("nan"),
            "time_mean_s": float(np.mean(secs)) if secs.size else float("nan"),
        }
        out[m] = stats
    return out


# -- serialization ---------------------------------------------------------


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))  # plain-float repr round-trips exactly
    if isinstance(value, tuple):
        return ";".join(str(v) for v in value)
    return str(value)


def records_to_text(records) -> str:
    lines = ["\t".join(RECORD_FIELDS)]
    for rec in records:
        lines.append("\t".join(_fmt(rec[f]) for f in RECORD_FIELDS))
    return "\n".join(lines) + "\n"


def parse_records(path) -> list:
    """Re-parse an emitted records file into the in-memory row dicts."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != RECORD_FIELDS:
            raise ValueError(f"unexpected records header in {path}")
        rows = []
        for line in fh:
            vals = line.rstrip("\n").split("\t")
            rec = dict(zip(RECORD_FIELDS, vals))
            rec["rep"] = int(rec["rep"])
            for f in (
                "auc",
                "pauc_0_0.1",
                "sens_0.05",
                "sens_0.10",
                "sens_0.15",
                "oracle_auc",
                "fit_seconds",
                "df_raw",
                "df_scaled",
            ):
                rec[f] = float(rec[f])
            rec["converged"] = rec["converged"] == "true"
            rec["n_selected"] = int(rec["n_selected"])
            rec["selected"] = (
                tuple(int(v) for v in rec["selected"].split(";")) if rec["selected"] else None
            )
            rows.append(rec)
    return rows


def emit_report(report: ExperimentReport, output_dir) -> dict:
    """Write records, per-method averaged ROC grids, summary, component
    curves, and the resolved configuration; returns written paths."""
    os.makedirs(output_dir, exist_ok=True)
    paths = {}

    rec_path = os.path.join(output_dir, "records.tsv")
    with open(rec_path, "w", encoding="utf-8") as fh:
        fh.write(records_to_text(report.records))
    paths["records"] = rec_path

    for m, av in report.avg_roc.items():
        p = os.path.join(output_dir, f"roc_avg_{m}.tsv")
        with open(p, "w", encoding="utf-8") as fh:
            fh.write("fpr\tmean_tpr\tci_lo\tci_hi\n")
            for row in zip(av.fpr_grid, av.mean_tpr, av.ci_lo, av.ci_hi):
                fh.write("\t".join(_fmt(float(v)) for v in row) + "\n")
        paths[f"roc_{m}"] = p

    for m, curves in report.components.items():
        p = os.path.join(output_dir, f"components_{m}.tsv")
        with open(p, "w", encoding="utf-8") as fh:
            fh.write("feature\tx\tfhat\tse\n")
            for feature, gx, fhat, se in curves:
                for xv, fv, sv in zip(gx, fhat, se):
                    fh.write(f"{feature}\t{float(xv)!r}\t{float(fv)!r}\t{float(sv)!r}\n")
        paths[f"components_{m}"] = p

    sum_path = os.path.join(output_dir, "summary.tsv")
    sum_fields = (
        "method",
        "n_records",
        "n_failed",
        "auc_mean",
        "auc_sd",
        "auc_q25",
        "auc_median",
        "auc_q75",
        "time_mean_s",
    )
    with open(sum_path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(sum_fields) + "\n")
        for m in report.config.methods:
            stats = report.summary[m]
            fh.write(
                "\t".join([m] + [_fmt(stats[f]) for f in sum_fields[1:]]) + "\n"
            )
    paths["summary"] = sum_path

    cfg_path = os.path.join(output_dir, "run_config.txt")
    with open(cfg_path, "w", encoding="utf-8") as fh:
        cfg = report.config
        for f in sorted(fields(cfg), key=lambda f: f.name):
            val = getattr(cfg, f.name)
            if isinstance(val, tuple):
                val = ",".join(str(v) for v in val)
            fh.write(f"{f.name} = {val}\n")
    paths["config"] = cfg_path
    return paths


def load_csv(path, label_column: str, positive_label: str) -> Dataset:
    """Load a feature CSV with a header row and one label column.

    Rows with missing values (empty, NA, NaN) are dropped with a logged
    count; a non-numeric feature cell raises naming the row and column.
    Labels must take exactly the positive value and one other value.
    """
    missing_tokens = {"", "na", "nan"}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, header required") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ValueError(f"{path}: label column {label_column!r} not in header {header}")
        label_ix = header.index(label_column)
        feat_ix = [i for i in range(len(header)) if i != label_ix]
        feature_names = tuple(header[i] for i in feat_ix)

        rows = []
        labels = []
        dropped = 0
        for line_no, cells in enumerate(reader, start=2):
            if len(cells) != len(header):
                raise ValueError(
                    f"{path}:{line_no}: expected {len(header)} fields, got {len(cells)}"
                )
            if any(c.strip().lower() in missing_tokens for c in cells):
                dropped += 1
                continue
            vals = []
            for i in feat_ix:
                cell = cells[i].strip()
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"{path}:{line_no}: non-numeric value {cell!r} "
                        f"in column {header[i]!r}"
                    ) from None
            rows.append(vals)
            labels.append(cells[label_ix].strip())

    if dropped:
        log.warning("%s: dropped %d rows with missing values", path, dropped)
    if not rows:
        raise ValueError(f"{path}: all rows dropped")
    distinct = sorted(set(labels))
    if positive_label not in distinct:
        raise ValueError(
            f"{path}: unknown-label-value: positive label {positive_label!r} "
            f"not among {distinct}"
        )
    if len(distinct) != 2:
        raise ValueError(
            f"{path}: unknown-label-value: expected 2 distinct labels, got {distinct}"
        )
    y = np.array([1.0 if lab == positive_label else 0.0 for lab in labels])
    return Dataset(
        X=np.asarray(rows, dtype=np.float64), y=y, feature_names=feature_names
    )
