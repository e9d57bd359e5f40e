"""gamroc: additive logistic classification with ROC/AUC benchmarking.

Fitting routes
    * :mod:`gamroc.logistic_glm`  -- linear logistic IRLS, backward elimination
    * :mod:`gamroc.gam_backfit`   -- backfitting / local scoring smoothing-spline GAM
    * :mod:`gamroc.gam_pspline`   -- penalized B-spline likelihood (joint IRLS)
    * :mod:`gamroc.gamboost`      -- componentwise likelihood boosting

Evaluation and data
    * :mod:`gamroc.roc_eval`      -- ROC curves, AUC, partial AUC, averaging
    * :mod:`gamroc.simgen`        -- seeded synthetic scenarios with a known oracle
    * :mod:`gamroc.harness`       -- experiment runner behind the ``gamroc`` CLI

Set ``GAMROC_NUMBA=0`` to run the pure-numpy kernel fallbacks.
"""

from ._accel import BACKEND
from .gam_backfit import (
    AdditiveFit,
    SmoothComponent,
    backfit,
    component_curves,
    local_scoring,
    smooth_weighted,
    stepwise_components,
)
from .gam_pspline import PsplineFit, fit_pspline, penalized_loglik, select_lambda_aic
from .gamboost import BoostFit, boost_candidate_update, boost_fit, boost_select, predict_boost
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    emit_report,
    load_csv,
    run_resampling,
    run_simulation,
    time_fit,
)
from .logistic_glm import (
    GlmFit,
    backward_eliminate,
    bernoulli_deviance,
    fit_glm_irls,
    predict_scores,
    sigmoid,
)
from .roc_eval import (
    AveragedRoc,
    RocCurve,
    auc,
    average_roc,
    partial_auc,
    roc_curve,
    sensitivity_at_fpr,
)
from .simgen import Dataset, GeneratorSpec, gen_dataset, oracle_auc
from .spline_basis import BSplineBasis, build_basis, difference_penalty, eval_basis_matrix

__all__ = [
    "BACKEND",
    "AdditiveFit",
    "AveragedRoc",
    "BSplineBasis",
    "BoostFit",
    "Dataset",
    "ExperimentConfig",
    "ExperimentReport",
    "GeneratorSpec",
    "GlmFit",
    "PsplineFit",
    "RocCurve",
    "SmoothComponent",
    "auc",
    "average_roc",
    "backfit",
    "backward_eliminate",
    "bernoulli_deviance",
    "boost_candidate_update",
    "boost_fit",
    "boost_select",
    "build_basis",
    "component_curves",
    "difference_penalty",
    "emit_report",
    "eval_basis_matrix",
    "fit_glm_irls",
    "fit_pspline",
    "gen_dataset",
    "load_csv",
    "local_scoring",
    "oracle_auc",
    "partial_auc",
    "penalized_loglik",
    "predict_boost",
    "predict_scores",
    "roc_curve",
    "run_resampling",
    "run_simulation",
    "select_lambda_aic",
    "sensitivity_at_fpr",
    "sigmoid",
    "smooth_weighted",
    "stepwise_components",
    "time_fit",
]
__version__ = "0.1.0"
