"""Acceptance gate: every release criterion with its stated tolerance.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them
live). Criteria 1-4 read the session-scoped 100-replication benchmark
runs from conftest; the rest run their own targeted checks.
"""

from dataclasses import replace

import numpy as np

from gamroc.gam_backfit import local_scoring
from gamroc.gam_pspline import fit_pspline
from gamroc.gamboost import boost_candidate_update
from gamroc.harness import (
    RECORD_FIELDS,
    ExperimentConfig,
    emit_report,
    run_simulation,
    time_fit,
    warm_up,
)
from gamroc.logistic_glm import fit_glm_irls, predict_scores, sigmoid
from gamroc.roc_eval import auc
from gamroc.simgen import GeneratorSpec, gen_dataset
from gamroc.spline_basis import build_basis, difference_penalty, eval_basis_matrix

GAM_METHODS = ("backfit", "backfit_step", "pspline", "pspline_aic", "gamboost")


def check(criterion: str, passed: bool, detail: str):
    print(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
    assert passed, f"{criterion}: {detail}"


def paired_aucs(by_method, method, reps=100):
    return np.array([by_method[method][r]["auc"] for r in range(reps)])


def test_criterion_1_auc_dominance_set1(set1_report, set1_by_method):
    glm = paired_aucs(set1_by_method, "glm")
    margins = {m: paired_aucs(set1_by_method, m).mean() - glm.mean() for m in GAM_METHODS}
    min_margin = min(margins.values())
    wins_backfit = int((paired_aucs(set1_by_method, "backfit") > glm).sum())
    wins_boost = int((paired_aucs(set1_by_method, "gamboost") > glm).sum())
    ok = min_margin >= 0.02 and wins_backfit >= 80 and wins_boost >= 80
    check(
        "criterion 1 (AUC dominance, set 1, d=5)",
        ok,
        f"min GAM-GLM mean margin {min_margin:+.4f} (need >= 0.02); "
        f"sign test backfit {wins_backfit}/100, gamboost {wins_boost}/100 (need >= 80)",
    )


def test_criterion_2_attenuated_dominance_set2(set1_by_method, set2_by_method):
    results = {}
    for m in ("backfit", "gamboost"):
        s1 = paired_aucs(set1_by_method, m).mean() - paired_aucs(set1_by_method, "glm").mean()
        s2 = paired_aucs(set2_by_method, m).mean() - paired_aucs(set2_by_method, "glm").mean()
        results[m] = (s1, s2)
    ok = all(s2 >= 0.0 and s2 < s1 for s1, s2 in results.values())
    detail = "; ".join(
        f"{m}: set2 margin {s2:+.4f} >= 0 and < set1 margin {s1:+.4f}"
        for m, (s1, s2) in results.items()
    )
    check("criterion 2 (attenuated dominance, set 2)", ok, detail)


def test_criterion_3_roc_dominance_low_fpr(set1_by_method):
    details = []
    ok = True
    for key in ("sens_0.05", "sens_0.10", "sens_0.15"):
        glm = np.mean([set1_by_method["glm"][r][key] for r in range(100)])
        for m in ("backfit", "gamboost"):
            val = np.mean([set1_by_method[m][r][key] for r in range(100)])
            ok = ok and (val - glm >= 0.0)
            details.append(f"{m}@fpr{key[5:]} {val:.3f} vs glm {glm:.3f}")
    check(
        "criterion 3 (sensitivity dominance at low FPR)",
        ok,
        "; ".join(details[:4]) + " ...",
    )


def test_criterion_4_oracle_upper_bound(set1_report, set1_by_method):
    worst = -np.inf
    count = 0
    for m in set1_report.config.methods:
        for r in range(100):
            rec = set1_by_method[m][r]
            if rec["error"]:
                continue
            excess = rec["auc"] - rec["oracle_auc"]
            worst = max(worst, excess)
            count += excess > 0.01
    check(
        "criterion 4 (oracle upper bound, every method and replication)",
        count == 0,
        f"violations {count}; worst AUC excess over oracle {worst:+.4f} (slack 0.01)",
    )


def test_criterion_5a_auc_brute_force():
    rng = np.random.default_rng(55)
    worst = 0.0
    trials = 0
    while trials < 1000:
        n = int(rng.integers(4, 40))
        s = rng.integers(0, 6, n).astype(float)
        y = rng.integers(0, 2, n).astype(float)
        if y.min() == y.max():
            continue
        trials += 1
        pos, neg = s[y == 1], s[y == 0]
        gt = (pos[:, None] > neg[None, :]).sum()
        eq = (pos[:, None] == neg[None, :]).sum()
        brute = (gt + 0.5 * eq) / (pos.size * neg.size)
        worst = max(worst, abs(auc(s, y) - brute))
    check(
        "criterion 5a (AUC equals concordant-pair count on 10^3 tie-bearing instances)",
        worst < 1e-12,
        f"worst |difference| {worst:.2e} (tolerance 1e-12)",
    )


def test_criterion_5b_local_scoring_df2_equals_irls():
    data = gen_dataset(GeneratorSpec(1, 5, 300, 11))
    gam = local_scoring(data.X, data.y, dfs=2.0, compute_se=False)
    glm = fit_glm_irls(data.X, data.y)
    gap = float(np.max(np.abs(gam.predict(data.X) - predict_scores(glm, data.X))))
    check(
        "criterion 5b (local scoring with df=2 equals IRLS)",
        gap < 1e-3,
        f"max |eta difference| {gap:.2e} (tolerance 1e-3)",
    )


def test_criterion_5c_pspline_lambda0_equals_indicator_glm():
    data = gen_dataset(GeneratorSpec(1, 5, 400, 17))
    X2 = data.X[:, :2]
    ps = fit_pspline(X2, data.y, lambdas=0.0, K=4, m=1)
    blocks = []
    for j in range(2):
        basis = build_basis(X2[:, j].min(), X2[:, j].max(), K=4, m=1)
        blocks.append(eval_basis_matrix(basis, X2[:, j])[:, 1:])
    glm = fit_glm_irls(np.column_stack(blocks), data.y, tol=1e-10)
    gap = float(np.max(np.abs(ps.predict(X2) - predict_scores(glm, np.column_stack(blocks)))))
    check(
        "criterion 5c (unpenalized indicator expansion equals logistic regression)",
        gap < 1e-4,
        f"max |eta difference| {gap:.2e} (tolerance 1e-4)",
    )


def test_criterion_5d_boost_update_forms_agree():
    rng = np.random.default_rng(5)
    n, K = 30, 6
    B = eval_basis_matrix(build_basis(-1, 1, K=K, m=4), rng.uniform(-1, 1, n))
    P = difference_penalty(K, 1).entries
    worst = 0.0
    for _ in range(200):
        y = rng.integers(0, 2, n).astype(float)
        mu = rng.uniform(0.02, 0.98, n)
        lam = float(rng.uniform(0.01, 100.0))
        a = boost_candidate_update(B, y, mu, lam, P, form="simplified")
        b = boost_candidate_update(B, y, mu, lam, P, form="general")
        worst = max(worst, float(np.max(np.abs(a - b))))
    check(
        "criterion 5d (boosting update algebraic forms agree)",
        worst < 1e-10,
        f"worst |difference| {worst:.2e} (tolerance 1e-10)",
    )


def test_criterion_6_numerical_analysis_suite(set1_report):
    notes = []

    # partition of unity on 10^4 random points, several (K, m)
    rng = np.random.default_rng(6)
    pou_worst = 0.0
    for K, m in ((10, 4), (6, 2), (8, 3), (4, 1), (12, 4)):
        basis = build_basis(-1.0, 1.0, K=K, m=m)
        xs = rng.uniform(-1.1, 1.1, 10_000)
        M = eval_basis_matrix(basis, xs)
        pou_worst = max(pou_worst, float(np.max(np.abs(M.sum(axis=1) - 1.0))))
    pou_ok = pou_worst < 1e-10
    notes.append(f"partition of unity worst {pou_worst:.1e}")

    # penalty null spaces
    P1 = difference_penalty(10, 1).entries
    P2 = difference_penalty(10, 2).entries
    null_worst = max(
        float(np.max(np.abs(P1 @ np.ones(10)))),
        float(np.max(np.abs(P2 @ np.ones(10)))),
        float(np.max(np.abs(P2 @ np.arange(10.0)))),
    )
    null_ok = null_worst < 1e-12
    notes.append(f"penalty null space worst {null_worst:.1e}")

    # analytic vs finite-difference gradients
    data = gen_dataset(GeneratorSpec(1, 5, 200, 3))
    glm = fit_glm_irls(data.X, data.y)
    Z = np.column_stack([np.ones(200), data.X])

    def loglik(b):
        p = np.clip(sigmoid(Z @ b), 1e-12, 1 - 1e-12)
        return float(np.sum(data.y * np.log(p) + (1 - data.y) * np.log(1 - p)))

    g_an = Z.T @ (data.y - sigmoid(Z @ glm.coefficients))
    g_fd = np.array(
        [
            (loglik(glm.coefficients + 1e-6 * e) - loglik(glm.coefficients - 1e-6 * e)) / 2e-6
            for e in np.eye(6)
        ]
    )
    grad_rel = float(np.max(np.abs(g_an - g_fd)) / max(1.0, np.max(np.abs(g_fd))))

    lam = 0.5
    ps = fit_pspline(data.X[:, :2], data.y, lambdas=lam, K=6, m=4)
    P6 = difference_penalty(6, 1).entries
    Bs = [eval_basis_matrix(ps.bases[j], data.X[:, j]) for j in range(2)]
    resid = data.y - sigmoid(ps.predict(data.X[:, :2]))
    g_an_p = np.concatenate([Bs[j].T @ resid - lam * (P6 @ ps.beta[j]) for j in range(2)])
    from gamroc.gam_pspline import penalized_loglik

    flat0 = np.concatenate(ps.beta)

    def pll(flat):
        return penalized_loglik([flat[:6], flat[6:]], ps.alpha, Bs, data.y, [lam, lam], P6)

    g_fd_p = np.empty(12)
    for i in range(12):
        e = np.zeros(12)
        e[i] = 1e-6
        g_fd_p[i] = (pll(flat0 + e) - pll(flat0 - e)) / 2e-6
    grad_rel = max(
        grad_rel, float(np.max(np.abs(g_an_p - g_fd_p)) / max(1.0, np.max(np.abs(g_fd_p))))
    )
    grad_ok = grad_rel < 1e-5
    notes.append(f"gradient rel err {grad_rel:.1e}")

    # monotone deviance paths: IRLS, local scoring, boosting
    from gamroc.gamboost import boost_fit

    ls = local_scoring(data.X, data.y, compute_se=False)
    bf = boost_fit(data.X, data.y, max_steps=60)
    mono_ok = (
        np.all(np.diff(np.asarray(glm.deviance_path)) <= 1e-12)
        and np.all(np.diff(np.asarray(ls.deviance_path)) <= 1e-12)
        and np.all(np.diff(bf.deviance_path) <= 1e-12)
        and np.all(np.diff(np.asarray(ps.penalized_deviance_path)) <= 1e-12)
    )
    notes.append(f"monotone deviance {'yes' if mono_ok else 'NO'}")

    check(
        "criterion 6 (numerical-analysis suite)",
        pou_ok and null_ok and grad_ok and mono_ok,
        "; ".join(notes),
    )


def test_criterion_7_determinism_and_concurrency(tmp_path):
    cfg = ExperimentConfig(
        mode="simulate",
        methods=("glm", "backfit", "gamboost"),
        reps=4,
        seed=99,
        set_id=1,
        dim=5,
        train_n=80,
        test_n=300,
    )
    paths = []
    for label, jobs in (("a", 1), ("b", 1), ("c", 2)):
        report = run_simulation(replace(cfg, jobs=jobs))
        paths.append(emit_report(report, tmp_path / label))

    def non_timing_text(run_paths):
        ix = RECORD_FIELDS.index("fit_seconds")
        chunks = []
        with open(run_paths["records"], encoding="utf-8") as fh:
            for line in fh:
                cells = line.rstrip("\n").split("\t")
                cells[ix] = ""
                chunks.append("\t".join(cells))
        for key in sorted(run_paths):
            if key.startswith("roc_"):
                with open(run_paths[key], encoding="utf-8") as fh:
                    chunks.append(fh.read())
        return "\n".join(chunks)

    t_a, t_b, t_c = (non_timing_text(p) for p in paths)
    check(
        "criterion 7 (determinism and concurrency equivalence)",
        t_a == t_b == t_c,
        f"repeat identical: {t_a == t_b}; parallel identical: {t_a == t_c} "
        "(byte-wise, timing column excluded)",
    )


def test_criterion_8_runtime_budgets():
    budgets = {"glm": 1.0, "backfit": 10.0, "pspline_aic": 60.0, "gamboost": 60.0}
    cfg = ExperimentConfig(mode="simulate", methods=tuple(budgets), reps=1)
    warm_up(tuple(budgets), cfg)
    data = gen_dataset(GeneratorSpec(1, 10, 100, 808))
    times = {}
    ok = True
    for method, budget in budgets.items():
        _, seconds = time_fit(method, data.X, data.y, cfg)
        times[method] = seconds
        ok = ok and seconds < budget
    check(
        "criterion 8 (desk-scale runtime budgets, n=100, d=10)",
        ok,
        "; ".join(f"{m} {t:.3f}s < {budgets[m]:.0f}s" for m, t in times.items()),
    )
