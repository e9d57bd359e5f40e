import os

import numpy as np
import pytest

from gamroc.cli import main as cli_main
from gamroc.cli import parse_config_file
from gamroc.harness import (
    RECORD_FIELDS,
    ExperimentConfig,
    _stratified_split,
    emit_report,
    load_csv,
    parse_records,
    run_resampling,
    run_simulation,
    time_fit,
    warm_up,
)
from gamroc.simgen import Dataset

SMALL = dict(mode="simulate", methods=("glm", "gamboost"), reps=3, seed=11,
             set_id=1, dim=5, train_n=80, test_n=300)


def write_csv(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def records_equal(a, b, skip=("fit_seconds",)):
    for ra, rb in zip(a, b):
        for k in ra:
            if k in skip:
                continue
            va, vb = ra[k], rb[k]
            if isinstance(va, float) and isinstance(vb, float):
                if not (va == vb or (np.isnan(va) and np.isnan(vb))):
                    return False
            elif va != vb:
                return False
    return True


# -- config ------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError, match="unknown methods"):
        ExperimentConfig(mode="simulate", methods=("glm", "xgboost"))
    with pytest.raises(ValueError, match="mode"):
        ExperimentConfig(mode="other")
    with pytest.raises(ValueError, match="reps"):
        ExperimentConfig(mode="simulate", reps=0)
    with pytest.raises(ValueError, match="train_frac"):
        ExperimentConfig(mode="resample", train_frac=1.0)


# -- simulation runs ----------------------------------------------------------


@pytest.fixture(scope="module")
def small_report():
    return run_simulation(ExperimentConfig(**SMALL))


def test_record_count_and_schema(small_report):
    cfg = small_report.config
    assert len(small_report.records) == cfg.reps * len(cfg.methods)
    for rec in small_report.records:
        assert tuple(rec.keys()) == RECORD_FIELDS
        assert rec["error"] == ""
        assert 0.0 <= rec["auc"] <= 1.0
        assert rec["fit_seconds"] >= 0.0


def test_rerun_identical_excluding_timing(small_report):
    again = run_simulation(ExperimentConfig(**SMALL))
    assert records_equal(small_report.records, again.records)


def test_parallel_equivalence(small_report):
    par = run_simulation(ExperimentConfig(**SMALL, jobs=2))
    assert records_equal(small_report.records, par.records)


def test_single_rep_has_zero_ci_width():
    rep = run_simulation(
        ExperimentConfig(mode="simulate", methods=("glm",), reps=1, seed=3)
    )
    av = rep.avg_roc["glm"]
    assert np.max(av.ci_hi - av.ci_lo) == 0.0


def test_empty_method_list_valid_files(tmp_path):
    rep = run_simulation(
        ExperimentConfig(mode="simulate", methods=(), reps=1, seed=3)
    )
    assert rep.records == ()
    paths = emit_report(rep, tmp_path)
    with open(paths["records"], encoding="utf-8") as fh:
        assert fh.read().strip() == "\t".join(RECORD_FIELDS)
    assert parse_records(paths["records"]) == []


def test_emit_and_reparse_round_trip(small_report, tmp_path):
    paths = emit_report(small_report, tmp_path)
    rows = parse_records(paths["records"])
    assert records_equal(rows, list(small_report.records), skip=())
    assert os.path.exists(paths["summary"])
    assert os.path.exists(paths["config"])
    for m in small_report.config.methods:
        assert os.path.exists(paths[f"roc_{m}"])


def test_emitted_records_byte_identical_modulo_timing(tmp_path):
    cfg = ExperimentConfig(**SMALL)
    p1 = emit_report(run_simulation(cfg), tmp_path / "a")["records"]
    p2 = emit_report(run_simulation(cfg), tmp_path / "b")["records"]

    def strip_timing(path):
        ix = RECORD_FIELDS.index("fit_seconds")
        out = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                cells = line.rstrip("\n").split("\t")
                cells[ix] = ""
                out.append("\t".join(cells))
        return "\n".join(out)

    assert strip_timing(p1) == strip_timing(p2)


def test_failures_recorded_not_dropped():
    # a NaN feature cell makes every glm fit raise; the records must keep
    # one row per (rep, method) carrying the error code
    X = np.random.default_rng(0).uniform(-1, 1, (60, 2))
    X[7, 1] = np.nan
    y = (np.arange(60) % 2).astype(float)
    data = Dataset(X=X, y=y, feature_names=("a", "b"))
    cfg = ExperimentConfig(mode="resample", methods=("glm",), reps=2, seed=0)
    rep = run_resampling(cfg, data)
    assert len(rep.records) == 2
    assert all(r["error"].startswith("ValueError") for r in rep.records)
    assert all(np.isnan(r["auc"]) for r in rep.records)
    assert rep.summary["glm"]["n_failed"] == 2


def test_component_curve_files_for_additive_methods(tmp_path):
    cfg = ExperimentConfig(
        mode="simulate", methods=("backfit",), reps=1, seed=5, train_n=80
    )
    rep = run_simulation(cfg)
    paths = emit_report(rep, tmp_path)
    with open(paths["components_backfit"], encoding="utf-8") as fh:
        header = fh.readline().strip().split("\t")
        assert header == ["feature", "x", "fhat", "se"]
        assert len(fh.readlines()) == 5 * 100  # five features, 100-point grid


# -- resampling ---------------------------------------------------------------


def test_stratified_split_proportions():
    y = np.r_[np.ones(147), np.zeros(48)]
    rng = np.random.default_rng(0)
    tr, te = _stratified_split(y, 0.9, rng)
    assert tr.size + te.size == 195
    assert int(y[tr].sum()) == 132  # floor(0.9 * 147)
    assert int((y[tr] == 0).sum()) == 43  # floor(0.9 * 48)
    assert np.intersect1d(tr, te).size == 0


def test_resampling_deterministic_split_sequence():
    rng = np.random.default_rng(1)
    X = rng.uniform(-1, 1, (60, 2))
    y = (rng.random(60) < 0.5).astype(float)
    data = Dataset(X=X, y=y, feature_names=("a", "b"))
    cfg = ExperimentConfig(mode="resample", methods=("glm",), reps=4, seed=9)
    r1 = run_resampling(cfg, data)
    r2 = run_resampling(cfg, data)
    assert records_equal(r1.records, r2.records)


def test_resampling_class_too_small():
    data = Dataset(
        X=np.zeros((10, 1)), y=np.r_[np.ones(9), np.zeros(1)], feature_names=("a",)
    )
    cfg = ExperimentConfig(mode="resample", methods=("glm",), reps=1, seed=0)
    with pytest.raises(ValueError, match="class-too-small"):
        run_resampling(cfg, data)


# -- CSV loading --------------------------------------------------------------


def test_load_csv_basic(tmp_path):
    p = write_csv(tmp_path / "d.csv", "a,b,label\n1,2,pos\n3,4,neg\n5,6,pos\n")
    ds = load_csv(p, "label", "pos")
    assert ds.X.shape == (3, 2)
    assert list(ds.y) == [1.0, 0.0, 1.0]
    assert ds.feature_names == ("a", "b")


def test_load_csv_non_numeric_names_row_and_column(tmp_path):
    p = write_csv(tmp_path / "d.csv", "a,b,label\n1,2,pos\n3,oops,neg\n")
    with pytest.raises(ValueError, match=r"d\.csv:3.*'b'"):
        load_csv(p, "label", "pos")


def test_load_csv_drops_missing_rows(tmp_path, caplog):
    p = write_csv(tmp_path / "d.csv", "a,b,label\n1,2,pos\n3,,neg\n4,5,neg\n")
    with caplog.at_level("WARNING"):
        ds = load_csv(p, "label", "pos")
    assert ds.X.shape == (2, 2)
    assert "dropped 1" in caplog.text


def test_load_csv_label_errors(tmp_path):
    p = write_csv(tmp_path / "d.csv", "a,label\n1,x\n2,y\n3,z\n")
    with pytest.raises(ValueError, match="unknown-label-value"):
        load_csv(p, "label", "x")
    with pytest.raises(ValueError, match="not among"):
        load_csv(p, "label", "absent")
    with pytest.raises(ValueError, match="label column"):
        load_csv(p, "nope", "x")


def test_load_csv_all_rows_dropped(tmp_path):
    p = write_csv(tmp_path / "d.csv", "a,label\n,x\nNA,y\n")
    with pytest.raises(ValueError, match="all rows dropped"):
        load_csv(p, "label", "x")


# -- timing and CLI -----------------------------------------------------------


def test_time_fit_nonnegative_and_fast_glm():
    rng = np.random.default_rng(2)
    X = rng.uniform(-1, 1, (100, 5))
    y = (rng.random(100) < 0.5).astype(float)
    cfg = ExperimentConfig(mode="simulate", methods=("glm",))
    warm_up(("glm",), cfg)
    fitted, seconds = time_fit("glm", X, y, cfg)
    assert 0.0 <= seconds < 1.0
    assert fitted.score(X).shape == (100,)


def test_parse_config_file(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("reps = 5\nseed= 3   # comment\n\n# full line comment\nmethods = glm\n")
    assert parse_config_file(p) == {"reps": "5", "seed": "3", "methods": "glm"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("reps 5\n")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_file(bad)


def test_cli_simulate_writes_report(tmp_path, capsys):
    out = tmp_path / "out"
    rc = cli_main(
        [
            "simulate", "--set", "1", "--dim", "5", "--reps", "2",
            "--methods", "glm", "--seed", "4", "--train-n", "60",
            "--test-n", "200", "--out", str(out),
        ]
    )
    assert rc == 0
    assert (out / "records.tsv").exists()
    assert (out / "summary.tsv").exists()
    assert "auc_mean" in capsys.readouterr().out


def test_cli_config_file_with_flag_override(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("reps = 2\nmethods = glm\nseed = 4\ntrain_n = 60\ntest_n = 200\n")
    rc = cli_main(["simulate", "--config", str(cfgfile), "--reps", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "glm" in out


def test_cli_resample(tmp_path, capsys):
    p = write_csv(
        tmp_path / "d.csv",
        "a,b,label\n" + "\n".join(
            f"{v},{v * 2},{'pos' if i % 3 else 'neg'}"
            for i, v in enumerate(np.linspace(0, 1, 40))
        ) + "\n",
    )
    rc = cli_main(
        [
            "resample", str(p), "--label-column", "label", "--positive-label", "pos",
            "--reps", "2", "--methods", "glm", "--seed", "1",
        ]
    )
    assert rc == 0
    assert "auc_mean" in capsys.readouterr().out
