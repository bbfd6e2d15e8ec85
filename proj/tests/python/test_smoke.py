import math
import pathlib

import pytest

import priorcheck as pc

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


def test_dataset_round_trip():
    d = pc.Dataset.from_pairs([("a", 1.0), ("b", 2.0), ("a", 3.0), ("b", 4.0)])
    assert d.groups == 2
    assert d.per_group == 2
    assert d.group_ids == ["a", "b"]
    assert pc.compute_t(d) == [2.0, 3.0]
    assert pc.compute_residuals(d) == [[-1.0, 1.0], [-1.0, 1.0]]
    assert d.to_csv().startswith("group,value")


def test_unbalanced_rejected():
    with pytest.raises(pc.PriorcheckError, match="Unbalanced"):
        pc.Dataset.from_csv(str(DATA / "unbalanced.csv"))


def test_sphere_constraints():
    y = pc.sample_t_given_v(3.0, 5.0, 3, seed=4)
    assert math.isclose(sum(y), 3.0, abs_tol=1e-9)
    assert math.isclose(sum(v * v for v in y), 5.0, abs_tol=1e-9)
    assert pc.sample_t_given_v(3.0, 5.0, 3, seed=4) == y
    with pytest.raises(pc.PriorcheckError):
        pc.sample_t_given_v(3.0, 1.0, 3)


def test_check_simple_closed_form():
    assert pc.check_simple(1.96, 2, 1.0, 0.0, 0.5) == pytest.approx(0.04999579, abs=1e-7)


def test_protocol_report():
    d = pc.Dataset.from_csv(str(DATA / "clean.csv"))
    report = pc.run_protocol(d, 1.0, pc.HyperPrior.improper_flat(), n_draws=2000, seed=7)
    assert report["schema_version"] == "1"
    assert [s["stage"] for s in report["stages"]] == ["model", "pi2", "pi1"]
    assert report["stages"][2]["status"] == "skipped_improper"

    proper = pc.HyperPrior.normal_inv_gamma(0.0, 4.0, 3.0, 2.0)
    again = pc.run_protocol(d, 1.0, proper, n_draws=2000, seed=7, threads=3)
    assert again["stages"][1] == report["stages"][1]


def test_gating_on_inflated_data():
    d = pc.Dataset.from_csv(str(DATA / "inflated.csv"))
    report = pc.run_protocol(d, 1.0, pc.HyperPrior.improper_flat(), n_draws=2000)
    assert report["stages"][0]["decision"] == "evidence_of_conflict"
    assert report["stages"][1]["status"] == "gated_not_run"
    assert report["inference_ready"] is False


def test_checks_and_calibration():
    d = pc.Dataset.from_csv(str(DATA / "clean.csv"))
    r = pc.check_pi2(d, 1.0, n_draws=999, seed=2)
    assert 0.0 < r.p <= 1.0
    assert r.n_draws == 999
    assert pc.check_pi1(d, 1.0, pc.HyperPrior.improper_flat()) is None
    cal = pc.calibrate("pi2", 1.0, 5, 3, "skew", datasets=40, draws=99)
    assert cal["M"] == 40
    assert len(cal["pvalues"]) == 40
    dist, pval = pc.ks_statistic(cal["pvalues"])
    assert dist == pytest.approx(cal["ks_distance"])
