import json
import pathlib

import pytest

import platoon

PRESETS = pathlib.Path(__file__).resolve().parents[2] / "presets"


def test_bound_addends():
    d = platoon.delay_bound(o=1, eta=5, theta=5, R=10, N=2, k=0, lam=[0.5, 0.5], o_all=[1, 1])
    assert d["computing"] == pytest.approx(1.0)
    assert d["transmission"] == pytest.approx(1 / 8.5)
    assert d["competition"] == pytest.approx(4.5 / 8.5)
    assert d["protocol"] == pytest.approx(1.0)
    assert d["total"] == pytest.approx(2.6470588, abs=1e-6)


def test_required_bandwidth_inverts_bound():
    args = dict(o=1, eta=5, theta=5, N=2, k=0, lam=[0.5, 0.5], o_all=[1, 1])
    r = platoon.required_bandwidth(tau0=3.0, **args)
    assert platoon.delay_bound(R=r, **args)["total"] == pytest.approx(3.0, rel=1e-9)


def test_saturated_link_raises():
    with pytest.raises(platoon.SaturatedLink):
        platoon.delay_bound(o=1, eta=5, theta=5, R=1.0, N=2, k=0, lam=[0.5, 0.5], o_all=[1, 1])


def test_safety_distance_round_trip():
    s = platoon.safety_distance(v=20, A=5, tau0=0.8)
    assert platoon.perception_reaction_delay(s, v=20, A=5) == pytest.approx(0.8)


def test_admm_large_delta_reaches_mean_spacing():
    spacings = [10.0, 20.0, 30.0, 40.0, 50.0]
    r = platoon.admm_solve(spacings, delta=50)
    assert r["converged"]
    for s in r["s_star"]:
        assert s == pytest.approx(30.0, rel=1e-3)


def test_ca_run_is_deterministic():
    a = platoon.ca_run(s_star=10, steps=50, seed=3)
    b = platoon.ca_run(s_star=10, steps=50, seed=3)
    assert len(a) == 51
    # repr keeps NaN cells comparable
    assert repr(a) == repr(b)


def test_policy_replication_ranges():
    r = platoon.run_policy("smto", seed=7, epochs=10)
    assert 0.0 <= r["acceptance_ratio"] <= 1.0
    assert r["mean_delay"] > 0.0


def test_aggregate_quartiles():
    s = platoon.aggregate([5, 1, 4, 2, 3])
    assert (s["min"], s["q1"], s["median"], s["q3"], s["max"]) == (1, 2, 3, 4, 5)


def test_validate_reports_every_error():
    doc = {"kind": "bound_surface", "mac": {"w0": -1, "gamma": 2, "eps": 3}}
    issues = platoon.validate_scenario(json.dumps(doc))
    assert "error: mac.eps: eps exceeds gamma" in issues
    assert any(i.startswith("error: mac.w0") for i in issues)


def test_presets_validate():
    for p in sorted(PRESETS.glob("*.json")):
        issues = platoon.validate_scenario(p.read_text())
        assert not [i for i in issues if i.startswith("error")], p.name


def test_run_experiment_writes_csv(tmp_path):
    means = platoon.run_experiment(PRESETS / "admm_sweep.json", tmp_path, seed=1, reps=2)
    assert "mean_spacing" in means
    assert (tmp_path / "admm_sweep_aggregate.csv").exists()
    assert (tmp_path / "admm_sweep_seed2.csv").exists()
