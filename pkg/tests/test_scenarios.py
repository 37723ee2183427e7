import pytest

from hystlwr import UnknownScenarioError, list_scenarios, run_scenario
from hystlwr.scenarios import KMH_PER_VBAR, cluster_values, state_at_velocity
from hystlwr import HState, velocity


ALL = ["car_train", "decay_sparse_upstream", "faster_downstream",
       "free_zone_disturbance", "over_braking", "ring_road",
       "small_perturbation", "stop_and_go", "temp_bottleneck",
       "underspeed_on_vD"]


def test_catalog():
    cat = list_scenarios()
    assert [s["name"] for s in cat] == ALL
    for s in cat:
        assert s["engine"] in ("tracking", "fv", "both")
        assert s["params"]


def test_unknown_scenario_and_param():
    with pytest.raises(UnknownScenarioError):
        run_scenario("gridlock")
    with pytest.raises(UnknownScenarioError):
        run_scenario("car_train", overrides={"nope": 1})


def test_state_at_velocity(fam):
    s = state_at_velocity(fam, 2.6, 0.55)
    assert velocity(fam, s) == pytest.approx(0.55, abs=1e-12)
    with pytest.raises(ValueError):
        state_at_velocity(fam, 2.0, 0.9)


def test_cluster_values():
    clusters = cluster_values([(1.0, 2.0), (2.0, 2.01), (1.0, 3.0)], gap=0.05)
    assert len(clusters) == 2
    w, c = clusters[0]
    assert w == 3.0
    assert c == pytest.approx((1.0 * 2.0 + 2.0 * 2.01) / 3.0)


def test_report_shape():
    rep = run_scenario("car_train")
    assert rep["name"] == "car_train"
    assert rep["engine"] == "tracking"
    for c in rep["checks"]:
        assert set(c) == {"name", "pass", "measured", "expected", "tolerance"}
    assert rep["passed"]


def test_override_changes_run():
    rep = run_scenario("stop_and_go", overrides={"t_end": 4.0})
    assert rep["params"]["t_end"] == 4.0
    assert rep["passed"]
    # dimensional anchor for readability: unit free-flow speed = 100 km/h
    assert rep["jam_speed_kmh"] == pytest.approx(
        0.1623774509803921 * KMH_PER_VBAR, abs=1e-9)


@pytest.mark.parametrize("name", ["stop_and_go", "temp_bottleneck",
                                  "faster_downstream", "small_perturbation"])
def test_fast_scenarios_pass(name):
    rep = run_scenario(name)
    assert rep["passed"], [c for c in rep["checks"] if not c["pass"]]
