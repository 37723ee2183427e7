import json

import pytest

from hystlwr.cli import dump_csv, fmt_float, main


def run_cli(*argv):
    return main(list(argv))


def read(path):
    return path.read_bytes()


def test_fmt_float_17_digits():
    assert fmt_float(1.0 / 3.0) == "0.33333333333333331"
    assert fmt_float(2.0) == "2"


def test_dump_csv_line_endings(tmp_path):
    p = tmp_path / "a.csv"
    dump_csv(["a", "b"], [(1.0, 0.5)], p)
    assert read(p) == b"a,b\n1,0.5\n"


def test_validate_exit_codes(tmp_path):
    assert run_cli("validate", "--out", str(tmp_path)) == 0
    doc = json.loads(read(tmp_path / "validate.json"))
    assert doc["passed"] is True
    # missing family file is a config error
    assert run_cli("validate", "--family", str(tmp_path / "nope.json")) == 2
    # structurally broken custom family fails validation
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"custom": {"beta": 2.0}}))
    assert run_cli("validate", "--family", str(bad), "--out", str(tmp_path)) == 1


def test_validate_usage_error():
    assert run_cli("validate", "--bogus-flag") == 2
    assert run_cli() == 2


def test_riemann_artifacts(tmp_path):
    assert run_cli("riemann", "--left", "3.0,2.0", "--right", "2.3,2.0",
                   "--out", str(tmp_path)) == 0
    fan = json.loads(read(tmp_path / "fan.json"))
    # same scanning curve on both sides: a lone shock, no standing wave
    assert [w["kind"] for w in fan["waves"]] == ["ScS"]
    lines = read(tmp_path / "profile.csv").decode().strip().split("\n")
    assert lines[0] == "xi,u,h,v"
    assert len(lines) > 100
    # equal states: empty fan, empty profile
    assert run_cli("riemann", "--left", "2.5,2.0", "--right", "2.5,2.0",
                   "--out", str(tmp_path)) == 0
    fan = json.loads(read(tmp_path / "fan.json"))
    assert fan["waves"] == []


def test_riemann_overbrake(tmp_path):
    assert run_cli("riemann", "--left", "2.7,2.2", "--right", "2.7,2.2",
                   "--overbrake", "0.3", "--out", str(tmp_path)) == 0
    fan = json.loads(read(tmp_path / "fan.json"))
    assert len(fan["waves"]) == 3
    assert run_cli("riemann", "--left", "2.7,2.2", "--right", "2.7,2.2",
                   "--overbrake", "0.9") == 2


def test_oracle_roundtrip(tmp_path):
    run_cli("riemann", "--left", "3.0,2.0", "--right", "2.3,2.0",
            "--out", str(tmp_path))
    assert run_cli("oracle", str(tmp_path / "fan.json"),
                   "--out", str(tmp_path)) == 0
    doc = json.loads(read(tmp_path / "oracle.json"))
    assert doc["passed"] is True
    assert all(w["connected"] for w in doc["waves"])
    # tampered speed is rejected
    fan = json.loads(read(tmp_path / "fan.json"))
    fan["waves"][0]["speed"] *= 0.8
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(fan))
    assert run_cli("oracle", str(bad), "--out", str(tmp_path)) == 1
    # empty fan gives an empty passing report
    run_cli("riemann", "--left", "2.5,2.0", "--right", "2.5,2.0",
            "--out", str(tmp_path))
    assert run_cli("oracle", str(tmp_path / "fan.json"),
                   "--out", str(tmp_path)) == 0
    assert json.loads(read(tmp_path / "oracle.json"))["waves"] == []


def test_track_command(tmp_path):
    assert run_cli("track", "--state", "2.0,1.9", "--state", "1.55,1.4",
                   "--state", "2.0,1.9", "--jump", "-1", "--jump", "0",
                   "--t-end", "5", "--out", str(tmp_path)) == 0
    doc = json.loads(read(tmp_path / "track.json"))
    assert doc["t_end"] == 5
    assert doc["fronts"]


def test_fv_command(tmp_path):
    assert run_cli("fv", "--state", "2.5,2.0", "--state", "2.2,2.0",
                   "--jump", "0", "--t-end", "1", "--dx", "0.1",
                   "--out", str(tmp_path)) == 0
    obs = read(tmp_path / "observers.csv").decode().strip().split("\n")
    assert obs[0] == "t,tv_v,sup_dev,mass"
    final = read(tmp_path / "final.csv").decode().strip().split("\n")
    assert final[0] == "x,u,h,v"
    assert len(final) == 41


def test_scenario_command(tmp_path):
    assert run_cli("scenario", "--list", "--out", str(tmp_path)) == 0
    cat = json.loads(read(tmp_path / "scenarios.json"))
    assert any(s["name"] == "stop_and_go" for s in cat)
    assert run_cli("scenario", "--scenario", "car_train",
                   "--out", str(tmp_path)) == 0
    rep = json.loads(read(tmp_path / "car_train.json"))
    assert rep["passed"] is True
    assert run_cli("scenario", "--scenario", "gridlock") == 2


def test_byte_identical_reruns(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for d in (a, b):
        run_cli("riemann", "--left", "3.0,2.0", "--right", "2.3,2.0",
                "--seed", "7", "--out", str(d))
        run_cli("scenario", "--scenario", "stop_and_go", "--seed", "7",
                "--out", str(d))
    assert read(a / "fan.json") == read(b / "fan.json")
    assert read(a / "profile.csv") == read(b / "profile.csv")
    assert read(a / "stop_and_go.json") == read(b / "stop_and_go.json")
