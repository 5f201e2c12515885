import json

import pytest

from syncnet import cli, runner


def _short(tmp_path, name, t_end, **time):
    cfg = runner.load_builtin(name)
    cfg["time"]["t_end"] = t_end
    cfg["time"].update(time)
    p = tmp_path / f"{name}-short.json"
    p.write_text(json.dumps(cfg))
    return p


def _artifacts(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.suffix in (".csv", ".json")}


def test_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "microgrid-delay-250ms" in out
    assert "tcl-loadfollow-100-50" in out
    assert len(out.splitlines()) >= 14


def test_every_builtin_validates():
    for name in runner.builtin_names():
        runner.validate(runner.load_builtin(name))


@pytest.mark.parametrize("name, t_end", [("microgrid-nominal", 12.0), ("powergrid-case1", 20.0),
                                         ("tcl-pred-n100", 300.0)])
def test_reruns_are_byte_identical(tmp_path, name, t_end):
    cfg = _short(tmp_path, name, t_end)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "b")]) == 0
    a, b = _artifacts(tmp_path / "a"), _artifacts(tmp_path / "b")
    assert a.keys() == b.keys() and any(k.endswith(".csv") for k in a)
    assert a == b


def test_seed_changes_stochastic_output(tmp_path):
    cfg = _short(tmp_path, "microgrid-nominal", 5.0)
    cli.main(["run", str(cfg), "--out", str(tmp_path / "a"), "--seed", "1"])
    cli.main(["run", str(cfg), "--out", str(tmp_path / "b"), "--seed", "2"])
    f = "trajectory_dapi.csv"
    assert (tmp_path / "a" / f).read_bytes() != (tmp_path / "b" / f).read_bytes()


def test_manifest_round_trip(tmp_path):
    cfg = _short(tmp_path, "powergrid-case2", 10.0)
    cli.main(["run", str(cfg), "--out", str(tmp_path / "a"), "--seed", "5"])
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["seed"] == 5 and manifest["tool"] == "syncnet"
    assert cli.main(["run", str(tmp_path / "a" / "manifest.json"), "--out", str(tmp_path / "b")]) == 0
    assert _artifacts(tmp_path / "a") == _artifacts(tmp_path / "b")


def test_schema_error_reports_field_path(tmp_path, capsys):
    cfg = runner.load_builtin("powergrid-case1")
    del cfg["time"]["dt"]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(cfg))
    assert cli.main(["run", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "time.dt" in capsys.readouterr().err
    cfg["time"]["dt"] = -1.0
    p.write_text(json.dumps(cfg))
    assert cli.main(["run", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "time.dt" in capsys.readouterr().err


def test_unknown_builtin(capsys):
    assert cli.main(["run", "no-such-scenario"]) == 2
    assert "name" in capsys.readouterr().err


def test_output_env_override(tmp_path, monkeypatch):
    cfg = _short(tmp_path, "powergrid-case1", 2.0)
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["run", str(cfg)]) == 0
    summary = json.loads((tmp_path / "env" / "powergrid-case1" / "summary.json").read_text())
    assert summary["schema_version"] == runner.SCHEMA_VERSION


def test_dotted_sweep(tmp_path):
    cfg = _short(tmp_path, "powergrid-case1", 2.0)
    assert cli.main(["sweep", str(cfg), "--param", "time.t_end", "--range", "1,2",
                     "--out", str(tmp_path / "sw")]) == 0
    assert (tmp_path / "sw" / "sweep.csv").is_file()
    assert (tmp_path / "sw" / "point_001" / "summary.json").is_file()


def test_parse_range():
    assert runner.parse_range("-1:1:0.5") == pytest.approx([-1, -0.5, 0, 0.5, 1])
    assert runner.parse_range("7,8") == pytest.approx([7, 8])


def test_n4_builtin_reports_24kw(tmp_path):
    assert cli.main(["run", "tcl-ensemble-n4-duty50", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "summary.json").read_text())["result"]
    assert res["target_kW"] == 24.0
    assert res["steady_P_agg"] == pytest.approx(24.0, abs=0.35)


def test_powergrid_case1_builtin(tmp_path):
    assert cli.main(["run", "powergrid-case1", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "summary.json").read_text())["result"]
    assert abs(res["interarea_gap"] - (-3.12)) < 0.1
    assert (tmp_path / "trajectory.csv").read_text().startswith("time,")


def test_microgrid_nominal_builtin(tmp_path):
    assert cli.main(["run", "microgrid-nominal", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "summary.json").read_text())["result"]
    for scheme in ("dapi", "radapi"):
        assert res["schemes"][scheme]["settling"] is not None
    assert "net_gain_pct" in res
    assert (tmp_path / "trajectory_radapi.csv").is_file()
