import re

from aircart.cli import main
from aircart.harness import LOG_COLUMNS, builtin_scenarios, scenario_to_text


def test_simulate_builtin(capsys, tmp_path):
    out_path = tmp_path / "log.csv"
    code = main(["simulate", "--scenario", "feedforward", "--set", "t_end=2.0",
                 "--out", str(out_path)])
    captured = capsys.readouterr().out
    assert code == 0
    assert "ise_alpha = " in captured
    assert "status = ok" in captured
    header = out_path.read_text().splitlines()[0]
    assert header == ",".join(LOG_COLUMNS)


def test_simulate_no_rg_reports_violations(capsys):
    code = main(["simulate", "--scenario", "no-rg"])
    captured = capsys.readouterr().out
    assert code == 0
    m = re.search(r"constraint_violations = (\d+)", captured)
    assert m and int(m.group(1)) > 0
    assert "status = chart_exit" in captured


def test_simulate_missing_file(capsys):
    code = main(["simulate", "--config", "/no/such/file.cfg"])
    err = capsys.readouterr().err
    assert code == 1
    assert "/no/such/file.cfg" in err


def test_simulate_unknown_scenario(capsys):
    assert main(["simulate", "--scenario", "bogus"]) == 1


def test_simulate_requires_source(capsys):
    assert main(["simulate"]) == 1


def test_config_file_and_overrides(tmp_path, capsys):
    cfg_path = tmp_path / "scn.cfg"
    cfg_path.write_text(scenario_to_text(builtin_scenarios()["feedforward"]))
    code = main(["simulate", "--config", str(cfg_path), "--set", "t_end=1.0"])
    assert code == 0


def test_validate(capsys):
    assert main(["validate", "--scenario", "feedforward"]) == 0
    # F_max below T_max breaks a hard invariant
    code = main(["validate", "--scenario", "feedforward",
                 "--set", "limits.F_max=0.5"])
    assert code == 3
    # reference at the closed end of the attainable arc: open interval fails
    code = main(["validate", "--scenario", "no-rg",
                 "--set", "desired_ref.alpha_d=2.4240836305670523"])
    assert code == 3
    assert "alpha_d" in capsys.readouterr().err


def test_equilibria(capsys):
    code = main(["equilibria", "--t-max", "0.85", "--alpha", "2.0"])
    out = capsys.readouterr().out
    assert code == 0
    assert "alpha_min = 0.717509" in out
    assert "beta_min" in out and "u1 = " in out

    code = main(["equilibria", "--t-max", "0.85", "--alpha", "2.6"])
    err = capsys.readouterr().err
    assert code == 1
    assert "not attainable" in err

    code = main(["equilibria"])
    out = capsys.readouterr().out
    assert code == 0
    assert "alpha_max = 3.14159" in out


def test_gains_report(capsys):
    code = main(["gains"])
    out = capsys.readouterr().out
    assert code == 0
    assert "gamma_out = " in out
    assert re.search(r"small_gain_ok = (true|false)", out)


def test_scenarios_listing(capsys):
    code = main(["scenarios"])
    out = capsys.readouterr().out
    assert code == 0
    for name in ("no-feedforward", "feedforward", "no-rg", "rg", "experiment"):
        assert name in out


def test_blowup_exits_2(capsys):
    # a cart rate near the float ceiling overflows within the first step;
    # the run aborts with a partial log and the runtime-failure exit code
    code = main(["simulate", "--scenario", "feedforward",
                 "--set", "initial_state.x_dot=1e308", "--set", "t_end=1.0"])
    out = capsys.readouterr().out
    assert code == 2
    assert "status = blowup" in out


def test_scenarios_run_batch(capsys, tmp_path):
    code = main(["scenarios", "--run", "--out-dir", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert (tmp_path / "rg.csv").exists()
    assert "[no-rg] status=chart_exit" in out
