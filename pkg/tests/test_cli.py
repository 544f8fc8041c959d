import csv
import dataclasses
import json

import pytest

from dfnoma import ConfigError, Scheme
from dfnoma.cli import main
from dfnoma.runner import (
    list_presets,
    load_spec,
    parse_axis_values,
    preset_path,
    run,
    spec_from_output,
    spec_to_ini,
)


def rows_of(text):
    return list(csv.DictReader(line for line in text.splitlines() if not line.startswith("#")))


def test_every_figure_has_a_preset():
    names = set(list_presets())
    assert {f"fig{i}" for i in range(2, 17)} <= names
    for name in names:
        spec = load_spec("analyze", preset_path(name).read_text())
        assert spec.points()


def test_range_and_list_syntax():
    assert parse_axis_values("rho_s_db", "0:10:5") == [0.0, 5.0, 10.0]
    assert parse_axis_values("alpha1", "0.55:0.95:0.05")[-1] == 0.95
    assert parse_axis_values("xi_r_db", "perfect, -10") == [float("-inf"), -10.0]
    assert parse_axis_values("scheme", "R, C") == [Scheme.R_DFNOMA, Scheme.C_DFNOMA]


def test_overrides_and_round_trip():
    spec = load_spec("sweep", preset_path("fig4").read_text(),
                     ["rho_s_db=25", "grid.xi_r_db=-20,-10", "run.seed=11"])
    assert spec.config.rho_s_db == 25.0 and spec.seed == 11
    assert spec.grid["xi_r_db"] == [-20.0, -10.0]
    again = load_spec("sweep", spec_to_ini(spec))
    assert again.grid == spec.grid and again.config == spec.config


def test_bad_override_rejected():
    with pytest.raises(ConfigError):
        load_spec("analyze", None, ["alpha1"])
    with pytest.raises(ConfigError):
        load_spec("analyze", None, ["run.bogus=1"])


def test_csv_embeds_config_and_reproduces_bit_identically(tmp_path):
    out = tmp_path / "a.csv"
    code = main(["simulate", "--preset", "fig10", "--set", "grid.rho_s_db=10,30",
                 "--trials", "20000", "--symbols", "3000", "--seed", "5", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.startswith("# tool: dfnoma")
    assert "# seed: 5" in text
    replay = spec_from_output(text)
    assert replay.seed == 5 and replay.trials == 20000
    status, _, again = run(replay)
    assert status == 0 and again == text
    rows = rows_of(text)
    assert len(rows) == 2
    assert {"mc_op_1_se", "mc_bep_2", "mc_pf_e_se", "pf_c", "dev_o", "flags"} <= set(rows[0])


def test_json_mirror(tmp_path):
    out = tmp_path / "a.json"
    assert main(["analyze", "--set", "grid.rho_s_db=0:20:10", "--format", "json", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["meta"]["job"] == "analyze"
    assert [r["rho_s_db"] for r in payload["rows"]] == ["0.0", "10.0", "20.0"]
    assert spec_from_output(out.read_text()).grid["rho_s_db"] == [0.0, 10.0, 20.0]


def test_empty_grid_axis_errors_without_output(tmp_path, capsys):
    out = tmp_path / "none.csv"
    assert main(["analyze", "--set", "grid.alpha1=", "--out", str(out)]) == 2
    assert not out.exists()
    assert "alpha1" in capsys.readouterr().err


def test_invalid_config_exit_code(tmp_path):
    assert main(["analyze", "--set", "beta1=0.7", "--out", str(tmp_path / "x.csv")]) == 2


def test_missing_config_file_is_io_error(tmp_path):
    assert main(["analyze", "--config", str(tmp_path / "missing.ini")]) == 3


def test_compare_fig10_winners(tmp_path):
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--preset", "fig10", "--out", str(out)]) == 0
    rows = rows_of(out.read_text())
    assert len(rows) == 9
    assert all(r["winner_outage"] == "R_DFNOMA" for r in rows)
    assert all(float(r["outage_R_DFNOMA"]) < float(r["outage_C_DFNOMA"]) for r in rows)


def test_sweep_marks_grid_argmin_per_scheme(tmp_path, capsys):
    out = tmp_path / "sw.csv"
    assert main(["sweep", "--preset", "fig14", "--set", "grid.alpha1=0.7,0.85", "--set", "grid.beta1=0.15,0.3",
                 "--out", str(out)]) == 0
    rows = rows_of(out.read_text())
    assert len(rows) == 8
    marked = [r for r in rows if r["grid_argmin_dev"] == "1"]
    assert sorted(r["scheme"] for r in marked) == ["C_DFNOMA", "R_DFNOMA"]
    assert "grid argmin" in capsys.readouterr().err


def test_validate_passes_on_agreement(tmp_path):
    code = main(["validate", "--preset", "fig3", "--set", "grid.xi_r_db=-10", "--set", "grid.rho_s_db=10,20",
                 "--trials", "200000", "--out", str(tmp_path / "v.csv")])
    assert code == 0
    assert all(r["pass"] == "1" for r in rows_of((tmp_path / "v.csv").read_text()))


def test_validate_exits_nonzero_on_violation(tmp_path, monkeypatch):
    import dfnoma.runner as runner

    real = runner.fairness
    monkeypatch.setattr(runner, "fairness", lambda cfg: dataclasses.replace(real(cfg), op_1=real(cfg).op_1 * 1.5))
    out = tmp_path / "v.csv"
    code = main(["validate", "--preset", "fig3", "--set", "grid.xi_r_db=-10", "--set", "grid.rho_s_db=10",
                 "--trials", "200000", "--out", str(out)])
    assert code == 1
    row = rows_of(out.read_text())[0]
    assert row["pass"] == "0" and row["op_1_ok"] == "0"
