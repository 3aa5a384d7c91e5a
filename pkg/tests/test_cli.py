"""End-to-end CLI checks: exit codes, file outputs, determinism."""
import json
import math

import numpy as np
import pytest

from czscatter import SweepTable
from czscatter.cli import EXIT_CONFIG, EXIT_OK, EXIT_THRESHOLD, main


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def read_table(path):
    return SweepTable.from_csv(path.read_text())


# -- solve ----------------------------------------------------------------------


def test_solve_regime_phases(tmp_path, capsys):
    out = tmp_path / "solve.csv"
    assert main(["solve", "--gamma", "1e3", "--out", str(out)]) == EXIT_OK
    table = read_table(out)
    assert table.n_rows == 4
    stripped = table.column("stripped_phase_rad")
    assert np.allclose(stripped[:3], 0.0, atol=1e-2)
    assert abs(abs(stripped[3]) - math.pi) < 1e-2
    assert np.allclose(table.column("modulus"), 1.0, atol=1e-10)
    assert np.max(table.column("residual")) < 1e-10


def test_solve_bare_mirror_all_phases_equal(tmp_path):
    out = tmp_path / "solve0.csv"
    assert main(["solve", "--gamma", "0.0", "--out", str(out)]) == EXIT_OK
    table = read_table(out)
    phases = table.column("phase_rad")
    assert np.ptp(phases) < 1e-12
    assert np.allclose(table.column("stripped_phase_rad"), 0.0, atol=1e-12)


def test_invalid_geometry_is_config_error(tmp_path, capsys):
    cfg = write_config(tmp_path, "bad.json", {"geometry": {"x2": 5.0, "x3": 1.0}})
    out = tmp_path / "never.csv"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()  # no partial output on invalid input
    err = capsys.readouterr().err
    assert "invalid configuration" in err


# -- gate -----------------------------------------------------------------------


def test_gate_ideal_limit_is_cz(tmp_path):
    out = tmp_path / "gate.csv"
    assert main(["gate", "--out", str(out)]) == EXIT_OK
    table = read_table(out)
    assert table.metadata["gamma"] == "inf"
    assert float(table.metadata["fidelity_vs_cz"]) == pytest.approx(1.0, abs=1e-12)
    assert float(table.metadata["unitarity_defect"]) < 1e-12
    stripped = table.column("stripped_re") + 1j * table.column("stripped_im")
    assert np.allclose(stripped, [1, 1, 1, -1], atol=1e-12)


def test_gate_finite_gamma_deviates(tmp_path):
    out = tmp_path / "gate1e2.csv"
    assert main(["gate", "--gamma", "1e2", "--out", str(out)]) == EXIT_OK
    table = read_table(out)
    fidelity = float(table.metadata["fidelity_vs_cz"])
    assert 0.99 < fidelity < 1.0


# -- fidelity sweep ----------------------------------------------------------------


def test_fidelity_sweep_routes_and_window(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["fidelity-sweep", "--out", str(out)]) == EXIT_OK
    table = read_table(out)
    assert table.n_rows == 401
    gap = np.max(np.abs(table.column("F_closed") - table.column("F_chi")))
    assert gap < 1e-12
    halfwidth = float(table.metadata["window_halfwidth_095"])
    assert 0.05 <= halfwidth <= 0.06
    stdout = capsys.readouterr().out
    assert "half-width" in stdout
    assert f"{halfwidth:.6f}" in stdout


def test_fidelity_sweep_collapsed_range(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"range": [1.0, 1.0], "samples": 1})
    out = tmp_path / "one.csv"
    assert main(["fidelity-sweep", "--config", cfg, "--out", str(out)]) == EXIT_OK
    table = read_table(out)
    assert table.n_rows == 1
    assert table.column("F_closed")[0] == pytest.approx(1.0, abs=1e-14)


def test_fidelity_sweep_rejects_single_sample_span(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"range": [0.9, 1.1]})
    out = tmp_path / "never.csv"
    assert main(["fidelity-sweep", "--config", cfg, "--samples", "1", "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


# -- wavepacket ---------------------------------------------------------------------


def test_wavepacket_writes_snapshots_and_summary(tmp_path, capsys):
    base = tmp_path / "wp"
    assert main(["wavepacket", "--out", str(base)]) == EXIT_OK
    summary = json.loads((tmp_path / "wp_summary.json").read_text())
    assert summary["norm_drift"] <= 1e-6
    assert summary["max_wall_amplitude"] <= 1e-8
    assert summary["F_wp"] >= 0.95
    assert summary["quadrature_nodes"] > 401  # resonance panels were added
    assert summary["completion_time"] > 0
    for value in summary["raw_initial_norm"].values():
        assert abs(value - 1.0) < 1e-4
    for j in range(3):
        table = read_table(tmp_path / f"wp_t{j}.csv")
        assert table.columns[0] == "x"
        assert "re_psi_00" in table.columns and "im_psi_11" in table.columns
        assert table.n_rows > 100
    # packet starts as the free Gaussian: t0 snapshot peaks near x0
    t0 = read_table(tmp_path / "wp_t0.csv")
    density = t0.column("re_psi_00") ** 2 + t0.column("im_psi_00") ** 2
    assert abs(t0.column("x")[int(np.argmax(density))] - summary["x0"]) < 2.0


def test_wavepacket_inadmissible_packet_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"x0": -1.0})
    base = tmp_path / "wp"
    assert main(["wavepacket", "--config", cfg, "--out", str(base)]) == EXIT_CONFIG
    assert "overlaps the scatterers" in capsys.readouterr().err
    assert not list(tmp_path.glob("wp_*"))


# -- duration and working condition ---------------------------------------------------


def test_duration_defaults(tmp_path):
    out = tmp_path / "dur.csv"
    assert main(["duration", "--out", str(out)]) == EXIT_OK
    table = read_table(out)
    assert table.column("dtau")[0] == pytest.approx(20.0, rel=1e-12)
    assert table.column("dtau_min")[0] == pytest.approx(10.0, rel=1e-12)
    assert table.column("td_bound")[0] == pytest.approx(10.0, rel=1e-12)


def test_working_condition_presets(tmp_path, capsys):
    for preset, reference in (("gaas", 1.6e-14), ("diamond", 8e-15)):
        cfg = write_config(tmp_path, f"{preset}.json", {"preset": preset})
        out = tmp_path / f"{preset}.csv"
        assert main(["working-condition", "--config", cfg, "--out", str(out)]) == EXIT_OK
        table = read_table(out)
        assert table.metadata["units"] == "SI"
        assert table.column("td_bound")[0] == pytest.approx(reference, rel=0.10)
        assert "T_d bound" in capsys.readouterr().out


def test_working_condition_custom(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"v": 1.0, "lambda0": 2 * math.pi})
    out = tmp_path / "custom.csv"
    assert main(["working-condition", "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert read_table(out).column("td_bound")[0] == pytest.approx(10.0, rel=1e-12)


def test_working_condition_unknown_preset(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"preset": "silicon"})
    assert main(["working-condition", "--config", cfg]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "diamond" in err and "gaas" in err


def test_working_condition_needs_inputs(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"v": 1.0})
    assert main(["working-condition", "--config", cfg]) == EXIT_CONFIG


# -- equivalence ---------------------------------------------------------------------


def test_equivalence_default_passes(tmp_path, capsys):
    out = tmp_path / "eq.csv"
    assert main(["equivalence", "--out", str(out)]) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "max |r_photonic - r_massive|" in stdout
    table = read_table(out)
    assert table.n_rows == 101
    for spin in ("00", "01", "10", "11"):
        assert np.max(table.column(f"dev_{spin}")) < 1e-8


def test_equivalence_rejects_pole_crossing_grid(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"detuning_range": [-0.1, 0.1]})
    out = tmp_path / "never.csv"
    assert main(["equivalence", "--config", cfg, "--out", str(out)]) == EXIT_CONFIG
    assert "pole at detuning = 0" in capsys.readouterr().err
    assert not out.exists()


def test_equivalence_threshold_failure_exit_code(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"threshold": 1e-16})
    assert main(["equivalence", "--config", cfg]) == EXIT_THRESHOLD


def test_equivalence_zero_coupling_trivial(tmp_path):
    cfg = write_config(tmp_path, "c.json", {"coupling": 0.0})
    assert main(["equivalence", "--config", cfg]) == EXIT_OK


# -- global behavior ----------------------------------------------------------------


def test_runs_are_deterministic(tmp_path):
    pairs = []
    for tag in ("a", "b"):
        sweep = tmp_path / f"sweep_{tag}.csv"
        solve = tmp_path / f"solve_{tag}.csv"
        cfg = write_config(tmp_path, f"cfg_{tag}.json", {"samples": 101})
        assert main(["fidelity-sweep", "--config", cfg, "--out", str(sweep)]) == EXIT_OK
        assert main(["solve", "--out", str(solve)]) == EXIT_OK
        pairs.append((sweep.read_bytes(), solve.read_bytes()))
    assert pairs[0] == pairs[1]


def test_json_format_output(tmp_path):
    out = tmp_path / "gate.json"
    assert main(["gate", "--format", "json", "--out", str(out)]) == EXIT_OK
    table = SweepTable.from_json(out.read_text())
    assert table.metadata["command"] == "gate"
    assert table.n_rows == 4


def test_regime_flag_validation():
    with pytest.raises(SystemExit) as info:
        main(["solve", "--regime", "1"])
    assert info.value.code == 2


def test_unreadable_config_is_config_error(tmp_path, capsys):
    assert main(["solve", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    assert "cannot read config" in capsys.readouterr().err
