import json
import math

import numpy as np
import pytest

from magnonadd import analytic as an
from magnonadd.cli import main
from magnonadd.errors import AdiabaticityWarning
from magnonadd.experiments import ConfigError, ExperimentConfig, config_from_dict, run_figure, run_protocol, run_sweep
from magnonadd.experiments.io import read_csv

COARSE = 0.2


def _write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def _csv(path):
    header, rows = read_csv(path)
    return header, np.array(rows, dtype=float)


# -- config -------------------------------------------------------------------

def test_config_converts_hz_to_rad_per_s():
    cfg = config_from_dict({"physical": {"g_mc": 2e6, "tau_r": 70e-9}})
    assert cfg.physical.g_mc == pytest.approx(2 * math.pi * 2e6)
    assert cfg.physical.tau_r == 70e-9


def test_config_rejects_unknown_keys_and_bad_sweeps():
    with pytest.raises(ConfigError):
        config_from_dict({"physcal": {}})
    with pytest.raises(ConfigError):
        config_from_dict({"sweep": {"parameter": "beta", "values": []}})
    with pytest.raises(ConfigError):
        config_from_dict({"sweep": {"parameter": "colour", "values": [1.0]}})


def test_config_sweep_range():
    cfg = config_from_dict({"sweep": {"parameter": "beta", "range": [0, 1, 0.25]}})
    assert cfg.sweep.values == pytest.approx((0, 0.25, 0.5, 0.75, 1.0))


# -- figures ----------------------------------------------------------------

def test_figure_output_is_byte_identical(tmp_path):
    data = {"sweep": {"parameter": "beta", "values": [0, 0.5, 1.0]}}
    for run in ("a", "b"):
        cfg = config_from_dict({**data, "output_dir": str(tmp_path / run)})
        assert run_figure(cfg, "fig3a").passed
    for name in ("fig3a.csv", "fig3a_manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_fig3a_schema_and_vacuum_limit(tmp_path):
    run_figure(ExperimentConfig(output_dir=tmp_path), "fig3a")
    header, rows = _csv(tmp_path / "fig3a.csv")
    assert header == ["beta", "Q_numeric", "Q_analytic"]
    assert rows[0, 0] == 0 and rows[0, 1] == pytest.approx(-1, abs=1e-12)
    np.testing.assert_allclose(rows[:, 1], rows[:, 2], atol=1e-8)
    assert np.all(rows[:, 1] < 0)


def test_manifest_records_both_frequency_units(tmp_path):
    result = run_figure(ExperimentConfig(output_dir=tmp_path), "fig3a")
    manifest = json.loads(result.manifest_path.read_text())
    g = manifest["physical"]["g_mc"]
    assert g["unit"] == "rad/s"
    assert g["value"] == pytest.approx(2 * math.pi * g["value_hz"])
    assert manifest["physical"]["tau_r"]["unit"] == "s"


def test_fig6b_crossover(tmp_path):
    cfg = ExperimentConfig(output_dir=tmp_path)
    result = run_figure(cfg, "fig6b")
    assert result.passed
    manifest = json.loads(result.manifest_path.read_text())
    roots = {round(v["M"], 6): v["root_nbar0"] for v in manifest["q_crossover"].values()}
    M = math.exp(-0.01)
    assert roots[round(M, 6)] == pytest.approx(an.mats_threshold_nbar0(M), abs=1e-9)
    assert roots[round(M, 6)] == pytest.approx(0.732, abs=2e-3)


def test_fig8c_negativity_needs_half_efficiency(tmp_path):
    cfg = config_from_dict({"output_dir": str(tmp_path), "grid": {"step": COARSE}})
    assert run_figure(cfg, "fig8c").passed
    header, rows = _csv(tmp_path / "fig8c__delta_vs_eta.csv")
    assert header[0] == "eta"
    eta, delta = rows[:, 0], rows[:, header.index("delta_numeric")]
    assert np.all(delta[eta <= 0.5] <= 1e-12)
    assert np.all(delta[eta > 0.5] > 0)


def test_sweep_writes_pairs(tmp_path):
    cfg = config_from_dict(
        {"output_dir": str(tmp_path), "sweep": {"parameter": "g_mc", "values": [4e6, 8e6]}, "state": {"beta": 1.0}}
    )
    with pytest.warns(AdiabaticityWarning):
        result = run_sweep(cfg)
    assert result.passed
    header, rows = _csv(tmp_path / "sweep__g_mc.csv")
    assert header[0] == "g_mc" and rows.shape[0] == 2
    assert any(h.endswith("_numeric") for h in header) and any(h.endswith("_analytic") for h in header)


def test_sweep_requires_sweep_block():
    with pytest.raises(ConfigError):
        run_sweep(ExperimentConfig())


# -- protocol -------------------------------------------------------------------

def _protocol(tmp_path, state):
    cfg = config_from_dict({"output_dir": str(tmp_path), "state": state, "grid": {"step": COARSE}})
    return run_protocol(cfg)


def test_protocol_coherent_readout(tmp_path):
    res = _protocol(tmp_path, {"beta": 1.0, "M": 0.99, "eta": 0.9})
    assert res.passed
    q = res.stages["readout"]["mandel_q"]
    assert q["numeric"] == pytest.approx(0.9 * an.macs_mandel_q(an.StateFamily.macs(0.99, 1.0)), abs=1e-10)
    assert q["numeric"] == pytest.approx(-0.4527, abs=1e-4)
    assert (tmp_path / "protocol.json").exists()


def test_protocol_unheralded_thermal(tmp_path):
    cfg = config_from_dict(
        {"output_dir": str(tmp_path), "state": {"nbar0": 0.8, "M": 0.99, "eta": 1.0, "herald": False}, "grid": {"step": COARSE}}
    )
    res = run_protocol(cfg)
    assert res.passed
    n = res.stages["added"]["mean_number"]["numeric"]
    assert n == pytest.approx(an.mats_reduced_nbar(0.8, 0.99), abs=1e-10)


def test_protocol_zero_efficiency_reads_vacuum(tmp_path):
    res = _protocol(tmp_path, {"beta": 1.0, "M": 0.99, "eta": 0.0})
    assert res.passed
    out = res.stages["readout"]
    assert out["mean_number"]["numeric"] == pytest.approx(0.0, abs=1e-14)
    assert math.isnan(out["mandel_q"]["numeric"])
    assert out["variance_theta=0"]["numeric"] == pytest.approx(0.25, abs=1e-14)


# -- CLI ----------------------------------------------------------------------

def test_cli_figure_ok(tmp_path, capsys):
    assert main(["figure", "fig8a", "--out", str(tmp_path), "--grid-step", str(COARSE)]) == 0
    assert "manifest" in capsys.readouterr().out


def test_cli_failure_exit_code(tmp_path):
    cfg = _write(tmp_path, {"validation": {"tol": 1e-30}})
    assert main(["figure", "fig3a", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_cli_config_errors_exit_2(tmp_path, capsys):
    bad_M = _write(tmp_path, {"state": {"M": 1.01}}, "m.json")
    assert main(["protocol", "--config", str(bad_M), "--out", str(tmp_path)]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["protocol", "--config", str(broken)]) == 2
    assert main(["sweep", "--out", str(tmp_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_rejects_unknown_figure():
    with pytest.raises(SystemExit) as exc:
        main(["figure", "fig99"])
    assert exc.value.code == 2


def test_cli_validate_domain_error(tmp_path):
    cfg = _write(tmp_path, {"validation": {"M": [1.01]}})
    assert main(["validate", "--config", str(cfg), "--out", str(tmp_path)]) == 2
