import json
import os
from pathlib import Path

import numpy as np
import pytest

from pqc.channels import KrausChannel
from pqc.cli import main
from pqc.io import save_channel
from pqc.noise import X, GateVariant, NoiseSpec, build_cnot_variant

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write_config(tmp_path, **data):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return path


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])


def test_validate_default_config(capsys):
    assert main(["validate", str(CONFIGS / "asymmetric.json")]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_validate_out_of_range_gamma(tmp_path, capsys):
    cfg = write_config(tmp_path, noise={"qubits": [{"depolarizing": 0.01, "amplitude_damping": 1.5}, {"depolarizing": 0.03, "amplitude_damping": 0.3}]})
    assert main(["validate", str(cfg)]) == 2
    assert "amplitude_damping" in capsys.readouterr().err


def test_validate_flags_non_trace_preserving_variant(tmp_path, capsys):
    save_channel(KrausChannel([np.diag([1.0, 1.0, 1.0, 0.9])]), tmp_path / "leaky.json")
    cfg = write_config(tmp_path, variants=[{"file": "leaky.json"}, "direct"])
    assert main(["validate", str(cfg)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is False and report["variant_1"]["cptp"]["residuals"]["trace_preservation"] > 1e-3


def test_missing_config_exits_2(tmp_path):
    assert main(["validate", str(tmp_path / "nope.json")]) == 2


def test_bad_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_sweep_noiseless(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["sweep", str(CONFIGS / "noiseless.json"), "--grid", "11", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header[:3] == ["w1", "worst_cost", "mean_cost"] and len(header) == 3 + 8
    assert rows.shape == (11, 11)
    assert np.all(np.abs(rows[:, 1:]) <= 1e-8)
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["grid_points"] == 11 and summary["seed"] == 1234


def test_sweep_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path, sweep={"grid_points": 6, "mean_samples": 100, "reference_states": 3})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", str(cfg), "--out", str(a)]) == 0
    assert main(["sweep", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_sweep_unwritable_output(tmp_path, capsys):
    target = tmp_path / "missing" / "s.csv"
    assert main(["sweep", str(CONFIGS / "noiseless.json"), "--grid", "3", "--out", str(target)]) == 2
    assert not target.parent.exists()


@pytest.mark.skipif(hasattr(os, "geteuid") and os.geteuid() == 0, reason="root ignores directory permissions")
def test_sweep_readonly_directory(tmp_path, capsys):
    ro = tmp_path / "ro"
    ro.mkdir()
    ro.chmod(0o500)
    try:
        assert main(["sweep", str(CONFIGS / "noiseless.json"), "--grid", "3", "--out", str(ro / "s.csv")]) == 2
        assert list(ro.iterdir()) == []
    finally:
        ro.chmod(0o700)


def test_optimize_noiseless(tmp_path, capsys):
    out = tmp_path / "opt.json"
    assert main(["optimize", str(CONFIGS / "noiseless.json"), "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert 0 <= res["w1_star"] <= 1 and res["certified_cost"] <= 1e-8
    assert [r["m"] for r in res["per_m"]] == [1, 2]


def test_optimize_asymmetric_matches_sweep(tmp_path, capsys):
    cfg = write_config(tmp_path, extension_dims=[1], sweep={"grid_points": 21, "mean_samples": 100, "reference_states": 0})
    assert main(["sweep", str(cfg), "--out", str(tmp_path / "s.csv")]) == 0
    swept = json.loads((tmp_path / "s.json").read_text())
    for method in ("golden", "gda"):
        assert main(["optimize", str(cfg), "--method", method, "--out", str(tmp_path / f"{method}.json")]) == 0
        res = json.loads((tmp_path / f"{method}.json").read_text())
        assert abs(res["w1_star"] - swept["w1_star"]) <= 0.05 + 1e-9
        assert res["certified_cost"] <= swept["worst_cost_at_w1_star"] + 1e-6


def test_distance_identical_and_orthogonal(tmp_path, capsys):
    save_channel(KrausChannel.identity(2), tmp_path / "i.json")
    save_channel(KrausChannel.unitary(X), tmp_path / "x.json")
    assert main(["distance", str(tmp_path / "i.json"), str(tmp_path / "i.json")]) == 0
    assert json.loads(capsys.readouterr().out)["diamond_lower_bound"] <= 1e-12
    assert main(["distance", str(tmp_path / "i.json"), str(tmp_path / "x.json")]) == 0
    assert abs(json.loads(capsys.readouterr().out)["diamond_lower_bound"] - 1) <= 1e-9


def test_distance_direct_vs_hadamard(tmp_path, capsys):
    spec = NoiseSpec.asymmetric()
    save_channel(build_cnot_variant(GateVariant.DIRECT, spec), tmp_path / "d.json")
    save_channel(build_cnot_variant(GateVariant.HADAMARD_CONJUGATED, spec), tmp_path / "h.json")
    out = tmp_path / "dist.json"
    assert main(["distance", str(tmp_path / "d.json"), str(tmp_path / "h.json"), "--max-ext", "2", "--samples", "20000", "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["diamond_lower_bound"] > 0
    assert res["per_m"][0]["cost"] >= res["sampled_bound_m1"] - 1e-4


def test_distance_errors(tmp_path, capsys):
    save_channel(KrausChannel.identity(2), tmp_path / "i.json")
    save_channel(KrausChannel.identity(4), tmp_path / "i4.json")
    save_channel(KrausChannel([0.5 * np.eye(2)]), tmp_path / "half.json")
    (tmp_path / "junk.json").write_text('{"kind": "kraus"}')
    assert main(["distance", str(tmp_path / "i.json"), str(tmp_path / "half.json")]) == 1
    assert main(["distance", str(tmp_path / "i.json"), str(tmp_path / "i4.json")]) == 2
    assert main(["distance", str(tmp_path / "i.json"), str(tmp_path / "junk.json")]) == 2
