import json

import pytest

from nclass.cli import main


def run(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, (out.read_text() if out.exists() else "")


def parse(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    rows = [l.split(",") for l in lines[1:] if not l.startswith("summary,")]
    summary = {}
    for l in lines:
        if l.startswith("summary,"):
            summary.update(kv.split("=", 1) for kv in l.split(",")[1:])
    return header, rows, summary


def test_state_info_spats(tmp_path):
    code, text = run(tmp_path, "state-info", "--state", "spats", "--nbar", "0.8", "--eta", "0.5")
    assert code == 0
    _, rows, _ = parse(text)
    info = dict(rows)
    assert float(info["mandel_q"]) >= 0
    assert float(info["quadrature_variance_min"]) >= 1
    assert float(info["char_max_modulus"]) <= 1 + 1e-9
    assert float(info["wigner_min"]) >= -1e-6


def test_state_info_classical_and_fock(tmp_path):
    _, text = run(tmp_path, "state-info", "--state", "coherent:1", "--dim", "40")
    info = dict(parse(text)[1])
    assert abs(float(info["mandel_q"])) < 1e-9
    assert info["char_witnessed"] == "0"
    assert float(info["wigner_min"]) >= -1e-8
    _, text = run(tmp_path, "state-info", "--state", "fock:1", "--dim", "8")
    info = dict(parse(text)[1])
    assert float(info["mandel_q"]) == pytest.approx(-1)
    assert float(info["wigner_min"]) == pytest.approx(-2 / 3.141592653589793, abs=1e-6)


def test_witness_scan_outputs(tmp_path):
    code, text = run(tmp_path, "witness-scan", "--state", "thermal:1.0")
    header, rows, summary = parse(text)
    assert code == 0
    assert header == ["w", "value", "truncation_bound", "certified"]
    assert len(rows) == 56
    assert summary["detected"] == "0"
    _, text = run(tmp_path, "witness-scan", "--state", "spats", "--dim", "256")
    assert parse(text)[2]["detected"] == "1"
    _, text = run(tmp_path, "witness-scan", "--state", "fock:1", "--dim", "8")
    assert float(parse(text)[2]["w_star"]) == pytest.approx(2.0, abs=1e-3)


def test_fig2(tmp_path):
    code, text = run(tmp_path, "fig2", "--dim", "256")
    header, rows, summary = parse(text)
    assert code == 0
    assert header == ["w", "nbar_0.8", "nbar_1", "nbar_1.2"]
    assert all(float(v) > 0 for v in rows[0][1:])
    assert all(summary[f"detected_{n}"] == "1" for n in ("0.8", "1", "1.2"))


def test_nfp_grid(tmp_path):
    code, text = run(tmp_path, "nfp-grid", "--state", "vacuum", "--dim", "4", "--w", "1", "--grid", "1:5")
    assert code == 0
    assert float(parse(text)[2]["min"]) >= -1e-7
    _, text = run(tmp_path, "nfp-grid", "--state", "fock:1", "--dim", "8", "--w", "3", "--grid", "1:5")
    s = parse(text)[2]
    assert float(s["min"]) < 0 and float(s["argmin_re"]) == 0 and float(s["argmin_im"]) == 0
    _, text = run(tmp_path, "nfp-grid", "--state", "spats", "--dim", "256", "--w", "5", "--grid", "1:3")
    s = parse(text)[2]
    assert float(s["min"]) < 0 and float(s["argmin_re"]) == 0


def test_verify_filter(tmp_path):
    code, text = run(tmp_path, "verify-filter", "--family", "disc", "--w-list", "1,2", "--grid", "3:11")
    header, rows, summary = parse(text)
    assert code == 0
    assert [r[header.index("c2_pass")] for r in rows] == ["1", "1"]
    assert summary["passed"] == "0"  # the disc family is not normalised


def test_json_envelope_and_determinism(tmp_path):
    args = ["witness-scan", "--state", "spats", "--format", "json", "--w-step", "0.5"]
    _, a = run(tmp_path, *args, name="a.json")
    _, b = run(tmp_path, *args, name="b.json")
    assert a == b
    env = json.loads(a)
    assert env["command"] == "witness-scan"
    assert env["config"]["state"] == "spats"
    assert env["version"]
    assert env["summary"]["detected"] is True


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# scan settings\nstate = fock:1\ndim = 8\nw-step = 0.25\n")
    _, text = run(tmp_path, "witness-scan", "--config", str(cfg), "--w-max", "3")
    _, rows, summary = parse(text)
    assert rows[-1][0] == "3"
    assert float(summary["w_star"]) == pytest.approx(2.0, abs=1e-3)


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("dim = 8\nbogus = 1\n")
    assert main(["state-info", "--config", str(bad)]) == 2
    assert "bad.cfg:2" in capsys.readouterr().err
    bad.write_text("dim = eight\n")
    assert main(["state-info", "--config", str(bad)]) == 2
    assert main(["witness-scan", "--state", "squeezed"]) == 2
    assert main(["witness-scan", "--eta", "1.5"]) == 2
    assert main(["witness-scan", "--w-min", "2", "--w-max", "1"]) == 2
    assert main(["witness-scan", "--state", "fock:9", "--dim", "4"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["witness-scan", "--format", "xml"])
    assert exc.value.code == 2


def test_numerical_rejection_exit_code(tmp_path, capsys):
    assert main(["witness-scan", "--state", "coherent:9", "--dim", "16"]) == 3
    assert "truncation" in capsys.readouterr().err
