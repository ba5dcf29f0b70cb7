import json

from lnndqc.cli import main


def test_gen_compile_verify(tmp_path, capsys):
    src = tmp_path / "qft6.qasm"
    assert main(["gen-bench", "qft", "-n", "6", "--out", str(src)]) == 0
    for router in ("linear", "sabre"):
        out = tmp_path / f"{router}.qasm"
        assert main(["compile", str(src), "--router", router, "--out", str(out)]) == 0
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert summary["gate_count"] == 21 + summary["swap_count"]
        assert main(["verify", str(src), str(out)]) == 0
        assert "equivalent" in capsys.readouterr().out


def test_distribute_and_verify(tmp_path, capsys):
    src = tmp_path / "q.qasm"
    main(["gen-bench", "qaoa", "-n", "6", "--family", "Ring", "--layers", "1", "--out", str(src)])
    assert (tmp_path / "q.edges").exists()
    out = tmp_path / "d.qasm"
    assert main(["distribute", str(src), "--link", "RandomLink", "--seed", "3", "--mode", "StateTeleport", "--out", str(out)]) == 0
    capsys.readouterr()
    amps = tmp_path / "amps.json"
    assert main(["verify", str(src), str(out), "--dump-amplitudes", str(amps)]) == 0
    assert len(json.loads(amps.read_text())["amplitudes"]) == 64


def test_verify_detects_mismatch(tmp_path, capsys):
    a, b = tmp_path / "a.qasm", tmp_path / "b.qasm"
    a.write_text("qreg q[2];\ncx q[0],q[1];\n")
    b.write_text("qreg q[2];\ncx q[1],q[0];\n")
    (tmp_path / "b.json").write_text(json.dumps({"initial_layout": [0, 1], "final_layout": [0, 1]}))
    assert main(["verify", str(a), str(b)]) == 1
    assert "NOT equivalent" in capsys.readouterr().out


def test_topo(tmp_path, capsys):
    assert main(["topo", "-d", "3", "--out", str(tmp_path / "t.json")]) == 0
    assert "23" in capsys.readouterr().out
    assert main(["topo", "-d", "3", "--link", "DanglingLink"]) == 0


def test_experiment_and_report(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"qubit_sizes": [10], "distribution": {"seeds": [0, 1]}}))
    out = tmp_path / "res"
    assert main(["experiment", str(cfg), "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"rows.csv", "rows.json", "report.md"}
    assert main(["report", str(out / "rows.json"), "--format", "csv", "--out", str(tmp_path / "again.csv")]) == 0
    first = (out / "rows.csv").read_text().splitlines()
    assert (tmp_path / "again.csv").read_text().splitlines() == first


def test_experiment_with_error_rows_exits_one(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"qubit_sizes": [30], "routers": ["Linear"], "heavy_hex_d": {"30": 3}}))
    assert main(["experiment", str(cfg), "--out", str(tmp_path / "r")]) == 1
    assert "error:" in capsys.readouterr().err


def test_errors_exit_two(tmp_path, capsys):
    assert main(["compile", str(tmp_path / "missing.qasm")]) == 2
    bad = tmp_path / "bad.qasm"
    bad.write_text("qreg q[1];\nfoo q[0];\n")
    assert main(["compile", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["topo", "-d", "4"]) == 2
    gate_cut = tmp_path / "g.qasm"
    gate_cut.write_text("qreg q[2];\nrzz(0.3) q[0],q[1];\n")
    assert main(["distribute", str(gate_cut), "--mode", "GateTeleport"]) == 2
