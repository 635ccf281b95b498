from __future__ import annotations

import json
import subprocess
import sys

import pytest

from pfc.cli import main


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_normalize_signature_flow_compile_chain(tmp_path, capsys, data_dir):
    src = str(data_dir / "fig1.zx.json")
    code, out, _ = run(capsys, "normalize", src, "-o", str(tmp_path / "g.zx.json"), "--json")
    assert code == 0 and json.loads(out)["nodes"] > 0
    code, out, _ = run(capsys, "signature", src, "--json")
    assert code == 0
    assert {v["id"] for v in json.loads(out)["signature"]["vertices"]} >= {"i1", "o1", "a"}
    code, _, _ = run(capsys, "flow", src, "-o", str(tmp_path / "fig1.flow.json"))
    assert code == 0
    pf_path = tmp_path / "fig1.pf.json"
    code, out, _ = run(capsys, "compile", src, "--flow", str(tmp_path / "fig1.flow.json"), "-o", str(pf_path))
    assert code == 0
    assert (tmp_path / "fig1.trace.json").exists()
    code, out, _ = run(capsys, "verify", str(pf_path), "--source", src, "--json", "--allow-global-phase")
    report = json.loads(out)
    assert code == 0 and report["runnable"] and report["determinism"]["passed"]


def test_no_flow_exits_two(capsys, data_dir):
    code, _, err = run(capsys, "flow", str(data_dir / "typeI_fusion.zx.json"))
    assert code == 2 and "no PF-flow" in err
    code, out, _ = run(capsys, "pipeline", str(data_dir / "typeI_fusion.zx.json"), "--json")
    assert code == 2 and json.loads(out)["outcome"] == "no_flow"


def test_non_runnable_exits_three_with_the_cycle(capsys, data_dir):
    code, _, err = run(capsys, "verify", str(data_dir / "nonrunnable.pf.json"))
    assert code == 3
    assert "u (wire) w -> w (control) u" in err
    code, out, _ = run(capsys, "verify", str(data_dir / "reordered.pf.json"))
    assert code == 0 and out.strip() == "runnable"


def test_usage_errors_exit_one(tmp_path, capsys):
    assert run(capsys, "flow", str(tmp_path / "missing.zx.json"))[0] == 1
    bad = tmp_path / "bad.zx.json"
    bad.write_text('{"nodes": [{"id": "a", "kind": "Q"}]}')
    code, _, err = run(capsys, "normalize", str(bad))
    assert code == 1 and "unknown node kind" in err
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_run_prints_outcomes_and_state(tmp_path, capsys, data_dir):
    pf = tmp_path / "line5.pf.json"
    assert run(capsys, "compile", str(data_dir / "line5.zx.json"), "-o", str(pf))[0] == 0
    state = tmp_path / "state.json"
    state.write_text(json.dumps([[0.6, 0], [0, 0.8]]))
    code, out, _ = run(capsys, "run", str(pf), "--state", str(state), "--seed", "4", "--json")
    report = json.loads(out)
    assert code == 0
    assert len(report["state"]) == 2
    assert sum(a * a + b * b for a, b in report["state"]) == pytest.approx(1)
    state.write_text("[1, 0, 0]")
    assert run(capsys, "run", str(pf), "--state", str(state))[0] == 1


def test_kraus_dump(capsys):
    code, out, _ = run(capsys, "kraus", "--alpha", "0.5", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["A_H,0"] == [[[1.0, 0.0], [0.0, 0.0]]]
    assert "R_V(0.5)" in data and "SWAP" in data


def test_pipeline_writes_artifacts(tmp_path, capsys, data_dir):
    code, out, _ = run(
        capsys, "pipeline", str(data_dir / "cnot.zx.json"), "--out-dir", str(tmp_path), "--json", "--allow-global-phase"
    )
    report = json.loads(out)
    assert code == 0 and report["outcome"] == "ok"
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted(
        f"cnot.{s}" for s in ("graphlike.zx.json", "sig.json", "flow.json", "pf.json", "trace.json", "report.json")
    )


def test_environment_overrides_are_validated(monkeypatch, capsys, data_dir):
    monkeypatch.setenv("PFC_TOL", "5")
    assert run(capsys, "pipeline", str(data_dir / "line5.zx.json"))[0] == 1


def test_console_script_entry_point(data_dir):
    done = subprocess.run(
        [sys.executable, "-m", "pfc.cli", "verify", str(data_dir / "reordered.pf.json")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert done.returncode == 0 and done.stdout.strip() == "runnable"
