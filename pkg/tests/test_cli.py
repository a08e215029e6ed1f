import io
import json
import sys

import numpy as np
import pytest

from triality import cli, core, kernels, loops, serialize


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def last_json(out):
    return json.loads(out.strip().splitlines()[-1])


def test_construct_layout(capsys):
    code, out, _ = run_cli(capsys, "construct")
    assert code == 0
    info = json.loads(out)
    assert info["n"] == 3 and info["m"] == 11 and info["code_bits"] == 23
    assert info["order"] == 1 << 23
    assert info["generators"][0] == "a1" and info["generators"][-1] == "b3"
    code, out, _ = run_cli(capsys, "construct", "--n", "5", "--mode", "z")
    info = json.loads(out)
    assert info["m"] == 50 and "order" not in info


def test_verify_stdout_report(capsys):
    code, out, _ = run_cli(capsys, "verify", "triality", "--samples", "5000")
    assert code == 0
    records = [json.loads(line) for line in out.strip().splitlines()]
    assert records[0]["kind"] == "header"
    assert records[1]["kind"] == "campaign"
    assert records[1]["checked"] == 5000
    assert records[-1]["status"] == "pass"


def test_verify_writes_report_directory(tmp_path, capsys):
    outdir = tmp_path / "report"
    code, out, err = run_cli(capsys, "verify", "s3-orders", "--samples", "4000",
                             "--out", str(outdir))
    assert code == 0
    assert out == ""
    assert (outdir / "report.jsonl").exists()
    assert (outdir / "summary.csv").exists()
    assert (outdir / "checked.png").exists()
    assert "report.jsonl" in err


def test_verify_jobs_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("TRIALITY_JOBS", "2")
    code, out, _ = run_cli(capsys, "verify", "group-axioms", "--samples", "4000")
    assert code == 0
    campaign = [json.loads(l) for l in out.strip().splitlines()][1]
    assert campaign["jobs"] == 2
    monkeypatch.setenv("TRIALITY_JOBS", "1")
    code, out, _ = run_cli(capsys, "verify", "group-axioms", "--samples", "4000",
                           "--jobs", "1")
    campaign = [json.loads(l) for l in out.strip().splitlines()][1]
    assert campaign["jobs"] == 1


def test_verify_usage_errors(capsys):
    code, _, err = run_cli(capsys, "verify", "triality", "--samples", "0")
    assert code == 2 and "error" in err
    code, _, err = run_cli(capsys, "verify", "moufang", "--n", "4",
                           "--samples", "100")
    assert code == 2
    code, _, err = run_cli(capsys, "verify", "triality", "--exhaustive",
                           "--n", "4")
    assert code == 2 and "budget" in err
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "latin-square"])
    assert exc.value.code == 2
    capsys.readouterr()
    with pytest.raises(SystemExit):
        cli.main(["verify", "triality", "--exhaustive", "--samples", "5"])
    capsys.readouterr()


def test_oracle_normalize(capsys):
    code, out, _ = run_cli(capsys, "oracle", "normalize", "b2 a1")
    assert code == 0
    obj = json.loads(out)
    assert obj == {"n": 3, "mode": "z4", "z": [1, 0, 0, 0, 1, 0], "f": "040"}
    code, out2, _ = run_cli(capsys, "oracle", "normalize", "b2 a1",
                            "--strategy", "right-to-left")
    assert json.loads(out2) == obj
    code, _, err = run_cli(capsys, "oracle", "normalize", "c9")
    assert code == 2


def test_embed_command(capsys, monkeypatch):
    ctx = core.get_ctx(4)
    rng = np.random.Generator(np.random.Philox(191))
    x = kernels.to_elements(ctx, *kernels.random_batch(ctx, rng, 1))[0]
    text = serialize.element_dumps(x)
    code, out, _ = run_cli(capsys, "embed", "--element", text)
    assert code == 0
    obj = json.loads(out)
    assert set(obj["components"]) == {"1,2,3", "1,2,4", "1,3,4", "2,3,4"}
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    code, out2, _ = run_cli(capsys, "embed", "--element", "-")
    assert json.loads(out2) == obj
    code, _, err = run_cli(capsys, "embed", "--element", text, "--n", "5")
    assert code == 2 and "rank" in err


def test_loop_extract(capsys):
    code, out, _ = run_cli(capsys, "loop", "extract")
    assert code == 0
    info = json.loads(out)
    assert info["order"] == 1024
    assert info["generators"] == [1, 4, 12]
    assert info["identity_index"] == 0
    assert info["codes_first"] == [0, 67, 130, 193]
    code, _, err = run_cli(capsys, "loop", "extract", "--n", "4")
    assert code == 2


def test_loop_verify_pass(capsys):
    code, out, _ = run_cli(capsys, "loop", "verify", "--identity", "all",
                           "--samples", "20000")
    assert code == 0
    lines = [json.loads(l) for l in out.strip().splitlines()]
    assert [l["law"] for l in lines] == ["left", "right", "middle"]
    assert all(l["passed"] for l in lines)


def test_loop_verify_counterexample_exit(capsys, monkeypatch):
    fake = loops.IdentityReport("left", "sampled", 77, (1, 2, 3))
    monkeypatch.setattr(cli.loops, "check_moufang",
                        lambda *a, **k: fake)
    code, out, _ = run_cli(capsys, "loop", "verify", "--identity", "left",
                           "--samples", "10")
    assert code == 1
    failure = last_json(out)
    assert failure["indices"] == [1, 2, 3]
    assert len(failure["codes"]) == 3


def test_loop_center(capsys):
    code, out, _ = run_cli(capsys, "loop", "center")
    assert code == 0
    info = json.loads(out)
    assert info["center_size"] == 128
    assert info["nucleus_size"] == 128
    assert info["squares"] == 8
    assert info["basis_dim"] == 7
    assert info["basis_indices"] == [2, 6, 16, 72, 136, 272, 512]
    assert info["independent"] and info["span_equals_center"]


def test_loop_export_roundtrip(tmp_path, capsys, table):
    code, out, _ = run_cli(capsys, "loop", "export", "--format", "both",
                           "--out", str(tmp_path))
    assert code == 0
    info = json.loads(out)
    assert info["order"] == 1024 and len(info["files"]) == 3
    with open(tmp_path / "loop_table.bin", "rb") as fh:
        mul = serialize.read_loop_binary(fh)
    assert (mul == table.mul).all()
    with open(tmp_path / "loop_table.csv") as fh:
        mul_csv = serialize.read_loop_csv(fh)
    assert (mul_csv == table.mul).all()
    codes = [int(line) for line in (tmp_path / "loop_codes.csv").read_text().split()]
    assert codes == [int(c) for c in table.codes]
    code, _, err = run_cli(capsys, "loop", "export")
    assert code == 2 and "--out" in err


def test_codeloop_quotient_rank3(capsys):
    code, out, _ = run_cli(capsys, "codeloop", "quotient", "--lambda", "1000000")
    assert code == 0
    info = json.loads(out)
    assert info["order"] == 16 and info["is_group"] and info["roundtrip"]
    code, out, _ = run_cli(capsys, "codeloop", "quotient", "--lambda", "0000001")
    assert code == 0
    info = json.loads(out)
    assert not info["is_group"] and not info["group_expected"]
    assert info["moufang"] and info["code_loop"]


def test_codeloop_quotient_rank4(capsys):
    lam = "1000" + "000000" + "1000"
    code, out, _ = run_cli(capsys, "codeloop", "quotient", "--lambda", lam)
    assert code == 0
    info = json.loads(out)
    assert info["n"] == 4 and info["order"] == 32
    assert info["roundtrip"] and not info["is_group"]


def test_codeloop_quotient_usage(capsys):
    code, _, err = run_cli(capsys, "codeloop", "quotient", "--lambda", "10")
    assert code == 2 and "bit string" in err
    code, _, err = run_cli(capsys, "codeloop", "quotient", "--lambda", "1000000",
                           "--n", "4")
    assert code == 2
    code, _, err = run_cli(capsys, "codeloop", "quotient", "--lambda", "0000000")
    assert code == 2


def test_codeloop_charvec(capsys):
    code, out, _ = run_cli(capsys, "codeloop", "charvec", "--lambda", "0100110")
    assert code == 0
    info = json.loads(out)
    assert info["agree"] and info["recovered"] == "0100110"


def test_codeloop_sweep(tmp_path, capsys):
    code, _, err = run_cli(capsys, "codeloop", "sweep", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "sweep.png").exists()
    with open(tmp_path / "report.jsonl") as fh:
        records = [json.loads(line) for line in fh]
    details = [r for r in records if r["kind"] == "detail"]
    assert len(details) == 127
    assert sum(1 for r in details if r["is_group"]) == 63
    assert all(r["order"] == 16 for r in details)


def test_export_enumeration(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "export", "--out", str(tmp_path))
    assert code == 0
    info = json.loads(out)
    assert info["count"] == 1 << 23
    assert info["record_bytes"] == 3
    path = tmp_path / "elements.bin"
    assert path.stat().st_size == (1 << 23) * 3
    code, _, err = run_cli(capsys, "export", "--n", "4", "--out", str(tmp_path))
    assert code == 2 and "budget" in err
    code, _, err = run_cli(capsys, "export")
    assert code == 2
