import contextlib
import io
import json
import os
from pathlib import Path

import pytest

from kostlab.cli import dispatch
from kostlab.closedforms import expected_log_norm
from kostlab.devlab.config import EXPERIMENT_KINDS

GOLDEN = Path(__file__).parent / "golden"
HELP_TARGETS = [
    [],
    ["sample"],
    ["roots"],
    ["curve-topo"],
    *[[k] for k in EXPERIMENT_KINDS],
    ["closed-form"],
    *[["closed-form", q] for q in ("moment-bound", "expected-log-norm", "tau-phi", "harnack", "maximality-threshold")],
]


def run(argv, capsys):
    code = dispatch(argv)
    out, err = capsys.readouterr()
    return code, out, err


def help_text(argv) -> str:
    buf = io.StringIO()
    old = os.environ.get("COLUMNS")
    os.environ["COLUMNS"] = "80"
    try:
        with contextlib.redirect_stdout(buf):
            assert dispatch([*argv, "--help"]) == 0
    finally:
        if old is None:
            del os.environ["COLUMNS"]
        else:
            os.environ["COLUMNS"] = old
    return buf.getvalue()


def golden_name(argv) -> str:
    return "help_" + ("_".join(argv) or "main") + ".txt"


def write_golden() -> None:
    GOLDEN.mkdir(exist_ok=True)
    for argv in HELP_TARGETS:
        (GOLDEN / golden_name(argv)).write_text(help_text(argv), encoding="utf-8")


@pytest.mark.parametrize("argv", HELP_TARGETS, ids=lambda a: " ".join(a) or "main")
def test_help_matches_golden(argv):
    assert help_text(argv) == (GOLDEN / golden_name(argv)).read_text(encoding="utf-8")


@pytest.mark.parametrize("kind", EXPERIMENT_KINDS)
def test_every_command_has_seed_and_out(kind):
    text = help_text([kind])
    assert "--seed" in text and "--out" in text


def test_moment_bound_prints_eight(capsys):
    code, out, _ = run(["closed-form", "moment-bound", "--m", "1", "--k", "1", "--tau", "0"], capsys)
    assert (code, out) == (0, "8\n")


def test_closed_form_values(capsys):
    assert run(["closed-form", "harnack", "--d", "6"], capsys)[1] == "11\n"
    assert run(["closed-form", "maximality-threshold", "--d", "6", "--a", "1/2"], capsys)[1] == "8\n"
    code, out, _ = run(["closed-form", "tau-phi", "--geometry", "ellipsoid", "--point", "[1, 0.6, 0.8]", "--d", "3"], capsys)
    assert (code, out) == (0, "1\n")
    code, out, _ = run(["closed-form", "expected-log-norm", "--k", "1", "--tau", "0.5"], capsys)
    assert code == 0 and float(out) == expected_log_norm(1, 0.5)


def test_closed_form_writes_out(tmp_path, capsys):
    path = tmp_path / "h.json"
    assert run(["closed-form", "--out", str(path), "harnack", "--d", "4"], capsys)[0] == 0
    assert json.loads(path.read_text()) == {"quantity": "harnack", "value": 4}


def test_missing_seed_is_exit_two(capsys):
    code, _, err = run(["tail1d", "--d", "100", "--trials", "100"], capsys)
    assert code == 2
    assert err.startswith("E:2:")
    for argv in (["sample", "--d", "3"], ["roots", "--coeffs", "1,2"], ["curve-topo", "--d", "3"]):
        assert run(argv, capsys)[0] == 2


def test_bad_flags_and_configs_are_exit_two(capsys):
    for argv in (
        ["tail1d", "--seed", "1", "--eps", "abc"],
        ["tail1d", "--seed", "1", "--d", "100", "--eps", "0.01"],
        ["equidist", "--seed", "1", "--d", "10"],
        ["no-such-command"],
        ["mean-roots", "--seed", "1", "--config", "/nonexistent/cfg.json"],
        ["mean-roots", "--seed", "1", "--threads", "0", "--trials", "100", "--d", "3"],
    ):
        code, _, err = run(argv, capsys)
        assert code == 2, argv
        assert err.startswith("E:2:"), argv


def test_numerical_failure_is_exit_three(capsys):
    # roots 1 and 1 +- 2^-20: the double-precision chain cannot resolve the cluster
    code, _, err = run(["roots", "--seed", "0", "--coeffs=-0.9999999999990905,2.9999999999990905,-3,1",
                        "--method", "float"], capsys)
    assert code == 3
    assert err.startswith("E:3:")


def test_tail1d_writes_json_and_csv(tmp_path, capsys):
    out = tmp_path / "t.json"
    argv = ["tail1d", "--d", "100", "--eps", "1,1.5,2", "--trials", "1000", "--seed", "42", "--out", str(out)]
    assert run(argv, capsys)[0] == 0
    rec = json.loads(out.read_text())
    assert rec["kind"] == "tail1d" and rec["seed"] == 42
    assert [c["threshold"] for c in rec["payload"]["per_d"][0]["cells"]] == [1.0, 1.5, 2.0]
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "d,threshold,hits,trials,p_hat,ci_lo,ci_hi"


def test_dump_config_roundtrip(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    argv = ["tail2d", "--seed", "5", "--d", "3,4", "--trials", "20", "--a", "1/2,1", "--max-depth", "9"]
    assert run([*argv, "--dump-config", "--out", str(cfg_path)], capsys)[0] == 0
    cfg = json.loads(cfg_path.read_text())
    assert cfg["topology_opts"]["max_depth"] == 9 and cfg["d_list"] == [3, 4]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run([*argv, "--out", str(a)], capsys)[0] == 0
    assert run(["tail2d", "--config", str(cfg_path), "--out", str(b), "--threads", "2"], capsys)[0] == 0
    ja, jb = json.loads(a.read_text()), json.loads(b.read_text())
    assert ja["payload"] == jb["payload"] and ja["config"] == jb["config"]


def test_config_file_flags_override(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"kind": "mean-roots", "seed": 3, "d": 10, "trials": 500}))
    code, out, _ = run(["mean-roots", "--config", str(cfg_path), "--trials", "200", "--dump-config"], capsys)
    assert code == 0
    cfg = json.loads(out)
    assert (cfg["seed"], cfg["trials"], cfg["d_list"]) == (3, 200, [10])


def test_config_kind_mismatch(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"kind": "lelong", "seed": 3}))
    assert run(["mean-roots", "--config", str(cfg_path)], capsys)[0] == 2


def test_sample_jsonl(capsys):
    code, out, _ = run(["sample", "--n", "2", "--d", "3", "--seed", "7", "--count", "3"], capsys)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 3
    assert [json.loads(x)["index"] for x in lines] == [0, 1, 2]


def test_roots_report(capsys):
    code, out, _ = run(["roots", "--seed", "0", "--coeffs=-1,0,1", "--complex"], capsys)
    obj = json.loads(out)
    assert code == 0 and obj["real_root_count"] == 2 and len(obj["brackets"]) == 2
    assert sorted(round(r[0], 12) for r in obj["complex_roots"]) == [-1.0, 1.0]


def test_curve_topo_circle(capsys):
    code, out, _ = run(["curve-topo", "--seed", "0", "--terms", "2,0:1;0,2:1;0,0:-1", "--mode", "affine",
                        "--window=-2,2,-2,2"], capsys)
    obj = json.loads(out)
    assert code == 0 and obj["b0"] == 1 and obj["status"] == "certified"
    assert "arc_graph" not in obj
    code, out, _ = run(["curve-topo", "--seed", "0", "--d", "4", "--graph"], capsys)
    assert code == 0 and "arc_graph" in json.loads(out)


def test_window_rejected_in_projective_mode(capsys):
    assert run(["curve-topo", "--seed", "0", "--d", "3", "--window=-1,1,-1,1"], capsys)[0] == 2
