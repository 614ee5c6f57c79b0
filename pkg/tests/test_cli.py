"""CLI exit codes, output formats, traces, config files, determinism."""

import json
from pathlib import Path

from gitree_rt.cli import main

PROG = Path(__file__).resolve().parent.parent / "programs"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_run_value_exit_zero(capsys):
    code, out = run_cli(capsys, "run", str(PROG / "delim" / "k_twice.dl"))
    assert code == 0 and out.strip() == "VALUE 12"


def test_run_cc_escape(capsys):
    code, out = run_cli(capsys, "run", str(PROG / "cc" / "escape.cc"))
    assert code == 0 and out.strip() == "VALUE 42"


def test_run_parse_error_exit_two(tmp_path, capsys):
    f = tmp_path / "bad.cc"
    f.write_text("1 + %")
    assert run_cli(capsys, "run", str(f))[0] == 2


def test_run_type_error_exit_three(capsys):
    code, _ = run_cli(capsys, "run", str(PROG / "aff" / "double_use.aff"))
    assert code == 3


def test_run_runtime_error_exit_four(capsys):
    code, out = run_cli(
        capsys, "run", str(PROG / "aff" / "double_use.aff"), "--no-typecheck"
    )
    assert code == 4 and out.strip() == "ERROR Lin"


def test_run_timeout_exit_five(tmp_path, capsys):
    f = tmp_path / "omega.cc"
    f.write_text("(rec f x = f x) 0")
    code, out = run_cli(capsys, "run", str(f), "--fuel", "100")
    assert code == 5 and out.strip() == "TIMEOUT"


def test_inspect_heap(capsys):
    code, out = run_cli(
        capsys, "run", str(PROG / "ffi" / "prog_fig.emb"), "--inspect-heap", "y"
    )
    assert code == 0 and "y = 8" in out


def test_machine_mode(capsys):
    code, out = run_cli(
        capsys, "run", str(PROG / "delim" / "k_twice.dl"), "--mode", "machine"
    )
    assert code == 0 and out.strip() == "VALUE 12"


def test_trace_file_schema(tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    code, _ = run_cli(
        capsys, "run", str(PROG / "ffi" / "prog_fig.emb"), "--trace", str(trace)
    )
    assert code == 0
    lines = trace.read_text().strip().split("\n")
    assert lines
    for line in lines:
        obj = json.loads(line)
        assert obj["kind"] in ("tau", "effect", "spawn")


def test_machine_trace_file(tmp_path, capsys):
    trace = tmp_path / "m.jsonl"
    run_cli(
        capsys,
        "run",
        str(PROG / "cc" / "escape.cc"),
        "--mode",
        "machine",
        "--trace",
        str(trace),
    )
    first = json.loads(trace.read_text().splitlines()[0])
    assert first["kind"] == "machine-step" and "config" in first


def test_diff_file_and_exit(capsys):
    code, out = run_cli(capsys, "diff", str(PROG / "delim" / "k_twice.dl"))
    assert code == 0 and out.strip() == "AGREE 12"


def test_diff_gen_batch(capsys):
    code, out = run_cli(
        capsys, "diff", "--gen", "--lang", "exc", "--count", "10", "--seed", "4"
    )
    assert code == 0 and "10/10 consistent" in out


def test_diff_repeatable_byte_identical(capsys):
    args = ("diff", "--gen", "--lang", "delim", "--count", "8", "--seed", "11")
    outs = set()
    for _ in range(3):
        _code, out = run_cli(capsys, *args)
        outs.add(out)
    assert len(outs) == 1


def test_fuzz_writes_programs(tmp_path, capsys):
    code, _ = run_cli(
        capsys,
        "fuzz",
        "--lang",
        "delim",
        "--count",
        "3",
        "--seed",
        "2",
        "--out",
        str(tmp_path),
    )
    assert code == 0
    files = sorted(tmp_path.glob("*.dl"))
    assert len(files) == 3


def test_typecheck_command(capsys):
    code, out = run_cli(capsys, "typecheck", str(PROG / "aff" / "swap.aff"))
    assert code == 0 and out.strip() == "nat"
    code, _ = run_cli(capsys, "typecheck", str(PROG / "aff" / "double_use.aff"))
    assert code == 3


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "gitree.conf"
    cfg.write_text("fuel=100\n")
    f = tmp_path / "omega.cc"
    f.write_text("(rec f x = f x) 0")
    code, out = run_cli(capsys, "--config", str(cfg), "run", str(f))
    assert code == 5 and out.strip() == "TIMEOUT"
    # explicit flags beat the config
    code, _ = run_cli(capsys, "--config", str(cfg), "run", str(f), "--fuel", "50")
    assert code == 5


def test_exhaustive_sched_reports_outcome_set(tmp_path, capsys):
    f = tmp_path / "forked.aff"
    f.write_text("fork { dealloc (alloc 1) } ; 5")
    code, out = run_cli(capsys, "run", str(f), "--sched", "exhaustive")
    assert code == 0
    assert "VALUE ret 5" in out and "interleavings" in out
