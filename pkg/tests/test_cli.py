import json
import subprocess
import sys

from gwtrees.cli import main

BIN = [sys.executable, "-m", "gwtrees.cli"]


def run_cli(args, stdin=""):
    proc = subprocess.run(BIN + args, input=stdin, capture_output=True, text=True)
    return proc


def test_exact_binary_leaves_json():
    proc = run_cli(
        ["exact", "--dist", '{"family":"binary"}', "--set", "0", "--max-n", "30", "--format", "json", "--seed", "1"]
    )
    assert proc.returncode == 0
    values = json.loads(proc.stdout)
    assert values[2] == "1/16"  # entry for n = 3
    assert values[0] == "1/2" and values[1] == "1/8"


def test_exact_cache_roundtrip(tmp_path):
    args = [
        "exact",
        "--dist",
        '{"family":"geometric","p":"1/2"}',
        "--set",
        "0,2",
        "--max-n",
        "12",
        "--format",
        "json",
        "--seed",
        "1",
        "--cache-dir",
        str(tmp_path),
    ]
    first = run_cli(args)
    assert first.returncode == 0
    assert list(tmp_path.iterdir())
    second = run_cli(args)
    assert second.stdout == first.stdout


def test_transform_hat_stdin():
    proc = run_cli(["transform", "hat", "--set", "0"], stdin="1,-1,-1\n")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0,-1"


def test_transform_check_stdin():
    proc = run_cli(["transform", "check"], stdin="(()())\n")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "(())"


def test_sample_embeds_seed_and_reproduces():
    args = [
        "sample",
        "--dist",
        '{"family":"binary"}',
        "--set",
        "0",
        "--n",
        "5",
        "--count",
        "4",
        "--seed",
        "9",
        "--format",
        "text",
    ]
    a = run_cli(args)
    b = run_cli(args)
    assert a.returncode == 0
    assert a.stdout == b.stdout  # byte-identical for identical config and seed
    header = json.loads(a.stdout.splitlines()[0])
    assert header["seed"] == 9
    assert header["version"]
    assert len(a.stdout.splitlines()) == 5


def test_sample_requires_seed():
    proc = run_cli(["sample", "--dist", '{"family":"binary"}', "--set", "0", "--n", "3"])
    assert proc.returncode == 2
    err = json.loads(proc.stderr)
    assert err["error"] == "config"


def test_sample_rejects_impossible_size():
    proc = run_cli(["sample", "--dist", '{"family":"binary"}', "--set", "all", "--n", "4", "--seed", "1"])
    assert proc.returncode == 2


def test_bad_distribution_spec():
    proc = run_cli(["exact", "--dist", '{"family":"cauchy"}', "--set", "0", "--max-n", "4", "--seed", "1"])
    assert proc.returncode == 2


def test_verify_unknown_suite():
    proc = run_cli(["verify", "nonsense", "--seed", "1"])
    assert proc.returncode == 2


def test_verify_requires_seed_for_stochastic():
    proc = run_cli(["verify", "hat-law"])
    assert proc.returncode == 2


def test_verify_checkmap_passes():
    proc = run_cli(["verify", "checkmap"])
    assert proc.returncode == 0
    assert "[PASS]" in proc.stdout
    assert "[FAIL]" not in proc.stdout


def test_verify_first_passage_with_flags():
    proc = run_cli(
        ["verify", "otter-dwass", "--dist", '{"family":"binary"}', "--sets", "0", "0,2", "all", "--max-n", "8", "--seed", "1"]
    )
    assert proc.returncode == 0
    assert "[FAIL]" not in proc.stdout


def test_config_file_merges_and_flags_win(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dist": {"family": "binary"}, "degree_set": "0", "max_n": 3, "seed": 1}))
    proc = run_cli(["exact", "--config", str(cfg), "--format", "json"])
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == ["1/2", "1/8", "1/16"]
    proc = run_cli(["exact", "--config", str(cfg), "--format", "json", "--max-n", "2"])
    assert json.loads(proc.stdout) == ["1/2", "1/8"]


def test_root_partition_subcommand():
    proc = run_cli(
        ["root-partition", "--dist", '{"family":"binary"}', "--set", "0", "--n", "6", "--format", "json", "--seed", "1"]
    )
    assert proc.returncode == 0
    rows = json.loads(proc.stdout)
    assert rows[0]["n"] == 1
    assert abs(rows[2]["statistic"] - 3**0.5 / 3) < 1e-9


def test_runconfig_roundtrip():
    from gwtrees.cli import RunConfig

    cfg = RunConfig(command="exact", dist={"family": "binary"}, degree_set="0,2", max_n=7, seed=3)
    assert RunConfig.from_json(cfg.to_json()) == cfg


def test_main_entrypoint_inprocess(capsys):
    code = main(["exact", "--dist", '{"family":"binary"}', "--set", "all", "--max-n", "3", "--format", "json", "--seed", "1"])
    assert code == 0
    out = capsys.readouterr().out
    assert json.loads(out) == ["1/2", "0", "1/8"]
