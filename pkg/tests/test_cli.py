import csv
import json
import os

import pytest

from dnormlab.cli import main


def run(*argv) -> int:
    return main(list(argv))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def tree_bytes(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for name in files:
            p = os.path.join(dirpath, name)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = fh.read()
    return out


def test_eval_standard_outputs(tmp_path):
    out = tmp_path / "e"
    assert run("eval", "--family", "uniform_wedge", "--out-dir", str(out)) == 0
    rows = read_csv(out / "results.csv")
    assert rows[0] == ["probe_id", "route", "value", "se", "n", "seed"]
    assert len(rows) == 10
    by_id = {r[0]: r for r in rows[1:]}
    # wedge norm is the sup-norm
    assert float(by_id["const_-1"][2]) == pytest.approx(1.0, abs=1e-7)
    assert float(by_id["twospike_1_3"][2]) == pytest.approx(3.0, abs=1e-7)
    # quadrature rows carry no sample size or seed
    assert by_id["const_-1"][4] == "" and by_id["const_-1"][5] == ""
    assert (out / "values.png").exists()
    assert (out / "config.json").exists()


def test_eval_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ("eval", "--family", "gaussian:1.0", "--plot-data")
    assert run(*args, "--out-dir", str(a)) == 0
    assert run(*args, "--out-dir", str(b)) == 0
    ta, tb = tree_bytes(a), tree_bytes(b)
    assert set(ta) == set(tb)
    for name in ta:
        assert ta[name] == tb[name], name


def test_eval_json_format_and_figure_toggle(tmp_path):
    out = tmp_path / "j"
    assert (
        run(
            "eval",
            "--family",
            "uniform_wedge",
            "--format",
            "json",
            "--no-figures",
            "--out-dir",
            str(out),
        )
        == 0
    )
    assert not (out / "values.png").exists()
    assert not (out / "results.csv").exists()
    data = json.loads((out / "results.json").read_text())
    assert {r["probe_id"] for r in data["rows"]} >= {"zero", "ramp"}


def test_eval_inline_and_file_descriptors(tmp_path):
    desc = {"type": "gaussian", "sigma": 1.0}
    p = tmp_path / "fam.json"
    p.write_text(json.dumps(desc))
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert run("eval", "--family", json.dumps(desc), "--out-dir", str(out1)) == 0
    assert run("eval", "--family", f"@{p}", "--out-dir", str(out2)) == 0
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()


def test_eval_custom_probe(tmp_path):
    out = tmp_path / "p"
    probe = json.dumps({"id": "mine", "step": [[0.25, -1.5]]})
    assert (
        run(
            "eval",
            "--family",
            "uniform_wedge",
            "--probe",
            probe,
            "--out-dir",
            str(out),
        )
        == 0
    )
    rows = read_csv(out / "results.csv")
    assert [r[0] for r in rows[1:]] == ["mine"]
    assert float(rows[1][2]) == pytest.approx(1.5, abs=1e-9)


def test_mc_runs_and_worker_invariance(tmp_path):
    w1, w2 = tmp_path / "w1", tmp_path / "w2"
    base = (
        "mc",
        "--family",
        "uniform_wedge",
        "--n",
        "20000",
        "--seed",
        "9",
    )
    assert run(*base, "--workers", "1", "--out-dir", str(w1)) == 0
    assert run(*base, "--workers", "3", "--out-dir", str(w2)) == 0
    assert (w1 / "results.csv").read_bytes() == (w2 / "results.csv").read_bytes()
    rows = read_csv(w1 / "results.csv")
    assert rows[1][1] == "monte_carlo"
    assert {r[4] for r in rows[1:]} == {"20000"}


def test_simulate_msp_outputs(tmp_path):
    out = tmp_path / "s"
    assert (
        run(
            "simulate",
            "msp",
            "--family",
            "uniform_wedge",
            "--n",
            "40",
            "--out-dir",
            str(out),
        )
        == 0
    )
    summary = json.loads((out / "summary.json").read_text())
    assert summary["kind"] == "msp" and summary["n"] == 40
    assert summary["fraction_certified"] == 1.0
    lines = (out / "paths.jsonl").read_text().splitlines()
    assert len(lines) == 40
    rec = json.loads(lines[0])
    assert rec["replicate"] == 0 and rec["certified"] is True
    assert len(rec["values"]) == 201
    rows = read_csv(out / "paths.csv")
    # one column per path plus the grid coordinate, one row per grid point
    assert rows[0][:2] == ["t", "path_0"]
    assert len(rows[0]) == 41
    assert len(rows) == 202


def test_simulate_gpp_outputs(tmp_path):
    out = tmp_path / "g"
    assert (
        run(
            "simulate",
            "gpp",
            "--family",
            "uniform_wedge",
            "--n",
            "30",
            "--grid-resolution",
            "50",
            "--out-dir",
            str(out),
        )
        == 0
    )
    summary = json.loads((out / "summary.json").read_text())
    assert summary["kind"] == "gpp"
    assert summary["x0"] == 0.5
    assert summary["zero_z_count"] == 0
    rec = json.loads((out / "paths.jsonl").read_text().splitlines()[0])
    assert len(rec["values"]) == 51


def test_simulate_capped_policy(tmp_path):
    out = tmp_path / "c"
    assert (
        run(
            "simulate",
            "msp",
            "--generator",
            "ratio:normal:gaussian:1.0",
            "--policy",
            "capped",
            "--max-points",
            "64",
            "--n",
            "20",
            "--out-dir",
            str(out),
        )
        == 0
    )
    summary = json.loads((out / "summary.json").read_text())
    assert summary["points_used_max"] <= 64
    config = json.loads((out / "config.json").read_text())
    assert config["policy"] == {"mode": "capped", "max_points": 64}


def test_verify_subcommands_exit_zero(tmp_path):
    checks = [
        ("msp-df", ["--family", "uniform_wedge", "--n", "4000"]),
        ("gpp-df", ["--family", "uniform_wedge", "--n", "8000"]),
        ("max-stability", ["--family", "uniform_wedge", "--n", "4000", "--k", "2"]),
        ("norm-axioms", ["--family", "gaussian:1.0", "--n", "20000"]),
        ("validate-family", ["--family", "cov:cauchy:gaussian:1.0"]),
        (
            "equivalence",
            [
                "--generator1",
                "ratio:normal:gaussian:1.0",
                "--generator2",
                "spectral:cov:cauchy:gaussian:1.0",
                "--n",
                "20000",
            ],
        ),
    ]
    for name, extra in checks:
        out = tmp_path / name
        code = run("verify", name, *extra, "--out-dir", str(out))
        assert code == 0, name
        assert (out / "report.json").exists(), name
        assert (out / "rows.csv").exists(), name


def test_verify_equivalence_distinguished_exits_one(tmp_path):
    out = tmp_path / "d"
    code = run(
        "verify",
        "equivalence",
        "--generator1",
        "spectral:uniform_wedge",
        "--generator2",
        "ratio:normal:gaussian:1.0",
        "--n",
        "20000",
        "--out-dir",
        str(out),
    )
    assert code == 1
    report = json.loads((out / "report.json").read_text())
    assert report["verdict"] == "DISTINGUISHED"
    assert report["distinguished_probes"]


def test_verify_report_row_schema(tmp_path):
    out = tmp_path / "schema"
    assert (
        run(
            "verify",
            "msp-df",
            "--family",
            "uniform_wedge",
            "--n",
            "2000",
            "--out-dir",
            str(out),
        )
        == 0
    )
    report = json.loads((out / "report.json").read_text())
    row = report["rows"][0]
    assert {"probe_id", "empirical", "se", "theoretical", "pass"} <= set(row)
    header = read_csv(out / "rows.csv")[0]
    assert header[0] == "probe_id"


def test_seed_env_var_and_override(tmp_path, monkeypatch):
    out_env = tmp_path / "env"
    out_flag = tmp_path / "flag"
    out_default = tmp_path / "default"
    monkeypatch.setenv("DNORM_LAB_SEED", "77")
    assert run(
        "mc", "--family", "uniform_wedge", "--n", "5000", "--out-dir", str(out_env)
    ) == 0
    assert json.loads((out_env / "config.json").read_text())["seed"] == 77
    assert (
        run(
            "mc",
            "--family",
            "uniform_wedge",
            "--n",
            "5000",
            "--seed",
            "5",
            "--out-dir",
            str(out_flag),
        )
        == 0
    )
    assert json.loads((out_flag / "config.json").read_text())["seed"] == 5
    monkeypatch.delenv("DNORM_LAB_SEED")
    assert run(
        "mc", "--family", "uniform_wedge", "--n", "5000", "--out-dir", str(out_default)
    ) == 0
    assert json.loads((out_default / "config.json").read_text())["seed"] == 0


def test_bad_seed_env_exits_two(tmp_path, monkeypatch):
    monkeypatch.setenv("DNORM_LAB_SEED", "not-a-number")
    code = run(
        "mc", "--family", "uniform_wedge", "--n", "100", "--out-dir", str(tmp_path / "x")
    )
    assert code == 2


def test_bad_descriptor_exits_two(tmp_path):
    assert (
        run("eval", "--family", "mystery", "--out-dir", str(tmp_path / "x")) == 2
    )


def test_unbounded_generator_refused_exits_two(tmp_path):
    code = run(
        "simulate",
        "msp",
        "--generator",
        "ratio:normal:gaussian:1.0",
        "--n",
        "5",
        "--out-dir",
        str(tmp_path / "x"),
    )
    assert code == 2


def test_quadrature_nonconvergence_exits_three(tmp_path):
    code = run(
        "eval",
        "--family",
        "gaussian:1.0",
        "--quad-tol",
        "1e-15",
        "--out-dir",
        str(tmp_path / "x"),
    )
    assert code == 3


def test_config_excludes_nondeterministic_keys(tmp_path):
    out = tmp_path / "cfg"
    assert (
        run(
            "mc",
            "--family",
            "uniform_wedge",
            "--n",
            "2000",
            "--workers",
            "2",
            "--out-dir",
            str(out),
        )
        == 0
    )
    config = json.loads((out / "config.json").read_text())
    assert "workers" not in config
    assert "out_dir" not in config
