import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from lowdepthqc.ansatz import AnsatzSpec, Head, Variant, build_ansatz
from lowdepthqc.circuit import serialize_circuit
from lowdepthqc.cli import main
from lowdepthqc.hadamard import GTermKind, build_gterm_circuit


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_classical_csv_schema(tmp_path):
    out = tmp_path / "run"
    assert main(["classical", "-n", "3", "--steps", "4",
                 "--out", str(out)]) == 0
    rows = _read_csv(out / "classical.csv")
    assert rows[0] == ["step", "t", "k", "x", "u"]
    assert len(rows) == 1 + 5 * 8
    record = json.loads((out / "run.json").read_text())
    assert record["csv_paths"]


def test_csv_rows_use_crlf(tmp_path):
    out = tmp_path / "run"
    main(["classical", "-n", "2", "--steps", "1", "--out", str(out)])
    raw = (out / "classical.csv").read_bytes()
    assert b"\r\n" in raw


def test_run_is_byte_deterministic(tmp_path):
    args = ["run", "-n", "2", "-d", "1", "--steps", "2", "--shots", "300",
            "--seed", "9"]
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(args + ["--out", str(out)]) == 0
        outs.append((out / "series.csv").read_bytes()
                    + (out / "cost_trace.csv").read_bytes())
    assert outs[0] == outs[1]


def test_run_seed_changes_sampled_output(tmp_path):
    base = ["run", "-n", "2", "-d", "1", "--steps", "1", "--shots", "300"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    main(base + ["--seed", "1", "--out", str(a)])
    main(base + ["--seed", "2", "--out", str(b)])
    assert (a / "series.csv").read_bytes() != (b / "series.csv").read_bytes()


def test_run_series_schema_and_snapshots(tmp_path):
    out = tmp_path / "run"
    assert main(["run", "-n", "2", "-d", "1", "--steps", "2",
                 "--snapshots", "0.0", "--out", str(out)]) == 0
    rows = _read_csv(out / "series.csv")
    assert rows[0] == ["step", "t", "infidelity", "fidelity", "lambda_vqa",
                       "lambda_classical", "cost"]
    assert len(rows) == 4  # header + steps 0..2
    fields = _read_csv(out / "fields.csv")
    assert fields[0] == ["step", "t", "k", "x", "u_classical", "u_vqa"]
    trace = _read_csv(out / "cost_trace.csv")
    assert trace[0] == ["step", "sweep", "param_index", "lambda_value", "cost"]


def test_fit_command(tmp_path):
    out = tmp_path / "fit"
    assert main(["fit", "-n", "2", "-d", "1", "--out", str(out),
                 "--assert"]) == 0
    rows = _read_csv(out / "fit_params.csv")
    assert rows[0] == ["index", "value"]
    assert len(rows) == 1 + AnsatzSpec(2, 1, head=Head.RY).parameter_count


def test_gatecount_command(tmp_path):
    out = tmp_path / "gc"
    assert main(["gatecount", "--n-max", "3", "--out", str(out)]) == 0
    rows = _read_csv(out / "gatecount.csv")
    assert rows[0] == ["n", "basis", "scheme", "g1", "g2", "depth"]
    assert len(rows) == 1 + 4  # one n, 2 bases x 2 schemes


def test_elide_command(tmp_path, rng):
    spec = AnsatzSpec(2, 1, Variant.CRY, Head.RY)
    mk = lambda: build_ansatz(
        spec, rng.uniform(-math.pi, math.pi, spec.parameter_count))
    c = build_gterm_circuit(GTermKind.OVERLAP, mk(), mk(), elide=False)
    src = tmp_path / "circuit.txt"
    src.write_text(serialize_circuit(c))
    out = tmp_path / "elide"
    assert main(["elide", str(src), "--out", str(out), "--assert"]) == 0
    assert (out / "elided.txt").exists()


def test_config_file_and_override(tmp_path):
    cfgfile = tmp_path / "cfg.yaml"
    cfgfile.write_text("n: 2\nd: 1\nsteps: 1\nseed: 3\n")
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfgfile), "--steps", "2",
                 "--out", str(out)]) == 0
    rows = _read_csv(out / "series.csv")
    assert len(rows) == 4  # CLI --steps overrides the file


def test_bad_config_exits_2(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("bogus_key: 1\n")
    assert main(["run", "--config", str(bad)]) == 2
    bad.write_text("variant: nope\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert main(["noisy-run", "-n", "2", "-d", "1",
                 "--out", str(tmp_path / "x")]) == 2  # profile required
    assert main(["noisy-run", "-n", "2", "-d", "1", "--profile", "wat",
                 "--out", str(tmp_path / "y")]) == 2


def test_unparseable_circuit_exits_2(tmp_path):
    src = tmp_path / "junk.txt"
    src.write_text("not a circuit\n")
    assert main(["elide", str(src), "--out", str(tmp_path / "o")]) == 2
