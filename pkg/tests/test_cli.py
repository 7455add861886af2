import json

import numpy as np
import pytest

from tribeat.cli import main
from tribeat.events import read_events


def run(args):
    return main([str(a) for a in args])


def test_network_phi0_reports_zero_permanent(capsys):
    assert run(["network", "--set", "network.phi=0"]) == 0
    out = capsys.readouterr().out
    perm_line = next(l for l in out.splitlines() if l.startswith("|permanent|"))
    assert float(perm_line.split(":")[1]) < 1e-10
    assert "[ok]" in out


def test_network_malformed_matrix_file(tmp_path, capsys):
    bad = tmp_path / "m.txt"
    bad.write_text("1,0 0,0\n0,0 oops\n")
    code = run(["network", "--set", "network.kind=matrix_file",
                "--set", f"network.path={bad}"])
    assert code != 0
    err = capsys.readouterr().err
    assert "line 2" in err


def test_matrix_file_network_accepted(tmp_path, capsys):
    from tribeat.network import tritter
    path = tmp_path / "t.txt"
    rows = [" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row) for row in tritter()]
    path.write_text("\n".join(rows) + "\n")
    assert run(["network", "--set", "network.kind=matrix_file",
                "--set", f"network.path={path}"]) == 0


def test_landscape_deterministic_and_thread_invariant(tmp_path):
    common = ["landscape", "--set", "network.phi=1.5707963267948966",
              "--set", "grid.x_min=-30", "--set", "grid.x_max=30",
              "--set", "grid.y_min=-30", "--set", "grid.y_max=30",
              "--set", "grid.step=2"]
    paths = [tmp_path / f"g{i}.grid" for i in range(3)]
    assert run(common + ["--output", paths[0]]) == 0
    assert run(common + ["--output", paths[1]]) == 0
    assert run(common + ["--output", paths[2], "--threads", "4"]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes() == paths[2].read_bytes()


def test_landscape_verify_dip(tmp_path, capsys):
    out = tmp_path / "g.grid"
    assert run(["landscape", "--output", out, "--verify",
                "--set", "network.phi=0"]) == 0
    assert "center dip" in capsys.readouterr().out


def test_sample_requires_seed(tmp_path, capsys):
    code = run(["sample", "--output", tmp_path / "e.csv",
                "--set", "sampler.n_events=10"])
    assert code != 0
    assert "seed" in capsys.readouterr().err


def test_sample_deterministic(tmp_path):
    args = ["sample", "--set", "sampler.seed=5", "--set", "sampler.n_events=1500"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--output", a]) == 0
    assert run(args + ["--output", b]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sample_eta_zero_gives_header_only(tmp_path):
    out = tmp_path / "none.csv"
    assert run(["sample", "--output", out, "--set", "sampler.seed=1",
                "--set", "sampler.n_events=200", "--set", "noise.eta=0"]) == 0
    events, meta = read_events(out)
    assert events == []
    assert "config_hash" in meta


def test_sample_trial_count_recorded(tmp_path):
    out = tmp_path / "e.csv"
    assert run(["sample", "--output", out, "--set", "sampler.seed=2",
                "--set", "sampler.n_events=700"]) == 0
    _, meta = read_events(out)
    assert meta["n_trials"] == "700"


@pytest.fixture(scope="module")
def analysis_inputs(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli_analysis")
    theory = base / "theory.grid"
    events = base / "events.csv"
    assert run(["landscape", "--output", theory,
                "--set", "network.phi=1.5707963267948966"]) == 0
    assert run(["sample", "--output", events, "--set", "sampler.seed=12",
                "--set", "sampler.n_events=30000",
                "--set", "network.phi=1.5707963267948966"]) == 0
    return theory, events


def test_analyze_report(analysis_inputs, tmp_path, capsys):
    theory, events = analysis_inputs
    out = tmp_path / "report.txt"
    assert run(["analyze", "--events", events, "--theory", theory,
                "--output", out, "--min-fidelity", "0.9"]) == 0
    text = capsys.readouterr().out
    assert "fidelity" in text
    assert out.exists()
    kv = out.with_suffix(out.suffix + ".kv").read_text()
    assert "fidelity=" in kv


def test_analyze_hash_mismatch_refused(analysis_inputs, tmp_path, capsys):
    theory, _ = analysis_inputs
    other = tmp_path / "other.csv"
    assert run(["sample", "--output", other, "--set", "sampler.seed=3",
                "--set", "sampler.n_events=2000", "--set", "network.phi=0"]) == 0
    code = run(["analyze", "--events", other, "--theory", theory])
    assert code != 0
    assert "hash mismatch" in capsys.readouterr().err
    assert run(["analyze", "--events", other, "--theory", theory, "--force"]) == 0


def test_analyze_min_fidelity_threshold(analysis_inputs, capsys):
    theory, events = analysis_inputs
    code = run(["analyze", "--events", events, "--theory", theory,
                "--min-fidelity", "0.9999"])
    assert code == 1
    assert "below threshold" in capsys.readouterr().err


def test_protocol_single_trial_ratio_one(capsys):
    assert run(["protocol", "--m", "1", "--batches", "20000"]) == 0
    out = capsys.readouterr().out
    assert "closed-form enhancement: 1" in out


def test_config_file_and_overrides(tmp_path, capsys):
    cfg = {"schema_version": 1, "network": {"kind": "reference", "phi": 0.0}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert run(["network", "--config", path]) == 0
    code = run(["network", "--config", path, "--set", "network.bogus=1"])
    assert code != 0
    assert "unknown config key" in capsys.readouterr().err


def test_config_schema_version_checked(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"schema_version": 99}))
    assert run(["network", "--config", path]) != 0
    assert "schema_version" in capsys.readouterr().err


def test_distinguishable_flag(tmp_path):
    out = tmp_path / "d.csv"
    assert run(["sample", "--output", out, "--set", "sampler.seed=6",
                "--set", "sampler.n_events=2000",
                "--set", "sampler.distinguishable=true"]) == 0
    _, meta = read_events(out)
    assert meta["sampler"] == "distinguishable"
