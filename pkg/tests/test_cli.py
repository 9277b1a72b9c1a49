import json
from pathlib import Path

import pytest

from logbec import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def base(**over):
    raw = {
        "atom_number": 50000,
        "scatter_length": {"value": 90, "unit": "a0"},
        "log_strength": {"value": 3.3e-15, "unit": "eV"},
        "initial": {"sigma": {"value": 2.5, "unit": "um"}},
        "t_end": {"value": 100, "unit": "ms"},
        "sample_interval": {"value": 10, "unit": "ms"},
    }
    raw.update(over)
    return raw


@pytest.fixture
def write(tmp_path):
    def _write(raw, name="cfg.json"):
        p = tmp_path / name
        p.write_text(raw if isinstance(raw, str) else json.dumps(raw))
        return str(p)
    return _write


def test_simulate_writes_csv(write, tmp_path, capsys):
    out = tmp_path / "traj.csv"
    assert cli.main(["simulate", write(base(compare_linear=True)), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1].startswith("# units: ")
    assert lines[2].startswith("# internal: ")
    assert lines[3] == "t_s,sigma_m,sigma_dot_m_per_s,energy_J,sigma_linear_minus_sigma_m"
    assert len(lines) == 4 + 11
    assert "chi: 107.351" in capsys.readouterr().out


def test_rerun_is_byte_identical(write, tmp_path):
    cfg = write(base())
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["simulate", cfg, "--out", str(a)])
    cli.main(["simulate", cfg, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_output_dir_from_environment(write, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path / "results"))
    assert cli.main(["simulate", write(base(), "run.json")]) == 0
    assert (tmp_path / "results" / "run_trajectory.csv").exists()


def test_sweep_b(write, tmp_path):
    out = tmp_path / "sweep.csv"
    code = cli.main(["sweep", write(base()), "--axis", "b", "--values", "0,3.3e-16,3.3e-15",
                     "--t-end", "0.05", "--out", str(out)])
    assert code == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "t_s\\b_eV,0.00000000e+00,3.30000000e-16,3.30000000e-15"
    assert len(rows) == 1 + 101
    assert all(r.split(",")[1] == "0.00000000e+00" for r in rows[1:])


def test_sweep_chi(write, tmp_path):
    out = tmp_path / "sweep.csv"
    code = cli.main(["sweep", write(base()), "--axis", "chi", "--values", "1000,10",
                     "--t-end", "0.02", "--t-step", "0.005", "--out", str(out)])
    assert code == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0].startswith("t_s\\chi,")
    assert len(rows) == 6


@pytest.mark.filterwarnings("ignore:pulse duration")
def test_sweep_skips_pulse(write, tmp_path):
    raw = base(schedule={"dkc": {"t_kick": {"value": 10, "unit": "ms"},
                                 "duration": {"value": 1, "unit": "ms"}, "mode": "thin_lens"}})
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", write(raw), "--axis", "b", "--values", "3.3e-15",
                     "--t-step", "0.0005", "--out", str(out)]) == 0
    times = [float(l.split(",")[0]) for l in out.read_text().splitlines()
             if not l.startswith(("#", "t_s"))]
    assert not any(0.0101 < t < 0.0109 for t in times)


def test_error_budget(capsys):
    code = cli.main(["error-budget", str(CONFIGS / "dkc.json"), "--errors", "0.2,0.2,0.2,0"])
    assert code == 0
    out = capsys.readouterr().out
    assert "post-kick state" in out
    assert "absolute rate error" in out
    assert "magnetic threshold b/hbar = 5.01358 rad/s" in out


def test_error_budget_keywords(capsys):
    assert cli.main(["error-budget", str(CONFIGS / "free_expansion.json"),
                     "--errors", "n=0.01,a=0.01"]) == 0
    assert "initial state" in capsys.readouterr().out


@pytest.mark.parametrize("raw, needle", [
    ("{not json", "line 1 column 2"),
    (base(atom_number=-1), "config.atom_number"),
    (base(initial={"sigma": {"value": 2.5, "unit": "furlong"}}), "config.initial.sigma"),
    (base(t_end={"value": 0, "unit": "s"}), "config.t_end"),
    (base(solver="fem"), "config.solver"),
])
def test_config_errors_exit_2(write, raw, needle, capsys):
    assert cli.main(["simulate", write(raw)]) == 2
    assert needle in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert cli.main(["simulate", str(tmp_path / "nope.json")]) == 2


def test_bad_errors_exit_2(write):
    assert cli.main(["error-budget", write(base()), "--errors", "0.1,0.1"]) == 2
    assert cli.main(["error-budget", write(base()), "--errors", "q=0.1"]) == 2


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "x.json", "--axis", "omega", "--values", "1"])
    assert exc.value.code == 2


def test_collapse_exit_3(write, capsys):
    raw = base(atom_number=1e6, scatter_length={"value": -100, "unit": "a0"},
               log_strength={"value": 0, "unit": "eV"})
    assert cli.main(["simulate", write(raw)]) == 3
    assert "physics error" in capsys.readouterr().err


def test_unreachable_chi_exit_3(write):
    assert cli.main(["sweep", write(base()), "--axis", "chi", "--values", "1e-12",
                     "--t-end", "0.01"]) == 3


def test_validate_needs_both(write):
    assert cli.main(["validate", write(base())]) == 2


def test_validate_linear(write, tmp_path):
    raw = base(atom_number=0, log_strength={"value": 0, "unit": "eV"}, solver="both",
               t_end={"value": 50, "unit": "ms"}, pde={"samples": 10})
    out = tmp_path / "v.csv"
    assert cli.main(["validate", write(raw), "--tolerance", "1e-3", "--out", str(out)]) == 0
    assert "t_s,sigma_variational_m,sigma_pde_m,relative_discrepancy" in out.read_text()


def test_validate_gausson(write):
    raw = base(atom_number=0, solver="both", initial={"sigma": {"value": 6.036381320756293, "unit": "um"}},
               t_end={"value": 50, "unit": "ms"}, pde={"samples": 10})
    assert cli.main(["validate", write(raw), "--tolerance", "1e-2"]) == 0


@pytest.mark.slow
def test_validate_defaults(capsys):
    assert cli.main(["validate", str(CONFIGS / "validate_short.json")]) == 0
    assert "PASS" in capsys.readouterr().out


def test_validate_failure_exit_4(write, capsys):
    raw = base(atom_number=0, log_strength={"value": 0, "unit": "eV"}, solver="both",
               t_end={"value": 20, "unit": "ms"}, pde={"samples": 5})
    assert cli.main(["validate", write(raw), "--tolerance", "1e-15"]) == 4
    assert "FAIL" in capsys.readouterr().out
