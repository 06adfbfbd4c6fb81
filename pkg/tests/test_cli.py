"""CLI surface: subcommands, flag parsing, config files, exit codes."""

import numpy as np
import pytest

import copula_lab as cl
from copula_lab.cli import main, parse_theta_spec


def run(argv):
    return main(argv)


def test_parse_theta_comma_list():
    assert parse_theta_spec("0.5,1,2") == [0.5, 1.0, 2.0]


def test_parse_theta_range():
    assert parse_theta_spec("1:2:0.5") == [1.0, 1.5, 2.0]
    assert np.allclose(parse_theta_spec("-1:1:0.5"), [-1.0, -0.5, 0.0, 0.5, 1.0])


def test_parse_theta_bad_spec():
    with pytest.raises(cl.ConfigError):
        parse_theta_spec("1:0:.1")
    with pytest.raises(cl.ConfigError):
        parse_theta_spec("a,b")


def test_families_lists_catalog(capsys):
    assert run(["families"]) == 0
    out = capsys.readouterr().out
    for fam in cl.ALL_FAMILIES:
        assert fam in out


def test_sample_writes_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(["sample", "--family", "clayton", "--theta", "2", "--samples",
                "50", "--seed", "7", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "u1,u2"
    assert len(lines) == 51


def test_sample_requires_theta():
    assert run(["sample", "--family", "clayton", "--samples", "10"]) == 2


def test_curve_and_plot(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    rc = run(["curve", "--family", "gaussian", "--theta", "0.2,0.5,0.8",
              "--samples", "500", "--reps", "4", "--seed", "3",
              "--out", str(out)])
    assert rc == 0
    assert out.exists()
    assert (tmp_path / "curve.png").exists()
    assert "rank_correlation" in capsys.readouterr().out


def test_curve_no_plot(tmp_path):
    out = tmp_path / "curve.csv"
    run(["curve", "--family", "clayton", "--theta", "0.5,1", "--samples", "100",
         "--reps", "2", "--seed", "3", "--out", str(out), "--no-plot"])
    assert out.exists()
    assert not (tmp_path / "curve.png").exists()


def test_sweep_negative_theta_spec(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = run(["sweep", "--family", "fgm", "--theta", "-1:1:0.5", "--samples",
              "100,200", "--reps", "2", "--seed", "3", "--out", str(out),
              "--no-plot"])
    assert rc == 0
    assert out.read_text().splitlines()[0] == "sample_size,mean_monotone_fraction,reps"


def test_verify_pass_and_fail_exit_codes(tmp_path):
    assert run(["verify", "--family", "clayton", "--theta", "0.5,1,2,4",
                "--grid-res", "15"]) == 0
    assert run(["verify", "--family", "clayton", "--theta", "2,1",
                "--grid-res", "15"]) == 1


def test_verify_rr2_mode():
    assert run(["verify", "--family", "fgm", "--theta", "-1,-0.5",
                "--mode", "rr2", "--grid-res", "15"]) == 0


def test_verify_writes_csv(tmp_path):
    out = tmp_path / "v.csv"
    run(["verify", "--family", "clayton", "--theta", "1,2", "--grid-res", "12",
         "--out", str(out)])
    assert out.read_text().startswith("property,family,params,passed")


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        run(["verify", "--family", "nosuch", "--theta", "1"])
    assert exc.value.code == 2


def test_config_error_exit_code(tmp_path):
    assert run(["curve", "--family", "clayton", "--theta", "2,1",
                "--samples", "100", "--reps", "2"]) == 2


def test_io_error_exit_code(tmp_path):
    rc = run(["curve", "--family", "clayton", "--theta", "1,2", "--samples",
              "100", "--reps", "2", "--out", str(tmp_path / "nodir" / "c.csv"),
              "--no-plot"])
    assert rc == 3


def test_rank_cli(tmp_path):
    rng = np.random.default_rng(2)
    a = rng.normal(size=100)
    data = np.column_stack([a, -2 * a + 0.01 * rng.normal(size=100),
                            rng.normal(size=100)])
    path = tmp_path / "d.csv"
    path.write_text("\n".join(",".join(map(str, row)) for row in data) + "\n")
    out = tmp_path / "rank.csv"
    assert run(["rank", "--data", str(path), "--top", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "col_i,col_j,abs_spearman,rank"
    assert lines[1].startswith("col0,col1,")


def test_rank_missing_file_exit_code(tmp_path):
    assert run(["rank", "--data", str(tmp_path / "nope.csv")]) == 3


def test_config_file_flags_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("family = clayton\ntheta = 0.5,1.0\nsamples = 100\n"
                   "reps = 2\nseed = 9\nno_plot = true\n")
    out = tmp_path / "c.csv"
    rc = run(["curve", "--family", "clayton", "--config", str(cfg),
              "--out", str(out), "--reps", "3"])
    assert rc == 0
    lines = out.read_text().splitlines()
    # reps from the command line (3) wins over the file (2)
    assert lines[1].split(",")[4] == "3"
    assert len(lines) == 3  # theta grid from the file


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("bogus = 1\n")
    assert run(["curve", "--family", "clayton", "--theta", "1",
                "--config", str(cfg)]) == 2


def test_thread_env_determinism(tmp_path, monkeypatch):
    blobs = []
    for threads in ("1", "2"):
        monkeypatch.setenv("COPULA_LAB_THREADS", threads)
        out = tmp_path / f"c{threads}.csv"
        run(["curve", "--family", "gumbel", "--theta", "1.5,3", "--samples",
             "200", "--reps", "4", "--seed", "11", "--out", str(out),
             "--no-plot"])
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]
