import json

import pytest

from chemoduo.cli import main
from chemoduo.config import format_config, save_config
from conftest import make_config

FIG3A = make_config((4.2, 4), (5, 5), (2.1, 2), (0.5, 0.5), (1.9, 1.5), 8, s=0.4, lam=1.0)


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "fig3a.cfg"
    save_config(FIG3A, p)
    return str(p)


def test_simulate_pdmp_writes_bundle(tmp_path, cfg_path):
    out = tmp_path / "out"
    rc = main([
        "simulate", "pdmp", "--config", cfg_path, "--horizon", "20",
        "--seed", "0x2a", "--samples", "51", "--out", str(out),
    ])
    assert rc == 0
    traj = (out / "trajectory.csv").read_text().splitlines()
    assert traj[0] == "t,R,U,V,regime"
    assert len(traj) == 52
    jumps = (out / "jumps.csv").read_text().splitlines()
    assert jumps[0] == "t_jump,from,to"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["parameters"]["seed"] == 42
    assert set(manifest["outputs"]) == {"trajectory", "jumps"}


def test_simulate_byte_deterministic(tmp_path, cfg_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main([
            "simulate", "pdmp", "--config", cfg_path, "--horizon", "30",
            "--seed", "7", "--out", str(out),
        ]) == 0
        outs.append((out / "trajectory.csv").read_bytes())
    assert outs[0] == outs[1]


def test_simulate_gradostat_csv(tmp_path, cfg_path):
    out = tmp_path / "g"
    rc = main([
        "simulate", "gradostat", "--config", cfg_path, "--horizon", "10",
        "--samples", "11", "--init", "8,8,1,1,1,1", "--out", str(out),
    ])
    assert rc == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,R1,R2,U1,U2,V1,V2"
    assert len(lines) == 12


def test_simulate_bad_init_exit_config(tmp_path, cfg_path, capsys):
    rc = main([
        "simulate", "pdmp", "--config", cfg_path, "--init", "1,2",
        "--out", str(tmp_path / "x"),
    ])
    assert rc == 2
    assert "init" in capsys.readouterr().err


def test_missing_config_file_exit_config(tmp_path):
    rc = main(["rates", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)])
    assert rc == 2


def test_malformed_config_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(format_config(FIG3A).replace("vessel1.b_v", "# vessel1.b_v"))
    rc = main(["rates", "--config", str(bad), "--out", str(tmp_path)])
    assert rc == 2
    assert "vessel1.b_v" in capsys.readouterr().err


def test_rates_json_structure(tmp_path, cfg_path, capsys):
    out = tmp_path / "r"
    assert main(["rates", "--config", cfg_path, "--out", str(out)]) == 0
    on_disk = json.loads((out / "rates.json").read_text())
    printed = json.loads(capsys.readouterr().out)
    assert on_disk == printed
    for w in ("u", "v"):
        entry = on_disk["species"][w]
        for key in ("lambda0", "gamma0", "lambda_two", "gamma"):
            assert isinstance(entry[key], float)
        assert set(entry["lambda0_limits"]) == {"slow", "fast"}
    assert on_disk["verdict_prob"] == "extinction-of-u"
    assert on_disk["verdict_det"] == "extinction-of-u"


def test_sweep_figure_and_env_out(tmp_path, monkeypatch):
    monkeypatch.setenv("CHEMODUO_OUT", str(tmp_path / "envout"))
    rc = main([
        "sweep", "--figure", "fig3-a", "--lam-count", "3", "--lam-min", "0.5",
        "--lam-max", "2", "--s-count", "3", "--s-min", "0.3", "--s-max", "0.7",
    ])
    assert rc == 0
    sign = (tmp_path / "envout" / "fig3-a-signmap.csv").read_text().splitlines()
    assert sign[0].startswith("s,lambda,rate_u")
    assert len(sign) == 1 + 9
    assert (tmp_path / "envout" / "fig3-a-contours.csv").exists()


def test_sweep_unknown_figure_exit_config(tmp_path, capsys):
    rc = main(["sweep", "--figure", "fig7-q", "--out", str(tmp_path)])
    assert rc == 2
    assert "fig7-q" in capsys.readouterr().err


def test_sweep_custom_config_with_jobs(tmp_path, cfg_path):
    out = tmp_path / "sw"
    rc = main([
        "sweep", "--config", cfg_path, "--mode", "two-species", "--jobs", "2",
        "--lam-count", "3", "--lam-min", "0.5", "--lam-max", "2",
        "--s-count", "2", "--s-min", "0.3", "--s-max", "0.7", "--out", str(out),
    ])
    assert rc == 0
    files = sorted(p.name for p in out.iterdir())
    assert any(n.endswith("signmap.csv") for n in files)


def test_manifest_hash_tracks_parameters(tmp_path, cfg_path):
    hashes = []
    for horizon in ("10", "20"):
        out = tmp_path / f"h{horizon}"
        assert main([
            "simulate", "pdmp", "--config", cfg_path, "--horizon", horizon,
            "--out", str(out),
        ]) == 0
        hashes.append(json.loads((out / "manifest.json").read_text())["config_hash"])
    assert hashes[0] != hashes[1]


def test_bad_seed_exit_config(tmp_path, cfg_path):
    rc = main([
        "simulate", "pdmp", "--config", cfg_path, "--seed", "zebra",
        "--out", str(tmp_path / "s"),
    ])
    assert rc == 2


def test_verify_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
