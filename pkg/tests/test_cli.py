import csv
import json
import subprocess
import sys

import numpy as np

from frwkg.cli import main, parse_range
from frwkg.io import read_csv, series_columns

PLANE_WAVE = """\
[grid]
N = 64
L = 6.283185307179586
[initial]
profile = plane_wave
[solver]
T = 6.283185307179586
sample_every = 40
[output]
plot_energy = true
plot_decay = true
"""


def _cfg(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _manifest(d):
    return json.loads((d / "manifest.json").read_text())


def test_evolve_plane_wave(tmp_path):
    out = tmp_path / "pw"
    assert main(["evolve", "--config", _cfg(tmp_path, PLANE_WAVE), "--out", str(out),
                 "--quiet"]) == 0
    header, cols = read_csv(out / "series.csv")
    assert header == series_columns(2)
    d = cols["decay_product"]
    assert np.max(np.abs(d - d[0])) <= 1e-6 * d[0]
    m = _manifest(out)
    assert m["status"] == "completed" and m["exit_code"] == 0
    assert m["config"]["grid"]["N"] == 64 and m["version"]
    assert m["start"] <= m["end"]
    assert "decay_product_max" in m["headline"]
    assert (out / "energy.svg").exists() and (out / "decay.svg").exists()
    assert (out / "trajectory.npz").exists()


def test_evolve_unstable_dt_blows_up(tmp_path):
    text = "[grid]\nN = 64\nL = 16\n[solver]\ncfl_safety = 5\nT = 5\n"
    out = tmp_path / "un"
    assert main(["evolve", "--config", _cfg(tmp_path, text), "--out", str(out), "--quiet"]) == 2
    m = _manifest(out)
    assert m["status"] == "blowup" and m["blowup_tau"] > 0
    assert (out / "series.csv").exists()


def test_evolve_zero_amplitude(tmp_path):
    out = tmp_path / "z"
    text = "[initial]\namplitude = 0\n[solver]\nT = 0.5\n"
    assert main(["evolve", "--config", _cfg(tmp_path, text), "--out", str(out), "--quiet"]) == 0
    with open(out / "series.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    assert rows and all(float(v) == 0.0 for r in rows for v in r[1:])


def test_invalid_config_exit_1_with_manifest(tmp_path):
    out = tmp_path / "bad"
    assert main(["evolve", "--config", _cfg(tmp_path, "[grid]\nN = 15\n"), "--out", str(out),
                 "--quiet"]) == 1
    m = _manifest(out)
    assert m["status"] == "error" and "N even" in m["error"]


def test_determinism(tmp_path):
    cfg = _cfg(tmp_path, "[initial]\nprofile = random\n[solver]\nT = 0.5\n"
                         "[output]\nplot_energy = true\n")
    for name in ("a", "b"):
        assert main(["evolve", "--config", cfg, "--out", str(tmp_path / name), "--seed", "5",
                     "--quiet"]) == 0
    for f in ("series.csv", "energy.svg"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    main(["evolve", "--config", cfg, "--out", str(tmp_path / "c"), "--seed", "6", "--quiet"])
    assert (tmp_path / "a/series.csv").read_bytes() != (tmp_path / "c/series.csv").read_bytes()


def test_out_dir_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("FRWKG_OUT_DIR", str(tmp_path / "env"))
    assert main(["evolve", "--config", _cfg(tmp_path, "[solver]\nT = 0.2\n"), "--quiet"]) == 0
    assert (tmp_path / "env" / "manifest.json").exists()


def test_picard_and_energy_recompute(tmp_path):
    text = ("[grid]\nN = 64\n[matter]\nepsilon = 1e-3\n[initial]\namplitude = 0.01\n"
            "[solver]\nmode = picard\nT = 0.5\ndt = 0.01\n")
    out = tmp_path / "pc"
    assert main(["picard", "--config", _cfg(tmp_path, text), "--out", str(out), "--quiet"]) == 0
    m = _manifest(out)
    assert m["picard"]["converged"] and m["picard"]["final_gap"] <= 1e-12
    assert (out / "picard_gaps.csv").exists()
    re_out = tmp_path / "re"
    assert main(["energy", str(out / "trajectory.npz"), "--out", str(re_out), "--quiet"]) == 0
    assert (re_out / "series.csv").read_bytes() == (out / "series.csv").read_bytes()


def test_classify_exit_codes(capsys):
    assert main(["classify", "--D", "4", "--w", "0", "--xi", "0.2", "--p", "4"]) == 0
    v = json.loads(capsys.readouterr().out)
    assert v["case_label"] == "III" and v["p_bound"] == {"direction": ">", "value": "7/2"}
    assert main(["classify", "--D", "4", "--w", "0", "--xi", "0.1", "--p", "4"]) == 3
    capsys.readouterr()
    assert main(["classify", "--D", "3", "--w", "0", "--quiet"]) == 1


def _verdicts(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_sweep_xi_threshold(tmp_path):
    out = tmp_path / "sw"
    assert main(["sweep", "--D", "4", "--w", "0", "--xi", "0.1:0.2:11", "--p", "4",
                 "--out", str(out), "--quiet"]) == 0
    rows = _verdicts(out / "verdicts.csv")
    flips = [i for i in range(1, len(rows)) if rows[i]["admissible"] != rows[i - 1]["admissible"]]
    assert len(flips) == 1
    i = flips[0]
    assert float(rows[i - 1]["xi"]) < 1 / 6 <= float(rows[i]["xi"])


def test_sweep_case_iv_p_threshold(tmp_path):
    out = tmp_path / "sp"
    assert main(["sweep", "--D", "4", "--w", "1/3", "--p", "3:5:21", "--out", str(out),
                 "--quiet"]) == 0
    rows = _verdicts(out / "verdicts.csv")
    assert {r["case"] for r in rows} == {"IV"}
    for r in rows:
        assert (r["admissible"] == "true") == (float(r["p"]) > 4)


def test_sweep_empty_range(tmp_path):
    out = tmp_path / "e"
    assert main(["sweep", "--D", "4", "--w", "0", "--xi", "", "--out", str(out), "--quiet"]) == 0
    lines = (out / "verdicts.csv").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("D,w,alpha")


def test_sweep_order_and_workers(tmp_path):
    args = ["sweep", "--D", "4,5", "--alpha=-1,1.5", "--xi", "0,0.3", "--p", "2,6", "--quiet"]
    assert main(args + ["--out", str(tmp_path / "s1")]) == 0
    assert main(args + ["--out", str(tmp_path / "s2"), "--workers", "4"]) == 0
    a = (tmp_path / "s1/verdicts.csv").read_bytes()
    assert a == (tmp_path / "s2/verdicts.csv").read_bytes()
    rows = _verdicts(tmp_path / "s1/verdicts.csv")
    keys = [(int(r["D"]), float(r["alpha"]), float(r["xi"]), float(r["p"])) for r in rows]
    assert keys == sorted(keys) and len(keys) == 16


def test_sweep_budget_truncates(tmp_path):
    out = tmp_path / "t"
    assert main(["sweep", "--D", "4", "--w", "0", "--xi", "0:1:10", "--p", "1:6:10",
                 "--max-points", "25", "--out", str(out), "--quiet"]) == 1
    assert len(_verdicts(out / "verdicts.csv")) == 25
    m = _manifest(out)
    assert m["truncated"] and m["requested_points"] == 100


def test_parse_range():
    assert parse_range("3") == [3]
    assert parse_range("1,2.5") == [1, 2.5]
    assert parse_range("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_range("") == [] and parse_range("0:1:0") == []


def test_plot_subcommand(tmp_path):
    out = tmp_path / "pw"
    main(["evolve", "--config", _cfg(tmp_path, PLANE_WAVE), "--out", str(out), "--quiet"])
    svg = tmp_path / "d.svg"
    assert main(["plot", str(out / "series.csv"), "--columns", "decay_product", "--logy",
                 "-o", str(svg), "--quiet"]) == 0
    assert svg.exists()
    assert main(["plot", str(out / "series.csv"), "--columns", "bogus", "--quiet"]) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "frwkg", "--version"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "frwkg" in r.stdout
