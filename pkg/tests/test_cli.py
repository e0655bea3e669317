import io
import json
import subprocess
import sys

import pytest
from PIL import Image

from fatoulab.cli import EXIT_FAILED, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, load_config, main
from fatoulab.render import read_png_config


def run(tmp_path, *argv):
    return main([str(a) for a in argv])


def test_render_png_with_embedded_config(tmp_path):
    out = tmp_path / "nf.png"
    assert run(tmp_path, "render", "--map", "nf", "--res", "48", "--out", out) == EXIT_OK
    data = out.read_bytes()
    assert Image.open(io.BytesIO(data)).size == (48, 48)
    cfg = read_png_config(data)
    assert cfg["command"] == "render" and cfg["map"] == "nf"
    assert cfg["window"] == [-10.0, -10.0, 10.0, 10.0]
    assert cfg["max_iter"] == 2000 and cfg["rng_seed"] == 0x5EED
    assert "workers" not in cfg


def test_render_ppm_and_negative_window(tmp_path):
    out = tmp_path / "g.ppm"
    code = run(tmp_path, "render", "--map", "nh", "--alpha", "0,0", "--beta", "1,0",
               "--window", "-2,-2,2,2", "--res", "16,12", "--out", out)
    assert code == EXIT_OK
    data = out.read_bytes()
    assert data.startswith(b"P6\n# {")
    assert json.loads(data.split(b"\n")[1][2:])["window"] == [-2.0, -2.0, 2.0, 2.0]


def test_orbit_csv(tmp_path):
    out = tmp_path / "o.csv"
    assert run(tmp_path, "orbit", "--map", "nf", "--z0", "0.3,0.2", "--n", "50",
               "--out", out) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# fatoulab-config: ")
    assert json.loads(lines[0].split(": ", 1)[1])["z0"] == "0.3,0.2"
    assert lines[1] == "n,re,im,abs,verdict"
    assert "ConvergedTo" in lines[-1]


def test_psv_csv(tmp_path):
    out = tmp_path / "p.csv"
    assert run(tmp_path, "psv", "--map", "gfh", "--depth", "3", "--out", out) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[1] == "s_index,n,re,im" and lines[2] == "0,0,0.0,0.0"


def test_distance_json(tmp_path, capsys):
    assert run(tmp_path, "distance", "--map", "nf", "--z", "0,0", "--rays", "16") == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["rays"] == 16 and 1.1 < doc["distance"] < 1.2 and not doc["lower_bound"]


def test_verify_pass_and_fail_exit_codes(tmp_path):
    ok = tmp_path / "e.json"
    assert run(tmp_path, "verify", "--check", "corollary_e", "--alpha", "0", "--beta", "1",
               "--out", ok) == EXIT_OK
    doc = json.loads(ok.read_text())
    assert doc["pass"] is True and doc["config"]["check"] == "corollary_e"
    bad = tmp_path / "line.json"
    assert run(tmp_path, "verify", "--map", "nf", "--check", "invariant_line", "--k", "0",
               "--offset", "0.1", "--out", bad) == EXIT_FAILED
    assert json.loads(bad.read_text())["pass"] is False


def test_margin_inconclusive_writes_report(tmp_path):
    out = tmp_path / "c.json"
    code = run(tmp_path, "verify", "--check", "contraction", "--map", "nf", "--r",
               "0.6054797595570711", "--grid-n", "41", "--out", out)
    assert code == EXIT_FAILED
    assert "margin inconclusive" in json.loads(out.read_text())["notes"]


def test_usage_errors(tmp_path, capsys):
    assert run(tmp_path, "render") == EXIT_USAGE
    assert run(tmp_path, "bogus") == EXIT_USAGE
    assert run(tmp_path, "orbit", "--map", "nf", "--z0", "1+2j") == EXIT_USAGE
    assert run(tmp_path, "render", "--map", "nf", "--res", "1") == EXIT_USAGE
    assert run(tmp_path, "render", "--map", "nf", "--workers", "0") == EXIT_USAGE
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"map": "nf", "colour": "red"}))
    assert run(tmp_path, "render", "--config", cfg) == EXIT_USAGE
    cfg.write_text(json.dumps({"map": "nf", "check": "anchors"}))
    assert run(tmp_path, "render", "--config", cfg) == EXIT_USAGE
    assert "unknown config keys" in capsys.readouterr().err


def test_runtime_error_exit(tmp_path):
    # an undecided seed has no label to measure a distance from
    assert run(tmp_path, "distance", "--map", "ng", "--z", "1.5707963267948966,-10") == EXIT_RUNTIME
    assert run(tmp_path, "psv", "--map", "nf", "--depth", "1",
               "--out", tmp_path / "missing" / "x.csv") == EXIT_RUNTIME


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"map": {"map": "nh", "alpha": [1, 0], "beta": [2, 0]},
                               "res": "8", "max_iter": 50}))
    rc = load_config(["render", "--config", str(cfg), "--res", "10"])
    assert rc.options["res"] == "10" and rc.options["max_iter"] == 50
    assert rc.options["map"] == "nh" and rc.options["alpha"] == [1, 0]
    assert rc.options["workers"] == 1
    out = tmp_path / "x.png"
    assert run(tmp_path, "render", "--config", cfg, "--out", out) == EXIT_OK
    meta = read_png_config(out.read_bytes())
    assert meta["res"] == "8" and meta["max_iter"] == 50


@pytest.mark.parametrize("argv", [
    ["render", "--map", "nh", "--alpha", "0,0", "--beta", "1,0", "--res", "40"],
    ["render", "--map", "gfh", "--res", "40", "--out", "{d}/x.ppm"],
    ["verify", "--check", "corollary_c", "--map", "nf", "--seed-z", "0.3,0.2", "--n-max", "8"],
    ["psv", "--map", "ng", "--depth", "4"],
])
def test_outputs_identical_across_worker_counts(tmp_path, argv):
    blobs = []
    for w in (1, 2, 8):
        d = tmp_path / f"w{w}"
        d.mkdir()
        args = [a.format(d=d) for a in argv]
        if "--out" not in args:
            args += ["--out", str(d / "out")]
        assert main(args + ["--workers", str(w)]) in (EXIT_OK, EXIT_FAILED)
        blobs.append(next(p for p in d.iterdir()).read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fatoulab", "verify", "--check", "anchors",
                           "--out", str(tmp_path / "a.json")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads((tmp_path / "a.json").read_text())["check"] == "catalog_anchors"
