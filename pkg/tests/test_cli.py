import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "wulffclusters.cli"]


def run(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run(CLI + list(args), capture_output=True,
                          text=True, env=e)


def test_wulff_l1_exact_square(tmp_path):
    out = tmp_path / "w.json"
    r = run("wulff", "--aniso", "l1", "--out", str(out))
    assert r.returncode == 0
    d = json.loads(out.read_text())
    xs = sorted(abs(v[0]) for v in d["vertices"])
    ys = sorted(abs(v[1]) for v in d["vertices"])
    assert all(abs(x - 1.0) <= 1e-12 for x in xs)
    assert all(abs(y - 1.0) <= 1e-12 for y in ys)


def test_lens_rejects_l1_with_hint():
    r = run("lens", "--aniso", "l1")
    assert r.returncode == 2
    assert "--smooth" in (r.stderr + r.stdout)


def test_lens_smoothed_l1_accepted(tmp_path):
    out = tmp_path / "c.json"
    r = run("lens", "--aniso", "l1", "--smooth", "0.1",
            "--out", str(out))
    assert r.returncode == 0
    d = json.loads(out.read_text())
    assert d["kind"] == "lens"


def test_bad_flags_exit_2():
    assert run("lens", "--m", "-1").returncode == 2
    assert run("lens", "--R", "0").returncode == 2
    assert run("verify", "lens", "--tol", "-1").returncode == 2
    assert run("lens", "--aniso", "nosuch").returncode == 2
    assert run("lens", "--aniso", "elliptic:2").returncode == 2
    assert run("triod", "--grid", "32").returncode == 2


def test_json_output_is_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for out in (a, b):
        r = run("triod", "--aniso", "elliptic:2,1", "--m", "2.0",
                "--out", str(out))
        assert r.returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_threaded_verify_matches_serial(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    args = ("verify", "lens", "--seeds", "3", "--m", "1.0")
    r1 = run(*args, "--out", str(a), env={"WULFF_CLUSTERS_THREADS": "1"})
    r2 = run(*args, "--out", str(b), env={"WULFF_CLUSTERS_THREADS": "3"})
    assert r1.returncode == 0 and r2.returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_lens_passes(tmp_path):
    out = tmp_path / "v.json"
    r = run("verify", "lens", "--out", str(out))
    assert r.returncode == 0
    d = json.loads(out.read_text())
    assert d["passed"] is True
    assert all(rep["passed"] for rep in d["reports"])


def test_aniso_json_file(tmp_path):
    spec = tmp_path / "aniso.json"
    spec.write_text(json.dumps({"kind": "elliptic",
                                "params": {"a": 2.0, "b": 1.0}}))
    r = run("wulff", "--aniso", str(spec))
    assert r.returncode == 0


def test_svg_written(tmp_path):
    svg = tmp_path / "c.svg"
    r = run("lens", "--svg", str(svg))
    assert r.returncode == 0
    text = svg.read_text()
    assert text.startswith("<?xml") or text.lstrip().startswith("<svg")
    assert "<polyline" in text or "<path" in text


def test_approx_monotone():
    r = run("approx", "lens")
    assert r.returncode == 0
