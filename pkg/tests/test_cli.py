import json
import subprocess
import sys
from pathlib import Path

import pytest

CONFIG_FREE = """
[potential]
tag = free

[grids]
x_half_width = 8.0
dx = 0.05
k_max = 6.0
dk = 0.05

[dyadic]
j_lo = -4
j_hi = 4

[multiplier]
tag = imaginary_power
gamma = 1.0

[tolerances]
jost_tol = 1e-10

[output]
directory = {out}

[verify]
checks = wl2
s = 1.0
wl2_j_lo = -4
wl2_j_hi = 4

[run]
seed = 42
"""

CONFIG_WELL = """
[potential]
tag = square_well
depth = -1.0
width = 2.0

[grids]
x_half_width = 10.0
dx = 0.02
k_max = 6.0
dk = 0.05

[dyadic]
j_lo = -4
j_hi = 4

[multiplier]
tag = heat
t = 0.5

[tolerances]
jost_tol = 1e-10

[output]
directory = {out}

[run]
seed = 7
cache = {cache}
"""


def run_cli(args):
    return subprocess.run([sys.executable, "-m", "jostkit.cli", *args],
                          capture_output=True, text=True)


def test_free_pipeline_smoke(tmp_path):
    cfg = tmp_path / "free.ini"
    out = tmp_path / "out"
    cfg.write_text(CONFIG_FREE.format(out=out))
    r = run_cli(["--config", str(cfg), "verify", "wl2"])
    assert r.returncode == 0, r.stderr
    payload = json.loads(r.stdout)
    assert payload["verdicts"][0]["pass"]
    assert payload["verdicts"][0]["slope"] is not None
    assert (out / "verify_wl2.csv").exists()
    assert (out / "verify_wl2.json").exists()


def test_unknown_multiplier_exits_2(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[potential]\ntag = free\n[multiplier]\ntag = wavelet\n"
                   f"[output]\ndirectory = {tmp_path/'o'}\n")
    r = run_cli(["--config", str(cfg), "scatter"])
    assert r.returncode == 2
    err = json.loads(r.stderr)
    assert err["code"] == "bad_multiplier"


def test_missing_config_exits_2(tmp_path):
    r = run_cli(["--config", str(tmp_path / "nope.ini"), "scatter"])
    assert r.returncode == 2
    assert json.loads(r.stderr)["code"] == "bad_config"


def test_determinism_and_cache(tmp_path):
    cache = tmp_path / "cache"
    outs = []
    times = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        cfg = tmp_path / f"{run_dir}.ini"
        cfg.write_text(CONFIG_WELL.format(out=out, cache=cache))
        r = run_cli(["--config", str(cfg), "scatter"])
        assert r.returncode == 0, r.stderr
        r2 = run_cli(["--config", str(cfg), "kernel"])
        assert r2.returncode == 0, r2.stderr
        outs.append(out)
        manifest = json.loads((out / "manifest.json").read_text())
        times.append(manifest["stage_seconds"]["kernel"])
    # identical outputs byte-for-byte across cold and warm runs
    for name in ("scattering.csv", "scattering.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    kernels0 = sorted(outs[0].glob("kernel_*.csv"))
    kernels1 = sorted(outs[1].glob("kernel_*.csv"))
    assert kernels0 and [p.name for p in kernels0] == [p.name for p in kernels1]
    for p0, p1 in zip(kernels0, kernels1):
        assert p0.read_bytes() == p1.read_bytes()
    # warm cache at least 5x faster on the kernel stage
    assert times[1] <= times[0] / 5.0, times


def test_apply_and_report(tmp_path):
    cfg = tmp_path / "w.ini"
    out = tmp_path / "out"
    cfg.write_text(CONFIG_WELL.format(out=out, cache=tmp_path / "c"))
    r = run_cli(["--config", str(cfg), "apply"])
    assert r.returncode == 0, r.stderr
    payload = json.loads(r.stdout)
    assert payload["completeness_defect"] < 0.05
    r2 = run_cli(["--config", str(cfg), "verify", "cz"])
    assert r2.returncode == 0, r2.stderr
    r3 = run_cli(["--config", str(cfg), "report"])
    assert r3.returncode == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["verdicts"]
