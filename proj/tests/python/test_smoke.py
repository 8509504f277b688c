import math
import os
import subprocess

import pytest

import gdm


def test_psi_and_exact_solution():
    assert gdm.psi(0.0, 9) == 1.0
    assert gdm.psi(1.0, 1) == pytest.approx(2.0 * math.exp(-1.0), rel=1e-15)
    assert gdm.exact_c(0.05, 1.0, 1.0, 0.3) == 1.0


def test_tensor_and_viscosity():
    d = gdm.tensor_d(0.0, 5.0, 0.5, 3.0, 4.0)
    assert d[0] == pytest.approx([10.6, 10.8], rel=1e-14)
    assert d[1] == pytest.approx([10.8, 16.9], rel=1e-14)
    assert gdm.viscosity(1.0, 41.0, 1.0) == pytest.approx(1.0 / 41.0)
    assert gdm.truncate(-0.5) == 0.0


def test_discretisations():
    a = gdm.scheme_a(2, 1.0)
    assert a.ndof == 9
    assert sum(a.recon_measures) == pytest.approx(1.0)
    b = gdm.scheme_b(2, 1.0)
    assert b.ndof == 13
    one = [1.0] * b.ndof
    assert gdm.norm_ell(b, one) == pytest.approx(1.0)
    assert gdm.norm_para(b, one) == pytest.approx(1.0)


def test_config_round_trip_and_errors():
    c = gdm.parse_config("test=analytic1\nn=8\n")
    assert c.n == 8 and c.dm == 0.05
    with pytest.raises(gdm.ConfigError):
        gdm.parse_config("test=analytic1\nscheme=c\n")
    d = gdm.default_config("lit1")
    assert d.length == 1000.0


def test_small_run():
    c = gdm.default_config("analytic1")
    c.n = 8
    r = gdm.run(c)
    assert r["has_errors"]
    assert 0.0 < r["l1"] < 0.2
    assert len(r["concentration"]) == 81
    assert max(s["picard_iterations"] for s in r["steps"]) <= 30


def test_quality():
    q = gdm.quality(gdm.scheme_a(8, 1.0))
    assert q["coercivity"] == pytest.approx(1.0, rel=0.05)


def test_vtk_read_by_meshio(tmp_path):
    meshio = pytest.importorskip("meshio")
    cli = os.environ.get("GDM_CLI")
    if not cli:
        pytest.skip("GDM_CLI not set")
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"test=analytic1\nn=4\nvtk_every=20\nout_dir={tmp_path}\n")
    subprocess.run([cli, "run", "--config", str(cfg)], check=True, capture_output=True)
    path = tmp_path / "fields_20.vtk"
    m = meshio.read(path)
    assert len(m.points) == 100
    polys = [cell for block in m.cells for cell in block.data]
    assert len(polys) == 25
    # shoelace areas of the reconstruction cells tile the unit square
    area = 0.0
    for cell in polys:
        xy = m.points[cell, :2]
        x, y = xy[:, 0], xy[:, 1]
        area += 0.5 * abs(sum(x[i] * y[(i + 1) % len(x)] - x[(i + 1) % len(x)] * y[i] for i in range(len(x))))
    assert area == pytest.approx(1.0, abs=1e-12)
    # meshio 5.3 drops CELL_DATA attached to polygon cells, so read the scalars directly
    lines = path.read_text().split("\n")
    start = lines.index("SCALARS c double 1") + 2
    c = [float(v) for v in " ".join(lines[start:start + 25]).split()[:25]]
    cfg_obj = gdm.parse_config(cfg.read_text())
    cfg_obj.vtk_every = 0
    expected = gdm.run(cfg_obj)["concentration"]
    assert c == pytest.approx(list(expected), rel=1e-9, abs=1e-12)
