import math

import pytest

from hyperslice.cli import main
from hyperslice.modelio import write_model


@pytest.fixture(scope="module")
def torus_file(tmp_path_factory, torus_tiny):
    d = tmp_path_factory.mktemp("cli-models")
    path = d / "torus.hsl"
    write_model(torus_tiny, path)
    return str(path)


@pytest.fixture(scope="module")
def sphere_file(tmp_path_factory, sphere_medium):
    d = tmp_path_factory.mktemp("cli-models-s")
    path = d / "sphere.hsl"
    write_model(sphere_medium, path)
    return str(path)


def test_generate_torus(tmp_path, capsys):
    out = tmp_path / "t.hsl"
    rc = main(["generate", "3torus", "--delta-ang", str(math.pi / 4),
               "-o", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "3072 tets" in text
    assert "closed=True" in text
    assert out.exists()


def test_generate_sphere(tmp_path, capsys):
    out = tmp_path / "s.hsl"
    rc = main(["generate", "3sphere", "--radius", "1", "--steps", "8", "8", "16",
               "-o", str(out)])
    assert rc == 0
    assert "closed=True" in capsys.readouterr().out


def test_generate_bad_params(tmp_path, capsys):
    rc = main(["generate", "3torus", "--tube", "0.5", "--depth", "1",
               "-o", str(tmp_path / "x.hsl")])
    assert rc == 2
    assert "invalid parameters" in capsys.readouterr().err


def test_generate_extruded(tmp_path, capsys):
    out = tmp_path / "ext.hsl"
    rc = main(["generate", "3sphere", "--steps", "4", "4", "6",
               "--extrude", "0", "1", "-o", str(out)])
    assert rc == 0
    assert "vel" in out.read_text()


def test_slice_sphere_flatland(sphere_file, tmp_path, capsys):
    out = tmp_path / "slice.obj"
    rc = main(["slice", sphere_file, "--plane", "w=0.6", "-o", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "closed=True" in text
    assert "genus=0" in text
    body = out.read_text()
    assert body.count("\nf ") > 0


def test_slice_outside_extent(torus_file, capsys):
    rc = main(["slice", torus_file, "--plane", "w=1.5"])
    assert rc == 0
    assert "V=0 E=0 F=0" in capsys.readouterr().out


def test_slice_zero_cofactors(torus_file, capsys):
    rc = main(["slice", torus_file, "--cofactors", "0", "0", "0", "0", "0"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_slice_needs_exactly_one_plane_source(torus_file, capsys):
    rc = main(["slice", torus_file])
    assert rc == 1
    rc = main(["slice", torus_file, "--plane", "w=0",
               "--cofactors", "0", "0", "0", "0", "1"])
    assert rc == 1


def test_slice_pose_form(sphere_file, capsys):
    rc = main(["slice", sphere_file, "--anchor", "0", "0", "0", "0.3",
               "--rotate", "x", "w", "0.4"])
    assert rc == 0
    assert "closed=True" in capsys.readouterr().out


def test_slice_deterministic_output(sphere_file, tmp_path):
    a, b = tmp_path / "a.obj", tmp_path / "b.obj"
    assert main(["slice", sphere_file, "--plane", "w=0.3", "-o", str(a)]) == 0
    assert main(["slice", sphere_file, "--plane", "w=0.3", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep(sphere_file, tmp_path, capsys):
    out = tmp_path / "frames"
    rc = main(["sweep", sphere_file, "--axis", "w", "--start", "-0.9",
               "--stop", "0.9", "--frames", "8", "--out-dir", str(out)])
    assert rc == 0
    files = sorted(out.glob("frame_*.obj"))
    assert len(files) == 8
    lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
    assert len(lines) == 9  # header + 8 rows


def test_sweep_zero_frames(sphere_file, tmp_path, capsys):
    rc = main(["sweep", sphere_file, "--axis", "w", "--start", "0",
               "--stop", "1", "--frames", "0", "--out-dir", str(tmp_path)])
    assert rc == 2


def test_validate_closed_model(torus_file, capsys):
    rc = main(["validate", torus_file])
    assert rc == 0
    assert "closed=True" in capsys.readouterr().out


def test_validate_open_model(tmp_path, capsys):
    path = tmp_path / "open.hsl"
    path.write_text("\n".join([
        "#hyperslice v1", "axes x y z w",
        "v 0 0 0 0 0 0 0", "v 0 1 0 0 0 0 0",
        "v 0 0 1 0 0 0 0", "v 0 0 0 1 0 0 0",
        "tet 0 1 2 3", ""]))
    rc = main(["validate", str(path)])
    assert rc == 1
    assert "closed=False" in capsys.readouterr().out


def test_validate_corrupt_file(tmp_path, capsys):
    path = tmp_path / "corrupt.hsl"
    path.write_text("#hyperslice v1\naxes x y z w\nv 1 2\n")
    rc = main(["validate", str(path)])
    assert rc == 2
    assert "line 3" in capsys.readouterr().err


def test_project_wireframe(torus_file, tmp_path, capsys):
    out = tmp_path / "wire.obj"
    rc = main(["project", torus_file, "--drop", "w", "-o", str(out)])
    assert rc == 0
    body = out.read_text()
    assert body.count("\nl ") > 0
    rc = main(["project", torus_file, "--drop", "v", "-o", str(out)])
    assert rc == 1  # v is not active


def test_usage_error_exit_code():
    assert main(["slice"]) == 2          # missing model arg
    assert main(["no-such-command"]) == 2


def test_serve_wires_through(tmp_path, monkeypatch, torus_tiny):
    write_model(torus_tiny, tmp_path / "t.hsl")
    calls = {}

    def fake_run(app, **kw):
        calls["app"] = app
        calls.update(kw)

    import uvicorn
    monkeypatch.setattr(uvicorn, "run", fake_run)
    rc = main(["serve", "--model-dir", str(tmp_path), "--port", "9123"])
    assert rc == 0
    assert calls["port"] == 9123
    assert "t" in calls["app"].state.catalog


def test_serve_missing_dir(capsys, monkeypatch):
    monkeypatch.delenv("HYPERSLICE_MODEL_DIR", raising=False)
    assert main(["serve"]) == 2
    assert main(["serve", "--model-dir", "/nonexistent-hopefully"]) == 2


def test_serve_env_override(tmp_path, monkeypatch, torus_tiny):
    write_model(torus_tiny, tmp_path / "t.hsl")
    monkeypatch.setenv("HYPERSLICE_MODEL_DIR", str(tmp_path))
    import uvicorn
    seen = {}
    monkeypatch.setattr(uvicorn, "run", lambda app, **kw: seen.update(app=app))
    assert main(["serve"]) == 0
    assert "t" in seen["app"].state.catalog
