import hashlib
import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from hyperslice import (SliceRequest, axis_plane, mesh_topology,
                        slice_complex)
from hyperslice.modelio import write_model
from hyperslice.service import create_app


@pytest.fixture(scope="module")
def model_dir(tmp_path_factory, torus_tiny, sphere_medium):
    d = tmp_path_factory.mktemp("models")
    write_model(torus_tiny, d / "3torus.hsl")
    write_model(sphere_medium, d / "3sphere.hsl")
    (d / "broken.hsl").write_text("not a model\n")
    return d


@pytest.fixture(scope="module")
def client(model_dir):
    return TestClient(create_app(model_dir))


def test_list_models(client):
    r = client.get("/models")
    assert r.status_code == 200
    models = {m["id"]: m for m in r.json()["models"]}
    assert set(models) == {"3torus", "3sphere"}  # broken.hsl skipped
    torus = models["3torus"]
    assert torus["tet_count"] == 384
    assert torus["axes"] == ["x", "y", "z", "w"]
    assert torus["bounds"]["w"] == [-1.0, 1.0]


def test_slice_pose_sphere(client):
    req = {"model_id": "3sphere",
           "pose": {"anchor": [0.0, 0.0, 0.0, 0.6]},
           "request_id": "r-17"}
    r = client.post("/slice", json=req)
    assert r.status_code == 200
    body = r.json()
    assert body["request_id"] == "r-17"
    topo = body["topology"]
    assert topo["closed"] and topo["components"] == 1
    assert topo["per_component"][0]["genus"] == 0
    mesh = body["mesh"]
    assert len(mesh["triangles"]) == len(mesh["normals"]) == len(mesh["colors"])
    assert body["timing_ms"] >= 0


def test_slice_cofactors(client):
    r = client.post("/slice", json={
        "model_id": "3torus", "cofactors": [-0.5, 0, 0, 0, 1],
        "request_id": 3})
    assert r.status_code == 200
    assert r.json()["topology"]["components"] == 2


def test_slice_unknown_model(client):
    r = client.post("/slice", json={"model_id": "nope",
                                    "cofactors": [0, 0, 0, 0, 1],
                                    "request_id": "x"})
    assert r.status_code == 404
    body = r.json()
    assert body["error"]["code"] == "UnknownModel"
    assert body["request_id"] == "x"


def test_slice_invalid_plane(client):
    r = client.post("/slice", json={"model_id": "3torus",
                                    "cofactors": [1, 0, 0, 0, 0]})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "InvalidPlane"


def test_slice_pose_and_cofactors_rejected(client):
    r = client.post("/slice", json={
        "model_id": "3torus", "cofactors": [0, 0, 0, 0, 1],
        "pose": {"anchor": [0, 0, 0, 0]}})
    assert r.status_code == 400


def test_slice_tau_without_velocity(client):
    r = client.post("/slice", json={"model_id": "3torus",
                                    "cofactors": [0, 0, 0, 0, 1],
                                    "tau": 0.5})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "InvalidRequest"


def test_slice_deterministic(client):
    req = {"model_id": "3torus", "cofactors": [-0.3, 0.05, 0, 0.02, 1],
           "request_id": "same"}
    b1 = client.post("/slice", json=req).json()
    b2 = client.post("/slice", json=req).json()
    b1.pop("timing_ms"), b2.pop("timing_ms")  # wall-clock differs
    assert b1 == b2


def test_sweep_sphere_flatland(client):
    r = client.post("/sweep", json={
        "model_id": "3sphere", "axis": "w", "start": -0.9, "stop": 0.9,
        "frames": 8, "request_id": "sweep-1"})
    assert r.status_code == 200
    frames = r.json()["frames"]
    assert len(frames) == 8
    offs = [f["offset"] for f in frames]
    assert offs == pytest.approx(list(np.linspace(-0.9, 0.9, 8)))
    for f in frames:
        pts = np.asarray(f["mesh"]["points"])
        used = np.unique(np.asarray(f["mesh"]["triangles"], dtype=int))
        pts = pts[used]
        c = pts.mean(axis=0)
        r_mean = np.linalg.norm(pts - c, axis=1).mean()
        assert r_mean == pytest.approx(math.sqrt(1 - f["offset"] ** 2), rel=0.05)
        assert f["topology"]["closed"]


def test_sweep_torus_euler_even(client):
    r = client.post("/sweep", json={
        "model_id": "3torus", "axis": "w", "start": -0.9, "stop": 0.9,
        "frames": 8})
    for f in r.json()["frames"]:
        assert f["topology"]["euler"] % 2 == 0


def test_sweep_single_frame_at_start(client):
    r = client.post("/sweep", json={"model_id": "3sphere", "axis": "w",
                                    "start": 0.25, "stop": 0.75, "frames": 1})
    frames = r.json()["frames"]
    assert len(frames) == 1 and frames[0]["offset"] == 0.25


def test_sweep_zero_frames(client):
    r = client.post("/sweep", json={"model_id": "3sphere", "axis": "w",
                                    "start": 0, "stop": 1, "frames": 0})
    assert r.status_code == 400


def test_sweep_inactive_axis(client):
    r = client.post("/sweep", json={"model_id": "3sphere", "axis": "t",
                                    "start": 0, "stop": 1, "frames": 2})
    assert r.status_code == 400


def test_topology_matches_direct_slice(client, torus_tiny):
    r = client.post("/slice", json={"model_id": "3torus",
                                    "pose": {"anchor": [0, 0, 0, 0.5]}})
    remote = r.json()["topology"]
    mesh, _ = slice_complex(
        SliceRequest(axis_plane(4, 0.5, torus_tiny.axes)), torus_tiny)
    local = mesh_topology(mesh)
    assert remote["vertices"] == local.vertices
    assert remote["faces"] == local.faces
    assert remote["euler"] == local.euler
    assert remote["components"] == local.components


def test_live_sweep_push(client):
    with client.websocket_connect("/live") as ws:
        ws.send_json({"type": "sweep", "model_id": "3sphere", "axis": "w",
                      "start": -0.5, "stop": 0.5, "frames": 3,
                      "request_id": "live-1"})
        frames = []
        while True:
            msg = json.loads(ws.receive_text())
            assert msg["request_id"] == "live-1"
            if msg["type"] == "done":
                break
            assert msg["type"] == "frame"
            frames.append(msg)
        assert [f["frame"] for f in frames] == [0, 1, 2]
        assert all(f["topology"]["closed"] for f in frames)


def test_live_chunked_frames(model_dir):
    app = create_app(model_dir, chunk_bytes=2048)
    with TestClient(app).websocket_connect("/live") as ws:
        ws.send_json({"type": "sweep", "model_id": "3sphere", "axis": "w",
                      "start": 0.0, "stop": 0.0, "frames": 1,
                      "request_id": "chunky"})
        pieces = []
        total = None
        while True:
            msg = json.loads(ws.receive_text())
            if msg["type"] == "frame_chunk":
                assert msg["seq"] == len(pieces)
                pieces.append(msg["data"])
                total = msg["total"]
            elif msg["type"] == "frame_end":
                text = "".join(pieces)
                assert len(pieces) == total == msg["total"]
                assert hashlib.sha256(text.encode()).hexdigest() == msg["checksum"]
                frame = json.loads(text)
                assert frame["type"] == "frame"
                assert frame["topology"]["closed"]
            elif msg["type"] == "done":
                break
        assert pieces  # the payload really was chunked


def test_live_latest_wins(client):
    with client.websocket_connect("/live") as ws:
        ws.send_json({"type": "sweep", "model_id": "3sphere", "axis": "w",
                      "start": -0.9, "stop": 0.9, "frames": 50,
                      "request_id": "old"})
        ws.send_json({"type": "sweep", "model_id": "3sphere", "axis": "w",
                      "start": 0.0, "stop": 0.1, "frames": 2,
                      "request_id": "new"})
        seen_new = False
        while True:
            msg = json.loads(ws.receive_text())
            if msg["request_id"] == "new":
                seen_new = True
                if msg["type"] == "done":
                    break
            else:
                # no old-request message may arrive after the new one started
                assert not seen_new, "superseded sweep kept pushing frames"


def test_live_bad_message(client):
    with client.websocket_connect("/live") as ws:
        ws.send_json({"type": "hello", "request_id": 9})
        msg = json.loads(ws.receive_text())
        assert msg["type"] == "error"
        assert msg["error"]["code"] == "InvalidRequest"


def test_missing_model_dir(tmp_path):
    with pytest.raises(FileNotFoundError):
        create_app(tmp_path / "absent")


def test_empty_model_dir(tmp_path):
    app = create_app(tmp_path)
    r = TestClient(app).get("/models")
    assert r.status_code == 200
    assert r.json() == {"models": []}


def test_slice_with_view_spec(client, sphere_medium):
    # an axis-drop view of an axis-aligned plane coincides with its frame
    base = {"model_id": "3sphere", "pose": {"anchor": [0, 0, 0, 0.4]}}
    plain = client.post("/slice", json=base).json()
    viewed = client.post("/slice", json={
        **base, "view": {"drop": [4], "label": "drop W"}}).json()
    assert viewed["mesh"]["points"] == plain["mesh"]["points"]
    assert viewed["topology"] == plain["topology"]
    bad = client.post("/slice", json={**base, "view": {"drop": [5]}})
    assert bad.status_code == 400
    assert bad.json()["error"]["code"] == "BadViewSpec"


def test_ui_mount(model_dir, tmp_path):
    (tmp_path / "index.html").write_text("<html><body>viewer</body></html>")
    app = create_app(model_dir, ui_dir=tmp_path)
    c = TestClient(app)
    assert c.get("/models").status_code == 200  # API still wins
    page = c.get("/index.html")
    assert page.status_code == 200
    assert "viewer" in page.text
