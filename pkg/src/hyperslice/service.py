"""Local slice server: model catalog, slicing and sweeps over HTTP, and a
websocket push channel for sweep playback.

Endpoints: ``GET /models``, ``POST /slice``, ``POST /sweep``, websocket
``/live``. All mesh payloads use the JSON wire shape of modelio. The
service is stateless per request (fresh output pools), so identical
requests return identical payloads. On the push channel a newly arrived
request from the same connection supersedes any in-flight one
(latest-wins); frames whose serialized size exceeds the chunk threshold
are sent in pieces followed by a checksum record.
"""

from __future__ import annotations

import asyncio
import hashlib
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .modelio import mesh_to_dict, read_model
from .ndvec import (AXIS_NAMES, BadAxisPair, Hyperplane3Flat, InvalidPlane,
                    PlanePose, VecN, axis_index, axis_plane,
                    pose_to_hyperplane)
from .projector import BadViewSpec, ViewSpec
from .simplicial import Complex3, TopologyReport, mesh_topology
from .slicer import SliceDiagnostics, SliceRequest, slice_complex

log = logging.getLogger("hyperslice.service")

MODEL_SUFFIX = ".hsl"
CHUNK_BYTES = 10 * 1024 * 1024


class UnknownModel(KeyError):
    """Request named a model id absent from the catalog."""


@dataclass
class ModelEntry:
    id: str
    path: Path
    complex: Complex3


class PoseWire(BaseModel):
    anchor: list[float]
    angles: list[list[float]] = []


class ViewWire(BaseModel):
    drop: list[int]
    rotations: list[list[float]] = []
    label: str = ""


class SliceWire(BaseModel):
    model_id: str
    pose: PoseWire | None = None
    cofactors: list[float] | None = None
    tau: float | None = None
    view: ViewWire | None = None
    diagnostics: bool = False
    request_id: str | int | None = None


class SweepWire(BaseModel):
    model_id: str
    axis: str
    start: float
    stop: float
    frames: int
    tau: float | None = None
    diagnostics: bool = False
    request_id: str | int | None = None


def load_catalog(model_dir: str | Path) -> dict[str, ModelEntry]:
    """Parse every model file in the directory; unparseable files are
    logged and skipped. Tet orientation is warmed so first slices are
    fast."""
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        raise FileNotFoundError(f"model directory {model_dir} does not exist")
    catalog: dict[str, ModelEntry] = {}
    for path in sorted(model_dir.glob(f"*{MODEL_SUFFIX}")):
        try:
            cx = read_model(path)
            if cx.num_tets:
                cx.orientation()
            catalog[path.stem] = ModelEntry(path.stem, path, cx)
        except Exception as exc:  # skip, keep serving the rest
            log.warning("skipping %s: %s", path.name, exc)
    return catalog


def catalog_entry_dict(e: ModelEntry) -> dict:
    cx = e.complex
    bounds = {AXIS_NAMES[i]: [lo, hi] for i, (lo, hi) in cx.bounds().items()}
    return {
        "id": e.id,
        "name": cx.name or e.id,
        "axes": [AXIS_NAMES[i] for i in cx.axes],
        "tet_count": cx.num_tets,
        "vertex_count": cx.num_vertices,
        "bounds": bounds,
        "time_extent": list(cx.time_extent) if cx.time_extent else None,
        "extruded": cx.has_velocities(),
    }


def topology_to_dict(t: TopologyReport) -> dict:
    return {
        "vertices": t.vertices, "edges": t.edges, "faces": t.faces,
        "euler": t.euler, "components": t.components, "closed": t.closed,
        "non_manifold_edges": t.non_manifold_edges,
        "per_component": [
            {"vertices": c.vertices, "edges": c.edges, "faces": c.faces,
             "euler": c.euler, "closed": c.closed, "genus": c.genus}
            for c in t.per_component],
    }


def diagnostics_to_dict(d: SliceDiagnostics) -> dict:
    return {
        "counts": dict(d.counts),
        "five_plus": d.five_plus,
        "coincident_faces": d.coincident_faces,
        "dropped_area": d.dropped_area,
        "out_of_extent": d.out_of_extent,
    }


def _error(status: int, code: str, message: str, request_id) -> JSONResponse:
    return JSONResponse(status_code=status, content={
        "error": {"code": code, "message": message},
        "request_id": request_id,
    })


class _RequestProblem(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def _plane_from_wire(req: SliceWire | dict, cx: Complex3) -> Hyperplane3Flat:
    pose = req.pose if isinstance(req, SliceWire) else req.get("pose")
    cof = req.cofactors if isinstance(req, SliceWire) else req.get("cofactors")
    if (pose is None) == (cof is None):
        raise _RequestProblem(400, "InvalidPlane",
                              "exactly one of pose/cofactors must be present")
    try:
        if cof is not None:
            if len(cof) != 5:
                raise InvalidPlane("cofactors must have 5 components")
            return Hyperplane3Flat(tuple(float(c) for c in cof), cx.axes)
        anchor = pose.anchor if isinstance(pose, PoseWire) else pose["anchor"]
        angles = pose.angles if isinstance(pose, PoseWire) else pose.get("angles", [])
        if len(anchor) != len(cx.axes):
            raise InvalidPlane(
                f"anchor needs {len(cx.axes)} active components")
        pp = PlanePose(anchor=VecN.from_active(anchor, cx.axes),
                       angles=tuple((int(i), int(j), float(t)) for i, j, t in angles),
                       axes=cx.axes)
        return pose_to_hyperplane(pp)
    except (InvalidPlane, BadAxisPair, ValueError) as exc:
        raise _RequestProblem(400, "InvalidPlane", str(exc)) from None


def _slice_payload(entry: ModelEntry, plane: Hyperplane3Flat, tau, view,
                   diagnostics: bool, workers: int | None, request_id) -> dict:
    cx = entry.complex
    vs = None
    if view is not None:
        drop = view.drop if isinstance(view, ViewWire) else view["drop"]
        rots = view.rotations if isinstance(view, ViewWire) else view.get("rotations", [])
        label = view.label if isinstance(view, ViewWire) else view.get("label", "")
        try:
            vs = ViewSpec(tuple(int(i) for i in drop),
                          tuple((int(i), int(j), float(t)) for i, j, t in rots),
                          label)
        except BadViewSpec as exc:
            raise _RequestProblem(400, "BadViewSpec", str(exc)) from None
    sreq = SliceRequest(plane=plane, tau=tau, diagnostics=diagnostics, view=vs)
    t0 = time.perf_counter()
    try:
        mesh, diags = slice_complex(sreq, cx, workers=workers)
    except (InvalidPlane, BadViewSpec) as exc:
        raise _RequestProblem(400, type(exc).__name__, str(exc)) from None
    except ValueError as exc:
        raise _RequestProblem(400, "InvalidRequest", str(exc)) from None
    elapsed = (time.perf_counter() - t0) * 1000.0
    topo = mesh_topology(mesh)
    return {
        "request_id": request_id,
        "model_id": entry.id,
        "mesh": mesh_to_dict(mesh),
        "topology": topology_to_dict(topo),
        "diagnostics": diagnostics_to_dict(diags),
        "timing_ms": elapsed,
    }


def _sweep_payloads(entry: ModelEntry, req: SweepWire | dict,
                    workers: int | None):
    """Yield (index, payload) for each sweep frame, in order."""
    data = req if isinstance(req, dict) else req.model_dump()
    frames = int(data["frames"])
    if frames < 1:
        raise _RequestProblem(400, "InvalidRequest", "frames must be >= 1")
    cx = entry.complex
    try:
        axis = axis_index(str(data["axis"]))
    except BadAxisPair as exc:
        raise _RequestProblem(400, "InvalidPlane", str(exc)) from None
    if axis not in cx.axes:
        raise _RequestProblem(
            400, "InvalidPlane",
            f"axis {data['axis']} is not active in {cx.axes.names}")
    offsets = np.linspace(float(data["start"]), float(data["stop"]), frames)
    rid = data.get("request_id")
    for i, off in enumerate(offsets):
        plane = axis_plane(axis, float(off), cx.axes)
        payload = _slice_payload(entry, plane, data.get("tau"), None,
                                 bool(data.get("diagnostics", False)),
                                 workers, rid)
        payload["frame"] = i
        payload["offset"] = float(off)
        yield i, payload


def create_app(model_dir: str | Path, workers: int | None = None,
               chunk_bytes: int = CHUNK_BYTES,
               ui_dir: str | Path | None = None) -> FastAPI:
    """Build the service around a model directory.

    ``ui_dir``, when given, is served as static files under / (the built
    browser viewer). The API is CORS-open so a viewer served from another
    origin can talk to it.
    """
    app = FastAPI(title="hyperslice")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    catalog = load_catalog(model_dir)
    app.state.catalog = catalog
    app.state.workers = workers
    app.state.chunk_bytes = chunk_bytes

    def entry_of(model_id: str) -> ModelEntry:
        entry = catalog.get(model_id)
        if entry is None:
            raise UnknownModel(model_id)
        return entry

    @app.get("/models")
    def models():
        return {"models": [catalog_entry_dict(e) for e in catalog.values()]}

    # payloads are returned as prebuilt JSONResponse objects: the dicts are
    # already JSON-native (tolist output), and skipping the recursive
    # jsonable_encoder keeps large meshes inside the interactive budget
    @app.post("/slice")
    def slice_model(req: SliceWire):
        try:
            entry = entry_of(req.model_id)
            plane = _plane_from_wire(req, entry.complex)
            return JSONResponse(_slice_payload(
                entry, plane, req.tau, req.view, req.diagnostics,
                app.state.workers, req.request_id))
        except UnknownModel:
            return _error(404, "UnknownModel",
                          f"no model {req.model_id!r}", req.request_id)
        except _RequestProblem as p:
            return _error(p.status, p.code, p.message, req.request_id)

    @app.post("/sweep")
    def sweep_model(req: SweepWire):
        try:
            entry = entry_of(req.model_id)
            frames = [p for _, p in
                      _sweep_payloads(entry, req, app.state.workers)]
            return JSONResponse({"request_id": req.request_id,
                                 "model_id": req.model_id, "frames": frames})
        except UnknownModel:
            return _error(404, "UnknownModel",
                          f"no model {req.model_id!r}", req.request_id)
        except _RequestProblem as p:
            return _error(p.status, p.code, p.message, req.request_id)

    async def _send_frame(ws: WebSocket, payload: dict) -> None:
        text = json.dumps(payload, separators=(",", ":"))
        limit = app.state.chunk_bytes
        if len(text) <= limit:
            await ws.send_text(text)
            return
        pieces = [text[i:i + limit] for i in range(0, len(text), limit)]
        checksum = hashlib.sha256(text.encode()).hexdigest()
        rid = payload.get("request_id")
        for k, piece in enumerate(pieces):
            await ws.send_text(json.dumps({
                "type": "frame_chunk", "request_id": rid,
                "seq": k, "total": len(pieces), "data": piece,
            }, separators=(",", ":")))
        await ws.send_text(json.dumps({
            "type": "frame_end", "request_id": rid,
            "total": len(pieces), "checksum": checksum,
        }, separators=(",", ":")))

    async def _run_sweep(ws: WebSocket, msg: dict) -> None:
        rid = msg.get("request_id")
        try:
            entry = entry_of(str(msg.get("model_id")))
            gen = _sweep_payloads(entry, msg, app.state.workers)
            while True:
                item = await asyncio.to_thread(lambda: next(gen, None))
                if item is None:
                    break
                i, payload = item
                payload["type"] = "frame"
                await _send_frame(ws, payload)
            await ws.send_text(json.dumps(
                {"type": "done", "request_id": rid}, separators=(",", ":")))
        except asyncio.CancelledError:
            raise
        except UnknownModel:
            await ws.send_text(json.dumps({
                "type": "error", "request_id": rid,
                "error": {"code": "UnknownModel",
                          "message": f"no model {msg.get('model_id')!r}"},
            }, separators=(",", ":")))
        except _RequestProblem as p:
            await ws.send_text(json.dumps({
                "type": "error", "request_id": rid,
                "error": {"code": p.code, "message": p.message},
            }, separators=(",", ":")))

    @app.websocket("/live")
    async def live(ws: WebSocket):
        await ws.accept()
        job: asyncio.Task | None = None
        try:
            while True:
                msg = await ws.receive_json()
                if job is not None and not job.done():
                    job.cancel()  # latest-wins
                if msg.get("type") == "sweep":
                    job = asyncio.create_task(_run_sweep(ws, msg))
                else:
                    await ws.send_text(json.dumps({
                        "type": "error", "request_id": msg.get("request_id"),
                        "error": {"code": "InvalidRequest",
                                  "message": "expected a 'sweep' message"},
                    }, separators=(",", ":")))
        except WebSocketDisconnect:
            pass
        finally:
            if job is not None and not job.done():
                job.cancel()

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
