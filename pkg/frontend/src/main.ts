// DOM wiring: model picker, pose sliders, render modes, topology readout,
// and sweep playback against the slice service.

import { listModels, openLiveSocket, postSweep } from "./api.js";
import { SliceController } from "./controller.js";
import { createScene } from "./scene.js";
import { SweepPlayback } from "./sweep.js";
import type { CatalogModel, RenderMode, SlicePayload, TopologyReport } from "./types.js";

const base = (window as unknown as { HYPERSLICE_BASE?: string }).HYPERSLICE_BASE
  ?? window.location.origin;

const $ = <T extends HTMLElement>(id: string) =>
  document.getElementById(id) as T;

const viewport = $("viewport");
const scene = createScene(viewport);
window.addEventListener("resize", () => scene.resize());

const status = $("status");
function setStatus(text: string, bad = false) {
  status.textContent = text;
  status.className = bad ? "bad" : "";
}

function genusText(t: TopologyReport): string {
  if (!t.per_component.length) return "-";
  return t.per_component.map((c) => (c.genus === null ? "?" : c.genus)).join(", ");
}

const readout = $("readout");
function showTopology(p: SlicePayload) {
  const t = p.topology;
  if (t.faces === 0) {
    readout.textContent = "no intersection";
    return;
  }
  readout.textContent =
    `V ${t.vertices}  E ${t.edges}  F ${t.faces}  χ ${t.euler}  ` +
    `components ${t.components}  genus ${genusText(t)}  ` +
    `closed ${t.closed}  ${p.timing_ms.toFixed(1)} ms`;
}

const controller = new SliceController(
  { base, debounceMs: 50 },
  {
    onPayload(p) {
      scene.showMesh(p.mesh);
      showTopology(p);
      setStatus(p.diagnostics.out_of_extent ? "outside time extent" : "ok");
    },
    onError(code, message) {
      setStatus(`${code}: ${message}`, true);
    },
  },
);

// -- pose controls -----------------------------------------------------------

const poseBox = $("pose-controls");

function sliderRow(
  label: string,
  min: number,
  max: number,
  step: number,
  value: number,
  onInput: (v: number) => void,
): HTMLElement {
  const row = document.createElement("label");
  row.className = "slider-row";
  const span = document.createElement("span");
  span.textContent = label;
  const input = document.createElement("input");
  input.type = "range";
  input.min = String(min);
  input.max = String(max);
  input.step = String(step);
  input.value = String(value);
  const val = document.createElement("code");
  val.textContent = value.toFixed(3);
  input.addEventListener("input", () => {
    const v = Number(input.value);
    val.textContent = v.toFixed(3);
    onInput(v);
  });
  row.append(span, input, val);
  return row;
}

let angleValues: [number, number, number][] = [];

function buildPoseControls(model: CatalogModel) {
  poseBox.replaceChildren();
  angleValues = [];
  model.axes.forEach((axis, k) => {
    const [lo, hi] = model.bounds[axis];
    poseBox.append(sliderRow(
      `${axis} offset`, lo, hi, (hi - lo) / 200 || 0.01, 0,
      (v) => controller.setAnchorOffset(k, v),
    ));
  });
  // one angle slider per active axis pair
  const axisIndex: Record<string, number> = { t: 0, x: 1, y: 2, z: 3, w: 4, v: 5, u: 6 };
  const act = model.axes.map((a) => axisIndex[a]);
  for (let i = 0; i < act.length; i++) {
    for (let j = i + 1; j < act.length; j++) {
      const slot = angleValues.length;
      angleValues.push([act[i], act[j], 0]);
      poseBox.append(sliderRow(
        `rot ${model.axes[i]}${model.axes[j]}`, -Math.PI, Math.PI, 0.01, 0,
        (v) => {
          angleValues[slot][2] = v;
          controller.setAngles(angleValues.filter((a) => a[2] !== 0));
        },
      ));
    }
  }
  if (model.extruded && model.time_extent) {
    const [lo, hi] = model.time_extent;
    poseBox.append(sliderRow(
      "τ (time)", lo, hi, (hi - lo) / 100, lo,
      (v) => controller.setTau(v),
    ));
  }
}

// -- render modes & diagnostics ------------------------------------------------

for (const mode of ["smooth", "flat", "wireframe"] as RenderMode[]) {
  $(`mode-${mode}`).addEventListener("click", () => {
    scene.setRenderMode(mode);
    for (const m of ["smooth", "flat", "wireframe"]) {
      $(`mode-${m}`).classList.toggle("active", m === mode);
    }
  });
}
$("diagnostics").addEventListener("change", (ev) => {
  controller.setDiagnostics((ev.target as HTMLInputElement).checked);
});

// -- sweep playback ------------------------------------------------------------

const playback = new SweepPlayback({
  onFrame(frame, index) {
    scene.showMesh(frame.mesh);
    showTopology(frame);
    const scrub = $("sweep-scrub") as HTMLInputElement;
    scrub.max = String(Math.max(0, playback.frameCount - 1));
    scrub.value = String(index);
  },
  onPlayStateChange(playing) {
    $("sweep-play").textContent = playing ? "pause" : "play";
  },
});

let live: { send(body: object): void; close(): void } | null = null;

async function startSweep() {
  const model = controller.currentModel;
  if (!model) return;
  const axis = ($("sweep-axis") as HTMLInputElement).value || model.axes[model.axes.length - 1];
  const frames = Number(($("sweep-frames") as HTMLInputElement).value) || 8;
  const [lo, hi] = model.bounds[axis] ?? [-1, 1];
  const body = {
    model_id: model.id,
    axis,
    start: lo * 0.95,
    stop: hi * 0.95,
    frames,
    tau: controller.currentPose.tau,
    request_id: `sweep-${Date.now()}`,
  };
  playback.load([]);
  setStatus("sweeping...");
  try {
    if ("WebSocket" in window) {
      live?.close();
      live = openLiveSocket(base, {
        onFrame: (f) => playback.push(f),
        onDone: () => {
          setStatus(`sweep ready: ${playback.frameCount} frames`);
          playback.play();
        },
        onError: (code, message) => setStatus(`${code}: ${message}`, true),
      });
      live.send(body);
    } else {
      playback.load(await postSweep(base, body));
      playback.play();
    }
  } catch (err) {
    setStatus(String(err), true);
  }
}

$("sweep-run").addEventListener("click", () => void startSweep());
$("sweep-play").addEventListener("click", () => {
  if (playback.playing) playback.pause();
  else playback.play();
});
($("sweep-scrub") as HTMLInputElement).addEventListener("input", (ev) => {
  playback.pause();
  playback.scrubTo(Number((ev.target as HTMLInputElement).value));
});

// -- boot ------------------------------------------------------------------------

async function boot() {
  try {
    const models = await listModels(base);
    const select = $("model-select") as HTMLSelectElement;
    select.replaceChildren(...models.map((m) => {
      const opt = document.createElement("option");
      opt.value = m.id;
      opt.textContent = `${m.name} (${m.tet_count} tets)`;
      return opt;
    }));
    const choose = (id: string) => {
      const model = models.find((m) => m.id === id);
      if (model) {
        scene.clear();
        buildPoseControls(model);
        controller.selectModel(model);
        ($("sweep-axis") as HTMLInputElement).value =
          model.axes[model.axes.length - 1];
      }
    };
    select.addEventListener("change", () => choose(select.value));
    if (models.length) choose(models[0].id);
    setStatus("connected");
  } catch (err) {
    setStatus(`cannot reach service at ${base}: ${err}`, true);
  }
}

void boot();
