// Thin HTTP/websocket client for the slice service.

import type {
  CatalogModel,
  ServiceError,
  SlicePayload,
  SliceRequestBody,
  SweepRequestBody,
} from "./types.js";

export type FetchLike = typeof fetch;

export class ServiceRequestError extends Error {
  code: string;
  requestId: string | number | null;

  constructor(code: string, message: string, requestId: string | number | null) {
    super(message);
    this.code = code;
    this.requestId = requestId;
  }
}

async function postJson<T>(
  base: string,
  path: string,
  body: unknown,
  fetchImpl: FetchLike,
): Promise<T> {
  const resp = await fetchImpl(`${base}${path}`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  const data = await resp.json();
  if (!resp.ok || (data && typeof data === "object" && "error" in data)) {
    const err = data as ServiceError;
    throw new ServiceRequestError(
      err.error?.code ?? `http ${resp.status}`,
      err.error?.message ?? resp.statusText,
      err.request_id ?? null,
    );
  }
  return data as T;
}

export async function listModels(
  base: string,
  fetchImpl: FetchLike = fetch,
): Promise<CatalogModel[]> {
  const resp = await fetchImpl(`${base}/models`);
  if (!resp.ok) throw new Error(`GET /models failed: ${resp.status}`);
  const data = (await resp.json()) as { models: CatalogModel[] };
  return data.models;
}

export function postSlice(
  base: string,
  body: SliceRequestBody,
  fetchImpl: FetchLike = fetch,
): Promise<SlicePayload> {
  return postJson<SlicePayload>(base, "/slice", body, fetchImpl);
}

export async function postSweep(
  base: string,
  body: SweepRequestBody,
  fetchImpl: FetchLike = fetch,
): Promise<SlicePayload[]> {
  const data = await postJson<{ frames: SlicePayload[] }>(
    base,
    "/sweep",
    body,
    fetchImpl,
  );
  return data.frames;
}

// -- /live push-channel frame reassembly ------------------------------------

type LiveMessage =
  | ({ type: "frame" } & SlicePayload)
  | { type: "frame_chunk"; request_id: unknown; seq: number; total: number; data: string }
  | { type: "frame_end"; request_id: unknown; total: number; checksum: string }
  | { type: "done"; request_id: string | number | null }
  | ({ type: "error" } & ServiceError);

export interface AssemblerCallbacks {
  onFrame(frame: SlicePayload & { type: "frame" }): void;
  onDone(requestId: string | number | null): void;
  onError(code: string, message: string): void;
}

async function sha256hex(text: string): Promise<string> {
  const buf = await crypto.subtle.digest("SHA-256", new TextEncoder().encode(text));
  return Array.from(new Uint8Array(buf))
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}

/** Reassembles chunked /live frames; oversized frames arrive as
 * frame_chunk pieces followed by a frame_end checksum record. */
export function createFrameAssembler(cb: AssemblerCallbacks) {
  let pieces: string[] = [];

  return async function handle(raw: string): Promise<void> {
    const msg = JSON.parse(raw) as LiveMessage;
    switch (msg.type) {
      case "frame":
        cb.onFrame(msg);
        break;
      case "frame_chunk":
        if (msg.seq !== pieces.length) {
          pieces = [];
          cb.onError("ChunkOrder", `unexpected chunk seq ${msg.seq}`);
          return;
        }
        pieces.push(msg.data);
        break;
      case "frame_end": {
        const text = pieces.join("");
        pieces = [];
        const digest = await sha256hex(text);
        if (digest !== msg.checksum) {
          cb.onError("ChecksumMismatch", "reassembled frame failed its checksum");
          return;
        }
        cb.onFrame(JSON.parse(text));
        break;
      }
      case "done":
        cb.onDone(msg.request_id);
        break;
      case "error":
        cb.onError(msg.error.code, msg.error.message);
        break;
    }
  };
}

/** Live sweep playback over the websocket push channel; a new request
 * supersedes any in-flight one server-side (latest-wins). */
export function openLiveSocket(
  base: string,
  cb: AssemblerCallbacks,
  wsFactory?: (url: string) => WebSocket,
): { send(body: object): void; close(): void } {
  const url = base.replace(/^http/, "ws").replace(/\/$/, "") + "/live";
  const ws = wsFactory ? wsFactory(url) : new WebSocket(url);
  const handle = createFrameAssembler(cb);
  ws.onmessage = (ev) => void handle(String(ev.data));
  ws.onerror = () => cb.onError("ConnectionError", "live channel error");
  return {
    send(body: object) {
      ws.send(JSON.stringify({ type: "sweep", ...body }));
    },
    close() {
      ws.close();
    },
  };
}
