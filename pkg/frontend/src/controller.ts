// The interactive slice loop: pose changes become debounced slice
// requests with at most one in flight; stale responses (request id not
// the latest issued) are discarded, and every outcome is recorded in an
// audit log so the no-stale-render invariant can be checked.

import { postSlice, ServiceRequestError, type FetchLike } from "./api.js";
import type { CatalogModel, SlicePayload } from "./types.js";

export interface PoseState {
  anchor: number[]; // one offset per active axis, clamped to catalog bounds
  angles: [number, number, number][]; // (axis_i, axis_j, radians)
  tau: number | null;
}

export interface AuditEntry {
  requestId: number;
  issuedAt: number;
  resolvedAt: number | null;
  outcome: "pending" | "rendered" | "stale" | "error";
}

export interface ControllerCallbacks {
  onPayload?(payload: SlicePayload): void;
  onError?(code: string, message: string): void;
  onRequestStateChange?(inFlight: boolean): void;
}

export interface ControllerOptions {
  base: string;
  fetchImpl?: FetchLike;
  debounceMs?: number;
  diagnostics?: boolean;
  now?: () => number;
  setTimeoutImpl?: (fn: () => void, ms: number) => unknown;
  clearTimeoutImpl?: (handle: unknown) => void;
}

const clamp = (v: number, lo: number, hi: number) =>
  Math.min(hi, Math.max(lo, v));

export class SliceController {
  readonly debounceMs: number;
  diagnostics: boolean;

  private base: string;
  private fetchImpl: FetchLike;
  private now: () => number;
  private setT: (fn: () => void, ms: number) => unknown;
  private clearT: (handle: unknown) => void;
  private cb: ControllerCallbacks;

  private model: CatalogModel | null = null;
  private pose: PoseState = { anchor: [], angles: [], tau: null };
  private nextId = 0;
  private latestIssuedId = -1;
  private inFlight = false;
  private dirty = false;
  private timer: unknown = null;
  private audit: AuditEntry[] = [];

  constructor(opts: ControllerOptions, cb: ControllerCallbacks = {}) {
    this.base = opts.base;
    this.fetchImpl = opts.fetchImpl ?? fetch;
    this.debounceMs = opts.debounceMs ?? 50;
    this.diagnostics = opts.diagnostics ?? false;
    this.now = opts.now ?? (() => performance.now());
    this.setT = opts.setTimeoutImpl ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearT = opts.clearTimeoutImpl ?? ((h) => clearTimeout(h as number));
    this.cb = cb;
  }

  // -- state ----------------------------------------------------------------

  get currentModel(): CatalogModel | null {
    return this.model;
  }

  get currentPose(): PoseState {
    return {
      anchor: [...this.pose.anchor],
      angles: this.pose.angles.map((a) => [...a] as [number, number, number]),
      tau: this.pose.tau,
    };
  }

  auditLog(): AuditEntry[] {
    return this.audit.map((e) => ({ ...e }));
  }

  /** Renders of a superseded request; must always be zero. */
  auditViolations(): number {
    let violations = 0;
    for (let i = 0; i < this.audit.length; i++) {
      const e = this.audit[i];
      if (e.outcome !== "rendered") continue;
      for (const later of this.audit) {
        if (later.requestId > e.requestId && e.resolvedAt !== null &&
            later.issuedAt < e.resolvedAt) {
          violations++;
          break;
        }
      }
    }
    return violations;
  }

  selectModel(model: CatalogModel): void {
    this.model = model;
    this.pose = {
      anchor: model.axes.map(() => 0).map((_, k) => {
        const [lo, hi] = model.bounds[model.axes[k]];
        return clamp(0, lo, hi);
      }),
      angles: [],
      tau: model.extruded && model.time_extent ? model.time_extent[0] : null,
    };
    this.schedule();
  }

  /** Slider drag on one anchor axis; the value clamps to catalog bounds. */
  setAnchorOffset(axisIndex: number, value: number): void {
    if (!this.model) return;
    const [lo, hi] = this.model.bounds[this.model.axes[axisIndex]];
    this.pose.anchor[axisIndex] = clamp(value, lo, hi);
    this.schedule();
  }

  setAngles(angles: [number, number, number][]): void {
    this.pose.angles = angles.map((a) => [...a] as [number, number, number]);
    this.schedule();
  }

  setTau(value: number): void {
    if (!this.model?.extruded || !this.model.time_extent) return;
    const [lo, hi] = this.model.time_extent;
    this.pose.tau = clamp(value, lo, hi);
    this.schedule();
  }

  setDiagnostics(on: boolean): void {
    this.diagnostics = on;
    this.schedule();
  }

  // -- request pipeline -------------------------------------------------------

  private schedule(): void {
    if (!this.model) return;
    if (this.timer !== null) this.clearT(this.timer);
    this.timer = this.setT(() => {
      this.timer = null;
      this.fire();
    }, this.debounceMs);
  }

  private fire(): void {
    if (!this.model) return;
    if (this.inFlight) {
      this.dirty = true; // latest-wins: reissue as soon as the slot frees
      return;
    }
    const id = this.nextId++;
    this.latestIssuedId = id;
    const entry: AuditEntry = {
      requestId: id,
      issuedAt: this.now(),
      resolvedAt: null,
      outcome: "pending",
    };
    this.audit.push(entry);
    this.inFlight = true;
    this.cb.onRequestStateChange?.(true);
    const model = this.model;
    postSlice(this.base, {
      model_id: model.id,
      pose: { anchor: [...this.pose.anchor], angles: this.pose.angles },
      tau: this.pose.tau,
      diagnostics: this.diagnostics,
      request_id: id,
    }, this.fetchImpl).then(
      (payload) => this.settle(entry, payload, null),
      (err) => this.settle(entry, null, err),
    );
  }

  private settle(
    entry: AuditEntry,
    payload: SlicePayload | null,
    err: unknown,
  ): void {
    entry.resolvedAt = this.now();
    this.inFlight = false;
    this.cb.onRequestStateChange?.(false);
    if (payload !== null) {
      const id = Number(payload.request_id);
      if (id !== this.latestIssuedId || this.dirty) {
        entry.outcome = "stale"; // superseded: never rendered
      } else {
        entry.outcome = "rendered";
        this.cb.onPayload?.(payload);
      }
    } else {
      entry.outcome = "error";
      if (err instanceof ServiceRequestError) {
        this.cb.onError?.(err.code, err.message);
      } else {
        this.cb.onError?.("ConnectionError", String(err));
      }
    }
    if (this.dirty) {
      this.dirty = false;
      this.fire();
    }
  }
}
