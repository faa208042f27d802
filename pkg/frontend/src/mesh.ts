// Mesh payload -> typed-array geometry, independent of the renderer so it
// can be unit tested. scene.ts wraps the result in three.js buffers.

import type { MeshPayload } from "./types.js";

export interface FlatGeometry {
  kind: "flat";
  positions: Float32Array; // de-indexed, 9 floats per triangle
  normals: Float32Array;   // per-corner copy of the triangle normal
  colors: Float32Array;    // per-corner copy of the triangle color (rgb)
}

export interface SmoothGeometry {
  kind: "smooth";
  positions: Float32Array; // indexed
  normals: Float32Array;   // per-vertex, averaged from triangle normals
  colors: Float32Array;    // per-vertex rgb
  index: Uint32Array;
}

export interface WireGeometry {
  kind: "wireframe";
  positions: Float32Array; // 2 endpoints per distinct undirected edge
}

export function toFlatGeometry(mesh: MeshPayload): FlatGeometry {
  const nt = mesh.triangles.length;
  const positions = new Float32Array(nt * 9);
  const normals = new Float32Array(nt * 9);
  const colors = new Float32Array(nt * 9);
  for (let t = 0; t < nt; t++) {
    const [r, g, b] = mesh.colors[t];
    const n = mesh.normals[t];
    for (let k = 0; k < 3; k++) {
      const p = mesh.points[mesh.triangles[t][k]];
      const o = t * 9 + k * 3;
      positions[o] = p[0];
      positions[o + 1] = p[1];
      positions[o + 2] = p[2];
      normals[o] = n[0];
      normals[o + 1] = n[1];
      normals[o + 2] = n[2];
      colors[o] = r;
      colors[o + 1] = g;
      colors[o + 2] = b;
    }
  }
  return { kind: "flat", positions, normals, colors };
}

export function toSmoothGeometry(mesh: MeshPayload): SmoothGeometry {
  const nv = mesh.points.length;
  const positions = new Float32Array(nv * 3);
  for (let v = 0; v < nv; v++) {
    positions[v * 3] = mesh.points[v][0];
    positions[v * 3 + 1] = mesh.points[v][1];
    positions[v * 3 + 2] = mesh.points[v][2];
  }
  const index = new Uint32Array(mesh.triangles.length * 3);
  const normals = new Float32Array(nv * 3);
  const colors = new Float32Array(nv * 3);
  const hits = new Uint32Array(nv);
  for (let t = 0; t < mesh.triangles.length; t++) {
    const n = mesh.normals[t];
    const c = mesh.colors[t];
    for (let k = 0; k < 3; k++) {
      const v = mesh.triangles[t][k];
      index[t * 3 + k] = v;
      normals[v * 3] += n[0];
      normals[v * 3 + 1] += n[1];
      normals[v * 3 + 2] += n[2];
      colors[v * 3] += c[0];
      colors[v * 3 + 1] += c[1];
      colors[v * 3 + 2] += c[2];
      hits[v]++;
    }
  }
  for (let v = 0; v < nv; v++) {
    const ln = Math.hypot(normals[v * 3], normals[v * 3 + 1], normals[v * 3 + 2]);
    if (ln > 1e-12) {
      normals[v * 3] /= ln;
      normals[v * 3 + 1] /= ln;
      normals[v * 3 + 2] /= ln;
    }
    if (hits[v] > 0) {
      colors[v * 3] /= hits[v];
      colors[v * 3 + 1] /= hits[v];
      colors[v * 3 + 2] /= hits[v];
    }
  }
  return { kind: "smooth", positions, normals, colors, index };
}

export function toWireGeometry(mesh: MeshPayload): WireGeometry {
  const seen = new Set<number>();
  const nv = mesh.points.length;
  const segs: number[] = [];
  for (const tri of mesh.triangles) {
    for (let k = 0; k < 3; k++) {
      let a = tri[k];
      let b = tri[(k + 1) % 3];
      if (a > b) [a, b] = [b, a];
      const key = a * nv + b;
      if (seen.has(key)) continue;
      seen.add(key);
      segs.push(...mesh.points[a], ...mesh.points[b]);
    }
  }
  return { kind: "wireframe", positions: new Float32Array(segs) };
}

/** Axis-aligned bounds of the payload points (camera framing). */
export function payloadBounds(mesh: MeshPayload): { center: number[]; radius: number } {
  if (!mesh.points.length) return { center: [0, 0, 0], radius: 1 };
  const lo = [Infinity, Infinity, Infinity];
  const hi = [-Infinity, -Infinity, -Infinity];
  for (const p of mesh.points) {
    for (let k = 0; k < 3; k++) {
      lo[k] = Math.min(lo[k], p[k]);
      hi[k] = Math.max(hi[k], p[k]);
    }
  }
  const center = [0, 1, 2].map((k) => (lo[k] + hi[k]) / 2);
  const radius = Math.max(1e-6, Math.hypot(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]) / 2);
  return { center, radius };
}
