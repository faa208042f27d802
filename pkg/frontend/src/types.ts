// Wire types of the hyperslice service (GET /models, POST /slice,
// POST /sweep, websocket /live).

export interface CatalogModel {
  id: string;
  name: string;
  axes: string[];
  tet_count: number;
  vertex_count: number;
  bounds: Record<string, [number, number]>;
  time_extent: [number, number] | null;
  extruded: boolean;
}

export interface MeshPayload {
  format: string;
  points: number[][];
  triangles: number[][];
  normals: number[][];
  colors: number[][];
  flags?: boolean[];
}

export interface ComponentTopology {
  vertices: number;
  edges: number;
  faces: number;
  euler: number;
  closed: boolean;
  genus: number | null;
}

export interface TopologyReport {
  vertices: number;
  edges: number;
  faces: number;
  euler: number;
  components: number;
  closed: boolean;
  non_manifold_edges: number;
  per_component: ComponentTopology[];
}

export interface SlicePayload {
  request_id: string | number | null;
  model_id: string;
  mesh: MeshPayload;
  topology: TopologyReport;
  diagnostics: {
    counts: Record<string, number>;
    out_of_extent: boolean;
  };
  timing_ms: number;
  frame?: number;
  offset?: number;
}

export interface ServiceError {
  error: { code: string; message: string };
  request_id: string | number | null;
}

export interface PoseWire {
  anchor: number[];
  angles: [number, number, number][];
}

export interface SliceRequestBody {
  model_id: string;
  pose?: PoseWire;
  cofactors?: number[];
  tau?: number | null;
  diagnostics?: boolean;
  request_id: string | number;
}

export interface SweepRequestBody {
  model_id: string;
  axis: string;
  start: number;
  stop: number;
  frames: number;
  tau?: number | null;
  request_id: string | number;
}

export type RenderMode = "smooth" | "flat" | "wireframe";
