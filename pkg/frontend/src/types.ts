/** Wire types for the service's JSON payloads and the studio's own state. */

export type Vec3 = [number, number, number];
/** Row-major 3x3 rotation matrix. */
export type Mat3 = [Vec3, Vec3, Vec3];

export const JOINT_TYPES = [
  "fixed",
  "revolute",
  "prismatic",
  "continuous",
  "screw",
] as const;
export type JointTypeName = (typeof JOINT_TYPES)[number];

export const LABELS = [
  "base",
  "door",
  "drawer",
  "handle",
  "knob",
  "tray",
] as const;
export type LabelName = (typeof LABELS)[number];

/** Parts per object are capped; the service rejects larger graphs. */
export const MAX_PARTS = 32;
/** Attribute rows per part (bbox, label, joint type, axis, range). */
export const N_ATTRS = 5;
/** Scalar slots per attribute row. */
export const N_DIMS = 6;

export interface JointWire {
  type: JointTypeName;
  origin: Vec3;
  direction: Vec3;
  range: [number, number];
  pitch?: number;
}

export interface BboxWire {
  center: Vec3;
  halfextent: Vec3;
}

export interface PartWire {
  id: number;
  label: LabelName;
  bbox: BboxWire;
  joint: JointWire;
  parent: number | null;
  mesh?: string;
}

export interface ObjectWire {
  id: string;
  category: string | null;
  parts: PartWire[];
}

/** Graph node as sent to the service; fields are raw until validated. */
export interface GraphNodeWire {
  id: number;
  label: string;
  parent: number | null;
}

export interface GraphWire {
  nodes: GraphNodeWire[];
}

export interface PinWire {
  part_id: number;
  row: number;
  values: number[];
}

export interface GenerateRequest {
  graph?: GraphWire;
  feature_file?: string;
  category?: string;
  omega?: number;
  num_samples?: number;
  seed?: number;
  pins?: PinWire[];
  assemble?: boolean;
  library?: string;
}

export interface GenerateResponse {
  objects: ObjectWire[];
  seeds: number[];
  export_ids: string[] | null;
}

export interface HealthResponse {
  status: string;
  checkpoint: string | null;
  library: string | null;
}

export interface PredictGraphRequest {
  predictor: "stub" | "vlm";
  feature_file?: string;
  image_ref?: string;
}

export interface PredictGraphResponse {
  graph: GraphWire;
  source: string;
  raw_response: string | null;
}

export interface EvaluateRequest {
  gen: string;
  gt: string;
  k_states?: number;
  n_points?: number;
  seed?: number;
  scale_normalize?: boolean;
}

export interface EvaluateResponse {
  gen: string;
  gt: string;
  rs_giou: number;
  as_giou: number;
  rs_cdist: number;
  as_cdist: number;
  rs_cd: number | null;
  as_cd: number | null;
  aor: number;
  graph_acc: number;
  k_states: number;
  n_points: number;
}

export interface RetrieveRequest {
  abstraction: ObjectWire;
  library?: string;
  k_states?: number;
  name?: string;
}

export interface ProvenanceWire {
  part_id: number;
  label: string;
  source_object: string;
  source_part: number | null;
}

export interface RetrieveResponse {
  asset_id: string;
  candidate_id: string;
  files: string[];
  provenance: ProvenanceWire[];
}
