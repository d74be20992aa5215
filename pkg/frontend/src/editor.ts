/** Graph-editing state and actions.
 *
 * All actions are pure: they return a new state (with `dirty` set) or the
 * unchanged input state plus an inline error message. Nothing here talks to
 * the service — invalid edits are surfaced immediately and can never be
 * submitted, because `toGraphWire` output is checked with the same
 * validation rules the server applies.
 */

import { validateStructure, type GraphVerdict } from "./validation.js";
import {
  LABELS,
  N_ATTRS,
  N_DIMS,
  type GraphNodeWire,
  type GraphWire,
  type LabelName,
  type ObjectWire,
  type PinWire,
} from "./types.js";

export interface EditNode {
  id: number;
  label: LabelName;
}

export interface GraphEditState {
  nodes: EditNode[];
  /** child id -> parent id; the root is absent. */
  parentOf: Map<number, number>;
  selection: number | null;
  pins: PinWire[];
  dirty: boolean;
}

export type EditResult =
  | { ok: true; state: GraphEditState }
  | { ok: false; state: GraphEditState; error: string };

function withChange(state: GraphEditState, change: Partial<GraphEditState>): EditResult {
  return { ok: true, state: { ...state, ...change, dirty: true } };
}

function fail(state: GraphEditState, error: string): EditResult {
  return { ok: false, state, error };
}

export function emptyState(): GraphEditState {
  return {
    nodes: [{ id: 0, label: "base" }],
    parentOf: new Map(),
    selection: null,
    pins: [],
    dirty: false,
  };
}

export function stateFromGraph(graph: GraphWire): GraphEditState {
  return {
    nodes: graph.nodes.map((n) => ({ id: n.id, label: n.label as LabelName })),
    parentOf: new Map(
      graph.nodes.filter((n) => n.parent !== null).map((n) => [n.id, n.parent!]),
    ),
    selection: null,
    pins: [],
    dirty: false,
  };
}

export function stateFromObject(obj: ObjectWire): GraphEditState {
  return stateFromGraph({
    nodes: obj.parts.map((p) => ({ id: p.id, label: p.label, parent: p.parent })),
  });
}

export function toGraphWire(state: GraphEditState): GraphWire {
  const nodes: GraphNodeWire[] = [...state.nodes]
    .sort((a, b) => a.id - b.id)
    .map((n) => ({ id: n.id, label: n.label, parent: state.parentOf.get(n.id) ?? null }));
  return { nodes };
}

/** Same verdict the server would give the current graph. */
export function validateState(state: GraphEditState): GraphVerdict {
  return validateStructure(toGraphWire(state).nodes);
}

export function subtreeIds(state: GraphEditState, rootId: number): Set<number> {
  const children = new Map<number, number[]>();
  for (const [child, parent] of state.parentOf) {
    const list = children.get(parent) ?? [];
    list.push(child);
    children.set(parent, list);
  }
  const out = new Set<number>();
  const stack = [rootId];
  while (stack.length > 0) {
    const id = stack.pop()!;
    if (out.has(id)) continue;
    out.add(id);
    stack.push(...(children.get(id) ?? []));
  }
  return out;
}

function hasNode(state: GraphEditState, id: number): boolean {
  return state.nodes.some((n) => n.id === id);
}

export function addNode(
  state: GraphEditState,
  label: LabelName,
  parentId: number,
): EditResult {
  if (!(LABELS as readonly string[]).includes(label)) {
    return fail(state, `unknown label ${JSON.stringify(label)}`);
  }
  if (!hasNode(state, parentId)) {
    return fail(state, `parent ${parentId} does not exist`);
  }
  const id = state.nodes.reduce((m, n) => Math.max(m, n.id), -1) + 1;
  const parentOf = new Map(state.parentOf);
  parentOf.set(id, parentId);
  return withChange(state, {
    nodes: [...state.nodes, { id, label }],
    parentOf,
    selection: id,
  });
}

export function deleteSubtree(state: GraphEditState, id: number): EditResult {
  if (!hasNode(state, id)) return fail(state, `node ${id} does not exist`);
  if (!state.parentOf.has(id)) {
    return fail(state, "cannot delete the root");
  }
  const removed = subtreeIds(state, id);
  const parentOf = new Map(
    [...state.parentOf].filter(([child]) => !removed.has(child)),
  );
  return withChange(state, {
    nodes: state.nodes.filter((n) => !removed.has(n.id)),
    parentOf,
    pins: state.pins.filter((p) => !removed.has(p.part_id)),
    selection:
      state.selection !== null && removed.has(state.selection) ? null : state.selection,
  });
}

export function relabel(state: GraphEditState, id: number, label: LabelName): EditResult {
  if (!hasNode(state, id)) return fail(state, `node ${id} does not exist`);
  if (!(LABELS as readonly string[]).includes(label)) {
    return fail(state, `unknown label ${JSON.stringify(label)}`);
  }
  return withChange(state, {
    nodes: state.nodes.map((n) => (n.id === id ? { ...n, label } : n)),
  });
}

export function reparent(state: GraphEditState, id: number, newParent: number): EditResult {
  if (!hasNode(state, id)) return fail(state, `node ${id} does not exist`);
  if (!hasNode(state, newParent)) {
    return fail(state, `parent ${newParent} does not exist`);
  }
  if (!state.parentOf.has(id)) {
    return fail(state, "cannot re-parent the root");
  }
  if (subtreeIds(state, id).has(newParent)) {
    return fail(state, `re-parenting ${id} under ${newParent} would create a cycle`);
  }
  const parentOf = new Map(state.parentOf);
  parentOf.set(id, newParent);
  return withChange(state, { parentOf });
}

export function select(state: GraphEditState, id: number | null): GraphEditState {
  if (id !== null && !hasNode(state, id)) return state;
  return { ...state, selection: id };
}

export function setPin(
  state: GraphEditState,
  partId: number,
  row: number,
  values: number[],
): EditResult {
  if (!hasNode(state, partId)) return fail(state, `node ${partId} does not exist`);
  if (!Number.isInteger(row) || row < 0 || row >= N_ATTRS) {
    return fail(state, `row must be an integer in [0, ${N_ATTRS})`);
  }
  if (values.length !== N_DIMS || values.some((v) => !Number.isFinite(v))) {
    return fail(state, `pin needs ${N_DIMS} finite values`);
  }
  const pins = state.pins.filter((p) => !(p.part_id === partId && p.row === row));
  pins.push({ part_id: partId, row, values: [...values] });
  return withChange(state, { pins });
}

export function clearPin(state: GraphEditState, partId: number, row: number): EditResult {
  const pins = state.pins.filter((p) => !(p.part_id === partId && p.row === row));
  if (pins.length === state.pins.length) {
    return fail(state, `no pin on part ${partId} row ${row}`);
  }
  return withChange(state, { pins });
}

/** Serialized form for saving an editing session; see `importState`. */
export function exportState(state: GraphEditState): string {
  return JSON.stringify({
    graph: toGraphWire(state),
    pins: state.pins,
    selection: state.selection,
  });
}

export function importState(text: string): GraphEditState | { error: string } {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (e) {
    return { error: `not valid JSON: ${(e as Error).message}` };
  }
  const body = parsed as {
    graph?: GraphWire;
    pins?: PinWire[];
    selection?: number | null;
  };
  if (!body.graph) return { error: "missing graph" };
  const state = stateFromGraph(body.graph);
  return {
    ...state,
    pins: (body.pins ?? []).map((p) => ({ ...p, values: [...p.values] })),
    selection: body.selection ?? null,
  };
}
