/** Client-side graph validation, mirroring the service's acceptance rules.
 *
 * The service parses a graph payload leniently (integral numbers, integer
 * strings, and booleans all coerce to node ids), caps the node count,
 * requires known semantic labels case-insensitively, and then checks tree
 * structure: unique ids, resolvable parents, exactly one root, the root
 * labeled "base", and no cycles. The shared vector suite pins this module
 * to the server's verdicts, so edits here must keep both sides identical.
 */

import { LABELS, MAX_PARTS, type GraphNodeWire, type LabelName } from "./types.js";

export interface CleanNode {
  id: number;
  label: LabelName;
  parent: number | null;
}

export type GraphVerdict =
  | { ok: true; nodes: CleanNode[]; root: number }
  | { ok: false; reason: string };

const INT_STRING = /^[+-]?[0-9]+$/;

/** Lenient integer parse matching the service's wire coercion. */
export function asInt(value: unknown): number | null {
  if (typeof value === "boolean") return value ? 1 : 0;
  if (typeof value === "number") {
    return Number.isInteger(value) ? value : null;
  }
  if (typeof value === "string") {
    const trimmed = value.trim();
    if (!INT_STRING.test(trimmed)) return null;
    const parsed = Number(trimmed);
    return Number.isSafeInteger(parsed) ? parsed : null;
  }
  return null;
}

function reject(reason: string): GraphVerdict {
  return { ok: false, reason };
}

export function validateGraph(payload: unknown): GraphVerdict {
  if (typeof payload !== "object" || payload === null) {
    return reject("graph payload must be an object");
  }
  const rawNodes = (payload as { nodes?: unknown }).nodes;
  if (!Array.isArray(rawNodes)) {
    return reject("graph payload needs a nodes array");
  }

  const nodes: CleanNode[] = [];
  for (const [index, raw] of rawNodes.entries()) {
    if (typeof raw !== "object" || raw === null) {
      return reject(`node ${index} must be an object`);
    }
    const node = raw as Record<string, unknown>;
    const id = asInt(node.id);
    if (id === null) return reject(`node ${index}: id must be an integer`);
    if (id < 0) return reject(`node ${index}: id must be >= 0`);
    if (typeof node.label !== "string") {
      return reject(`node ${index}: label must be a string`);
    }
    let parent: number | null = null;
    if (node.parent !== undefined && node.parent !== null) {
      parent = asInt(node.parent);
      if (parent === null) {
        return reject(`node ${index}: parent must be an integer or null`);
      }
    }
    nodes.push({ id, label: node.label as LabelName, parent });
  }

  if (nodes.length > MAX_PARTS) {
    return reject(`graph has ${nodes.length} nodes; the cap is ${MAX_PARTS}`);
  }
  for (const node of nodes) {
    const lowered = node.label.toLowerCase();
    if (!(LABELS as readonly string[]).includes(lowered)) {
      return reject(`unknown semantic label ${JSON.stringify(node.label)}`);
    }
    node.label = lowered as LabelName;
  }

  return validateStructure(nodes);
}

/** Tree-structure rules on already-typed nodes (same order as the server). */
export function validateStructure(nodes: readonly GraphNodeWire[]): GraphVerdict {
  const ids = nodes.map((n) => n.id);
  const idSet = new Set(ids);
  if (idSet.size !== ids.length) {
    return reject(`duplicate node ids in graph: ${[...ids].sort((a, b) => a - b)}`);
  }

  const parentOf = new Map<number, number>();
  for (const node of nodes) {
    if (node.parent !== null) parentOf.set(node.id, node.parent);
  }
  for (const [child, parent] of parentOf) {
    if (!idSet.has(parent)) {
      return reject(`node ${child} references unknown parent ${parent}`);
    }
  }

  const roots = ids.filter((id) => !parentOf.has(id));
  if (roots.length > 1) {
    return reject(`graph has ${roots.length} roots: ${[...roots].sort((a, b) => a - b)}`);
  }
  if (roots.length === 0) {
    return reject("every node has a parent; the graph contains a cycle");
  }
  const root = roots[0]!;
  const labelOf = new Map(nodes.map((n) => [n.id, n.label] as const));
  if (labelOf.get(root) !== "base") {
    return reject(`root node ${root} is labeled ${JSON.stringify(labelOf.get(root))}`);
  }

  for (const start of ids) {
    const seen = new Set<number>();
    let node = start;
    while (parentOf.has(node)) {
      if (seen.has(node)) return reject(`cycle reachable from node ${start}`);
      seen.add(node);
      node = parentOf.get(node)!;
    }
    if (node !== root) return reject(`node ${start} does not reach the root`);
  }

  const clean = nodes.map((n) => ({
    id: n.id,
    label: n.label as LabelName,
    parent: n.parent,
  }));
  return { ok: true, nodes: clean, root };
}
