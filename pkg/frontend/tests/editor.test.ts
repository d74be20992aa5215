/** Graph-edit actions: structure changes, inline rejection, round-trips. */

import { describe, expect, it } from "vitest";

import {
  addNode,
  clearPin,
  deleteSubtree,
  emptyState,
  exportState,
  importState,
  relabel,
  reparent,
  select,
  setPin,
  stateFromGraph,
  toGraphWire,
  validateState,
  type GraphEditState,
} from "../src/editor.js";

function cabinetState(): GraphEditState {
  // base(0) -> door(1) -> handle(2); base(0) -> drawer(3)
  return stateFromGraph({
    nodes: [
      { id: 0, label: "base", parent: null },
      { id: 1, label: "door", parent: 0 },
      { id: 2, label: "handle", parent: 1 },
      { id: 3, label: "drawer", parent: 0 },
    ],
  });
}

describe("add node", () => {
  it("adds a child under the requested parent and selects it", () => {
    const result = addNode(cabinetState(), "handle", 1);
    expect(result.ok).toBe(true);
    expect(result.state.nodes.length).toBe(5);
    expect(result.state.parentOf.get(4)).toBe(1);
    expect(result.state.selection).toBe(4);
    expect(result.state.dirty).toBe(true);
  });

  it("rejects a missing parent without changing state", () => {
    const before = cabinetState();
    const result = addNode(before, "knob", 99);
    expect(result.ok).toBe(false);
    expect(result.state).toBe(before);
  });
});

describe("delete subtree", () => {
  it("removes the node's whole subtree", () => {
    const result = deleteSubtree(cabinetState(), 1);
    expect(result.ok).toBe(true);
    const ids = result.state.nodes.map((n) => n.id);
    expect(ids).toEqual([0, 3]); // the door's handle went with it
  });

  it("drops pins and selection belonging to removed nodes", () => {
    let state = select(cabinetState(), 2);
    const pinned = setPin(state, 2, 0, [0, 0, 0, 0.1, 0.1, 0.1]);
    expect(pinned.ok).toBe(true);
    state = pinned.state;
    const result = deleteSubtree(state, 1);
    expect(result.ok).toBe(true);
    expect(result.state.pins).toEqual([]);
    expect(result.state.selection).toBeNull();
  });

  it("refuses to delete the root", () => {
    const result = deleteSubtree(cabinetState(), 0);
    expect(result.ok).toBe(false);
    expect(result.ok ? "" : result.error).toMatch(/root/);
  });
});

describe("re-parent", () => {
  it("moves a node under a new parent", () => {
    const result = reparent(cabinetState(), 2, 3);
    expect(result.ok).toBe(true);
    expect(result.state.parentOf.get(2)).toBe(3);
    expect(validateState(result.state).ok).toBe(true);
  });

  it("rejects a re-parent that would create a cycle", () => {
    const result = reparent(cabinetState(), 1, 2);
    expect(result.ok).toBe(false);
    expect(result.ok ? "" : result.error).toMatch(/cycle/);
    expect(result.state.parentOf.get(1)).toBe(0);
  });

  it("rejects self-parenting and moving the root", () => {
    expect(reparent(cabinetState(), 1, 1).ok).toBe(false);
    expect(reparent(cabinetState(), 0, 1).ok).toBe(false);
  });
});

describe("relabel", () => {
  it("changes a label in place", () => {
    const result = relabel(cabinetState(), 3, "tray");
    expect(result.ok).toBe(true);
    expect(result.state.nodes.find((n) => n.id === 3)!.label).toBe("tray");
  });

  it("a non-base root label is caught by validation before submission", () => {
    const result = relabel(cabinetState(), 0, "door");
    expect(result.ok).toBe(true); // the edit itself is allowed...
    const verdict = validateState(result.state);
    expect(verdict.ok).toBe(false); // ...but the state cannot be submitted
  });
});

describe("pins", () => {
  it("stores one pin per (part, row), replacing duplicates", () => {
    let state = cabinetState();
    state = setPin(state, 3, 0, [1, 2, 3, 4, 5, 6]).state;
    state = setPin(state, 3, 0, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).state;
    expect(state.pins).toEqual([
      { part_id: 3, row: 0, values: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6] },
    ]);
    expect(clearPin(state, 3, 0).state.pins).toEqual([]);
  });

  it("rejects bad rows and non-finite values", () => {
    expect(setPin(cabinetState(), 3, 5, [1, 2, 3, 4, 5, 6]).ok).toBe(false);
    expect(setPin(cabinetState(), 3, 0, [1, 2, 3]).ok).toBe(false);
    expect(setPin(cabinetState(), 3, 0, [1, 2, 3, 4, 5, NaN]).ok).toBe(false);
  });
});

describe("session round-trip", () => {
  it("export then import reproduces the state exactly", () => {
    let state = select(cabinetState(), 3);
    state = setPin(state, 3, 0, [0.1, -0.2, 0, 0.3, 0.4, 0.5]).state;
    state = relabel(state, 2, "knob").state;
    const imported = importState(exportState(state));
    expect("error" in imported).toBe(false);
    const roundTripped = imported as GraphEditState;
    expect(toGraphWire(roundTripped)).toEqual(toGraphWire(state));
    expect(roundTripped.pins).toEqual(state.pins);
    expect(roundTripped.selection).toBe(state.selection);
  });

  it("surfaces malformed imports as errors", () => {
    expect(importState("{nope")).toHaveProperty("error");
    expect(importState("{}")).toHaveProperty("error");
  });
});

describe("fresh state", () => {
  it("starts clean with a single base node", () => {
    const state = emptyState();
    expect(state.dirty).toBe(false);
    expect(validateState(state).ok).toBe(true);
    expect(toGraphWire(state).nodes).toEqual([
      { id: 0, label: "base", parent: null },
    ]);
  });
});
