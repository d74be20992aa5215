/** Viewer state: which sample is shown, at which articulation, from where. */

import { buildScene, type SceneBox } from "./scene.js";
import { DEFAULT_ORBIT, type OrbitParams } from "./render.js";
import type { ObjectWire } from "./types.js";

export interface ViewerState {
  objects: ObjectWire[];
  sampleIndex: number;
  /** Articulation slider position, 0 = resting, 1 = fully open. */
  q: number;
  orbit: OrbitParams;
}

export function emptyViewer(): ViewerState {
  return { objects: [], sampleIndex: 0, q: 0, orbit: { ...DEFAULT_ORBIT } };
}

export function loadObjects(state: ViewerState, objects: ObjectWire[]): ViewerState {
  return { ...state, objects: [...objects], sampleIndex: 0, q: 0 };
}

export function setSample(state: ViewerState, index: number): ViewerState {
  if (!Number.isInteger(index) || index < 0 || index >= state.objects.length) {
    return state;
  }
  return { ...state, sampleIndex: index };
}

export function setQ(state: ViewerState, q: number): ViewerState {
  if (!(q >= 0 && q <= 1)) return state;
  return { ...state, q };
}

export function setOrbit(state: ViewerState, orbit: Partial<OrbitParams>): ViewerState {
  return { ...state, orbit: { ...state.orbit, ...orbit } };
}

export function currentScene(state: ViewerState): SceneBox[] {
  const obj = state.objects[state.sampleIndex];
  return obj === undefined ? [] : buildScene(obj, state.q);
}
