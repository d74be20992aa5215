/** Orthographic SVG wireframe rendering of posed boxes.
 *
 * Pure string construction: the renderer projects world points through an
 * orbit camera (azimuth/elevation/zoom) and emits box edges as SVG lines,
 * farthest boxes first. No DOM or WebGL involvement, so it runs anywhere.
 */

import type { SceneBox } from "./scene.js";
import type { Vec3 } from "./types.js";

export interface OrbitParams {
  /** Rotation about the world z axis, radians. */
  azimuth: number;
  /** Tilt toward the world z axis, radians. */
  elevation: number;
  /** World units per viewport (smaller = closer). */
  zoom: number;
}

export const DEFAULT_ORBIT: OrbitParams = {
  azimuth: Math.PI / 6,
  elevation: Math.PI / 8,
  zoom: 3.0,
};

/** Box corner pairs forming the 12 edges (corner layout from posedCorners). */
const EDGES: ReadonlyArray<readonly [number, number]> = [
  [0, 1], [2, 3], [4, 5], [6, 7],
  [0, 2], [1, 3], [4, 6], [5, 7],
  [0, 4], [1, 5], [2, 6], [3, 7],
];

export interface Projected {
  x: number;
  y: number;
  depth: number;
}

export function project(p: Vec3, orbit: OrbitParams, size: number): Projected {
  const ca = Math.cos(orbit.azimuth);
  const sa = Math.sin(orbit.azimuth);
  const ce = Math.cos(orbit.elevation);
  const se = Math.sin(orbit.elevation);
  // orbit: rotate about z, then tilt; view axes are (right, up, toward camera)
  const rx = ca * p[0] + sa * p[1];
  const ry = -sa * p[0] + ca * p[1];
  const up = ce * p[2] - se * ry;
  const depth = se * p[2] + ce * ry;
  const scale = size / orbit.zoom;
  return {
    x: size / 2 + rx * scale,
    y: size / 2 - up * scale,
    depth,
  };
}

function fmt(v: number): string {
  return Number(v.toFixed(2)).toString();
}

export function renderSvg(boxes: SceneBox[], orbit: OrbitParams, size = 480): string {
  const ordered = boxes
    .map((box) => {
      const corners = box.corners.map((c) => project(c, orbit, size));
      const depth = corners.reduce((s, c) => s + c.depth, 0) / corners.length;
      return { box, corners, depth };
    })
    .sort((a, b) => a.depth - b.depth);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${size} ${size}" ` +
      `width="${size}" height="${size}">`,
  ];
  for (const { box, corners } of ordered) {
    const lines = EDGES.map(([a, b]) => {
      const p = corners[a]!;
      const q = corners[b]!;
      return (
        `<line x1="${fmt(p.x)}" y1="${fmt(p.y)}" x2="${fmt(q.x)}" ` +
        `y2="${fmt(q.y)}"/>`
      );
    }).join("");
    parts.push(
      `<g data-part="${box.id}" stroke="${box.color}" stroke-width="2" ` +
        `fill="none">${lines}</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
