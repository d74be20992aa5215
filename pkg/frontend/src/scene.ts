/** Posed, colored boxes for rendering: one per part, at articulation q. */

import { matVec, addVec, posedCorners, poseParts, type Transform } from "./kinematics.js";
import { colorFor } from "./palette.js";
import type { LabelName, Mat3, ObjectWire, Vec3 } from "./types.js";

export interface SceneBox {
  id: number;
  label: LabelName;
  color: string;
  /** World-space box center after posing. */
  center: Vec3;
  /** Box orientation (the part pose's rotation). */
  rotation: Mat3;
  halfextent: Vec3;
  corners: Vec3[];
  pose: Transform;
}

export function buildScene(obj: ObjectWire, q: number): SceneBox[] {
  const poses = poseParts(obj, q);
  const boxes: SceneBox[] = [];
  const parts = [...obj.parts].sort((a, b) => a.id - b.id);
  for (const part of parts) {
    const pose = poses.get(part.id)!;
    boxes.push({
      id: part.id,
      label: part.label,
      color: colorFor(part.id),
      center: addVec(matVec(pose.rotation, part.bbox.center), pose.translation),
      rotation: pose.rotation,
      halfextent: part.bbox.halfextent,
      corners: posedCorners(part, pose),
      pose,
    });
  }
  return boxes;
}
