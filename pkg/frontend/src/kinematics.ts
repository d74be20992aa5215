/** Forward kinematics over the wire representation of an object.
 *
 * Poses follow the same composition rule as the service: the root part sits
 * at the identity, every other part at pose(parent) ∘ joint(part, q), where
 * the joint's displacement at normalized coordinate q in [0, 1] is
 * d = lo + q * (hi − lo). Fixed joints (and any joint at d = 0) contribute
 * the identity; prismatic joints translate d along the axis; revolute,
 * continuous, and screw joints rotate d radians about the axis line, the
 * screw adding a translation of d * pitch along it. The shared pose vectors
 * pin this module to the reference implementation.
 */

import type { JointWire, Mat3, ObjectWire, PartWire, Vec3 } from "./types.js";

export interface Transform {
  rotation: Mat3;
  translation: Vec3;
}

export const IDENTITY: Transform = {
  rotation: [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
  ],
  translation: [0, 0, 0],
};

export function matVec(m: Mat3, v: Vec3): Vec3 {
  return [
    m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
    m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
    m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
  ];
}

export function matMul(a: Mat3, b: Mat3): Mat3 {
  const out: number[][] = [[0, 0, 0], [0, 0, 0], [0, 0, 0]];
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      out[i]![j] = a[i]![0]! * b[0][j]! + a[i]![1]! * b[1][j]! + a[i]![2]! * b[2][j]!;
    }
  }
  return out as Mat3;
}

export function addVec(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function scaleVec(v: Vec3, s: number): Vec3 {
  return [s * v[0], s * v[1], s * v[2]];
}

/** Rodrigues rotation about a unit axis: I + sinθ·K + (1−cosθ)·K². */
export function axisRotation(u: Vec3, angle: number): Mat3 {
  const k: Mat3 = [
    [0, -u[2], u[1]],
    [u[2], 0, -u[0]],
    [-u[1], u[0], 0],
  ];
  const kk = matMul(k, k);
  const s = Math.sin(angle);
  const c = 1.0 - Math.cos(angle);
  const out: number[][] = [[0, 0, 0], [0, 0, 0], [0, 0, 0]];
  for (let i = 0; i < 3; i++) {
    for (let j = 0; j < 3; j++) {
      out[i]![j] = (i === j ? 1 : 0) + s * k[i]![j]! + c * kk[i]![j]!;
    }
  }
  return out as Mat3;
}

/** a ∘ b: apply b first, then a. */
export function compose(a: Transform, b: Transform): Transform {
  return {
    rotation: matMul(a.rotation, b.rotation),
    translation: addVec(matVec(a.rotation, b.translation), a.translation),
  };
}

export function displacement(joint: JointWire, q: number): number {
  const [lo, hi] = joint.range;
  return lo + q * (hi - lo);
}

export function jointTransform(joint: JointWire, q: number): Transform {
  if (!(q >= 0 && q <= 1)) {
    throw new RangeError(`q = ${q} outside [0, 1]`);
  }
  const d = displacement(joint, q);
  if (joint.type === "fixed" || d === 0) return IDENTITY;
  const u = joint.direction;
  if (joint.type === "prismatic") {
    return { rotation: IDENTITY.rotation, translation: scaleVec(u, d) };
  }
  const r = axisRotation(u, d);
  const o = joint.origin;
  let t = addVec(o, scaleVec(matVec(r, o), -1));
  if (joint.type === "screw") {
    t = addVec(t, scaleVec(u, d * (joint.pitch ?? 0)));
  }
  return { rotation: r, translation: t };
}

/** World pose per part id with every joint at the same q. */
export function poseParts(obj: ObjectWire, q: number): Map<number, Transform> {
  const poses = new Map<number, Transform>();
  const roots = obj.parts.filter((p) => p.parent === null);
  if (roots.length !== 1) {
    throw new Error(`object needs exactly one root part, got ${roots.length}`);
  }
  poses.set(roots[0]!.id, IDENTITY);
  let pending = obj.parts.filter((p) => p.parent !== null);
  while (pending.length > 0) {
    const remaining: PartWire[] = [];
    let progressed = false;
    for (const part of pending) {
      const parentPose = poses.get(part.parent!);
      if (parentPose === undefined) {
        remaining.push(part);
        continue;
      }
      poses.set(part.id, compose(parentPose, jointTransform(part.joint, q)));
      progressed = true;
    }
    if (!progressed) {
      throw new Error("parts do not form a tree reaching the root");
    }
    pending = remaining;
  }
  return poses;
}

/** The eight corners of a part's bounding box under a world transform. */
export function posedCorners(part: PartWire, tf: Transform): Vec3[] {
  const { center: c, halfextent: h } = part.bbox;
  const corners: Vec3[] = [];
  for (const sx of [-1, 1]) {
    for (const sy of [-1, 1]) {
      for (const sz of [-1, 1]) {
        const local: Vec3 = [c[0] + sx * h[0], c[1] + sy * h[1], c[2] + sz * h[2]];
        corners.push(addVec(matVec(tf.rotation, local), tf.translation));
      }
    }
  }
  return corners;
}
