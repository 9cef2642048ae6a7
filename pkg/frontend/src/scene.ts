/** Three.js scene construction from service geometry payloads.
 *
 * Solid lines for joint axes, thick segments for the pins, dash-dot style
 * polylines for the designed links, an RGB triad for the tool frame, the
 * traced full-cycle tool path, and spheres marking collision points.
 * Everything drawn comes verbatim from service payloads.
 */
import * as THREE from "three";

import type { CollisionEventPayload, GeometryPayload } from "./api";

const AXIS_HALF_LENGTH = 0.6;

export interface SceneHandles {
  root: THREE.Group;
  axes: THREE.LineSegments;
  pins: THREE.LineSegments;
  links: THREE.LineSegments;
  tool: THREE.Group;
  path: THREE.Line;
  markers: THREE.Group;
}

function lineSegments(color: number, dashed = false, linewidth = 1): THREE.LineSegments {
  const geom = new THREE.BufferGeometry();
  const mat = dashed
    ? new THREE.LineDashedMaterial({ color, dashSize: 0.05, gapSize: 0.03, linewidth })
    : new THREE.LineBasicMaterial({ color, linewidth });
  return new THREE.LineSegments(geom, mat);
}

export function createScene(): SceneHandles {
  const root = new THREE.Group();
  const axes = lineSegments(0x222222);
  const pins = lineSegments(0x0a66c2, false, 3);
  const links = lineSegments(0xcc5500, true, 2);
  const path = new THREE.Line(
    new THREE.BufferGeometry(),
    new THREE.LineBasicMaterial({ color: 0x3377ff }),
  );
  const tool = new THREE.Group();
  const colors = [0xdd2222, 0x22aa22, 0x2222dd];
  for (let k = 0; k < 3; k++) {
    const triadLine = new THREE.Line(
      new THREE.BufferGeometry(),
      new THREE.LineBasicMaterial({ color: colors[k] }),
    );
    tool.add(triadLine);
  }
  const markers = new THREE.Group();
  root.add(axes, pins, links, path, tool, markers);
  return { root, axes, pins, links, tool, path, markers };
}

function setPositions(obj: THREE.LineSegments | THREE.Line, pts: number[][]): void {
  const flat = new Float32Array(pts.length * 3);
  pts.forEach((p, i) => flat.set(p, i * 3));
  obj.geometry.setAttribute("position", new THREE.BufferAttribute(flat, 3));
  obj.geometry.attributes.position.needsUpdate = true;
  obj.computeLineDistances();
}

/** Rotation matrix + translation of a displacement 8-vector (for the triad). */
export function poseFrame(tool8: number[]): { origin: number[]; basis: number[][] } {
  const [w, x, y, z, e0, ex, ey, ez] = tool8;
  const n = w * w + x * x + y * y + z * z;
  const R = [
    [(w * w + x * x - y * y - z * z) / n, (2 * (x * y - w * z)) / n, (2 * (x * z + w * y)) / n],
    [(2 * (x * y + w * z)) / n, (w * w - x * x + y * y - z * z) / n, (2 * (y * z - w * x)) / n],
    [(2 * (x * z - w * y)) / n, (2 * (y * z + w * x)) / n, (w * w - x * x - y * y + z * z) / n],
  ];
  const av = [x, y, z];
  const bv = [ex, ey, ez];
  const cross = [
    av[1] * bv[2] - av[2] * bv[1],
    av[2] * bv[0] - av[0] * bv[2],
    av[0] * bv[1] - av[1] * bv[0],
  ];
  const origin = [
    (2 * (e0 * av[0] - w * bv[0] - cross[0])) / n,
    (2 * (e0 * av[1] - w * bv[1] - cross[1])) / n,
    (2 * (e0 * av[2] - w * bv[2] - cross[2])) / n,
  ];
  return { origin, basis: [0, 1, 2].map((k) => [R[0][k], R[1][k], R[2][k]]) };
}

export function updateScene(handles: SceneHandles, geo: GeometryPayload): void {
  const axisPts: number[][] = [];
  const pinPts: number[][] = [];
  for (const joint of geo.joints) {
    const g = joint.axis.direction;
    const m = joint.axis.moment;
    const n2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
    const anchor = [
      (g[1] * m[2] - g[2] * m[1]) / n2,
      (g[2] * m[0] - g[0] * m[2]) / n2,
      (g[0] * m[1] - g[1] * m[0]) / n2,
    ];
    axisPts.push(
      anchor.map((c, k) => c - AXIS_HALF_LENGTH * g[k]),
      anchor.map((c, k) => c + AXIS_HALF_LENGTH * g[k]),
    );
    pinPts.push(joint.segment[0], joint.segment[1]);
  }
  setPositions(handles.axes, axisPts);
  setPositions(handles.pins, pinPts);

  const linkPts: number[][] = [];
  for (const poly of geo.links) {
    for (let i = 0; i + 1 < poly.length; i++) {
      linkPts.push(poly[i], poly[i + 1]);
    }
  }
  setPositions(handles.links, linkPts);

  const { origin, basis } = poseFrame(geo.tool);
  handles.tool.children.forEach((child, k) => {
    setPositions(child as THREE.Line, [origin, origin.map((c, j) => c + 0.25 * basis[k][j])]);
  });
}

export function updateToolPath(handles: SceneHandles, toolPoses: number[][]): void {
  const pts = toolPoses.map((p) => poseFrame(p).origin);
  if (pts.length > 0) pts.push(pts[0]);
  setPositions(handles.path, pts);
}

export function updateMarkers(handles: SceneHandles, events: CollisionEventPayload[]): void {
  handles.markers.clear();
  for (const ev of events) {
    const sphere = new THREE.Mesh(
      new THREE.SphereGeometry(0.02, 12, 12),
      new THREE.MeshBasicMaterial({ color: 0xff0000 }),
    );
    sphere.position.set(ev.point[0], ev.point[1], ev.point[2]);
    handles.markers.add(sphere);
  }
}
