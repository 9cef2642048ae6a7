/** Studio wiring: DOM controls <-> store <-> scene. */
import * as THREE from "three";

import { StudioApi } from "./api";
import { badgeLabels } from "./badge";
import { createScene, updateMarkers, updateScene, updateToolPath } from "./scene";
import { JOB_POLL_MS, StudioStore } from "./state";

const api = new StudioApi("");
const store = new StudioStore(api);

const canvas = document.getElementById("view") as HTMLCanvasElement;
const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
const scene3 = new THREE.Scene();
scene3.background = new THREE.Color(0xf7f7f4);
const camera = new THREE.PerspectiveCamera(40, 4 / 3, 0.01, 100);
camera.position.set(1.2, 1.0, 1.6);
camera.lookAt(0, 0, 0);
const handles = createScene();
scene3.add(handles.root);

function resize(): void {
  const w = canvas.clientWidth || 800;
  const h = canvas.clientHeight || 600;
  renderer.setSize(w, h, false);
  camera.aspect = w / h;
  camera.updateProjectionMatrix();
}
window.addEventListener("resize", resize);

const angleSlider = document.getElementById("angle") as HTMLInputElement;
const angleLabel = document.getElementById("angle-label") as HTMLSpanElement;
const playButton = document.getElementById("play") as HTMLButtonElement;
const badgeEl = document.getElementById("badge") as HTMLSpanElement;
const checkButton = document.getElementById("check") as HTMLButtonElement;
const jointPanel = document.getElementById("joints") as HTMLDivElement;
const saveName = document.getElementById("save-name") as HTMLInputElement;
const exportLink = document.getElementById("export") as HTMLAnchorElement;
const designButton = document.getElementById("design") as HTMLButtonElement;
const timeline = document.getElementById("timeline") as HTMLDivElement;

store.subscribe((s) => {
  badgeEl.textContent = badgeLabels[s.badge];
  badgeEl.className = `badge badge-${s.badge}`;
  if (s.geometry) {
    updateScene(handles, s.geometry);
    renderer.render(scene3, camera);
  }
  if (s.report) {
    updateMarkers(handles, s.report);
    timeline.textContent = s.report.length
      ? "collision angles: " + s.report.map((e) => e.angle.toFixed(3)).join(", ")
      : "no collision events";
  }
  angleLabel.textContent = `${s.driveAngle.toFixed(3)} rad`;
});

angleSlider.addEventListener("input", () => {
  store.onDriveSlider(parseFloat(angleSlider.value));
});

let playing = false;
playButton.addEventListener("click", () => {
  playing = !playing;
  playButton.textContent = playing ? "pause" : "play";
  const step = () => {
    if (!playing) return;
    let phi = parseFloat(angleSlider.value) + 0.02;
    if (phi >= 2 * Math.PI) phi -= 2 * Math.PI - 1e-6;
    angleSlider.value = phi.toFixed(4);
    store.onDriveSlider(phi);
    requestAnimationFrame(step);
  };
  requestAnimationFrame(step);
});

checkButton.addEventListener("click", () => {
  void store.onCollisionCheck((fn) => setTimeout(fn, JOB_POLL_MS));
});

function buildJointSliders(
  cps: { joint: number; cp0: number; cp1: number }[],
): void {
  jointPanel.innerHTML = "";
  for (const cp of cps) {
    const row = document.createElement("div");
    row.className = "joint-row";
    const label = document.createElement("span");
    label.textContent = `joint ${cp.joint}`;
    const lo = document.createElement("input");
    const hi = document.createElement("input");
    for (const [input, value] of [
      [lo, cp.cp0],
      [hi, cp.cp1],
    ] as const) {
      input.type = "range";
      input.min = "-0.8";
      input.max = "0.8";
      input.step = "0.001";
      input.value = String(value);
    }
    const commit = () => {
      void store.onConnectionPointEdit(cp.joint, parseFloat(lo.value), parseFloat(hi.value));
    };
    lo.addEventListener("change", commit);
    hi.addEventListener("change", commit);
    row.append(label, lo, hi);
    jointPanel.append(row);
  }
}

async function tracePath(sessionId: string): Promise<void> {
  const poses: number[][] = [];
  for (let k = 0; k < 72; k++) {
    const phi = (2 * Math.PI * (k + 0.5)) / 72;
    const geo = await api.geometry(sessionId, phi);
    poses.push(geo.tool);
  }
  updateToolPath(handles, poses);
}

designButton.addEventListener("click", async () => {
  if (!store.state.sessionId) return;
  const doc = await api.design(store.state.sessionId, 200.0);
  const rows = doc.rows
    .map((r) => `${r.i},${r.d},${r.a},${r.alpha},${r.cp0},${r.cp1}`)
    .join("\n");
  const blob = new Blob([`i,d,a,alpha,cp0,cp1\n${rows}\n`], { type: "text/csv" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "design.csv";
  a.click();
});

saveName.addEventListener("keydown", (ev) => {
  if (ev.key !== "Enter" || !store.state.sessionId) return;
  exportLink.href = api.exportUrl(store.state.sessionId);
  exportLink.download = saveName.value || "mechanism.rlmech";
  exportLink.click();
});

async function boot(): Promise<void> {
  resize();
  // a preloaded session is published as "default" by `ratlink serve FILE`
  try {
    const status = await api.status("default");
    store.adoptSession(status.id, status.version);
    buildJointSliders(status.connection_points);
    await store.fetchGeometryNow(store.state.driveAngle);
    await tracePath(status.id);
  } catch {
    badgeEl.textContent = "no preloaded mechanism — POST /sessions to begin";
  }
  renderer.render(scene3, camera);
}

void boot();
