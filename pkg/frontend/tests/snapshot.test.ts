/** Contract test against a recorded service session (demo 4R fixture).
 *
 * The recording was produced by driving the real Python service through the
 * studio workflow: create session from the demo curve, fetch geometry, apply
 * the reference connection points, run a collision check (clean), then edit
 * once more (stale).  The UI must display service payloads verbatim, so the
 * store's state after replaying the same flow must equal the recording
 * bit-for-bit.
 */
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import type { GeometryPayload, SessionStatus, StudioApi } from "../src/api";
import { createScene, updateScene } from "../src/scene";
import { StudioStore } from "../src/state";

const rec = JSON.parse(
  readFileSync(join(__dirname, "fixtures", "session.json"), "utf-8"),
);

function recordedApi(): Partial<StudioApi> {
  let patchCount = 0;
  return {
    status: async () => rec.status0 as SessionStatus,
    geometry: async (_id: string, angle: number) => {
      const key =
        Math.abs(angle - Math.PI) < 1e-12
          ? patchCount >= 4
            ? "geometry_designed"
            : "geometry_pi"
          : "geometry_212";
      return rec[key] as GeometryPayload;
    },
    patchConnectionPoints: async (_id, joint, cp0, cp1, version) => {
      const expected = rec.patches[patchCount]?.request;
      if (expected) {
        expect(joint).toBe(expected.joint);
        expect(cp0).toBeCloseTo(expected.cp0, 12);
        expect(cp1).toBeCloseTo(expected.cp1, 12);
        const out = rec.patches[patchCount].response;
        patchCount += 1;
        return out;
      }
      patchCount += 1;
      return rec.stale_patch;
    },
    startCollisionCheck: async () => ({ job: rec.job_started.job }),
    jobStatus: async () => rec.job_done,
  };
}

describe("recorded 4R session", () => {
  it("renders four axes, four pins, and four links from the geometry payload", () => {
    const handles = createScene();
    updateScene(handles, rec.geometry_pi as GeometryPayload);
    const axisPos = handles.axes.geometry.getAttribute("position");
    const pinPos = handles.pins.geometry.getAttribute("position");
    const linkPos = handles.links.geometry.getAttribute("position");
    expect(axisPos.count).toBe(8); // 4 axes x 2 endpoints
    expect(pinPos.count).toBe(8); // 4 joint segments
    expect(linkPos.count / 2).toBe((rec.geometry_pi as GeometryPayload).links
      .map((poly: number[][]) => poly.length - 1)
      .reduce((a: number, b: number) => a + b, 0));
    // pins are drawn at the service-provided endpoints (float32 GPU buffer)
    const seg0 = (rec.geometry_pi as GeometryPayload).joints[0].segment;
    [pinPos.getX(0), pinPos.getY(0), pinPos.getZ(0)].forEach((v, k) =>
      expect(v).toBeCloseTo(seg0[0][k], 6),
    );
    [pinPos.getX(1), pinPos.getY(1), pinPos.getZ(1)].forEach((v, k) =>
      expect(v).toBeCloseTo(seg0[1][k], 6),
    );
  });

  it("stores geometry payloads bit-for-bit", async () => {
    const store = new StudioStore(recordedApi() as StudioApi);
    store.adoptSession(rec.status0.id, rec.status0.version);
    await store.fetchGeometryNow(Math.PI);
    expect(store.state.geometry).toEqual(rec.geometry_pi);
    await store.fetchGeometryNow(2.12);
    expect(store.state.geometry).toEqual(rec.geometry_212);
  });

  it("replays the design flow: apply reference cps, clean badge, stale on edit", async () => {
    const store = new StudioStore(recordedApi() as StudioApi);
    store.adoptSession(rec.status0.id, rec.status0.version);

    for (const patch of rec.patches) {
      await store.onConnectionPointEdit(
        patch.request.joint,
        patch.request.cp0,
        patch.request.cp1,
      );
    }
    expect(store.state.version).toBe(rec.patches.length);
    expect(store.state.geometry).toEqual(rec.geometry_designed);

    await store.onCollisionCheck((fn) => fn());
    expect(rec.job_done.report).toEqual([]); // the reference design is clean
    expect(store.state.badge).toBe("clean");
    expect(rec.status_clean.collision.state).toBe("clean");

    // any further connection-point edit must flip the badge to stale
    await store.onConnectionPointEdit(0, rec.patches[0].request.cp0 - 0.01, rec.patches[0].request.cp1);
    expect(store.state.badge).toBe("stale");
    expect(rec.status_stale.collision.state).toBe("stale");
  });
});
