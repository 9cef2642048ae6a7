/** View state and fetch scheduling for the studio.
 *
 * Geometry requests during slider drags are debounced (30 ms) and stale
 * in-flight responses are dropped; the final slider value is always fetched.
 * Every payload stored here is exactly what the service returned.
 */
import type { CollisionEventPayload, GeometryPayload, StudioApi } from "./api";
import { BadgeState, badgeTransition } from "./badge";

export interface ViewState {
  sessionId: string | null;
  version: number;
  driveAngle: number;
  selectedJoint: number;
  geometry: GeometryPayload | null;
  badge: BadgeState;
  report: CollisionEventPayload[] | null;
}

export const GEOMETRY_DEBOUNCE_MS = 30;
export const JOB_POLL_MS = 500;

type Scheduler = (fn: () => void, ms: number) => unknown;

export class StudioStore {
  state: ViewState = {
    sessionId: null,
    version: 0,
    driveAngle: Math.PI,
    selectedJoint: 0,
    geometry: null,
    badge: "none",
    report: null,
  };

  private listeners: Array<(s: ViewState) => void> = [];
  private debounceHandle: unknown = null;
  private fetchSeq = 0;
  private clearTimer: (h: unknown) => void;
  private setTimer: Scheduler;

  constructor(
    private api: StudioApi,
    timers?: { set: Scheduler; clear: (h: unknown) => void },
  ) {
    this.setTimer = timers?.set ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = timers?.clear ?? ((h) => clearTimeout(h as number));
  }

  subscribe(fn: (s: ViewState) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.state);
  }

  async openSession(payload: object): Promise<void> {
    const res = await this.api.createSession(payload);
    this.state = { ...this.state, sessionId: res.id, version: res.version, badge: "none" };
    this.emit();
    await this.fetchGeometryNow(this.state.driveAngle);
  }

  adoptSession(id: string, version: number): void {
    this.state = { ...this.state, sessionId: id, version, badge: "none" };
    this.emit();
  }

  /** Slider drag handler: debounced fetch, last value wins. */
  onDriveSlider(angle: number): void {
    this.state = { ...this.state, driveAngle: angle };
    this.emit();
    if (this.debounceHandle !== null) this.clearTimer(this.debounceHandle);
    this.debounceHandle = this.setTimer(() => {
      this.debounceHandle = null;
      void this.fetchGeometryNow(this.state.driveAngle);
    }, GEOMETRY_DEBOUNCE_MS);
  }

  async fetchGeometryNow(angle: number): Promise<void> {
    if (!this.state.sessionId) return;
    const seq = ++this.fetchSeq;
    const geo = await this.api.geometry(this.state.sessionId, angle);
    if (seq !== this.fetchSeq) return; // a newer request superseded this one
    this.state = { ...this.state, geometry: geo };
    this.emit();
  }

  async onConnectionPointEdit(joint: number, cp0: number, cp1: number): Promise<void> {
    if (!this.state.sessionId) return;
    const res = await this.api.patchConnectionPoints(
      this.state.sessionId,
      joint,
      cp0,
      cp1,
      this.state.version,
    );
    this.state = {
      ...this.state,
      version: res.version,
      badge: badgeTransition(this.state.badge, { type: "edited" }),
    };
    this.emit();
    await this.fetchGeometryNow(this.state.driveAngle);
  }

  async onCollisionCheck(poll?: (fn: () => void) => void): Promise<void> {
    const sid = this.state.sessionId;
    if (!sid) return;
    const versionAtStart = this.state.version;
    this.state = { ...this.state, badge: badgeTransition(this.state.badge, { type: "check_started" }) };
    this.emit();
    let job: string;
    try {
      job = (await this.api.startCollisionCheck(sid)).job;
    } catch {
      this.state = { ...this.state, badge: badgeTransition(this.state.badge, { type: "check_failed" }) };
      this.emit();
      return;
    }
    const schedule = poll ?? ((fn: () => void) => this.setTimer(fn, JOB_POLL_MS));
    await new Promise<void>((resolve) => {
      const tick = async () => {
        const doc = await this.api.jobStatus(job);
        if (doc.status === "running") {
          schedule(() => void tick());
          return;
        }
        if (doc.status === "done") {
          const report = doc.report ?? [];
          this.state = {
            ...this.state,
            report,
            badge: badgeTransition(this.state.badge, {
              type: "check_finished",
              collisions: report.length,
              versionAtStart,
              currentVersion: this.state.version,
            }),
          };
        } else {
          this.state = { ...this.state, badge: badgeTransition(this.state.badge, { type: "check_failed" }) };
        }
        this.emit();
        resolve();
      };
      void tick();
    });
  }
}
