/** Typed client for the design-studio service. The UI never computes
 * kinematics itself: every displayed coordinate comes from these calls. */

export interface AxisPayload {
  direction: number[];
  moment: number[];
}

export interface JointPayload {
  axis: AxisPayload;
  segment: [number[], number[]];
}

export interface GeometryPayload {
  version: number;
  angle: number;
  t: number | null;
  tool: number[];
  joints: JointPayload[];
  links: number[][][];
  closure_residual: number;
}

export interface CollisionEventPayload {
  t: number;
  angle: number;
  pair: [string, string];
  point: [number, number, number];
  kind: string;
}

export interface SessionStatus {
  id: string;
  version: number;
  joints: number;
  scale: number;
  connection_points: { joint: number; cp0: number; cp1: number }[];
  collision: { state: string };
}

export interface DesignRow {
  i: number;
  d: number;
  a: number;
  alpha: number;
  cp0: number;
  cp1: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!res.ok) {
    throw new ApiError(res.status, await res.text());
  }
  return (await res.json()) as T;
}

export class StudioApi {
  constructor(private base: string = "") {}

  createSession(payload: object): Promise<{ id: string; version: number; joints: number }> {
    return request(`${this.base}/sessions`, { method: "POST", body: JSON.stringify(payload) });
  }

  status(id: string): Promise<SessionStatus> {
    return request(`${this.base}/sessions/${id}`);
  }

  geometry(id: string, angle: number, signal?: AbortSignal): Promise<GeometryPayload> {
    return request(`${this.base}/sessions/${id}/geometry?angle=${angle}`, { signal });
  }

  patchConnectionPoints(
    id: string,
    joint: number,
    cp0: number,
    cp1: number,
    version: number,
  ): Promise<{ version: number }> {
    return request(`${this.base}/sessions/${id}/connection-points`, {
      method: "PATCH",
      body: JSON.stringify({ joint, cp0, cp1, version }),
    });
  }

  startCollisionCheck(id: string): Promise<{ job: string }> {
    return request(`${this.base}/sessions/${id}/collision-check`, { method: "POST" });
  }

  jobStatus(job: string): Promise<{ status: string; report?: CollisionEventPayload[] }> {
    return request(`${this.base}/jobs/${job}`);
  }

  design(id: string, scale: number): Promise<{ rows: DesignRow[]; scale: number }> {
    return request(`${this.base}/sessions/${id}/design?scale=${scale}`);
  }

  exportUrl(id: string): string {
    return `${this.base}/sessions/${id}/export`;
  }
}
