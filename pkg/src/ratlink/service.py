"""HTTP facade for the interactive design studio.

Sessions are in-memory, one mechanism each, version-stamped on every edit.
Geometry queries are pure in (session version, drive angle); collision checks
run as background jobs on a bounded pool and their cached result is flagged
stale by any later edit.
"""
from __future__ import annotations

import json
import math
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from pydantic import BaseModel

from . import collision as collision_mod
from . import design as design_mod
from . import mechanism as mech_mod
from .errors import RatlinkError
from .interp import interpolate_poses
from .mechanism import RationalMechanism, _decode_number
from .motionpoly import MotionPolynomial, all_factorizations
from .quatcore import DualQuaternion, Point3, act_on_point

_JOB_POOL_SIZE = 2


@dataclass
class Session:
    mechanism: RationalMechanism
    version: int = 0
    collision_state: str = "none"  # none | running | clean | colliding | stale
    collision_report: list | None = None
    collision_version: int | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class CreateSession(BaseModel):
    mechanism: dict | None = None
    poses: list | None = None
    curve: list | None = None
    scale: float = 1.0


class PatchConnectionPoints(BaseModel):
    joint: int
    cp0: float
    cp1: float
    version: int


def _mech_from_payload(body: CreateSession) -> RationalMechanism:
    if body.mechanism is not None:
        import io

        return mech_mod.load(io.StringIO(json.dumps(body.mechanism)))
    if body.curve is not None:
        rows_cols = body.curve
        n = max(len(c) for c in rows_cols)
        rows = [
            [_decode_number(rows_cols[k][p]) if p < len(rows_cols[k]) else 0 for k in range(8)]
            for p in range(n)
        ]
        curve = MotionPolynomial.from_coeff_rows(rows)
        return mech_mod.assemble(all_factorizations(curve), curve=curve, scale=body.scale)
    if body.poses is not None:
        poses = [DualQuaternion.from_coords([_decode_number(c) for c in row]) for row in body.poses]
        curve = interpolate_poses(poses).curve
        return mech_mod.assemble(all_factorizations(curve), curve=curve, scale=body.scale)
    raise HTTPException(400, "provide one of: mechanism, curve, poses")


def create_app(preload: RationalMechanism | None = None) -> FastAPI:
    app = FastAPI(title="ratlink design service")
    sessions: dict[str, Session] = {}
    jobs: dict[str, dict] = {}
    pool = ThreadPoolExecutor(max_workers=_JOB_POOL_SIZE)

    if preload is not None:
        sessions["default"] = Session(mechanism=preload)

    def _session(sid: str) -> Session:
        if sid not in sessions:
            raise HTTPException(404, f"unknown session {sid}")
        return sessions[sid]

    @app.post("/sessions")
    def create_session(body: CreateSession):
        try:
            mech = _mech_from_payload(body)
        except RatlinkError as exc:
            raise HTTPException(422, f"{type(exc).__name__}: {exc}")
        sid = uuid.uuid4().hex[:12]
        sessions[sid] = Session(mechanism=mech)
        return {"id": sid, "version": 0, "joints": mech.n_joints}

    @app.get("/sessions/{sid}")
    def session_status(sid: str):
        s = _session(sid)
        return {
            "id": sid,
            "version": s.version,
            "joints": s.mechanism.n_joints,
            "scale": s.mechanism.scale,
            "connection_points": [
                {"joint": i, "cp0": s.mechanism.segments.cp_in[i], "cp1": s.mechanism.segments.cp_out[i]}
                for i in range(s.mechanism.n_joints)
            ],
            "collision": {"state": s.collision_state},
        }

    @app.get("/sessions/{sid}/geometry")
    def geometry(sid: str, angle: float = Query(..., ge=0.0, lt=2.0 * math.pi)):
        s = _session(sid)
        m = s.mechanism
        t = m.drive_angle_to_param(angle)
        try:
            pose = m.pose_at(t)
        except RatlinkError as exc:
            raise HTTPException(422, f"{type(exc).__name__}: {exc}")
        frames = m.joint_frames_at(t)
        polys = m.body_polynomials()
        links = []
        for i, poly in enumerate(polys):
            body_pose = m.body_pose(i, t)
            pts = []
            for p in m.link_polylines()[i]:
                q = act_on_point(body_pose, Point3(*p))
                pts.append([float(c) for c in q.coords()])
            links.append(pts)
        return {
            "version": s.version,
            "angle": angle,
            "t": None if t == math.inf else t,
            "tool": [float(c) for c in pose.coords()],
            "joints": [
                {
                    "axis": {"direction": list(ax.direction), "moment": list(ax.moment)},
                    "segment": [list(map(float, p0.coords())), list(map(float, p1.coords()))],
                }
                for ax, (p0, p1) in frames
            ],
            "links": links,
            "closure_residual": m.loop_closure_residual(t),
        }

    @app.patch("/sessions/{sid}/connection-points")
    def patch_cps(sid: str, body: PatchConnectionPoints):
        s = _session(sid)
        with s.lock:
            if body.version != s.version:
                raise HTTPException(409, f"stale version {body.version}, current {s.version}")
            try:
                s.mechanism = s.mechanism.set_connection_points(body.joint, body.cp0, body.cp1)
            except IndexError as exc:
                raise HTTPException(400, str(exc))
            except RatlinkError as exc:
                raise HTTPException(422, f"{type(exc).__name__}: {exc}")
            s.version += 1
            if s.collision_state in ("clean", "colliding"):
                s.collision_state = "stale"
            return {"version": s.version}

    @app.post("/sessions/{sid}/collision-check")
    def start_collision(sid: str, tol: float = 1e-6):
        s = _session(sid)
        job_id = uuid.uuid4().hex[:12]
        with s.lock:
            version = s.version
            mech = s.mechanism
            s.collision_state = "running"
        jobs[job_id] = {"status": "running", "session": sid, "version": version}

        def run():
            try:
                events = collision_mod.collision_check(mech, tol=tol)
                report = [e.to_dict() for e in events]
                jobs[job_id].update(status="done", report=report)
                with s.lock:
                    if s.version == version:
                        s.collision_state = "colliding" if events else "clean"
                        s.collision_report = report
                        s.collision_version = version
                    else:
                        s.collision_state = "stale"
            except Exception as exc:  # job failure surfaces via polling
                jobs[job_id].update(status="failed", error=f"{type(exc).__name__}: {exc}")

        pool.submit(run)
        return {"job": job_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        if job_id not in jobs:
            raise HTTPException(404, f"unknown job {job_id}")
        return jobs[job_id]

    @app.get("/sessions/{sid}/design")
    def design(sid: str, scale: float = Query(1.0, gt=0.0)):
        s = _session(sid)
        try:
            table = design_mod.get_design(s.mechanism, scale=scale)
        except RatlinkError as exc:
            raise HTTPException(422, f"{type(exc).__name__}: {exc}")
        return json.loads(design_mod.export_design(table, "json"))

    @app.get("/sessions/{sid}/export")
    def export(sid: str):
        s = _session(sid)
        text = json.dumps(s.mechanism.to_dict(), indent=1)
        return Response(
            content=text.encode("utf-8"),
            media_type="application/octet-stream",
            headers={"Content-Disposition": "attachment; filename=mechanism.rlmech"},
        )

    static_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="studio")

    return app
