import json
import math
import time

import pytest
from fastapi.testclient import TestClient

from ratlink.data import (
    BENNETT_CURVE_COEFFS,
    BENNETT_DESIGN_CP_MM,
    BENNETT_DESIGN_D0_MM,
)
from ratlink.design import model_attachments_from_table
from ratlink.mechanism import assemble
from ratlink.motionpoly import MotionPolynomial, all_factorizations
from ratlink.service import create_app


def _bennett_mech(scale=200.0):
    curve = MotionPolynomial.from_coeff_rows(BENNETT_CURVE_COEFFS)
    return assemble(all_factorizations(curve), curve=curve, scale=scale)


def _curve_cols():
    return [[[int(r[k]), 1] for r in BENNETT_CURVE_COEFFS] for k in range(8)]


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def session(client):
    res = client.post("/sessions", json={"curve": _curve_cols(), "scale": 200.0})
    assert res.status_code == 200, res.text
    return res.json()["id"]


def test_create_session_from_curve(client, session):
    doc = client.get(f"/sessions/{session}").json()
    assert doc["joints"] == 4
    assert doc["version"] == 0
    assert doc["collision"]["state"] == "none"


def test_create_session_from_mechanism_file(client):
    mech = _bennett_mech()
    res = client.post("/sessions", json={"mechanism": mech.to_dict()})
    assert res.status_code == 200
    assert res.json()["joints"] == 4


def test_create_session_rejects_bad_payload(client):
    assert client.post("/sessions", json={}).status_code == 400
    bad = client.post("/sessions", json={"poses": [[1, 0, 0, 0, 1, 0, 0, 0]] * 4})
    assert bad.status_code == 422


def test_geometry_at_angle(client, session):
    res = client.get(f"/sessions/{session}/geometry", params={"angle": math.pi})
    assert res.status_code == 200
    doc = res.json()
    assert len(doc["joints"]) == 4
    assert doc["closure_residual"] < 1e-8
    assert len(doc["links"]) == 4


def test_geometry_angle_zero_uses_home(client, session):
    res = client.get(f"/sessions/{session}/geometry", params={"angle": 0.0})
    assert res.status_code == 200
    doc = res.json()
    assert doc["t"] is None  # point at infinity: home configuration
    assert doc["closure_residual"] < 1e-8


def test_geometry_pure_in_version_and_angle(client, session):
    a = client.get(f"/sessions/{session}/geometry", params={"angle": 2.12}).text
    b = client.get(f"/sessions/{session}/geometry", params={"angle": 2.12}).text
    assert a == b


def test_patch_version_conflict(client, session):
    ok = client.patch(
        f"/sessions/{session}/connection-points",
        json={"joint": 0, "cp0": -0.05, "cp1": 0.08, "version": 0},
    )
    assert ok.status_code == 200
    assert ok.json()["version"] == 1
    stale = client.patch(
        f"/sessions/{session}/connection-points",
        json={"joint": 1, "cp0": -0.05, "cp1": 0.08, "version": 0},
    )
    assert stale.status_code == 409


def test_patch_invalid_segment(client, session):
    res = client.patch(
        f"/sessions/{session}/connection-points",
        json={"joint": 0, "cp0": 0.1, "cp1": 0.1, "version": 0},
    )
    assert res.status_code == 422


def _poll_job(client, job, timeout=60.0):
    t0 = time.time()
    while time.time() - t0 < timeout:
        doc = client.get(f"/jobs/{job}").json()
        if doc["status"] != "running":
            return doc
        time.sleep(0.05)
    raise TimeoutError("collision job did not finish")


def test_collision_job_designed_clean(client):
    mech = _bennett_mech().with_base_offset(BENNETT_DESIGN_D0_MM / 200.0)
    for i, (ci, co) in enumerate(
        model_attachments_from_table(mech, BENNETT_DESIGN_CP_MM, 200.0, d0_mm=BENNETT_DESIGN_D0_MM)
    ):
        mech = mech.set_connection_points(i, ci, co)
    res = client.post("/sessions", json={"mechanism": mech.to_dict()})
    sid = res.json()["id"]
    job = client.post(f"/sessions/{sid}/collision-check").json()["job"]
    doc = _poll_job(client, job)
    assert doc["status"] == "done"
    assert doc["report"] == []
    assert client.get(f"/sessions/{sid}").json()["collision"]["state"] == "clean"


def test_collision_state_goes_stale_on_edit(client, session):
    job = client.post(f"/sessions/{session}/collision-check").json()["job"]
    doc = _poll_job(client, job)
    assert doc["status"] == "done"
    state = client.get(f"/sessions/{session}").json()["collision"]["state"]
    assert state in ("clean", "colliding")
    client.patch(
        f"/sessions/{session}/connection-points",
        json={"joint": 0, "cp0": -0.04, "cp1": 0.04, "version": 0},
    )
    assert client.get(f"/sessions/{session}").json()["collision"]["state"] == "stale"


def test_design_endpoint(client, session):
    res = client.get(f"/sessions/{session}/design", params={"scale": 200.0})
    assert res.status_code == 200
    doc = res.json()
    assert len(doc["rows"]) == 4
    a_vals = sorted({r["a"] for r in doc["rows"]})
    assert a_vals == pytest.approx([48.517961, 83.708761], abs=1e-3)


def test_export_roundtrip(client, session):
    res = client.get(f"/sessions/{session}/export")
    assert res.status_code == 200
    doc = json.loads(res.content)
    assert doc["version"] == 1
    import io

    from ratlink.mechanism import load

    again = load(io.StringIO(res.content.decode()))
    assert again.n_joints == 4


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.get("/jobs/nope").status_code == 404
