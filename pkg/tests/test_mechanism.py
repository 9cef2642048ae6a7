import io
import json
import math

import numpy as np
import pytest

from ratlink import errors
from ratlink.data import BENNETT_CURVE_COEFFS, SIX_R_POSES
from ratlink.interp import interpolate_poses
from ratlink.mechanism import assemble, load
from ratlink.motionpoly import MotionPolynomial, all_factorizations
from ratlink.quatcore import Point3, act_on_point


@pytest.fixture(scope="module")
def bennett():
    curve = MotionPolynomial.from_coeff_rows(BENNETT_CURVE_COEFFS)
    return assemble(all_factorizations(curve), curve=curve)


@pytest.fixture(scope="module")
def six_r():
    curve = interpolate_poses(SIX_R_POSES).curve
    return assemble(all_factorizations(curve), curve=curve)


def test_assemble_bennett_four_joints(bennett):
    assert bennett.n_joints == 4
    assert len(bennett.branch_a) == len(bennett.branch_b) == 2


def test_assemble_six_r(six_r):
    assert six_r.n_joints == 6


def test_assemble_single_factorization_fails(bennett):
    with pytest.raises(errors.FewerThanTwoFactorizations):
        assemble([bennett.branch_a])


def test_assemble_mismatched_branches(bennett, six_r):
    with pytest.raises(errors.BranchMismatch):
        assemble([bennett.branch_a, six_r.branch_a])


def test_drive_angle_midpoint(bennett):
    a0 = float(bennett.branch_a.factors[0].h.primal.w)
    assert bennett.drive_angle_to_param(math.pi) == pytest.approx(a0, abs=1e-12)


def test_drive_angle_roundtrip(bennett):
    for phi in np.linspace(1e-3, 2 * math.pi - 1e-3, 100):
        t = bennett.drive_angle_to_param(phi)
        back = bennett.param_to_drive_angle(t)
        assert back == pytest.approx(phi, abs=1e-10)


def test_drive_angle_monotone(bennett):
    phis = np.linspace(1e-3, 2 * math.pi - 1e-3, 200)
    ts = [bennett.drive_angle_to_param(p) for p in phis]
    assert all(a > b for a, b in zip(ts, ts[1:]))  # cot is decreasing


def test_drive_angle_zero_is_infinity(bennett):
    assert bennett.drive_angle_to_param(0.0) == math.inf
    assert bennett.param_to_drive_angle(math.inf) == 0.0


def test_inspection_configuration_at_2_120_rad(bennett):
    # a mid-cycle inspection pose: finite parameter, mechanism still closed
    t = bennett.drive_angle_to_param(2.120)
    assert math.isfinite(t)
    pose = bennett.pose_at(t)
    assert all(math.isfinite(float(c)) for c in pose.coords())
    assert bennett.loop_closure_residual(t) < 1e-8


def test_home_configuration_joints_at_base_axes(bennett):
    frames = bennett.joint_frames_at(math.inf)
    for (axis, _), geo in zip(frames, bennett.joints):
        assert np.asarray(axis.direction) == pytest.approx(np.asarray(geo.axis.direction), abs=1e-9)
        assert np.asarray(axis.moment) == pytest.approx(np.asarray(geo.axis.moment), abs=1e-9)


def test_loop_closure_full_cycle(bennett, six_r):
    for mech in (bennett, six_r):
        for phi in np.linspace(0, 2 * math.pi, 36, endpoint=False):
            t = mech.drive_angle_to_param(phi)
            assert mech.loop_closure_residual(t) < 1e-8


def test_tool_trajectory_matches_curve_action(bennett):
    for t in (-2.0, -0.3, 0.7, 4.0):
        pose = bennett.pose_at(t)
        direct = act_on_point(pose, Point3(0.0, 0.0, 0.0))
        value = bennett.curve.to_float().evaluate(t)
        again = act_on_point(value, Point3(0.0, 0.0, 0.0))
        assert np.asarray(direct.coords()) == pytest.approx(np.asarray(again.coords()))


def test_rigid_body_distances_invariant(bennett, rng):
    pts = [Point3(*rng.uniform(-1, 1, 3)) for _ in range(3)]
    d_ref = None
    for t in (-5.0, -1.0, 0.0, 2.0, 17.0):
        pose = bennett.pose_at(t)
        imgs = [np.asarray(act_on_point(pose, p).coords()) for p in pts]
        d = [np.linalg.norm(imgs[i] - imgs[j]) for i in range(3) for j in range(i + 1, 3)]
        if d_ref is None:
            d_ref = d
        assert d == pytest.approx(d_ref, abs=1e-9)


def test_set_connection_points(bennett):
    m2 = bennett.set_connection_points(1, -0.1, 0.3)
    assert m2.segments.cp_in[1] == -0.1
    assert m2.segments.cp_out[1] == 0.3
    # original unchanged, kinematics unchanged
    assert bennett.segments.cp_in[1] != -0.1
    assert m2.loop_closure_residual(0.5) == bennett.loop_closure_residual(0.5)
    with pytest.raises(errors.DegenerateSegment):
        bennett.set_connection_points(0, 0.2, 0.2)


def test_segment_inventory(bennett):
    segs = bennett.physical_segments()
    joints = [s for s in segs if s.kind == "joint"]
    links = [s for s in segs if s.kind == "link"]
    assert len(joints) == 4
    assert len(links) == 4  # one straight segment per link
    assert all(s.length() > 0 for s in segs)
    # rendering polylines keep the designed dash-dot shape
    assert len(bennett.link_polylines()) == 4


def test_save_load_roundtrip_exact(bennett, tmp_path):
    path = tmp_path / "bennett.rlmech"
    bennett.save(path)
    again = load(path)
    assert again.curve.coeff_rows() == bennett.curve.coeff_rows()  # bit-exact (ints)
    for fa, fb in zip(again.loop_factors(), bennett.loop_factors()):
        assert np.asarray([float(c) for c in fa.h.coords()]) == pytest.approx(
            np.asarray([float(c) for c in fb.h.coords()]), abs=0
        )
    assert again.segments == bennett.segments
    assert again.scale == bennett.scale


def test_save_load_roundtrip_stream(six_r):
    buf = io.StringIO()
    six_r.save(buf)
    buf.seek(0)
    again = load(buf)
    assert again.n_joints == 6
    assert again.loop_closure_residual(0.25) < 1e-8


def test_load_rejects_wrong_version(bennett, tmp_path):
    path = tmp_path / "v2.rlmech"
    doc = bennett.to_dict()
    doc["version"] = 2
    path.write_text(json.dumps(doc))
    with pytest.raises(errors.FormatVersionMismatch):
        load(path)


def test_load_rejects_corrupted_study(bennett, tmp_path):
    path = tmp_path / "bad.rlmech"
    doc = bennett.to_dict()
    doc["curve"][1][0] = [999999, 1]  # corrupt one coefficient
    path.write_text(json.dumps(doc))
    with pytest.raises(errors.StudyViolation):
        load(path)


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "junk.rlmech"
    path.write_text("{not json")
    with pytest.raises(errors.ParseError):
        load(path)
