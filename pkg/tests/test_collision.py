import math

import numpy as np
import pytest

from conftest import study_matrix
from ratlink.collision import (
    CollisionEvent,
    SegmentPair,
    collision_check,
    collision_pairs,
    intersection_polynomial,
)
from ratlink.data import (
    BENNETT_CURVE_COEFFS,
    BENNETT_DESIGN_CP_MM,
    BENNETT_DESIGN_D0_MM,
)
from ratlink.design import model_attachments_from_table
from ratlink.mechanism import PhysicalSegment, assemble
from ratlink.motionpoly import MotionPolynomial, all_factorizations
from ratlink.realpoly import real_roots


@pytest.fixture(scope="module")
def bennett():
    curve = MotionPolynomial.from_coeff_rows(BENNETT_CURVE_COEFFS)
    return assemble(all_factorizations(curve), curve=curve, scale=200.0)


@pytest.fixture(scope="module")
def bennett_designed(bennett):
    m = bennett.with_base_offset(BENNETT_DESIGN_D0_MM / 200.0)
    for i, (ci, co) in enumerate(
        model_attachments_from_table(m, BENNETT_DESIGN_CP_MM, 200.0, d0_mm=BENNETT_DESIGN_D0_MM)
    ):
        m = m.set_connection_points(i, ci, co)
    return m


# --- independent dense-sweep oracle -----------------------------------------


def _poly_eval_batch(poly, ts):
    """Vector Horner on the 8 coordinate polynomials (oracle-local)."""
    rows = np.array([[float(c) for c in dq.coords()] for dq in poly.coeffs])
    out = np.broadcast_to(rows[-1], (ts.size, 8)).copy()
    for k in range(rows.shape[0] - 2, -1, -1):
        out = out * ts[:, None] + rows[k]
    return out


def _transform_points_batch(poses8, pts):
    """Apply displacement 8-vectors to home points via the matrix oracle form."""
    a0 = poses8[:, 0]
    av = poses8[:, 1:4]
    b0 = poses8[:, 4]
    bv = poses8[:, 5:8]
    n = a0**2 + np.einsum("ij,ij->i", av, av)
    tr = 2.0 * (b0[:, None] * av - a0[:, None] * bv - np.cross(av, bv)) / n[:, None]
    out = []
    for p in pts:
        # Rodrigues-style rotation by quaternion (a0, av)
        t2 = 2.0 * np.cross(av, np.broadcast_to(p, av.shape)) / n[:, None]
        rp = p + a0[:, None] * t2 + np.cross(av, t2)
        out.append(rp + tr)
    return out


def _segseg_batch(p0, p1, q0, q1):
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    b = np.einsum("ij,ij->i", d1, d2)
    c = np.einsum("ij,ij->i", d1, r)
    f = np.einsum("ij,ij->i", d2, r)
    den = a * e - b * b
    s = np.where(den > 1e-30, (b * f - c * e) / np.where(den > 1e-30, den, 1), 0.0)
    s = np.clip(s, 0, 1)
    t = np.where(e > 1e-30, (b * s + f) / np.where(e > 1e-30, e, 1), 0.0)
    tc = np.clip(t, 0, 1)
    redo = tc != t
    s = np.where(redo, np.clip((tc * b - c) / np.where(a > 1e-30, a, 1), 0, 1), s)
    cp = p0 + s[:, None] * d1
    cq = q0 + tc[:, None] * d2
    return np.linalg.norm(cp - cq, axis=1), 0.5 * (cp + cq)


def dense_sweep_oracle(m, tol=1e-6, samples=100_000):
    """Independent collision finder: dense drive-angle sweep + refinement."""
    bodies = m.body_polynomials()
    phis = 2.0 * math.pi * (np.arange(samples) + 0.5) / samples
    ts = np.array([m.drive_angle_to_param(p) for p in phis])
    body_poses = {}
    events = []
    for pair in collision_pairs(m):
        rel = bodies[pair.body_a].conjugate() * bodies[pair.body_b]
        key = (pair.body_a, pair.body_b)
        if key not in body_poses:
            body_poses[key] = _poly_eval_batch(rel.to_float(), ts)
        poses8 = body_poses[key]
        q0_t, q1_t = _transform_points_batch(poses8, [pair.seg_b.start, pair.seg_b.end])
        p0 = np.broadcast_to(pair.seg_a.start, q0_t.shape)
        p1 = np.broadcast_to(pair.seg_a.end, q0_t.shape)
        dist, mid = _segseg_batch(p0, p1, q0_t, q1_t)
        # interior local minima of the sampled distance, close enough to be
        # candidate touches, refined by golden section
        local_min = np.where(
            (dist[1:-1] <= dist[:-2]) & (dist[1:-1] <= dist[2:]) & (dist[1:-1] < 0.05)
        )[0] + 1
        rel_rows = np.array([[float(c) for c in dq.coords()] for dq in rel.to_float().coeffs])

        def dist_at(t):
            pose = rel_rows[-1].copy()
            for k in range(rel_rows.shape[0] - 2, -1, -1):
                pose = pose * t + rel_rows[k]
            q0s, q1s = _transform_points_batch(pose[None], [pair.seg_b.start, pair.seg_b.end])
            d, midp = _segseg_batch(pair.seg_a.start[None], pair.seg_a.end[None], q0s, q1s)
            return d[0], midp[0]

        found = []
        for i in local_min:
            if found and abs(ts[i] - found[-1]) < 1e-9:
                continue
            lo, hi = sorted((ts[i - 1], ts[i + 1]))
            g = (math.sqrt(5) - 1) / 2
            a_, b_ = lo, hi
            for _ in range(90):
                c_ = b_ - g * (b_ - a_)
                d_ = a_ + g * (b_ - a_)
                if dist_at(c_)[0] < dist_at(d_)[0]:
                    b_ = d_
                else:
                    a_ = c_
                if b_ - a_ < 1e-13 * max(1.0, abs(a_)):
                    break
            t_star = 0.5 * (a_ + b_)
            d_star, mid_star = dist_at(t_star)
            if d_star >= tol:
                continue
            found.append(t_star)
            if pair.hinge_axis is not None:
                geo = m.joints[pair.hinge_axis]
                along = (mid_star - geo.ref_point) @ geo.direction
                ax_d = np.linalg.norm(mid_star - geo.ref_point - along * geo.direction)
                if ax_d <= max(10 * tol, 1e-9):
                    continue
            events.append(((pair.id_a, pair.id_b), t_star))
    events.sort(key=lambda e: (e[1], e[0]))
    return events


# --- tests -------------------------------------------------------------------


def test_pair_exclusions(bennett):
    pairs = collision_pairs(bennett)
    ids = {(p.id_a, p.id_b) for p in pairs}
    # pairs sharing a body never appear
    assert ("joint0", "link0") not in ids
    assert ("joint0", "link3") not in ids
    assert ("joint0", "joint1") not in ids
    assert ("link0", "link0") not in ids
    # opposite joints and links do appear
    assert ("joint0", "joint2") in ids
    assert ("link0", "link2") in ids


def test_default_design_collides(bennett):
    events = collision_check(bennett)
    assert len(events) > 0
    assert all(isinstance(e, CollisionEvent) for e in events)


def test_reference_design_collision_free(bennett_designed):
    assert collision_check(bennett_designed) == []


def test_matches_dense_sweep_oracle_default(bennett):
    events = collision_check(bennett, tol=1e-6)
    oracle = dense_sweep_oracle(bennett, tol=1e-6, samples=100_000)
    assert len(events) == len(oracle)
    got = sorted((e.pair, e.t) for e in events)
    want = sorted(oracle)
    for (pg, tg), (pw, tw) in zip(got, want):
        assert pg == pw
        assert tg == pytest.approx(tw, abs=1e-6)


def test_matches_dense_sweep_oracle_designed(bennett_designed):
    assert collision_check(bennett_designed, tol=1e-6) == []
    assert dense_sweep_oracle(bennett_designed, tol=1e-6, samples=100_000) == []


def test_static_skew_pair_no_events(bennett):
    ground = bennett.n_joints - 1
    seg_a = PhysicalSegment("a", "link", ground, None, np.array([0.0, 0, 0]), np.array([1.0, 0, 0]))
    seg_b = PhysicalSegment("b", "link", ground, None, np.array([0.0, 1, 1]), np.array([0.0, -1, 1]))
    pair = SegmentPair("a", "b", ground, ground, seg_a, seg_b, None)
    F = intersection_polynomial(bennett, pair)
    assert F.degree == 0
    assert abs(float(F.coeffs[0])) > 1e-9  # constant nonzero: skew forever
    assert real_roots(F) == []


def test_intersection_polynomial_roots_match_near_coplanarity(bennett):
    pairs = {(p.id_a, p.id_b): p for p in collision_pairs(bennett)}
    pair = pairs[("joint0", "joint2")]
    F = intersection_polynomial(bennett, pair)
    roots = real_roots(F)
    # each root is a true coplanarity parameter of the two carrier lines
    from ratlink.collision import _pair_geometry_at

    for r in roots:
        p0, p1, q0, q1 = _pair_geometry_at(bennett, pair, r)
        g1 = (p1 - p0) / np.linalg.norm(p1 - p0)
        g2 = (q1 - q0) / np.linalg.norm(q1 - q0)
        m1 = np.cross(p0, g1)
        m2 = np.cross(q0, g2)
        assert abs(g1 @ m2 + m1 @ g2) < 1e-6


def test_symmetry_of_pair_order(bennett):
    pairs = {(p.id_a, p.id_b): p for p in collision_pairs(bennett)}
    pair = pairs[("joint0", "joint2")]
    swapped = SegmentPair(
        pair.id_b, pair.id_a, pair.body_b, pair.body_a, pair.seg_b, pair.seg_a, pair.hinge_axis
    )
    from ratlink.collision import _check_pair

    ev_a = _check_pair(bennett, pair, 1e-6)
    ev_b = _check_pair(bennett, swapped, 1e-6)
    assert sorted(e.t for e in ev_a) == pytest.approx(sorted(e.t for e in ev_b), abs=1e-9)


def test_workers_deterministic(bennett):
    ev1 = collision_check(bennett, workers=1)
    ev8 = collision_check(bennett, workers=8)
    assert [e.to_dict() for e in ev1] == [e.to_dict() for e in ev8]


def test_six_r_collision_runs():
    from ratlink.data import SIX_R_POSES
    from ratlink.interp import interpolate_poses

    curve = interpolate_poses(SIX_R_POSES).curve
    m = assemble(all_factorizations(curve), curve=curve)
    events = collision_check(m)
    # default huge symmetric segments on a 6R must self-collide
    assert len(events) > 0
