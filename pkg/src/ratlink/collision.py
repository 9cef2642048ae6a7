"""Full-cycle self-collision analysis of the line-segment model.

For every pair of physical segments with nontrivial relative motion the
carrier line of one segment is expressed in the frame of the other as a
polynomial Pluecker 6-vector (conjugation by the relative transform clears
denominators projectively).  The reciprocal product with the static carrier
line yields one real polynomial in the curve parameter whose roots are the
coplanarity instants; each root is then tested against the actual segment
geometry, and contacts at a shared hinge axis are discarded as by-design.

Pairs whose relative configuration is constant (same link, a joint segment
against either of its neighbouring links, pieces of one polyline) are never
checked.  Identically-coplanar moving pairs fall back to a dense angular
grid over the full cycle and are reported as parallel-overlap events.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import segment_min_distances
from .mechanism import PhysicalSegment, RationalMechanism
from .motionpoly import MotionPolynomial
from .quatcore import DualQuaternion, Point3, act_on_point
from .realpoly import RealPolynomial, float_coeffs, real_roots

DEFAULT_TOL = 1e-6
#: grid size for identically-coplanar pairs (full drive cycle)
_FALLBACK_GRID = 720


@dataclass(frozen=True)
class SegmentPair:
    id_a: str
    id_b: str
    body_a: int
    body_b: int
    seg_a: PhysicalSegment
    seg_b: PhysicalSegment
    hinge_axis: int | None  # joint index shared by adjacent bodies, if any


@dataclass(frozen=True)
class CollisionEvent:
    t: float
    angle: float
    pair: tuple[str, str]
    point: tuple[float, float, float]
    kind: str  # "contact" | "parallel-overlap"

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "angle": self.angle,
            "pair": list(self.pair),
            "point": list(self.point),
            "kind": self.kind,
        }


def _bodies_of(seg: PhysicalSegment, n: int) -> set[int]:
    if seg.kind == "joint":
        return {seg.body, (seg.body + 1) % n}
    return {seg.body}


def collision_pairs(m: RationalMechanism) -> list[SegmentPair]:
    """All segment pairs with nontrivial relative motion, hinge info attached."""
    n = m.n_joints
    segs = m.physical_segments()
    pairs = []
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            sa, sb = segs[i], segs[j]
            ba, bb = _bodies_of(sa, n), _bodies_of(sb, n)
            if ba & bb:
                continue  # rigidly connected: by-design contact allowed
            hinge = None
            for x in ba:
                for y in bb:
                    if (x + 1) % n == y:
                        hinge = y
                    elif (y + 1) % n == x:
                        hinge = x
            pairs.append(SegmentPair(sa.seg_id, sb.seg_id, sa.body, sb.body, sa, sb, hinge))
    return pairs


def _line_of(seg: PhysicalSegment):
    d = seg.end - seg.start
    g = d / np.linalg.norm(d)
    return g, np.cross(seg.start, g)


def relative_transform(m: RationalMechanism, body_a: int, body_b: int) -> MotionPolynomial:
    """Polynomial representative of (pose of body_b) in body_a's frame."""
    polys = m.body_polynomials()
    pa, pb = polys[body_a], polys[body_b]
    if pa.degree == 0:
        return pb.to_float()
    return (pa.conjugate() * pb).to_float()


def _intersection_data(m: RationalMechanism, pair: SegmentPair):
    D = relative_transform(m, pair.body_a, pair.body_b)
    g2, mo2 = _line_of(pair.seg_b)
    l2 = DualQuaternion.from_coords((0.0, *g2, 0.0, *mo2))
    Deps = MotionPolynomial([c.eps_conjugate() for c in D.coeffs])
    moving = Deps * MotionPolynomial([l2]) * Deps.conjugate()
    g1, mo1 = _line_of(pair.seg_a)
    coeffs = []
    for c in moving.coeffs:
        gm = c.primal.vec
        mm = c.dual.vec
        coeffs.append(
            g1[0] * mm[0] + g1[1] * mm[1] + g1[2] * mm[2]
            + mo1[0] * gm[0] + mo1[1] * gm[1] + mo1[2] * gm[2]
        )
    # cancellation scale of the reciprocal sum, for the identically-zero test
    scale = max(c.max_abs() for c in moving.coeffs) * (
        1.0 + float(np.linalg.norm(g1)) + float(np.linalg.norm(mo1))
    )
    return RealPolynomial(coeffs), scale


def intersection_polynomial(m: RationalMechanism, pair: SegmentPair) -> RealPolynomial:
    """Cleared reciprocal-product polynomial of the pair's carrier lines.

    Roots are the coplanarity instants of the two carriers; the positive real
    denominator of the line action is dropped (projective invariance).
    """
    return _intersection_data(m, pair)[0]


def _pair_geometry_at(m: RationalMechanism, pair: SegmentPair, t: float):
    """Endpoints of both segments in body_a's frame at parameter t."""
    D = relative_transform(m, pair.body_a, pair.body_b)
    pose = D.leading() if t in (math.inf, -math.inf) else D.evaluate(t)
    p0, p1 = pair.seg_a.start, pair.seg_a.end
    q0 = np.asarray(act_on_point(pose, Point3(*pair.seg_b.start)).coords(), dtype=float)
    q1 = np.asarray(act_on_point(pose, Point3(*pair.seg_b.end)).coords(), dtype=float)
    return p0, p1, q0, q1


def _closest_points(p0, p1, q0, q1):
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a, e, b = d1 @ d1, d2 @ d2, d1 @ d2
    c, f = d1 @ r, d2 @ r
    denom = a * e - b * b
    s = np.clip((b * f - c * e) / denom, 0.0, 1.0) if denom > 1e-30 else 0.0
    t = (b * s + f) / e if e > 1e-30 else 0.0
    if t < 0.0 or t > 1.0:
        t = np.clip(t, 0.0, 1.0)
        s = np.clip((t * b - c) / a, 0.0, 1.0) if a > 1e-30 else 0.0
    return p0 + s * d1, q0 + t * d2


def _check_pair(m: RationalMechanism, pair: SegmentPair, tol: float) -> list[CollisionEvent]:
    events: list[CollisionEvent] = []
    F, f_scale = _intersection_data(m, pair)
    trimmed = float_coeffs(F)
    worst = float(np.max(np.abs(trimmed))) if trimmed.size else 0.0
    degenerate = worst < 1e-10 * f_scale

    candidates: list[tuple[float, str]] = []
    if degenerate:
        # permanently coplanar carriers: dense angular sweep for real overlap
        hits = []
        for k in range(_FALLBACK_GRID):
            phi = 2.0 * math.pi * (k + 0.5) / _FALLBACK_GRID
            t = m.drive_angle_to_param(phi)
            p0, p1, q0, q1 = _pair_geometry_at(m, pair, t)
            d = segment_min_distances(p0[None], p1[None], q0[None], q1[None])[0]
            hits.append((t, d <= tol))
        run = [t for t, h in hits if h]
        if run:
            candidates.append((run[len(run) // 2], "parallel-overlap"))
    else:
        for root in real_roots(F):
            candidates.append((root, "contact"))
        # configuration at t = infinity (home): static contact check
        candidates.append((math.inf, "contact"))

    for t, kind in candidates:
        p0, p1, q0, q1 = _pair_geometry_at(m, pair, t)
        dist = segment_min_distances(p0[None], p1[None], q0[None], q1[None])[0]
        if dist > tol:
            continue
        ca, cb = _closest_points(p0, p1, q0, q1)
        contact_local = 0.5 * (ca + cb)
        if pair.hinge_axis is not None:
            geo = m.joints[pair.hinge_axis]
            # contact in body_a frame; hinge axis is fixed in both bodies
            along = (contact_local - geo.ref_point) @ geo.direction
            axis_dist = np.linalg.norm(contact_local - geo.ref_point - along * geo.direction)
            if axis_dist <= max(10 * tol, 1e-9):
                continue  # by-design contact at the shared hinge
        pose_a = m.body_pose(pair.body_a, t)
        world = act_on_point(pose_a, Point3(*contact_local))
        g2 = (q1 - q0) / max(np.linalg.norm(q1 - q0), 1e-300)
        g1 = (p1 - p0) / max(np.linalg.norm(p1 - p0), 1e-300)
        if kind == "contact" and np.linalg.norm(np.cross(g1, g2)) < 1e-8:
            kind = "parallel-overlap"
        events.append(
            CollisionEvent(
                t=float(t),
                angle=float(m.param_to_drive_angle(t)),
                pair=(pair.id_a, pair.id_b),
                point=tuple(float(x) for x in world.coords()),
                kind=kind,
            )
        )
    # deduplicate near-identical roots of one pair
    events.sort(key=lambda e: e.t)
    out: list[CollisionEvent] = []
    for e in events:
        if out and abs(e.t - out[-1].t) < 1e-9 * max(1.0, abs(e.t)):
            continue
        out.append(e)
    return out


def _check_chunk(args) -> list[CollisionEvent]:
    m, chunk, tol = args
    out = []
    for pair in chunk:
        out.extend(_check_pair(m, pair, tol))
    return out


def collision_check(
    m: RationalMechanism, tol: float = DEFAULT_TOL, workers: int | None = None
) -> list[CollisionEvent]:
    """All physical self-collisions over the full cycle, sorted by (t, pair).

    An empty list means the current segment design is collision-free.  The
    result is independent of `workers` (pairs are independent tasks and the
    merge is deterministic).
    """
    pairs = collision_pairs(m)
    if workers is None or workers <= 1 or len(pairs) < 4:
        events: list[CollisionEvent] = []
        for pair in pairs:
            events.extend(_check_pair(m, pair, tol))
    else:
        chunks = [pairs[i::workers] for i in range(workers)]
        events = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_check_chunk, [(m, c, tol) for c in chunks]):
                events.extend(res)
    events.sort(key=lambda e: (e.t, e.pair))
    return events
