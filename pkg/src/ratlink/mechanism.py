"""Closing two factorizations of one motion into a single-loop mechanism.

Loop layout for factorizations A = (a_1 .. a_m) and B = (b_1 .. b_m):
joints are indexed 0..2m-1 as [a_1, .., a_m, b_m, .., b_1]; link i connects
joints i and i+1 (mod 2m).  Link m-1 is the tool body, link 2m-1 the ground.
The world transform of link i at curve parameter t is the partial product of
the factors between ground and that link (identity for the ground, the full
chain product for the tool body); at t = infinity every partial product is
the identity, which serves as the home configuration.

The physical model per joint i holds two connection parameters (cp_in from
the incoming link, cp_out to the outgoing link) measured along the joint
axis from the midpoint of its two common-perpendicular feet.  The joint
segment spans the connection points; each link is a three-piece polyline
joint attachment -> perpendicular foot -> foot on the next axis -> next
attachment.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    BranchMismatch,
    DegenerateParameter,
    DegenerateSegment,
    FewerThanTwoFactorizations,
    FormatVersionMismatch,
    ParseError,
    StudyViolation,
)
from .motionpoly import LinearFactor, MotionFactorization, MotionPolynomial
from .quatcore import (
    DualQuaternion,
    PluckerLine,
    Point3,
    Pose,
    act_on_line,
    act_on_point,
    is_exact,
    validate_pose,
)
from .realpoly import RealPolynomial

FILE_VERSION = 1
DEFAULT_JOINT_SEGMENT_MM = 41.0


def common_perpendicular(l0: PluckerLine, l1: PluckerLine):
    """Feet of the common perpendicular and the distance between two lines.

    Returns (foot0, foot1, distance) as numpy arrays / float.  For parallel
    lines the foot on l0 is taken at l0's anchor.
    """
    g0 = np.asarray(l0.to_float().direction)
    g1 = np.asarray(l1.to_float().direction)
    p0 = np.asarray(l0.to_float().anchor().coords())
    p1 = np.asarray(l1.to_float().anchor().coords())
    cr = np.cross(g0, g1)
    n2 = cr @ cr
    w = p1 - p0
    if n2 < 1e-20:
        f0 = p0
        f1 = p1 + ((p0 - p1) @ g1) * g1
        return f0, f1, float(np.linalg.norm(f1 - f0))
    s = np.cross(w, g1) @ cr / n2
    u = np.cross(w, g0) @ cr / n2
    f0 = p0 + s * g0
    f1 = p1 + u * g1
    return f0, f1, abs(float(w @ cr / math.sqrt(n2)))


@dataclass(frozen=True)
class JointGeometry:
    """Home geometry of one joint axis within the loop."""

    axis: PluckerLine
    direction: np.ndarray
    ref_point: np.ndarray   # midpoint of the two perpendicular feet
    foot_prev: np.ndarray   # foot of the perpendicular towards the previous axis
    foot_next: np.ndarray   # foot towards the next axis

    def point_at(self, s: float) -> np.ndarray:
        return self.ref_point + s * self.direction


@dataclass(frozen=True)
class SegmentModel:
    """Connection parameters per joint, measured from each axis ref point."""

    cp_in: tuple[float, ...]
    cp_out: tuple[float, ...]

    def bounds(self, i: int) -> tuple[float, float]:
        lo, hi = sorted((self.cp_in[i], self.cp_out[i]))
        return lo, hi


@dataclass(frozen=True)
class PhysicalSegment:
    """A line segment of the physical model, attached to one loop body."""

    seg_id: str
    kind: str          # "joint" | "link"
    body: int          # link index whose transform moves this segment
    joint: int | None  # joint index for joint segments and on-axis pieces
    start: np.ndarray
    end: np.ndarray

    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))


@dataclass(frozen=True)
class DriveState:
    t: float
    angle: float


@dataclass(frozen=True)
class RationalMechanism:
    curve: MotionPolynomial
    branch_a: MotionFactorization
    branch_b: MotionFactorization
    tool: Pose
    joints: tuple[JointGeometry, ...]
    segments: SegmentModel
    scale: float = 1.0
    joint_segment_length: float = DEFAULT_JOINT_SEGMENT_MM
    base_offset: float = 0.0  # base frame position along axis 0, design state
    metadata: dict = field(default_factory=dict)

    # -- structure ---------------------------------------------------------

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    def loop_factors(self) -> list[LinearFactor]:
        return list(self.branch_a.factors) + list(self.branch_b.factors)[::-1]

    def body_polynomials(self) -> list[MotionPolynomial]:
        """World transform polynomial of each link body, in loop order."""
        m = len(self.branch_a.factors)
        parts_a = self.branch_a.partial_products()
        parts_b = self.branch_b.partial_products()
        out = []
        for link in range(2 * m):
            if link < m:
                out.append(parts_a[link + 1])
            elif link < 2 * m - 1:
                out.append(parts_b[2 * m - 1 - link])
            else:
                out.append(MotionPolynomial([DualQuaternion.one()]))
        return out

    def joint_body(self, i: int) -> int:
        """Index of a body carrying joint i (the preceding link)."""
        return (i - 1) % self.n_joints

    # -- drive parametrization ----------------------------------------------

    def _driving(self) -> tuple[float, float]:
        h = self.branch_a.factors[0].h
        a0 = float(h.primal.w)
        va = math.sqrt(sum(float(c) ** 2 for c in h.primal.vec))
        return a0, va

    def drive_angle_to_param(self, angle: float) -> float:
        """Map a driving-joint angle in (0, 2*pi) to the curve parameter.

        angle -> a0 + |vec| * cot(angle / 2); the limits 0+ and 2*pi- are the
        configuration at t = +/- infinity (math.inf is returned at 0.0).
        """
        if angle <= 0.0 or angle >= 2.0 * math.pi:
            return math.inf
        a0, va = self._driving()
        return a0 + va / math.tan(angle / 2.0)

    def param_to_drive_angle(self, t: float) -> float:
        if t in (math.inf, -math.inf):
            return 0.0
        a0, va = self._driving()
        return 2.0 * math.atan2(va, t - a0)

    # -- kinematics ----------------------------------------------------------

    def pose_at(self, t: float, tol: float = 1e-12) -> Pose:
        value = (
            self.curve.leading() if t in (math.inf, -math.inf) else self.curve.evaluate(t)
        ).to_float()
        s, _ = value.norm_pair()
        if abs(s) <= tol * max(value.max_abs(), 1e-300) ** 2:
            raise DegenerateParameter(f"curve norm vanishes at t = {t}")
        return value

    def body_pose(self, body: int, t: float) -> Pose:
        poly = self.body_polynomials()[body]
        if t in (math.inf, -math.inf):
            return poly.leading().to_float()
        return poly.evaluate(t).to_float()

    def joint_frames_at(self, t: float) -> list[tuple[PluckerLine, tuple[Point3, Point3]]]:
        """World joint axes and joint-segment endpoints at parameter t."""
        out = []
        for i, geo in enumerate(self.joints):
            pose = self.body_pose(self.joint_body(i), t)
            axis = act_on_line(pose, geo.axis)
            lo, hi = self.segments.bounds(i)
            p_lo = act_on_point(pose, Point3(*geo.point_at(lo)))
            p_hi = act_on_point(pose, Point3(*geo.point_at(hi)))
            out.append((axis, (p_lo, p_hi)))
        return out

    def loop_closure_residual(self, t: float) -> float:
        """Projective distance between the two branch chain products at t."""
        a = self.body_pose(len(self.branch_a.factors) - 1, t)
        bpoly = self.branch_b.chain_polynomial()
        b = (bpoly.leading() if t in (math.inf, -math.inf) else bpoly.evaluate(t)).to_float()
        va = np.array([float(c) for c in a.coords()])
        vb = np.array([float(c) for c in b.coords()])
        na, nb = np.linalg.norm(va), np.linalg.norm(vb)
        if na == 0.0 or nb == 0.0:
            return math.inf
        va, vb = va / na, vb / nb
        return float(min(np.linalg.norm(va - vb), np.linalg.norm(va + vb)))

    # -- physical model -------------------------------------------------------

    def set_connection_points(self, joint: int, cp0: float, cp1: float) -> "RationalMechanism":
        """Return a copy with joint's (incoming, outgoing) attachments replaced."""
        if not 0 <= joint < self.n_joints:
            raise IndexError(f"joint {joint} out of range")
        if abs(cp1 - cp0) < 1e-12:
            raise DegenerateSegment("connection points must be distinct")
        cp_in = list(self.segments.cp_in)
        cp_out = list(self.segments.cp_out)
        cp_in[joint] = float(cp0)
        cp_out[joint] = float(cp1)
        return replace(self, segments=SegmentModel(tuple(cp_in), tuple(cp_out)))

    def with_base_offset(self, offset: float) -> "RationalMechanism":
        """Place the base frame origin along axis 0 (model units)."""
        return replace(self, base_offset=float(offset))

    def physical_segments(self, min_length: float = 1e-9) -> list[PhysicalSegment]:
        """Line segments of the physical model: joint pins and straight links.

        A link is the straight segment between its two connection points.
        (Routing links through the common-perpendicular feet instead would
        make collision-freedom unreachable: the feet are fixed by the axes,
        and at flattening configurations of the loop those pieces pass
        through the joint centers regardless of the connection points.)
        """
        n = self.n_joints
        segs: list[PhysicalSegment] = []
        for i, geo in enumerate(self.joints):
            lo, hi = self.segments.bounds(i)
            seg = PhysicalSegment(
                f"joint{i}", "joint", self.joint_body(i), i,
                geo.point_at(lo), geo.point_at(hi),
            )
            if seg.length() > min_length:
                segs.append(seg)
        for i in range(n):
            j = (i + 1) % n
            attach_a = self.joints[i].point_at(self.segments.cp_out[i])
            attach_b = self.joints[j].point_at(self.segments.cp_in[j])
            seg = PhysicalSegment(f"link{i}", "link", i, None, attach_a, attach_b)
            if seg.length() > min_length:
                segs.append(seg)
        return segs

    def link_polylines(self) -> list[list[np.ndarray]]:
        """Designed link shapes for rendering: attachment, both perpendicular
        feet, next attachment (the dash-dotted display geometry)."""
        n = self.n_joints
        out = []
        for i in range(n):
            j = (i + 1) % n
            out.append(
                [
                    self.joints[i].point_at(self.segments.cp_out[i]),
                    self.joints[i].foot_next,
                    self.joints[j].foot_prev,
                    self.joints[j].point_at(self.segments.cp_in[j]),
                ]
            )
        return out

    # -- persistence -----------------------------------------------------------

    def save(self, destination) -> None:
        text = json.dumps(self.to_dict(), indent=1)
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w", encoding="utf-8") as fh:
                fh.write(text)

    def to_dict(self) -> dict:
        curve_rows = self.curve.coeff_rows()
        curve_cols = [[_encode_number(row[k]) for row in curve_rows] for k in range(8)]
        return {
            "version": FILE_VERSION,
            "curve": curve_cols,
            "branch_a": _encode_branch(self.branch_a),
            "branch_b": _encode_branch(self.branch_b),
            "tool": [_encode_number(c) for c in self.tool.coords()],
            "real_cofactor": [_encode_number(c) for c in self.branch_a.real_cofactor.coeffs],
            "connection_points": [
                {"joint": i, "cp0": self.segments.cp_in[i], "cp1": self.segments.cp_out[i]}
                for i in range(self.n_joints)
            ],
            "scale": self.scale,
            "joint_segment_length": self.joint_segment_length,
            "base_offset": self.base_offset,
            "metadata": dict(self.metadata),
        }


def _encode_number(x) -> object:
    if is_exact(x):
        f = Fraction(x)
        return [int(f.numerator), int(f.denominator)]
    return repr(float(x))


def _decode_number(v):
    if isinstance(v, list):
        if len(v) != 2:
            raise ParseError(f"bad rational entry {v!r}")
        num, den = v
        f = Fraction(int(num), int(den))
        return int(f) if f.denominator == 1 else f
    if isinstance(v, str):
        return float(v)
    if isinstance(v, (int, float)):
        return v
    raise ParseError(f"bad numeric entry {v!r}")


def _encode_branch(branch: MotionFactorization) -> list[list]:
    return [[_encode_number(c) for c in f.h.coords()] for f in branch.factors]


def _decode_branch(data, constant, cofactor) -> MotionFactorization:
    factors = tuple(
        LinearFactor.from_h(DualQuaternion.from_coords([_decode_number(c) for c in row]))
        for row in data
    )
    return MotionFactorization(factors, cofactor, constant)


def _axes_coincide(l0: PluckerLine, l1: PluckerLine, tol: float = 1e-8) -> bool:
    g0 = np.asarray(l0.to_float().direction)
    g1 = np.asarray(l1.to_float().direction)
    if np.linalg.norm(np.cross(g0, g1)) > tol:
        return False
    _, _, dist = common_perpendicular(l0, l1)
    return dist < tol


def _branch_products_match(fa: MotionFactorization, fb: MotionFactorization, tol: float) -> float:
    pa = fa.chain_polynomial().to_float()
    pb = fb.chain_polynomial().to_float()
    return max(
        abs(float(x) - float(y))
        for ca, cb in zip(pa.coeffs, pb.coeffs)
        for x, y in zip(ca.coords(), cb.coords())
    ) / max(pa.max_abs(), pb.max_abs(), 1.0)


def assemble(
    factorizations: Sequence[MotionFactorization],
    curve: MotionPolynomial | None = None,
    scale: float = 1.0,
    joint_segment_length: float = DEFAULT_JOINT_SEGMENT_MM,
    metadata: dict | None = None,
    tol: float = 1e-8,
) -> RationalMechanism:
    """Close two factorizations of one curve into a loop.

    The first pair (in stored order) whose products match and whose loop has
    no coincident adjacent axes is used; factorizations that share a leading
    or trailing factor cannot form a loop (their ground or tool joints would
    coincide).
    """
    if len(factorizations) < 2:
        raise FewerThanTwoFactorizations(
            f"a single loop needs two factorizations, got {len(factorizations)}"
        )
    chosen = None
    reason = None
    for i in range(len(factorizations)):
        for j in range(i + 1, len(factorizations)):
            fa, fb = factorizations[i], factorizations[j]
            if len(fa) != len(fb):
                reason = BranchMismatch("branch lengths differ")
                continue
            diff = _branch_products_match(fa, fb, tol)
            if diff > tol:
                reason = BranchMismatch(f"branch products differ by {diff:.3e}")
                continue
            loop = [f.axis for f in list(fa.factors) + list(fb.factors)[::-1]]
            if any(_axes_coincide(loop[k], loop[(k + 1) % len(loop)]) for k in range(len(loop))):
                reason = BranchMismatch("adjacent loop axes coincide for this pair")
                continue
            chosen = (fa, fb)
            break
        if chosen:
            break
    if chosen is None:
        raise reason if reason is not None else FewerThanTwoFactorizations("no usable pair")
    fa, fb = chosen
    if curve is None:
        curve = fa.reconstruct()

    axes = [f.axis.to_float() for f in list(fa.factors) + list(fb.factors)[::-1]]
    n = len(axes)
    joints = []
    for i in range(n):
        f_prev, _, _ = common_perpendicular(axes[i], axes[(i - 1) % n])
        f_next, _, _ = common_perpendicular(axes[i], axes[(i + 1) % n])
        ref = 0.5 * (f_prev + f_next)
        joints.append(
            JointGeometry(
                axis=axes[i],
                direction=np.asarray(axes[i].direction),
                ref_point=ref,
                foot_prev=f_prev,
                foot_next=f_next,
            )
        )
    half = joint_segment_length / scale / 2.0
    segments = SegmentModel(cp_in=tuple([-half] * n), cp_out=tuple([half] * n))
    return RationalMechanism(
        curve=curve,
        branch_a=fa,
        branch_b=fb,
        tool=fa.constant,
        joints=tuple(joints),
        segments=segments,
        scale=float(scale),
        joint_segment_length=float(joint_segment_length),
        metadata=metadata or {},
    )


def load(source) -> RationalMechanism:
    """Read a mechanism file written by `RationalMechanism.save`."""
    try:
        if hasattr(source, "read"):
            data = json.load(source)
        else:
            with open(source, "r", encoding="utf-8") as fh:
                data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read mechanism file: {exc}") from exc
    if not isinstance(data, dict) or "version" not in data:
        raise ParseError("not a mechanism file (missing version)")
    if data["version"] != FILE_VERSION:
        raise FormatVersionMismatch(f"unsupported version {data['version']!r}")
    try:
        curve_cols = data["curve"]
        if len(curve_cols) != 8:
            raise ParseError("curve must hold 8 coordinate arrays")
        n_pow = max(len(col) for col in curve_cols)
        rows = [
            [_decode_number(curve_cols[k][p]) if p < len(curve_cols[k]) else 0 for k in range(8)]
            for p in range(n_pow)
        ]
        curve = MotionPolynomial.from_coeff_rows(rows)
        tool = DualQuaternion.from_coords([_decode_number(c) for c in data["tool"]])
        cofactor = RealPolynomial([_decode_number(c) for c in data["real_cofactor"]])
        fa = _decode_branch(data["branch_a"], tool, cofactor)
        fb = _decode_branch(data["branch_b"], tool, cofactor)
        cps = data["connection_points"]
        scale = float(data["scale"])
        jsl = float(data.get("joint_segment_length", DEFAULT_JOINT_SEGMENT_MM))
        base_offset = float(data.get("base_offset", 0.0))
        metadata = data.get("metadata", {})
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed mechanism file: {exc}") from exc
    validate_pose(tool, 1e-6)
    # the Study identity of the whole curve guards against corrupted entries
    _, dual = curve.norm_parts()
    study_scale = max(curve.max_abs(), 1.0) ** 2
    worst = max((abs(float(c)) for c in dual.coeffs), default=0.0)
    if worst > 1e-6 * study_scale:
        raise StudyViolation(
            f"curve in file violates the Study identity (residual {worst:.3e})"
        )
    mech = assemble([fa, fb], curve=curve, scale=scale, joint_segment_length=jsl, metadata=metadata)
    mech = mech.with_base_offset(base_offset)
    for entry in cps:
        mech = mech.set_connection_points(int(entry["joint"]), float(entry["cp0"]), float(entry["cp1"]))
    return mech
