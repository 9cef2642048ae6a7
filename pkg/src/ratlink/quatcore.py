"""Quaternion and dual-quaternion algebra with Pluecker line geometry.

Scalars are plain Python numbers: ``int``/``fractions.Fraction`` for exact
arithmetic or ``float``.  Exact values are never silently demoted to float;
mixing exact and float operands in one object is the caller's choice and
produces float results.

Conventions
-----------
A rigid displacement is an 8-tuple (p0..p7) read as two quaternions
``a = (p0,p1,p2,p3)`` (primal) and ``b = (p4,p5,p6,p7)`` (dual), with the
dual unit satisfying ``eps**2 = 0``.  Valid displacements satisfy the Study
condition ``dot(a, b) = 0``.  Points and lines embed as
``(1,0,0,0, 0,qx,qy,qz)`` and ``(0,g, 0,gbar)``; a displacement ``p`` acts by

    point:  q  ->  p_eps * q * conj(p)      / (p * conj(p))
    line:   l  ->  p_eps * l * conj(p_eps)  / (p * conj(p))

where ``p_eps = a - eps*b``.  With these conventions ``translation(v)``
moves points by ``+v`` and ``rotation_about_line`` agrees with the standard
rotation matrix of its primal quaternion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    CoincidentPoints,
    DegeneratePose,
    PlueckerViolation,
    StudyViolation,
)

Scalar = Union[int, Fraction, float]

#: default absolute tolerance for float-mode zero tests
DEFAULT_TOL = 1e-9


def is_exact(value: Scalar) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def exact_div(a: Scalar, b: Scalar) -> Scalar:
    """Division that keeps exact operands exact (Fraction) instead of floats."""
    if is_exact(a) and is_exact(b):
        return Fraction(a) / Fraction(b)
    return a / b


def _all_exact(values: Iterable[Scalar]) -> bool:
    return all(is_exact(v) for v in values)


@dataclass(frozen=True, slots=True)
class Quaternion:
    w: Scalar
    x: Scalar
    y: Scalar
    z: Scalar

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        p, q = self, other
        return Quaternion(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def scale(self, s: Scalar) -> "Quaternion":
        return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self) -> Scalar:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def dot(self, other: "Quaternion") -> Scalar:
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z

    @property
    def vec(self) -> tuple[Scalar, Scalar, Scalar]:
        return (self.x, self.y, self.z)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in (self.w, self.x, self.y, self.z))

    def to_float(self) -> "Quaternion":
        return Quaternion(float(self.w), float(self.x), float(self.y), float(self.z))

    @staticmethod
    def zero() -> "Quaternion":
        return Quaternion(0, 0, 0, 0)

    @staticmethod
    def one() -> "Quaternion":
        return Quaternion(1, 0, 0, 0)


@dataclass(frozen=True, slots=True)
class DualQuaternion:
    primal: Quaternion
    dual: Quaternion

    def __mul__(self, other: "DualQuaternion") -> "DualQuaternion":
        # (a + eps b)(c + eps d) = ac + eps(ad + bc); eps^2 = 0
        a, b = self.primal, self.dual
        c, d = other.primal, other.dual
        return DualQuaternion(a * c, a * d + b * c)

    def __add__(self, other: "DualQuaternion") -> "DualQuaternion":
        return DualQuaternion(self.primal + other.primal, self.dual + other.dual)

    def __sub__(self, other: "DualQuaternion") -> "DualQuaternion":
        return DualQuaternion(self.primal - other.primal, self.dual - other.dual)

    def __neg__(self) -> "DualQuaternion":
        return DualQuaternion(-self.primal, -self.dual)

    def scale(self, s: Scalar) -> "DualQuaternion":
        return DualQuaternion(self.primal.scale(s), self.dual.scale(s))

    def conjugate(self) -> "DualQuaternion":
        """Quaternion conjugation of both parts (the star involution)."""
        return DualQuaternion(self.primal.conjugate(), self.dual.conjugate())

    def eps_conjugate(self) -> "DualQuaternion":
        """a + eps b  ->  a - eps b."""
        return DualQuaternion(self.primal, -self.dual)

    def norm_pair(self) -> tuple[Scalar, Scalar]:
        """Return (s, d) with self * conj(self) = s + eps d (always a dual number)."""
        s = self.primal.norm_sq()
        d = 2 * self.primal.dot(self.dual)
        return s, d

    def inverse(self, tol: float = 1e-300) -> "DualQuaternion":
        s, d = self.norm_pair()
        if abs(s) <= tol:
            raise DegeneratePose("dual quaternion with vanishing primal norm has no inverse")
        conj = self.conjugate()
        inv_s = exact_div(1, s)
        # 1/(s + eps d) = 1/s - eps d/s^2
        return DualQuaternion(
            conj.primal.scale(inv_s),
            conj.dual.scale(inv_s) + conj.primal.scale(-d * inv_s * inv_s),
        )

    def coords(self) -> tuple[Scalar, ...]:
        a, b = self.primal, self.dual
        return (a.w, a.x, a.y, a.z, b.w, b.x, b.y, b.z)

    def is_exact(self) -> bool:
        return _all_exact(self.coords())

    def to_float(self) -> "DualQuaternion":
        return DualQuaternion(self.primal.to_float(), self.dual.to_float())

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.primal.is_zero(tol) and self.dual.is_zero(tol)

    def max_abs(self) -> float:
        return max(abs(float(c)) for c in self.coords())

    @staticmethod
    def from_coords(coords: Sequence[Scalar]) -> "DualQuaternion":
        if len(coords) != 8:
            raise ValueError("a dual quaternion needs 8 coordinates")
        return DualQuaternion(Quaternion(*coords[:4]), Quaternion(*coords[4:]))

    @staticmethod
    def zero() -> "DualQuaternion":
        return DualQuaternion(Quaternion.zero(), Quaternion.zero())

    @staticmethod
    def one() -> "DualQuaternion":
        return DualQuaternion(Quaternion.one(), Quaternion.zero())


# A pose is a dual quaternion whose coordinates satisfy the Study condition;
# `pose_from_coords` is the validating constructor.
Pose = DualQuaternion


def study_condition(p: DualQuaternion) -> Scalar:
    """dot(a, b); zero (within tolerance) iff p represents a rigid displacement."""
    return p.primal.dot(p.dual)


def pose_from_coords(coords: Sequence[Scalar], tol: float = DEFAULT_TOL) -> Pose:
    p = DualQuaternion.from_coords(coords)
    return validate_pose(p, tol)


def validate_pose(p: DualQuaternion, tol: float = DEFAULT_TOL) -> Pose:
    if p.primal.is_zero(tol if not p.is_exact() else 0):
        raise StudyViolation("pose has zero primal part")
    scale = max(p.max_abs(), 1.0)
    if abs(float(study_condition(p))) > tol * scale * scale:
        raise StudyViolation(f"Study condition violated: dot(a, b) = {float(study_condition(p))}")
    return p


@dataclass(frozen=True, slots=True)
class Point3:
    x: Scalar
    y: Scalar
    z: Scalar

    def coords(self) -> tuple[Scalar, Scalar, Scalar]:
        return (self.x, self.y, self.z)

    def to_float(self) -> "Point3":
        return Point3(float(self.x), float(self.y), float(self.z))


def _dot3(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _cross3(u: Sequence[Scalar], v: Sequence[Scalar]) -> tuple[Scalar, Scalar, Scalar]:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


@dataclass(frozen=True, slots=True)
class PluckerLine:
    """A line as (direction g, moment gbar) with dot(g, gbar) = 0.

    Float-mode lines are normalized to unit direction at construction; exact
    lines keep their raw integer/rational coordinates.
    """

    direction: tuple[Scalar, Scalar, Scalar]
    moment: tuple[Scalar, Scalar, Scalar]

    def __post_init__(self):
        g, m = self.direction, self.moment
        exact = _all_exact(g) and _all_exact(m)
        norm_sq = _dot3(g, g)
        if (exact and norm_sq == 0) or (not exact and float(norm_sq) < 1e-300):
            raise PlueckerViolation("line direction must be nonzero")
        cond = _dot3(g, m)
        if exact:
            if cond != 0:
                raise PlueckerViolation(f"Pluecker condition violated exactly: {cond}")
        else:
            scale = max(float(norm_sq), float(_dot3(m, m)), 1.0)
            if abs(float(cond)) > DEFAULT_TOL * scale:
                raise PlueckerViolation(f"Pluecker condition violated: {float(cond)}")
            n = math.sqrt(float(norm_sq))
            object.__setattr__(self, "direction", tuple(float(c) / n for c in g))
            object.__setattr__(self, "moment", tuple(float(c) / n for c in m))

    def is_exact(self) -> bool:
        return _all_exact(self.direction) and _all_exact(self.moment)

    def to_float(self) -> "PluckerLine":
        return PluckerLine(tuple(float(c) for c in self.direction), tuple(float(c) for c in self.moment))

    def anchor(self) -> Point3:
        """The point on the line closest to the origin: cross(g, gbar) / |g|^2."""
        g, m = self.direction, self.moment
        n = _dot3(g, g)
        c = _cross3(g, m)
        if _all_exact(c) and is_exact(n):
            n = Fraction(n)
            return Point3(Fraction(c[0]) / n, Fraction(c[1]) / n, Fraction(c[2]) / n)
        return Point3(c[0] / n, c[1] / n, c[2] / n)

    def point_at(self, s: Scalar) -> Point3:
        a = self.anchor()
        g = self.direction
        return Point3(a.x + s * g[0], a.y + s * g[1], a.z + s * g[2])


def embed_point(q: Point3) -> DualQuaternion:
    return DualQuaternion(Quaternion.one(), Quaternion(0, q.x, q.y, q.z))


def extract_point(p: DualQuaternion, tol: float = DEFAULT_TOL) -> Point3:
    w = p.primal.w
    if abs(float(w)) <= tol * max(p.max_abs(), 1.0):
        raise DegeneratePose("embedded point has vanishing leading coordinate")
    return Point3(exact_div(p.dual.x, w), exact_div(p.dual.y, w), exact_div(p.dual.z, w))


def embed_line(l: PluckerLine) -> DualQuaternion:
    g, m = l.direction, l.moment
    return DualQuaternion(Quaternion(0, *g), Quaternion(0, *m))


def act_on_point(p: Pose, q: Point3, tol: float = DEFAULT_TOL) -> Point3:
    """Apply the displacement p to a Euclidean point."""
    s, d = p.norm_pair()
    if abs(float(s)) <= tol * max(p.max_abs(), 1.0) ** 2:
        raise DegeneratePose("p * conj(p) has vanishing primal part")
    r = p.eps_conjugate() * embed_point(q) * p.conjugate()
    # divide by the dual number s + eps d
    primal = r.primal.scale(exact_div(1, s))
    dual = (r.dual.scale(s) - r.primal.scale(d)).scale(exact_div(1, s * s))
    return extract_point(DualQuaternion(primal, dual), tol)


def act_on_line(p: Pose, l: PluckerLine, tol: float = DEFAULT_TOL) -> PluckerLine:
    """Apply the displacement p to a line."""
    s, _ = p.norm_pair()
    if abs(float(s)) <= tol * max(p.max_abs(), 1.0) ** 2:
        raise DegeneratePose("p * conj(p) has vanishing primal part")
    pe = p.eps_conjugate()
    r = pe * embed_line(l) * pe.conjugate()
    inv = exact_div(1, s)
    g = tuple(c * inv for c in r.primal.vec)
    m = tuple(c * inv for c in r.dual.vec)
    return PluckerLine(g, m)


def line_from_two_points(q1: Point3, q2: Point3) -> PluckerLine:
    g = (q2.x - q1.x, q2.y - q1.y, q2.z - q1.z)
    exact = _all_exact(g)
    if (exact and all(c == 0 for c in g)) or (not exact and math.sqrt(float(_dot3(g, g))) < 1e-14):
        raise CoincidentPoints("cannot span a line through coincident points")
    m = _cross3(q1.coords(), g)
    return PluckerLine(g, m)


def line_intersection_condition(l0: PluckerLine, l1: PluckerLine) -> Scalar:
    """Reciprocal product g0.gbar1 + gbar0.g1; zero iff the lines are coplanar."""
    return _dot3(l0.direction, l1.moment) + _dot3(l0.moment, l1.direction)


def translation(v: Sequence[Scalar]) -> Pose:
    """Displacement moving every point by +v."""
    half = [exact_div(c, 2) for c in v]
    return DualQuaternion(Quaternion.one(), Quaternion(0, -half[0], -half[1], -half[2]))


def rotation_about_line(l: PluckerLine, angle: float) -> Pose:
    """Rotation by `angle` about a (float) line, following the action convention."""
    lf = l.to_float()
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    n = lf.direction
    anchor = lf.anchor()
    rvec = (s * n[0], s * n[1], s * n[2])
    # dual part of T_q R T_{-q} is (0, rvec x q); the axis moment is q x rvec
    dual_vec = _cross3(rvec, anchor.coords())
    return DualQuaternion(Quaternion(c, *rvec), Quaternion(0.0, *dual_vec))
