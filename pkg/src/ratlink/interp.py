"""Rational motion interpolation of two, three, or four poses.

The curve is sought in Lagrange form with the first pose placed at t = inf:

    C(t) = ell(t) + sum_i  lam_i * ell_i(t) * q_i,     q_i = p0^-1 * p_i,

where ell has the finite interpolation nodes as roots and ell_i omits node i.
Two and three poses lead to closed-form solves.  Four poses are handled via
the pencil structure of cubics through four displacements: for admissible
third nodes x the cubics through all four poses form a pencil spanned by two
reducible members

    R1 = (t - t1) * [quadratic through q2@t2, q3@x]
    R2 = (t - t2) * [quadratic through q1@t1, q3@x]

and a combination R1 + mu R2 lies on the Study quadric for all t iff the
mixed bilinear Study form of (R1, R2) vanishes identically, which pins x to
the roots of a resolvent polynomial (built here by exact sampling and
interpolation).  Within the pencil the returned member is the unique
nondegenerate curve containing a slide-free half-turn; the output is
reparametrized so that the half-turn sits at t = 0 and the second pose at
t = 1/2, with nodes increasing when an increasing branch exists.

All computations run in exact rational arithmetic while the data allows it;
irrational resolvent roots demote the affected branch to floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegenerateConfiguration, NoCubicInterpolant
from .motionpoly import MotionPolynomial, monic_linear
from .quatcore import (
    DualQuaternion,
    Quaternion,
    Scalar,
    exact_div,
    is_exact,
    validate_pose,
)
from .realpoly import RealPolynomial, count_real_roots, real_roots

VERIFY_TOL = 1e-8


@dataclass(frozen=True)
class InterpolationResult:
    curve: MotionPolynomial
    node_params: tuple[Scalar, ...]  # math.inf for the pose at infinity


@dataclass(frozen=True)
class InterpolationReport:
    max_pose_residual: float
    study_residual: float
    pose_residuals: tuple[float, ...]


def _proj_distinct(p: DualQuaternion, q: DualQuaternion, tol: float = 1e-9) -> bool:
    pc = [float(c) for c in p.coords()]
    qc = [float(c) for c in q.coords()]
    dot = sum(a * b for a, b in zip(pc, qc))
    np_ = sum(a * a for a in pc)
    nq = sum(b * b for b in qc)
    return np_ * nq - dot * dot > tol * np_ * nq


def _as_dq(pose) -> DualQuaternion:
    if isinstance(pose, DualQuaternion):
        return pose
    return DualQuaternion.from_coords(list(pose))


def evaluate_at(curve: MotionPolynomial, t: Scalar) -> DualQuaternion:
    """Curve value; the node at infinity maps to the leading coefficient."""
    if t == math.inf or t == -math.inf:
        return curve.leading()
    return curve.evaluate(t)


def _pose_residual(value: DualQuaternion, pose: DualQuaternion) -> float:
    v = [float(c) for c in value.coords()]
    p = [float(c) for c in pose.coords()]
    nv = math.sqrt(sum(c * c for c in v))
    npo = math.sqrt(sum(c * c for c in p))
    if nv == 0.0:
        return math.inf
    v = [c / nv * npo for c in v]
    dot = sum(a * b for a, b in zip(v, p))
    lam = dot / (npo * npo)
    err = math.sqrt(sum((a - lam * b) ** 2 for a, b in zip(v, p)))
    return err / npo


def verify_interpolation(result: InterpolationResult, poses: Sequence) -> InterpolationReport:
    """Projective residuals at the nodes plus the Study-identity residual."""
    dqs = [_as_dq(p) for p in poses]
    residuals = tuple(
        _pose_residual(evaluate_at(result.curve, t), p)
        for t, p in zip(result.node_params, dqs)
    )
    _, dual = result.curve.norm_parts()
    scale = max(result.curve.max_abs(), 1.0) ** 2
    study = max((abs(float(c)) for c in dual.coeffs), default=0.0) / scale
    return InterpolationReport(max(residuals), study, residuals)


# ---------------------------------------------------------------------------
# small exact/float polynomial helpers (dual-quaternion coefficient rows)


def _linear(t0: Scalar) -> MotionPolynomial:
    """t - t0 (real)."""
    return MotionPolynomial(
        [DualQuaternion.from_coords((-t0, 0, 0, 0, 0, 0, 0, 0)), DualQuaternion.one()]
    )


def _mixed_study_form(P: MotionPolynomial, Q: MotionPolynomial) -> RealPolynomial:
    """Dual scalar part of P Q* + Q P*, the bilinear form of the Study identity."""
    prod = P * Q.conjugate() + Q * P.conjugate()
    return RealPolynomial([c.dual.w for c in prod.coeffs])


def _coordinate_poly(C: MotionPolynomial, idx: int) -> RealPolynomial:
    return RealPolynomial([c.coords()[idx] for c in C.coeffs])


def compose_affine(C: MotionPolynomial, alpha: Scalar, beta: Scalar) -> MotionPolynomial:
    """C(alpha * s + beta) as a polynomial in s."""
    lin = RealPolynomial([beta, alpha])
    out = MotionPolynomial([C.coeffs[-1]])
    for c in reversed(C.coeffs[:-1]):
        out = out.scale_real_poly(lin) + MotionPolynomial([c])
    return out


# ---------------------------------------------------------------------------
# quadratic through (identity@inf, qa@ta, qb@tb)


def _quadratic_through(qa, qb, ta, tb):
    """Unique nondegenerate quadratic motion, or None if it does not exist.

    Returns (curve, lam_a, lam_b).
    """
    ell = _linear(ta) * _linear(tb)
    base_a = MotionPolynomial([qa]).scale_real_poly(RealPolynomial([-tb, 1]))
    base_b = MotionPolynomial([qb]).scale_real_poly(RealPolynomial([-ta, 1]))

    # psi(la, lb) = la^2 psi_aa + la lb psi_ab + lb^2 psi_bb + la psi_a + lb psi_b
    # with psi_* real polynomials divisible by ell; the quotients are linear.
    def quot(p: RealPolynomial) -> RealPolynomial:
        q, r = p.divmod(RealPolynomial([c.primal.w for c in ell.coeffs]))
        if max((abs(float(c)) for c in r.coeffs), default=0.0) > 1e-9 * max(
            1.0, max((abs(float(c)) for c in p.coeffs), default=0.0)
        ):
            raise DegenerateConfiguration("Study form not divisible by node polynomial")
        return q

    psi_aa = quot(_mixed_study_form(base_a, base_a).scale(exact_div(1, 2)))
    psi_bb = quot(_mixed_study_form(base_b, base_b).scale(exact_div(1, 2)))
    psi_ab = quot(_mixed_study_form(base_a, base_b))
    psi_a = quot(_mixed_study_form(ell, base_a))
    psi_b = quot(_mixed_study_form(ell, base_b))

    # two linear-in-t coefficient equations; unknowns la, lb
    def coeff(p: RealPolynomial, k: int) -> Scalar:
        return p.coeffs[k] if p.degree >= k else 0

    a = [
        (coeff(psi_aa, k), coeff(psi_ab, k), coeff(psi_bb, k), coeff(psi_a, k), coeff(psi_b, k))
        for k in (1, 0)
    ]
    # top equation is linear: quadratic parts of the t^1 coefficient vanish
    # structurally; solve la/lb ratio from it, then scale from the other.
    (q20, q11, q02, L1a, L1b) = a[0]
    (p20, p11, p02, p1a, p1b) = a[1]
    scale = max(
        [abs(float(v)) for v in (q20, q11, q02, L1a, L1b, p20, p11, p02, p1a, p1b)] + [1.0]
    )
    if max(abs(float(q20)), abs(float(q11)), abs(float(q02))) > 1e-9 * scale:
        # not linear after all: fall back to resultant over the two conics
        raise DegenerateConfiguration("unexpected nonlinear node equation")
    if abs(float(L1b)) >= abs(float(L1a)):
        if abs(float(L1b)) <= 1e-12 * scale:
            raise DegenerateConfiguration("pitch coupling vanishes for both poses")
        # la free: lb = -L1a/L1b la
        kappa = -exact_div(L1a, L1b)
        qa2 = p20 + p11 * kappa + p02 * kappa * kappa
        qa1 = p1a + p1b * kappa
        if abs(float(qa2)) <= 1e-14 * max(1.0, abs(float(qa1))):
            return None
        la = -exact_div(qa1, qa2)
        lb = kappa * la
    else:
        kappa = -exact_div(L1b, L1a)
        qb2 = p02 + p11 * kappa + p20 * kappa * kappa
        qb1 = p1b + p1a * kappa
        if abs(float(qb2)) <= 1e-14 * max(1.0, abs(float(qb1))):
            return None
        lb = -exact_div(qb1, qb2)
        la = kappa * lb
    if abs(float(la)) < 1e-13 or abs(float(lb)) < 1e-13:
        return None
    curve = ell + base_a.scale_scalar(la) + base_b.scale_scalar(lb)
    return curve, la, lb


# ---------------------------------------------------------------------------
# four poses: pencil of cubics


def _reducible_pair(q1, q2, q3, t1, t2, x):
    """R1 = (t-t1) Q(q2@t2, q3@x), R2 = (t-t2) Q(q1@t1, q3@x); None if degenerate."""
    qa = _quadratic_through(q2, q3, t2, x)
    qb = _quadratic_through(q1, q3, t1, x)
    if qa is None or qb is None:
        return None
    return _linear(t1) * qa[0], _linear(t2) * qb[0]


def _pencil_residual_coeffs(q1, q2, q3, t1, t2, x):
    """Coefficients of the mixed Study form of (R1, R2) after removing the
    guaranteed roots t1, t2, x.  All three must vanish for a valid x."""
    pair = _reducible_pair(q1, q2, q3, t1, t2, x)
    if pair is None:
        return None
    R1, R2 = pair
    mixed = _mixed_study_form(R1, R2)
    known = RealPolynomial([-t1, 1]) * RealPolynomial([-t2, 1]) * RealPolynomial([-x, 1])
    quo, rem = mixed.divmod(known)
    scale = max((abs(float(c)) for c in mixed.coeffs), default=1.0)
    if max((abs(float(c)) for c in rem.coeffs), default=0.0) > 1e-8 * max(scale, 1.0):
        return None
    cs = list(quo.coeffs) + [0, 0, 0]
    return cs[:3]


def _fit_exact_poly(samples: list[tuple[Scalar, Scalar]]) -> RealPolynomial:
    """Exact Vandermonde interpolation through (x_i, y_i) (Fraction arithmetic)."""
    n = len(samples)
    A = [[Fraction(1)] * n for _ in range(n)]
    y = []
    for i, (xi, yi) in enumerate(samples):
        xf = Fraction(xi)
        acc = Fraction(1)
        for j in range(n):
            A[i][j] = acc
            acc *= xf
        y.append(Fraction(yi))
    # Gaussian elimination with partial pivoting over Q
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        if A[piv][col] == 0:
            continue
        A[col], A[piv] = A[piv], A[col]
        y[col], y[piv] = y[piv], y[col]
        inv = Fraction(1) / A[col][col]
        for r in range(col + 1, n):
            f = A[r][col] * inv
            if f == 0:
                continue
            for c in range(col, n):
                A[r][c] -= f * A[col][c]
            y[r] -= f * y[col]
    coeffs = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        if A[r][r] == 0:
            continue
        s = y[r] - sum(A[r][c] * coeffs[c] for c in range(r + 1, n))
        coeffs[r] = s / A[r][r]
    return RealPolynomial(coeffs)


_FIT_DEGREE = 14


def _branch_polynomials(q1, q2, q3, t1, t2):
    """The three residual-coefficient polynomials r_j(x) by exact sampling."""
    samples: list[tuple[Fraction, tuple]] = []
    cand = []
    for k in range(2, 60):
        cand.extend([Fraction(k), Fraction(-k), Fraction(2 * k + 1, 2), Fraction(-2 * k - 1, 2)])
    for xs in cand:
        if xs == t1 or xs == t2:
            continue
        try:
            cs = _pencil_residual_coeffs(q1, q2, q3, t1, t2, xs)
        except DegenerateConfiguration:
            cs = None
        if cs is None:
            continue
        samples.append((xs, cs))
        if len(samples) >= _FIT_DEGREE + 1:
            break
    if len(samples) < _FIT_DEGREE + 1:
        raise DegenerateConfiguration("could not sample the node resolvent")
    polys = []
    for j in range(3):
        pts = [(xs, Fraction(cs[j])) for xs, cs in samples]
        polys.append(_fit_exact_poly(pts))
    return polys


def _branch_roots_scan(q1, q2, q3, t1, t2) -> list[float]:
    """Float path: admissible third nodes by scanning the resolvent residual.

    Evaluates the residual vector on a tangent-spaced grid, bisects sign
    changes of its dominant component and keeps roots where all components
    vanish.  Avoids fitting a monomial representation, which would amplify
    float sampling noise.
    """

    def resid(x):
        try:
            cs = _pencil_residual_coeffs(q1, q2, q3, t1, t2, x)
        except DegenerateConfiguration:
            return None
        return None if cs is None else [float(c) for c in cs]

    grid = [math.tan(-math.pi / 2 + math.pi * (i + 0.5) / 4000) for i in range(4000)]
    vals = [resid(x) for x in grid]
    scale = max((max(abs(c) for c in v) for v in vals if v is not None), default=0.0)
    if scale == 0.0:
        raise DegenerateConfiguration("node resolvent vanishes identically")
    # dominant component: largest typical magnitude
    comp = max(range(3), key=lambda j: sorted(abs(v[j]) for v in vals if v is not None)[len([v for v in vals if v is not None]) // 2])
    roots = []
    for (x0, v0), (x1, v1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if v0 is None or v1 is None:
            continue
        f0, f1 = v0[comp], v1[comp]
        if f0 == 0.0:
            roots.append(x0)
            continue
        if f0 * f1 >= 0.0:
            continue
        a, b, fa = x0, x1, f0
        for _ in range(80):
            m = 0.5 * (a + b)
            vm = resid(m)
            fm = vm[comp] if vm is not None else None
            if fm is None or b - a < 1e-14 * max(1.0, abs(m)):
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    out = []
    for x in roots:
        v = resid(x)
        if v is None:
            continue
        if max(abs(c) for c in v) <= 1e-6 * scale:
            if not any(abs(x - y) < 1e-9 * max(1.0, abs(x)) for y in out):
                out.append(x)
    return out


def _real_roots_maybe_exact(p: RealPolynomial, exact: bool) -> list[Scalar]:
    if not exact:
        return real_roots(p.to_float())
    import sympy

    t = sympy.Symbol("t")
    poly = sympy.Poly([sympy.Rational(Fraction(c)) for c in reversed(p.coeffs)], t)
    if poly.degree() <= 0:
        return []
    out: list[Scalar] = []
    for r in poly.real_roots():
        if r.is_rational:
            out.append(Fraction(str(sympy.Rational(r))))
        else:
            out.append(float(r.evalf(20)))
    return out


def _half_turn_members(R1, R2, exact):
    """(mu, c) pairs where R1 + mu R2 has a slide-free half-turn at t = c."""
    w = _coordinate_poly(R1, 0) * _coordinate_poly(R2, 4) - _coordinate_poly(
        R1, 4
    ) * _coordinate_poly(R2, 0)
    out = []
    scale1 = max(R1.max_abs(), 1.0)
    scale2 = max(R2.max_abs(), 1.0)
    for c in _real_roots_maybe_exact(w, exact):
        v20 = _coordinate_poly(R2, 0)(c)
        v24 = _coordinate_poly(R2, 4)(c)
        v10 = _coordinate_poly(R1, 0)(c)
        v14 = _coordinate_poly(R1, 4)(c)
        if abs(float(v20)) > 1e-9 * scale2 and abs(float(v20)) >= abs(float(v24)):
            mu = -exact_div(v10, v20)
        elif abs(float(v24)) > 1e-9 * scale2:
            mu = -exact_div(v14, v24)
        else:
            continue
        # consistency: both scalar coordinates vanish
        if abs(float(v10 + mu * v20)) > 1e-6 * scale1 or abs(float(v14 + mu * v24)) > 1e-6 * scale1:
            continue
        out.append((mu, c))
    return out


def _interp4(q1, q2, q3, tol):
    t1, t2 = 0, 1
    exact = all(q.is_exact() for q in (q1, q2, q3))
    candidates: list[Scalar] = []
    if exact:
        rjs = _branch_polynomials(q1, q2, q3, t1, t2)
        lead = max(rjs, key=lambda p: p.degree if not p.is_zero() else -1)
        if lead.is_zero():
            raise DegenerateConfiguration("node resolvent vanishes identically")
        for x in _real_roots_maybe_exact(lead, True):
            if abs(float(x) - t1) < 1e-9 or abs(float(x) - t2) < 1e-9:
                continue
            ok = True
            for p in rjs:
                if p is lead or p.is_zero():
                    continue
                scale = max((abs(float(c)) for c in p.coeffs), default=1.0)
                if abs(float(p.to_float()(float(x)))) > 1e-6 * max(scale, 1.0):
                    ok = False
                    break
            if ok:
                candidates.append(x)
    else:
        candidates = [
            x
            for x in _branch_roots_scan(q1, q2, q3, t1, t2)
            if abs(x - t1) > 1e-9 and abs(x - t2) > 1e-9
        ]
    if not candidates:
        raise NoCubicInterpolant("no admissible third node over the reals")

    members = []
    for x in candidates:
        pair = _reducible_pair(q1, q2, q3, t1, t2, x)
        if pair is None:
            continue
        R1, R2 = pair
        for mu, c in _half_turn_members(R1, R2, exact and is_exact(x)):
            C = R1 + R2.scale_scalar(mu)
            if C.degree != 3:
                continue
            lead_w = C.leading().primal.w
            if abs(float(lead_w)) < 1e-9:
                continue
            # weights at the four nodes must all be nonzero (no base points)
            lam_ok = True
            for t_i, q_i in ((t1, q1), (t2, q2), (x, q3)):
                v = C.evaluate(t_i)
                nq = sum(float(cc) ** 2 for cc in q_i.coords())
                lam = sum(float(a) * float(b) for a, b in zip(v.coords(), q_i.coords())) / nq
                if abs(lam) < 1e-9 * max(C.max_abs(), 1.0):
                    lam_ok = False
                    break
            if not lam_ok:
                continue
            members.append((x, mu, c, C))
    if not members:
        raise NoCubicInterpolant("no nondegenerate half-turn member in any pencil")

    def rank(m):
        x, mu, c, C = m
        ordered = 0 if float(x) > float(t2) else 1
        try:
            nu = C.norm_polynomial(1e-6)
            rootless = 0 if count_real_roots(nu.to_float()) == 0 else 1
        except Exception:
            rootless = 1
        return (rootless, ordered, abs(float(x)), abs(float(mu)))

    members.sort(key=rank)
    x, mu, c, C = members[0]
    if rank(members[0])[0] == 1:
        raise NoCubicInterpolant("every interpolant has a real norm root")

    # reparametrize: half-turn to 0, second finite pose to 1/2
    alpha = 2 * (t2 - c)
    if abs(float(alpha)) < 1e-9:
        alpha = 1
    Cn = compose_affine(C, alpha, c)
    lw = Cn.leading().primal.w
    Cn = Cn.scale_scalar(exact_div(1, lw))
    nodes = [exact_div(t_i - c, alpha) for t_i in (t1, t2, x)]
    return Cn, nodes


# ---------------------------------------------------------------------------


def _interp2(q1, tol):
    bw = q1.dual.w
    scale = max(q1.max_abs(), 1.0)
    if abs(float(bw)) > 1e-9 * scale:
        raise DegenerateConfiguration(
            "relative displacement has translation along its axis; no single "
            "revolute joint connects the two poses"
        )
    av = q1.primal.vec
    norm2 = sum(float(c) ** 2 for c in av)
    if norm2 < (1e-9 * scale) ** 2:
        raise DegenerateConfiguration("relative displacement is a pure translation")
    h = DualQuaternion(Quaternion(0, *av), Quaternion(0, *q1.dual.vec))
    if not h.is_exact():
        n = math.sqrt(norm2)
        h = h.scale(1.0 / n)
        node = -float(q1.primal.w) / n
    else:
        node = -q1.primal.w
    return monic_linear(h), [node]


def _interp3(q1, q2, tol):
    res = _quadratic_through(q1, q2, 0, 1)
    if res is None:
        raise NoCubicInterpolant("no quadratic motion through the three poses")
    return res[0], [0, 1]


def interpolate_poses(poses: Sequence, tol: float = 1e-9) -> InterpolationResult:
    """Interpolate 2..4 poses by a rational motion (first pose at t = inf).

    The first pose need not be the identity: inputs are pre-multiplied by its
    inverse and the solution is post-multiplied back, making the construction
    equivariant under left displacement of all poses.
    """
    if not 2 <= len(poses) <= 4:
        raise ValueError("interpolation supports 2 to 4 poses")
    dqs = [validate_pose(_as_dq(p), tol) for p in poses]
    for i in range(len(dqs)):
        for j in range(i + 1, len(dqs)):
            if not _proj_distinct(dqs[i], dqs[j]):
                raise DegenerateConfiguration(f"poses {i} and {j} coincide projectively")
    p0 = dqs[0]
    p0_inv = p0.inverse()
    rel = [p0_inv * p for p in dqs[1:]]

    if len(rel) == 1:
        curve, nodes = _interp2(rel[0], tol)
    elif len(rel) == 2:
        curve, nodes = _interp3(rel[0], rel[1], tol)
    else:
        curve, nodes = _interp4(rel[0], rel[1], rel[2], tol)

    curve = MotionPolynomial([p0 * c for c in curve.coeffs])
    result = InterpolationResult(curve, tuple([math.inf] + list(nodes)))
    report = verify_interpolation(result, poses)
    if report.max_pose_residual > VERIFY_TOL or report.study_residual > VERIFY_TOL:
        raise NoCubicInterpolant(
            f"interpolant failed verification: pose residual "
            f"{report.max_pose_residual:.2e}, Study residual {report.study_residual:.2e}"
        )
    return result
