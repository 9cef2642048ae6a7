"""Polynomials with dual-quaternion coefficients and their factorization into
revolute-joint factors.

A motion polynomial C(t) satisfies the Study condition identically: the dual
part of C(t) C*(t) vanishes for all t, leaving a real norm polynomial nu(t).
Writing nu as a product of monic quadratics M_1 ... M_n (one per degree of C)
and extracting, for each quadratic in a chosen order, the unique root of the
linear remainder C mod M, peels off monic linear factors (t - h) whose
one-parameter motions are revolute rotations.

Curves need not be monic: a degree-0 quotient remains after extracting
deg(C) factors.  It is the pose of the motion at t = infinity and is stored
on the factorization as `constant`; the stored factors are conjugated so that

    (t - h_1) ... (t - h_n) * constant * real_cofactor(t) = C(t).

The leftmost factor is then the joint fixed in the base frame.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    NonGenericRemainder,
    NonInvertibleLeadingCoefficient,
    NotAMotionPolynomial,
    NotFactorableOverRationals,
    TranslationalFactor,
)
from .quatcore import (
    DualQuaternion,
    PluckerLine,
    Quaternion,
    Scalar,
    exact_div,
    is_exact,
)
from .realpoly import RealPolynomial, quadratic_real_factors

#: relative threshold on the primal norm below which a coefficient counts as
#: non-invertible
INVERTIBILITY_RTOL = 1e-12


class MotionPolynomial:
    """Polynomial in one real parameter with dual-quaternion coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[DualQuaternion]):
        cs = list(coeffs) if coeffs else [DualQuaternion.zero()]
        while len(cs) > 1 and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def from_coeff_rows(rows: Sequence[Sequence[Scalar]]) -> "MotionPolynomial":
        return MotionPolynomial([DualQuaternion.from_coords(r) for r in rows])

    def coeff_rows(self) -> list[tuple[Scalar, ...]]:
        return [c.coords() for c in self.coeffs]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.coeffs)

    def to_float(self) -> "MotionPolynomial":
        return MotionPolynomial([c.to_float() for c in self.coeffs])

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.coeffs)

    def evaluate(self, t: Scalar) -> DualQuaternion:
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc.scale(t) + c
        return acc

    def leading(self) -> DualQuaternion:
        return self.coeffs[-1]

    def __mul__(self, other: "MotionPolynomial") -> "MotionPolynomial":
        out = [DualQuaternion.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return MotionPolynomial(out)

    def __add__(self, other: "MotionPolynomial") -> "MotionPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [DualQuaternion.zero()] * (n - len(self.coeffs))
        b = list(other.coeffs) + [DualQuaternion.zero()] * (n - len(other.coeffs))
        return MotionPolynomial([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "MotionPolynomial") -> "MotionPolynomial":
        return self + other.scale_scalar(-1)

    def scale_scalar(self, s: Scalar) -> "MotionPolynomial":
        return MotionPolynomial([c.scale(s) for c in self.coeffs])

    def scale_real_poly(self, p: RealPolynomial) -> "MotionPolynomial":
        out = [DualQuaternion.zero()] * (len(self.coeffs) + p.degree)
        for i, c in enumerate(self.coeffs):
            for j, s in enumerate(p.coeffs):
                out[i + j] = out[i + j] + c.scale(s)
        return MotionPolynomial(out)

    def conjugate(self) -> "MotionPolynomial":
        return MotionPolynomial([c.conjugate() for c in self.coeffs])

    def norm_parts(self) -> tuple[RealPolynomial, RealPolynomial]:
        """(primal, dual) scalar polynomials of C(t) C*(t).

        Both parts are scalar multiples of 1 by construction; the motion
        polynomial property is the vanishing of the dual part.
        """
        prod = self * self.conjugate()
        primal = RealPolynomial([c.primal.w for c in prod.coeffs])
        dual = RealPolynomial([c.dual.w for c in prod.coeffs])
        return primal, dual

    def norm_polynomial(self, tol: float = 1e-9) -> RealPolynomial:
        primal, dual = self.norm_parts()
        scale = max((abs(float(c)) for c in primal.coeffs), default=1.0)
        bad = max((abs(float(c)) for c in dual.coeffs), default=0.0)
        if bad > tol * max(scale, 1.0):
            raise NotAMotionPolynomial(
                f"dual part of C C* has coefficient {bad:.3e} (scale {scale:.3e})"
            )
        return primal

    def __repr__(self):
        return f"MotionPolynomial(degree={self.degree})"


def _invertible(c: DualQuaternion, scale: float) -> bool:
    return float(c.primal.norm_sq()) > INVERTIBILITY_RTOL * scale * scale


def right_divide(
    C: MotionPolynomial, D: MotionPolynomial
) -> tuple[MotionPolynomial, MotionPolynomial]:
    """Quotient and remainder with C = Q * D + R, deg R < deg D.

    The quotient multiplies D from the left, matching the factor order used
    throughout (factors act on the right of the accumulated product).
    """
    scale = max(D.max_abs(), 1.0)
    dl = D.leading()
    if not _invertible(dl, scale):
        raise NonInvertibleLeadingCoefficient("leading coefficient has ~zero primal norm")
    dl_inv = dl.inverse()
    rem = list(C.coeffs)
    dn = D.degree
    qn = max(len(rem) - dn, 1)
    quot = [DualQuaternion.zero()] * qn
    for k in range(len(rem) - 1, dn - 1, -1):
        q = rem[k] * dl_inv
        quot[k - dn] = q
        for j in range(dn + 1):
            rem[k - dn + j] = rem[k - dn + j] - q * D.coeffs[j]
    return MotionPolynomial(quot), MotionPolynomial(rem[:dn] if dn else [DualQuaternion.zero()])


def divide_real_quadratic(
    C: MotionPolynomial, b: Scalar, c: Scalar
) -> tuple[MotionPolynomial, MotionPolynomial]:
    """Divide by the real monic quadratic t^2 + b t + c (central, so one-sided)."""
    rem = list(C.coeffs)
    q = [DualQuaternion.zero()] * max(len(rem) - 2, 1)
    for k in range(len(rem) - 1, 1, -1):
        f = rem[k]
        q[k - 2] = f
        rem[k] = rem[k] - f
        rem[k - 1] = rem[k - 1] - f.scale(b)
        rem[k - 2] = rem[k - 2] - f.scale(c)
    return MotionPolynomial(q), MotionPolynomial(rem[:2])


def monic_linear(h: DualQuaternion) -> MotionPolynomial:
    return MotionPolynomial([-h, DualQuaternion.one()])


def axis_of_factor(h: DualQuaternion, tol: float = 1e-9) -> PluckerLine:
    """Fixed axis of the one-parameter motion t -> (t - h).

    Direction is the primal vector part.  Under the action convention used
    here a rotation about the line through q with rotation vector v carries
    dual part (0, v x q), so the Pluecker moment (q x v) is the *negated*
    dual vector part; the component violating the Pluecker condition (zero
    in theory, tiny in floats) is projected out.
    """
    g = h.primal.vec
    gn = g[0] * g[0] + g[1] * g[1] + g[2] * g[2]
    if float(gn) <= tol * max(h.max_abs(), 1.0) ** 2:
        raise TranslationalFactor("factor has no rotational part")
    m = tuple(-c for c in h.dual.vec)
    dot = g[0] * m[0] + g[1] * m[1] + g[2] * m[2]
    corr = exact_div(dot, gn)
    m = (m[0] - corr * g[0], m[1] - corr * g[1], m[2] - corr * g[2])
    return PluckerLine(g, m)


@dataclass(frozen=True)
class LinearFactor:
    """Monic linear factor t - h with its cached revolute axis."""

    h: DualQuaternion
    axis: PluckerLine

    @staticmethod
    def from_h(h: DualQuaternion) -> "LinearFactor":
        return LinearFactor(h, axis_of_factor(h))

    def polynomial(self) -> MotionPolynomial:
        return monic_linear(self.h)

    def norm_quadratic(self) -> tuple[Scalar, Scalar]:
        """(b, c) of (t - h)(t - h)* = t^2 + b t + c."""
        s, _ = self.h.norm_pair()
        return (-2 * self.h.primal.w, s)

    def rotation_center(self) -> Scalar:
        """Parameter value where the factor is a half-turn."""
        return self.h.primal.w


@dataclass(frozen=True)
class MotionFactorization:
    """Ordered revolute factors reproducing a motion polynomial.

    reconstruction: product(t - h_i) * constant * real_cofactor = source curve.
    `constant` is the pose of the curve at t = infinity (identity for monic
    curves), shared by all factorizations of one curve.
    """

    factors: tuple[LinearFactor, ...]
    real_cofactor: RealPolynomial
    constant: DualQuaternion

    def chain_polynomial(self) -> MotionPolynomial:
        """Product of the bare factors (t - h_1) ... (t - h_n)."""
        prod = MotionPolynomial([DualQuaternion.one()])
        for f in self.factors:
            prod = prod * f.polynomial()
        return prod

    def reconstruct(self) -> MotionPolynomial:
        prod = self.chain_polynomial() * MotionPolynomial([self.constant])
        return prod.scale_real_poly(self.real_cofactor)

    def partial_products(self) -> list[MotionPolynomial]:
        """[1, (t-h_1), (t-h_1)(t-h_2), ...] up to length len(factors)."""
        out = [MotionPolynomial([DualQuaternion.one()])]
        for f in self.factors:
            out.append(out[-1] * f.polynomial())
        return out

    def __len__(self) -> int:
        return len(self.factors)


def _real_content_exact(C: MotionPolynomial) -> RealPolynomial:
    """GCD over Q of the eight coordinate polynomials (monic, exact mode)."""
    import sympy

    t = sympy.Symbol("t")
    polys = []
    for idx in range(8):
        coeffs = [Fraction(c.coords()[idx]) for c in C.coeffs]
        if any(coeffs):
            polys.append(sympy.Poly([sympy.Rational(f) for f in reversed(coeffs)], t))
    g = polys[0]
    for p in polys[1:]:
        g = g.gcd(p)
        if g.degree() == 0:
            break
    if g.degree() == 0:
        return RealPolynomial([1])
    return RealPolynomial([Fraction(str(c)) for c in reversed(g.monic().all_coeffs())])


def strip_real_content(C: MotionPolynomial) -> tuple[MotionPolynomial, RealPolynomial]:
    """Split C = C' * g with g the real polynomial content (exact mode only).

    Float-mode curves are returned unchanged: detecting approximate content
    is ill-conditioned and the fixtures carry none.
    """
    if not C.is_exact():
        return C, RealPolynomial([1.0])
    content = _real_content_exact(C)
    if content.degree == 0:
        return C, RealPolynomial([1])
    rows = []
    for idx in range(8):
        coeffs = RealPolynomial([Fraction(c.coords()[idx]) for c in C.coeffs])
        q, r = coeffs.divmod(content)
        if not r.is_zero():
            raise NotAMotionPolynomial("content division left a remainder")
        rows.append(q)
    deg = max(p.degree for p in rows)
    out = []
    for k in range(deg + 1):
        out.append(DualQuaternion.from_coords(
            [p.coeffs[k] if p.degree >= k else 0 for p in rows]
        ))
    return MotionPolynomial(out), content


def factorize(
    C: MotionPolynomial,
    order: Sequence[tuple[Scalar, Scalar]] | None = None,
    tol: float = 1e-9,
) -> MotionFactorization:
    """Factor C into revolute linear factors following the given quadratic order.

    `order` lists the monic quadratic factors (b, c) of the norm polynomial of
    the content-stripped curve; by default the ascending-sorted order.

    Exact curves whose norm polynomial does not split into rational
    quadratics are extracted in float arithmetic (the factors of such curves
    live in an algebraic extension; only the quadratic data is demoted).
    """
    stripped, content = strip_real_content(C)
    nu = stripped.norm_polynomial(tol)
    if order is None:
        try:
            order = quadratic_real_factors(nu)
        except NotFactorableOverRationals:
            stripped = stripped.to_float()
            order = quadratic_real_factors(stripped.norm_polynomial(tol))
    elif stripped.is_exact() and not all(is_exact(b) and is_exact(c) for b, c in order):
        stripped = stripped.to_float()
    if len(order) != stripped.degree:
        raise NonGenericRemainder(
            f"need {stripped.degree} quadratics, got {len(order)}"
        )
    scale = stripped.max_abs()
    cur = stripped
    hs: list[DualQuaternion] = []
    for b, c in reversed(list(order)):
        _, rem = divide_real_quadratic(cur, b, c)
        r0, r1 = rem.coeffs[0], rem.coeffs[1] if rem.degree >= 1 else DualQuaternion.zero()
        if not _invertible(r1, scale):
            raise NonGenericRemainder(
                "linear remainder has non-invertible leading part for this ordering"
            )
        h = -(r1.inverse() * r0)
        quot, lin_rem = right_divide(cur, monic_linear(h))
        if lin_rem.max_abs() > max(tol, 1e-9) * max(scale, 1.0):
            raise NonGenericRemainder(
                f"division by extracted factor left remainder {lin_rem.max_abs():.3e}"
            )
        hs.append(h)
        cur = quot
    if cur.degree != 0:
        raise NonGenericRemainder("factor extraction did not reach degree zero")
    const = cur.coeffs[0]
    if not _invertible(const, max(scale, 1.0)):
        raise NonGenericRemainder("degree-zero quotient is not invertible")
    const_inv = const.inverse()
    # conjugate so the extracted chain sits left of the constant
    primed = [const * h * const_inv for h in reversed(hs)]
    factors = tuple(LinearFactor.from_h(h) for h in primed)
    return MotionFactorization(factors, content, const)


def all_factorizations(C: MotionPolynomial, tol: float = 1e-9) -> list[MotionFactorization]:
    """Every distinct factorization of C, one per successful quadratic ordering.

    Orderings are tried in lexicographic order of the ascending-sorted
    quadratic list; results are deduplicated by factor closeness.
    """
    stripped, _ = strip_real_content(C)
    try:
        quads = quadratic_real_factors(stripped.norm_polynomial(tol))
    except NotFactorableOverRationals:
        quads = quadratic_real_factors(stripped.to_float().norm_polynomial(tol))
    seen_orders = set()
    results: list[MotionFactorization] = []
    for perm in itertools.permutations(range(len(quads))):
        key = tuple((float(quads[i][0]), float(quads[i][1])) for i in perm)
        if key in seen_orders:
            continue
        seen_orders.add(key)
        try:
            fact = factorize(C, order=[quads[i] for i in perm], tol=tol)
        except NonGenericRemainder:
            continue
        if not any(_same_factors(fact, other) for other in results):
            results.append(fact)
    return results


def _same_factors(a: MotionFactorization, b: MotionFactorization, tol: float = 1e-6) -> bool:
    if len(a) != len(b):
        return False
    scale = max(
        max(f.h.max_abs() for f in a.factors),
        max(f.h.max_abs() for f in b.factors),
        1.0,
    )
    for fa, fb in zip(a.factors, b.factors):
        diff = max(abs(float(x) - float(y)) for x, y in zip(fa.h.coords(), fb.h.coords()))
        if diff > tol * scale:
            return False
    return True
