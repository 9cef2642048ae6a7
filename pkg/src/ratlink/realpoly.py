"""Real polynomials: arithmetic, Sturm-sequence root isolation, and the
factorization of positive even-degree polynomials into monic quadratics.

Coefficients are exact (int/Fraction) or float; index = power of t.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NotFactorableOverRationals, RealRootPresent, RootFindingFailure
from .quatcore import Scalar, exact_div, is_exact


class RealPolynomial:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Scalar]):
        cs = list(coeffs) if coeffs else [0]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def to_float(self) -> "RealPolynomial":
        return RealPolynomial([float(c) for c in self.coeffs])

    def __call__(self, t: Scalar) -> Scalar:
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * t + c
        return acc

    def __mul__(self, other: "RealPolynomial") -> "RealPolynomial":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RealPolynomial(out)

    def __add__(self, other: "RealPolynomial") -> "RealPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return RealPolynomial([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "RealPolynomial") -> "RealPolynomial":
        return self + other.scale(-1)

    def scale(self, s: Scalar) -> "RealPolynomial":
        return RealPolynomial([c * s for c in self.coeffs])

    def monic(self) -> "RealPolynomial":
        lead = self.coeffs[-1]
        return RealPolynomial([exact_div(c, lead) for c in self.coeffs])

    def derivative(self) -> "RealPolynomial":
        if self.degree == 0:
            return RealPolynomial([0])
        return RealPolynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: "RealPolynomial") -> tuple["RealPolynomial", "RealPolynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dn = other.degree
        dl = other.coeffs[-1]
        q = [0] * max(len(rem) - dn, 1)
        for k in range(len(rem) - 1, dn - 1, -1):
            f = exact_div(rem[k], dl)
            q[k - dn] = f
            for j in range(dn + 1):
                rem[k - dn + j] -= f * other.coeffs[j]
        return RealPolynomial(q), RealPolynomial(rem[:dn] if dn else [0])

    def reversed_coeffs(self) -> "RealPolynomial":
        """t**deg * p(1/t): root at infinity of p <-> root at 0."""
        return RealPolynomial(list(reversed(self.coeffs)))

    def __repr__(self):
        return f"RealPolynomial({list(self.coeffs)})"


def _sign(x: float) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def float_coeffs(p: RealPolynomial, rtol: float = 1e-12) -> np.ndarray:
    """Float coefficients with relatively-tiny leading terms trimmed.

    Structural degree drops leave leading coefficients at roundoff scale;
    keeping them would wreck root bounds and Sturm chains.
    """
    a = np.array([float(c) for c in p.coeffs])
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        return np.array([])
    while a.size > 1 and abs(a[-1]) < rtol * scale:
        a = a[:-1]
    return a


def sturm_sequence(p: RealPolynomial) -> list[np.ndarray]:
    """Sturm chain of p with float coefficients, max-norm normalized.

    Near-zero remainders (relative to the working scale) terminate the chain,
    which silently handles approximate multiple roots: the chain then counts
    distinct roots of the square-free part.
    """
    a = float_coeffs(p)
    if a.size == 0:
        return []
    chain = [a / np.max(np.abs(a))]
    if a.size > 1:
        d = np.polyder(a[::-1])[::-1]
        chain.append(d / np.max(np.abs(d)))
    while chain[-1].size > 1:
        num, den = chain[-2], chain[-1]
        _, rem = np.polydiv(num[::-1], den[::-1])
        rem = np.trim_zeros(rem[::-1], "b")
        if rem.size == 0:
            break
        m = np.max(np.abs(rem))
        if m < 1e-13:
            break
        chain.append(-rem / m)
    return chain


def _variations(chain, x: float) -> int:
    signs = []
    for c in chain:
        v = float(np.polyval(c[::-1], x))
        s = _sign(v) if abs(v) > 1e-300 else 0
        if s != 0:
            signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_bound(p: RealPolynomial) -> float:
    cs = float_coeffs(p)
    if cs.size <= 1:
        return 1.0
    lead = cs[-1]
    return 1.0 + float(np.max(np.abs(cs[:-1] / lead)))


def count_real_roots(p: RealPolynomial, lo: float | None = None, hi: float | None = None) -> int:
    """Number of distinct real roots of p in (lo, hi] (whole line by default)."""
    if float_coeffs(p).size <= 1:
        return 0
    chain = sturm_sequence(p)
    b = cauchy_bound(p)
    lo = -b - 1.0 if lo is None else lo
    hi = b + 1.0 if hi is None else hi
    return _variations(chain, lo) - _variations(chain, hi)


def isolate_real_roots(p: RealPolynomial) -> list[tuple[float, float]]:
    """Disjoint intervals (a, b] each containing exactly one distinct real root."""
    if float_coeffs(p).size <= 1:
        return []
    chain = sturm_sequence(p)
    b = cauchy_bound(p)
    lo, hi = -b - 1.0, b + 1.0
    total = _variations(chain, lo) - _variations(chain, hi)
    if total == 0:
        return []
    out = []
    stack = [(lo, hi, total)]
    while stack:
        a_, b_, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((a_, b_))
            continue
        mid = 0.5 * (a_ + b_)
        if b_ - a_ < 1e-13 * max(1.0, abs(mid)):
            # cluster tighter than resolution: report as a single site
            out.append((a_, b_))
            continue
        nl = _variations(chain, a_) - _variations(chain, mid)
        stack.append((a_, mid, nl))
        stack.append((mid, b_, n - nl))
    return sorted(out)


def _polish_root(p: RealPolynomial, lo: float, hi: float) -> float:
    cs = float_coeffs(p)[::-1]
    dcs = np.polyder(cs)
    flo = float(np.polyval(cs, lo))
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        fm = float(np.polyval(cs, mid))
        if fm == 0.0 or hi - lo < 1e-15 * max(1.0, abs(mid)):
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(3):  # Newton polish
        d = float(np.polyval(dcs, x))
        if abs(d) < 1e-300:
            break
        step = float(np.polyval(cs, x)) / d
        if not math.isfinite(step):
            break
        x -= step
    return x


def real_roots(p: RealPolynomial) -> list[float]:
    """All distinct real roots, Sturm-isolated then bisection/Newton polished."""
    return [_polish_root(p, a, b) for a, b in isolate_real_roots(p)]


def _quadratics_exact(p: RealPolynomial) -> list[tuple[Fraction, Fraction]]:
    import sympy

    t = sympy.Symbol("t")
    expr = sum(sympy.Rational(Fraction(c)) * t**k for k, c in enumerate(p.coeffs))
    _, factors = sympy.factor_list(sympy.Poly(expr, t))
    quads: list[tuple[Fraction, Fraction]] = []
    for f, mult in factors:
        fp = sympy.Poly(f, t)
        if fp.degree() == 1:
            raise RealRootPresent("norm polynomial has a rational root")
        if fp.degree() == 2:
            c2, c1, c0 = [Fraction(str(c)) for c in fp.all_coeffs()]
            b, c = c1 / c2, c0 / c2
            if b * b - 4 * c >= 0:
                raise RealRootPresent("norm polynomial has real quadratic roots")
            quads.extend([(b, c)] * mult)
        else:
            raise NotFactorableOverRationals(
                f"irreducible factor of degree {fp.degree()}; exact quadratic "
                "factorization needs an extension field"
            )
    return quads


def _quadratics_float(p: RealPolynomial) -> list[tuple[float, float]]:
    if count_real_roots(p) > 0:
        raise RealRootPresent("norm polynomial has a real root")
    cs = np.array([float(c) for c in p.coeffs])
    roots = np.roots(cs[::-1])
    # conjugate pairing: greedily match each root with its nearest conjugate
    quads = []
    used = np.zeros(len(roots), dtype=bool)
    order = sorted(range(len(roots)), key=lambda i: (-abs(roots[i]), roots[i].real, roots[i].imag))
    for i in order:
        if used[i]:
            continue
        r = roots[i]
        cands = [j for j in range(len(roots)) if j != i and not used[j]]
        if not cands:
            raise RootFindingFailure("odd leftover root while pairing conjugates")
        j = min(cands, key=lambda k: abs(roots[k] - np.conj(r)))
        if abs(roots[j] - np.conj(r)) > 1e-7 * max(1.0, abs(r)):
            raise RootFindingFailure("could not pair complex-conjugate roots")
        used[i] = used[j] = True
        # Newton-polish the root before forming the quadratic
        x = complex(r)
        dcs = np.polyder(cs[::-1])
        for _ in range(3):
            d = complex(np.polyval(dcs, x))
            if abs(d) < 1e-300:
                break
            x -= complex(np.polyval(cs[::-1], x)) / d
        quads.append((-2.0 * x.real, abs(x) ** 2))
    return quads


def quadratic_real_factors(p: RealPolynomial) -> list[tuple[Scalar, Scalar]]:
    """Factor a positive real polynomial into monic quadratics t^2 + b t + c.

    Requires even degree, positive leading coefficient and no real roots.
    Returns deg/2 pairs (b, c) sorted ascending; exact coefficients stay
    exact when the polynomial splits into rational quadratics.
    """
    if p.is_zero() or p.degree % 2 != 0 or p.degree == 0:
        raise RealRootPresent("polynomial must have positive even degree")
    if float(p.coeffs[-1]) < 0:
        raise RealRootPresent("leading coefficient must be positive")
    quads = _quadratics_exact(p) if p.is_exact() else _quadratics_float(p)
    quads.sort(key=lambda bc: (float(bc[0]), float(bc[1])))
    # verify the product reproduces p
    prod = RealPolynomial([1])
    for b, c in quads:
        prod = prod * RealPolynomial([c, b, 1])
    prod = prod.scale(p.coeffs[-1])
    scale = max(abs(float(c)) for c in p.coeffs)
    err = max(abs(float(a) - float(b)) for a, b in zip(_pad(prod.coeffs, len(p.coeffs)), p.coeffs))
    if err > 1e-8 * scale:
        raise RootFindingFailure(f"quadratic factor product mismatch: {err:.3e}")
    return quads


def _pad(cs, n):
    return list(cs) + [0] * (n - len(cs))
