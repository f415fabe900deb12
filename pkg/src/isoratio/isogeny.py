"""Velu's formulas over the function field Q(t) and isogeny verification.

Kernel data comes in three flavours: the x-coordinate of a 2-torsion point,
a monic kernel polynomial dividing the ell-division polynomial, or an
explicitly given codomain model.  Point counts over F_p gate every computed
or supplied codomain: isogenous curves have equal counts at every prime of
common good reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import UniPoly, AlgebraError
from .arith import jacobi
from .curves import CurveModel, count_points_mod_p
from .arith import primes_up_to


class IsogenyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Polynomials in x whose coefficients are UniPoly in t (lowest x-degree first)
# ---------------------------------------------------------------------------

XPoly = list  # list[UniPoly]


def xp_trim(a: XPoly) -> XPoly:
    while a and a[-1].is_zero:
        a.pop()
    return a


def xp_add(a: XPoly, b: XPoly) -> XPoly:
    n = max(len(a), len(b))
    zero = UniPoly()
    return xp_trim([(a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero)
                    for i in range(n)])


def xp_neg(a: XPoly) -> XPoly:
    return [-c for c in a]


def xp_mul(a: XPoly, b: XPoly) -> XPoly:
    if not a or not b:
        return []
    out = [UniPoly() for _ in range(len(a) + len(b) - 1)]
    for i, ca in enumerate(a):
        if not ca.is_zero:
            for j, cb in enumerate(b):
                out[i + j] = out[i + j] + ca * cb
    return xp_trim(out)


def xp_scale(a: XPoly, c) -> XPoly:
    return xp_trim([ci * c for ci in a])


def xp_divmod_monic(a: XPoly, b: XPoly) -> tuple[XPoly, XPoly]:
    """Division by a divisor with unit (constant rational) leading coefficient."""
    b = xp_trim(list(b))
    if not b:
        raise IsogenyError("division by zero")
    lead = b[-1]
    if lead.degree != 0:
        raise IsogenyError("divisor leading coefficient must be constant in t")
    inv = 1 / lead.coeffs[0]
    a = list(a)
    db = len(b) - 1
    q = [UniPoly() for _ in range(max(len(a) - db, 0))]
    while len(xp_trim(a)) - 1 >= db and a:
        a = xp_trim(a)
        if len(a) - 1 < db:
            break
        k = len(a) - 1 - db
        c = a[-1] * inv
        q[k] = c
        for i in range(db + 1):
            a[k + i] = a[k + i] - c * b[i]
    return xp_trim(q), xp_trim(a)


def division_polynomial(n: int, f: UniPoly, g: UniPoly) -> XPoly:
    """The n-th division polynomial of y^2 = x^3 + f x + g as a polynomial in x.

    For odd n this is the full psi_n; for even n the stored value is
    psi_n / (2y).  Coefficients live in Q[t].
    """
    if n < 0:
        raise IsogenyError("n must be nonnegative")
    one = UniPoly([1])
    F = [g, f, UniPoly(), one]  # x^3 + f x + g
    F4 = xp_scale(F, 4)
    P: dict[int, XPoly] = {
        0: [],
        1: [one],
        2: [one],
        3: xp_trim([-(f * f), g * 12, f * 6, UniPoly(), UniPoly([3])]),
        4: xp_scale(xp_trim([-(f ** 3) - (g * g * 8), -(f * g * 4), -(f * f * 5),
                             g * 20, f * 5, UniPoly(), one]), 2),
    }

    def get(k: int) -> XPoly:
        if k in P:
            return P[k]
        m = k // 2
        if k % 2 == 1:
            a = xp_mul(get(m + 2), xp_mul(get(m), xp_mul(get(m), get(m))))
            b = xp_mul(get(m - 1), xp_mul(get(m + 1), xp_mul(get(m + 1), get(m + 1))))
            f2 = xp_mul(F4, F4)
            if m % 2 == 0:  # psi_{m+2}, psi_m carry the 2y factor
                val = xp_add(xp_mul(f2, a), xp_neg(b))
            else:
                val = xp_add(a, xp_neg(xp_mul(f2, b)))
        else:
            left = xp_mul(get(m + 2), xp_mul(get(m - 1), get(m - 1)))
            right = xp_mul(get(m - 2), xp_mul(get(m + 1), get(m + 1)))
            val = xp_mul(get(m), xp_add(left, xp_neg(right)))
        P[k] = val
        return val

    return get(n)


# ---------------------------------------------------------------------------
# Kernel specifications and isogeny pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSpec:
    """One of: two-torsion x-coordinate, monic kernel polynomial, explicit codomain."""

    kind: str  # "two_torsion_x" | "kernel_polynomial" | "explicit_codomain"
    x0: Optional[UniPoly] = None
    psi: Optional[tuple] = None          # tuple[UniPoly], lowest x-degree first
    fprime: Optional[UniPoly] = None
    gprime: Optional[UniPoly] = None

    def to_json(self) -> dict:
        if self.kind == "two_torsion_x":
            return {"type": self.kind, "x0": self.x0.to_strings()}
        if self.kind == "kernel_polynomial":
            return {"type": self.kind, "psi": [c.to_strings() for c in self.psi]}
        return {"type": self.kind, "fprime": self.fprime.to_strings(),
                "gprime": self.gprime.to_strings()}

    @classmethod
    def from_json(cls, data: dict) -> "KernelSpec":
        kind = data["type"]
        if kind == "two_torsion_x":
            return cls(kind, x0=UniPoly(data["x0"]))
        if kind == "kernel_polynomial":
            return cls(kind, psi=tuple(UniPoly(c) for c in data["psi"]))
        if kind == "explicit_codomain":
            return cls(kind, fprime=UniPoly(data["fprime"]), gprime=UniPoly(data["gprime"]))
        raise IsogenyError(f"unknown kernel type {kind!r}")


@dataclass(frozen=True)
class IsogenyPair:
    f: UniPoly
    g: UniPoly
    fprime: UniPoly
    gprime: UniPoly
    ell: int

    def domain_disc(self) -> UniPoly:
        return self.f ** 3 * 4 + self.g * self.g * 27

    def codomain_disc(self) -> UniPoly:
        return self.fprime ** 3 * 4 + self.gprime * self.gprime * 27


def velu_two_isogeny(f: UniPoly, g: UniPoly, x0: UniPoly) -> tuple[UniPoly, UniPoly]:
    """Codomain of the 2-isogeny with kernel (x0, 0).

    x0 must satisfy x0^3 + f x0 + g = 0 identically in t.  With
    t0 = 3 x0^2 + f and w = x0 t0 the codomain is (f - 5 t0, g - 7 w).
    """
    if not (x0 ** 3 + f * x0 + g).is_zero:
        raise IsogenyError("x0 is not a 2-torsion x-coordinate of the domain")
    t0 = x0 * x0 * 3 + f
    w = x0 * t0
    return f - t0 * 5, g - w * 7


def velu_odd_isogeny(f: UniPoly, g: UniPoly, psi: Sequence[UniPoly], ell: int,
                     verify: bool = True) -> tuple[UniPoly, UniPoly]:
    """Codomain of the degree-ell isogeny with monic kernel polynomial psi.

    psi has degree d = (ell - 1)/2 in x; each root is the x-coordinate of a
    +-point pair of the kernel.  The codomain is computed from the first
    three power sums of the roots:

        t = 6 p2 + 2 d f,   w = 10 p3 + 6 f p1 + 4 d g,
        f' = f - 5 t,       g' = g - 7 w.

    psi is checked to divide the ell-division polynomial of the domain, and
    the result is gated by point-count verification unless verify=False.
    """
    if ell < 3 or ell % 2 == 0:
        raise IsogenyError("velu_odd_isogeny needs odd ell >= 3")
    d = (ell - 1) // 2
    psi = xp_trim(list(psi))
    if len(psi) - 1 != d:
        raise IsogenyError(f"kernel polynomial degree {len(psi)-1} != {d}")
    if psi[-1] != UniPoly([1]):
        raise IsogenyError("kernel polynomial must be monic")
    div = division_polynomial(ell, f, g)
    _, rem = xp_divmod_monic(div, psi)
    if rem:
        raise IsogenyError("kernel polynomial does not divide the division polynomial")
    e1 = -psi[-2] if d >= 1 else UniPoly()
    e2 = psi[-3] if d >= 2 else UniPoly()
    e3 = -psi[-4] if d >= 3 else UniPoly()
    p1 = e1
    p2 = e1 * e1 - e2 * 2
    p3 = e1 ** 3 - e1 * e2 * 3 + e3 * 3
    t_sum = p2 * 6 + f * (2 * d)
    w_sum = p3 * 10 + f * p1 * 6 + g * (4 * d)
    fp, gp = f - t_sum * 5, g - w_sum * 7
    if verify:
        pair = IsogenyPair(f, g, fp, gp, ell)
        if not verify_isogeny(pair, default_samples(pair), primes_up_to(60)[2:]):
            raise IsogenyError("computed codomain failed point-count verification")
    return fp, gp


def default_samples(pair: IsogenyPair, count: int = 5) -> list[Fraction]:
    """Small rational sample points avoiding zeros of both discriminants."""
    out = []
    d1, d2 = pair.domain_disc(), pair.codomain_disc()
    t = 1
    while len(out) < count and t < 1000:
        for cand in (Fraction(t), Fraction(-t), Fraction(1, t + 1)):
            if len(out) >= count:
                break
            if d1(cand) != 0 and d2(cand) != 0 and cand not in out:
                out.append(cand)
        t += 1
    return out


def specialize(f: UniPoly, g: UniPoly, t: Fraction) -> CurveModel:
    """Integral model of y^2 = x^3 + f(t) x + g(t) at a rational t."""
    a, b = Fraction(f(t)), Fraction(g(t))
    den = (a.denominator * b.denominator)  # crude common scale
    u = den  # (A, B) -> (A u^4, B u^6) keeps the isomorphism class
    A = a * u ** 4
    B = b * u ** 6
    assert A.denominator == 1 and B.denominator == 1
    return CurveModel(int(A), int(B))


def verify_isogeny(pair: IsogenyPair, t_samples: Sequence[Fraction],
                   primes: Sequence[int]) -> bool:
    """Point-count test: isogenous curves match #E(F_p) at good primes.

    True iff every sample t and every prime p > 3 of good reduction for both
    specializations gives equal counts.  Raises if no (t, p) pair is usable.
    """
    tested = 0
    for t in t_samples:
        if pair.domain_disc()(t) == 0 or pair.codomain_disc()(t) == 0:
            continue
        E = specialize(pair.f, pair.g, Fraction(t))
        Ep = specialize(pair.fprime, pair.gprime, Fraction(t))
        for p in primes:
            if p <= 3 or E.disc % p == 0 or Ep.disc % p == 0:
                continue
            tested += 1
            if count_points_mod_p(E, p) != count_points_mod_p(Ep, p):
                return False
    if tested == 0:
        raise IsogenyError("no usable (t, p) samples: all degenerate")
    return True


def codomain_from_kernel(f: UniPoly, g: UniPoly, kernel: KernelSpec,
                         ell: int) -> IsogenyPair:
    """Resolve a kernel specification into a verified isogeny pair."""
    if kernel.kind == "two_torsion_x":
        if ell != 2:
            raise IsogenyError("two-torsion kernel only makes sense for ell = 2")
        fp, gp = velu_two_isogeny(f, g, kernel.x0)
        pair = IsogenyPair(f, g, fp, gp, 2)
    elif kernel.kind == "kernel_polynomial":
        fp, gp = velu_odd_isogeny(f, g, list(kernel.psi), ell, verify=False)
        pair = IsogenyPair(f, g, fp, gp, ell)
    elif kernel.kind == "explicit_codomain":
        pair = IsogenyPair(f, g, kernel.fprime, kernel.gprime, ell)
    else:
        raise IsogenyError(f"unknown kernel kind {kernel.kind!r}")
    if pair.domain_disc().is_zero or pair.codomain_disc().is_zero:
        raise IsogenyError("degenerate family: identically zero discriminant")
    if not verify_isogeny(pair, default_samples(pair), primes_up_to(60)[2:]):
        raise IsogenyError("kernel data does not define an isogeny (point counts differ)")
    return pair
