"""Short Weierstrass models y^2 = x^3 + Ax + B over Q.

Heights, local minimality at p > 3, reduction-type classification, Tamagawa
numbers at multiplicative primes, and exact point counts over F_p.  Tamagawa
numbers at additive primes and the primes 2, 3 are deliberately not computed;
callers treat them as unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .arith import ArithError, jacobi, valuation


class CurveError(ValueError):
    pass


class Reduction(Enum):
    GOOD = "good"
    SPLIT_MULT = "split multiplicative"
    NONSPLIT_MULT = "nonsplit multiplicative"
    ADDITIVE = "additive"


@dataclass(frozen=True)
class CurveModel:
    A: int
    B: int

    @property
    def disc(self) -> int:
        return 4 * self.A ** 3 + 27 * self.B ** 2

    def is_elliptic(self) -> bool:
        return self.disc != 0

    def to_json(self) -> dict:
        return {"A": str(self.A), "B": str(self.B)}

    @classmethod
    def from_json(cls, data: dict) -> "CurveModel":
        return cls(int(data["A"]), int(data["B"]))


@dataclass(frozen=True)
class ReductionType:
    kind: Reduction
    v_disc_min: int  # v_p of the minimal discriminant

    @property
    def is_multiplicative(self) -> bool:
        return self.kind in (Reduction.SPLIT_MULT, Reduction.NONSPLIT_MULT)


@dataclass(frozen=True)
class LocalData:
    p: int
    reduction: ReductionType
    tamagawa: Optional[int]  # None when unknown (additive at p > 3, or p in {2, 3})


def m_of(A: int, B: int) -> int:
    """Largest d with d^12 dividing gcd(A^3, B^2).

    Equivalently the product of p^min(v_p(A)//4, v_p(B)//6); any prime
    involved divides gcd(A, B) (or A, B alone in the degenerate cases),
    which keeps the factorization small.
    """
    from .arith import factor_integer

    if A == 0 and B == 0:
        raise CurveError("m(0, 0) undefined")
    if A == 0:
        return math.prod(p ** (e // 6) for p, e in factor_integer(B))
    if B == 0:
        return math.prod(p ** (e // 4) for p, e in factor_integer(A))
    h = math.gcd(A, B)
    if h == 1:
        return 1
    m = 1
    for p, _ in factor_integer(h):
        k = min(valuation(A, p) // 4, valuation(B, p) // 6)
        m *= p ** k
    return m


def naive_height(A: int, B: int) -> tuple[Union[int, Fraction], int]:
    """(H, H0) with H0 = max(4|A|^3, 27 B^2) and H = H0 / m(A, B)^12.

    H is integral whenever m^12 divides H0 (always the case, since m^4 | A
    and m^6 | B); the exact rational is returned in the defensive branch.
    """
    if A == 0 and B == 0:
        raise CurveError("height of (0, 0) undefined")
    h0 = max(4 * abs(A) ** 3, 27 * B * B)
    m12 = m_of(A, B) ** 12
    if h0 % m12 == 0:
        return h0 // m12, h0
    return Fraction(h0, m12), h0


def minimal_at_p(E: CurveModel, p: int) -> CurveModel:
    """Strip the largest simultaneous p^(4k) | A, p^(6k) | B; valid for p > 3."""
    if p <= 3:
        raise CurveError("minimal_at_p requires p > 3")
    A, B = E.A, E.B
    if A == 0:
        k = valuation(B, p) // 6 if B else 0
    elif B == 0:
        k = valuation(A, p) // 4
    else:
        k = min(valuation(A, p) // 4, valuation(B, p) // 6)
    if k:
        A = A // p ** (4 * k) if A else 0
        B = B // p ** (6 * k) if B else 0
    return CurveModel(A, B)


def reduction_type(E: CurveModel, p: int) -> ReductionType:
    """Classify reduction at p > 3 on the minimal model.

    Good if p does not divide the minimal discriminant; multiplicative when
    p divides it but not A_min, split iff (6 B_min | p) = 1; additive otherwise.
    """
    if p <= 3:
        raise CurveError("reduction_type requires p > 3")
    if E.disc == 0:
        raise CurveError("singular model")
    Em = minimal_at_p(E, p)
    v = valuation(Em.disc, p)
    if v == 0:
        return ReductionType(Reduction.GOOD, 0)
    if Em.A % p != 0:
        if jacobi(6 * Em.B, p) == 1:
            return ReductionType(Reduction.SPLIT_MULT, v)
        return ReductionType(Reduction.NONSPLIT_MULT, v)
    return ReductionType(Reduction.ADDITIVE, v)


def tamagawa_mult(E: CurveModel, p: int) -> LocalData:
    """Tamagawa number at a multiplicative prime p > 3.

    Split: c_p = v_p(disc_min).  Nonsplit: c_p = 2 if that valuation is even,
    else 1.  Raises on good or additive reduction.
    """
    rt = reduction_type(E, p)
    if rt.kind == Reduction.SPLIT_MULT:
        return LocalData(p, rt, rt.v_disc_min)
    if rt.kind == Reduction.NONSPLIT_MULT:
        return LocalData(p, rt, 2 if rt.v_disc_min % 2 == 0 else 1)
    raise CurveError(f"reduction at {p} is {rt.kind.value}, not multiplicative")


def local_data(E: CurveModel, p: int) -> LocalData:
    """LocalData with tamagawa = None at additive primes (and good c_p = 1)."""
    rt = reduction_type(E, p)
    if rt.kind == Reduction.GOOD:
        return LocalData(p, rt, 1)
    if rt.is_multiplicative:
        return tamagawa_mult(E, p)
    return LocalData(p, rt, None)


def count_points_mod_p(E: CurveModel, p: int) -> int:
    """#E(F_p) = p + 1 + sum_x chi(x^3 + Ax + B), exact; requires good reduction."""
    if p <= 3:
        raise CurveError("count_points_mod_p requires p > 3")
    if E.disc % p == 0:
        raise CurveError(f"bad reduction at {p}")
    A, B = E.A % p, E.B % p
    total = p + 1
    for x in range(p):
        val = (x * x % p * x + A * x + B) % p
        if val:
            total += jacobi(val, p)
    return total
