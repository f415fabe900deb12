"""Exact polynomial arithmetic over Q.

Univariate polynomials with rational coefficients, weighted-homogeneous
bivariate polynomials with weights (tau, 1), and complete factorization
over Q (squarefree decomposition, factorization mod p, Hensel lifting,
Zassenhaus recombination).  All arithmetic is exact; nothing here ever
touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union


class AlgebraError(ValueError):
    """Domain error in exact polynomial arithmetic."""


Coeff = Union[int, Fraction, str]


def _frac(c: Coeff) -> Fraction:
    if isinstance(c, Fraction):
        return c
    return Fraction(c)


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------

class UniPoly:
    """Dense univariate polynomial over Q, coefficients lowest degree first.

    The zero polynomial has ``degree is None`` (a distinguished sentinel, so
    degree arithmetic on it fails loudly instead of silently producing -1).
    Instances are immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Coeff] = ()):  # lowest degree first
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("UniPoly is immutable")

    def __reduce__(self):
        return (UniPoly, (self.coeffs,))

    # -- basic structure ----------------------------------------------------

    @property
    def degree(self) -> Optional[int]:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == UniPoly([other])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    @property
    def lc(self) -> Fraction:
        if not self.coeffs:
            raise AlgebraError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "UniPoly") -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other if isinstance(other, UniPoly) else UniPoly([-_frac(other)]))

    def __rsub__(self, other) -> "UniPoly":
        return (-self) + other

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return UniPoly([c * other for c in self.coeffs])
        if self.is_zero or other.is_zero:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise AlgebraError("negative power")
        out = UniPoly([1])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __divmod__(self, other: "UniPoly"):
        if other.is_zero:
            raise AlgebraError("division by zero polynomial")
        q = [Fraction(0)] * max(len(self.coeffs) - len(other.coeffs) + 1, 1)
        r = list(self.coeffs)
        d, lc = other.degree, other.lc
        while len(r) - 1 >= d and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < d:
                break
            k = len(r) - 1 - d
            c = r[-1] / lc
            q[k] = c
            for i, b in enumerate(other.coeffs):
                r[k + i] -= c * b
            r.pop()
        return UniPoly(q), UniPoly(r)

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[1]

    def divides(self, other: "UniPoly") -> bool:
        if self.is_zero:
            return other.is_zero
        return divmod(other, self)[1].is_zero

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = divmod(self, other)
        if not r.is_zero:
            raise AlgebraError("inexact polynomial division")
        return q

    def derivative(self) -> "UniPoly":
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    # -- evaluation ----------------------------------------------------------

    def __call__(self, x):
        """Exact evaluation by Horner; accepts int or Fraction."""
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if acc.denominator == 1:
            return int(acc)
        return acc

    def eval_mod(self, x: int, m: int) -> int:
        """Horner evaluation mod m; requires integer coefficients."""
        acc = 0
        for c in reversed(self.coeffs):
            if c.denominator != 1:
                raise AlgebraError("eval_mod needs integer coefficients")
            acc = (acc * x + c.numerator) % m
        return acc

    def reversed_scaled(self, c) -> "UniPoly":
        """Return t^deg * self(c/t), the coefficient-reversed c-scaling."""
        if self.is_zero:
            return self
        cf = _frac(c)
        n = self.degree
        return UniPoly([self.coeffs[n - i] * cf ** (n - i) for i in range(n + 1)])

    # -- normalization -------------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c such that self/c is primitive with integer coefficients."""
        if self.is_zero:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.coeffs:
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> tuple[Fraction, "UniPoly"]:
        """Split into (signed content, primitive part with positive leading coefficient)."""
        if self.is_zero:
            return Fraction(0), self
        c = self.content()
        if self.lc < 0:
            c = -c
        return c, UniPoly([a / c for a in self.coeffs])

    def monic(self) -> "UniPoly":
        if self.is_zero:
            raise AlgebraError("cannot make zero polynomial monic")
        return self * (1 / self.lc)

    def int_coeffs(self) -> list[int]:
        if any(c.denominator != 1 for c in self.coeffs):
            raise AlgebraError("polynomial has non-integer coefficients")
        return [c.numerator for c in self.coeffs]

    # -- serialization -------------------------------------------------------

    def to_strings(self) -> list[str]:
        return [str(c) if c.denominator != 1 else str(c.numerator) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[Coeff]) -> "UniPoly":
        return cls(items)

    def __repr__(self) -> str:
        return f"UniPoly({self.pretty()})"

    def pretty(self, var: str = "t") -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                term = str(c)
            else:
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                sgn = "-" if c < 0 else ""
                term = f"{sgn}{mag}{var}" + (f"^{i}" if i > 1 else "")
            if parts and not term.startswith("-"):
                term = "+" + term
            parts.append(term)
        return "".join(parts)


UNI_ZERO = UniPoly()
UNI_ONE = UniPoly([1])
UNI_T = UniPoly([0, 1])


def poly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Gcd over Q, normalized to primitive integer coefficients with positive lc."""
    if p.is_zero and q.is_zero:
        raise AlgebraError("gcd of two zero polynomials")
    a, b = p, q
    while not b.is_zero:
        a, b = b, a % b
        if not b.is_zero:
            b = b.primitive()[1]  # keep coefficients small
    return a.primitive()[1]


def poly_resultant(p: UniPoly, q: UniPoly) -> Fraction:
    """Resultant over Q, exact.  Zero iff p and q share a root over Qbar.

    Computed as the determinant of the Sylvester matrix whose rows list
    coefficients lowest degree first; this differs from the classical
    highest-first convention by the sign (-1)^(N(N-1)/2) with N the sum of
    the degrees.
    """
    if p.is_zero or q.is_zero:
        raise AlgebraError("resultant requires nonzero polynomials")
    cp, pp = p.primitive()
    cq, qq = q.primitive()
    scale = cp ** qq.degree * cq ** pp.degree  # Res(c*p, q) = c^deg(q) Res(p, q)
    n = pp.degree + qq.degree
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * scale * Fraction(_int_resultant(pp.int_coeffs(), qq.int_coeffs()))


def _int_resultant(a: list[int], b: list[int]) -> int:
    """Resultant of two integer polynomials by a subresultant-style PRS.

    Uses the classical recursion Res(a, b) = lc(b)^(da - dr) (-1)^(da db) Res(b, r')
    with pseudo-remainders, tracking the exact correction factors.
    """
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        return (-1) ** (da * db) * _int_resultant(b, a)
    if db < 0:
        raise AlgebraError("resultant with zero polynomial")
    if db == 0:
        return b[0] ** da
    res_num, res_den = 1, 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            res_num *= b[0] ** da
            break
        # pseudo-division: lc(b)^(da-db+1) * a = q*b + r
        lcb = b[-1]
        r = list(a)
        mult = lcb ** (da - db + 1)
        r = [c * mult for c in r]
        for k in range(da - db, -1, -1):
            c = r[k + db]
            if c:
                q = c // lcb
                for i in range(db + 1):
                    r[k + i] -= q * b[i]
        while r and r[-1] == 0:
            r.pop()
        if not r:
            return 0
        dr = len(r) - 1
        # Res(a,b) = (-1)^(da*db) lc(b)^(da-dr) Res(b,r) / lc(b)^((da-db+1)*db)  [pseudo factor]
        res_num *= (-1) ** (da * db) * lcb ** (da - dr)
        res_den *= lcb ** ((da - db + 1) * db)
        # strip content to keep numbers small; Res(b, c*r0) = c^db Res(b, r0)
        g = 0
        for c in r:
            g = math.gcd(g, c)
        if g > 1:
            r = [c // g for c in r]
            res_num *= g ** db
        a, b = b, r
    assert res_num % res_den == 0
    return res_num // res_den


def sturm_real_root_count(p: UniPoly) -> int:
    """Number of distinct real roots of p, by Sturm's theorem on (-inf, inf)."""
    if p.is_zero:
        raise AlgebraError("Sturm chain of zero polynomial")
    p = p.exact_div(poly_gcd(p, p.derivative())) if p.degree and p.degree > 0 else p
    if not p.degree:
        return 0
    chain = [p, p.derivative()]
    while not chain[-1].is_zero and chain[-1].degree and chain[-1].degree > 0:
        chain.append(-(chain[-2] % chain[-1]))
    if chain[-1].is_zero:
        chain.pop()

    def variations(signs):
        signs = [s for s in signs if s != 0]
        return sum(1 for x, y in zip(signs, signs[1:]) if x * y < 0)

    at_plus = [(1 if q.lc > 0 else -1) for q in chain if not q.is_zero]
    at_minus = [(1 if q.lc > 0 else -1) * (-1) ** (q.degree % 2) for q in chain if not q.is_zero]
    return variations(at_minus) - variations(at_plus)


# ---------------------------------------------------------------------------
# Arithmetic of dense polynomials mod p (int lists, lowest degree first)
# ---------------------------------------------------------------------------

def _gf_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _gf_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _gf_trim(out)


def _gf_divmod(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        if a[-1] == 0:
            a.pop()
            continue
        k = len(a) - 1 - db
        c = a[-1] * inv % p
        q[k] = c
        for i in range(db + 1):
            a[k + i] = (a[k + i] - c * b[i]) % p
        a.pop()
    return q, _gf_trim(a)


def _gf_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _gf_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def _gf_pow_mod(a, n, mod, p):
    result = [1]
    a = _gf_divmod(a, mod, p)[1]
    while n:
        if n & 1:
            result = _gf_divmod(_gf_mul(result, a, p), mod, p)[1]
        a = _gf_divmod(_gf_mul(a, a, p), mod, p)[1]
        n >>= 1
    return result


def _gf_factor_squarefree(f: list[int], p: int, rng_state: int) -> list[list[int]]:
    """Factor a monic squarefree polynomial mod p into monic irreducibles."""
    factors = []
    # distinct-degree decomposition
    x = [0, 1]
    h = x[:]
    v = f[:]
    d = 0
    dd = []  # (product-of-irreducibles-of-degree-d, d)
    while len(v) - 1 >= 2 * (d + 1):
        d += 1
        h = _gf_pow_mod(h, p, v, p)
        g = _gf_gcd([(a - b) % p for a, b in
                     zip(h + [0] * len(x), x + [0] * len(h))] or [0], v, p)
        if len(g) > 1:
            dd.append((g, d))
            v = _gf_divmod(v, g, p)[0]
            h = _gf_divmod(h, v, p)[1]
    if len(v) > 1:
        dd.append((v, len(v) - 1))
    # equal-degree splitting (Cantor-Zassenhaus), deterministic LCG for repeatability
    state = rng_state

    def next_rand(bound):
        nonlocal state
        state = (state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        return state % bound

    for g, d in dd:
        stack = [g]
        while stack:
            u = stack.pop()
            du = len(u) - 1
            if du == d:
                factors.append(u)
                continue
            while True:
                r = [next_rand(p) for _ in range(du)] + [1]
                if p == 2:
                    # trace map splitting
                    t = r[:]
                    acc = r[:]
                    for _ in range(d - 1):
                        acc = _gf_pow_mod(acc, 2, u, p)
                        t = _gf_trim([(a + b) % p for a, b in
                                       zip(t + [0] * len(acc), acc + [0] * len(t))])
                    w = _gf_gcd(t, u, p)
                else:
                    e = (p ** d - 1) // 2
                    t = _gf_pow_mod(r, e, u, p)
                    t = t[:]
                    if t:
                        t[0] = (t[0] - 1) % p
                    w = _gf_gcd(_gf_trim(t), u, p)
                if 0 < len(w) - 1 < du:
                    stack.append(w)
                    stack.append(_gf_divmod(u, w, p)[0])
                    break
    return factors


# ---------------------------------------------------------------------------
# Hensel lifting and Zassenhaus recombination
# ---------------------------------------------------------------------------

def _sym(a: int, m: int) -> int:
    a %= m
    return a - m if 2 * a > m else a


def _zz_mul_mod(a, b, m):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % m
    return _gf_trim(out)


def _zz_add_mod(a, b, m):
    n = max(len(a), len(b))
    return _gf_trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % m
                     for i in range(n)])


def _zz_sub_mod(a, b, m):
    n = max(len(a), len(b))
    return _gf_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % m
                     for i in range(n)])


def _hensel_pair_lift(f, g, h, s, t, p, target):
    """Quadratic Hensel step iterated until the modulus reaches target.

    Invariants (standard Hensel-step shape): f = g*h and s*g + t*h = 1
    modulo the current modulus, h monic, lc(f) carried by g.  f must be
    correct modulo every modulus used, so pass exact coefficients (or
    coefficients mod a modulus >= target).
    """
    m = p
    while m < target:
        m2 = m * m
        e = _zz_sub_mod([c % m2 for c in f], _zz_mul_mod(g, h, m2), m2)
        q, r = _poly_divmod_mod(_zz_mul_mod(s, e, m2), h, m2)
        g_new = _zz_add_mod(g, _zz_add_mod(_zz_mul_mod(t, e, m2),
                                           _zz_mul_mod(q, g, m2), m2), m2)
        h_new = _zz_add_mod(h, r, m2)
        b = _zz_sub_mod(_zz_add_mod(_zz_mul_mod(s, g_new, m2),
                                    _zz_mul_mod(t, h_new, m2), m2), [1], m2)
        c, d = _poly_divmod_mod(_zz_mul_mod(s, b, m2), h_new, m2)
        s_new = _zz_sub_mod(s, d, m2)
        t_new = _zz_sub_mod(t, _zz_add_mod(_zz_mul_mod(t, b, m2),
                                           _zz_mul_mod(c, g_new, m2), m2), m2)
        g, h, s, t = g_new, h_new, s_new, t_new
        m = m2
    return g, h, m


def _poly_divmod_mod(a, b, m):
    """Division with remainder mod m; lc(b) must be invertible mod m."""
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, m)
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        if a[-1] % m == 0:
            a.pop()
            continue
        k = len(a) - 1 - db
        c = a[-1] * inv % m
        q[k] = c
        for i in range(db + 1):
            a[k + i] = (a[k + i] - c * b[i]) % m
        a.pop()
    return q, _gf_trim(a)


def _hensel_multilift(f: list[int], modular_factors: list[list[int]], p: int,
                      target: int) -> tuple[list[list[int]], int]:
    """Lift lc(f) * prod(monic factors) = f (mod p) to modulus >= target.

    Returns the monic lifted factors mod m, with m = p^(2^k) the first
    squaring of p at or past target.
    """
    m = p
    while m < target:
        m *= m
    return _hensel_split([c % m for c in f], modular_factors, p, m), m


def _hensel_split(f_mod: list[int], factors: list[list[int]], p: int,
                  m: int) -> list[list[int]]:
    """f_mod is known mod m; factors multiply to f_mod/lc mod p."""
    if len(factors) == 1:
        lc_inv = pow(f_mod[-1], -1, m)
        return [[c * lc_inv % m for c in f_mod]]
    k = len(factors) // 2
    left, right = factors[:k], factors[k:]
    g = [f_mod[-1] % p]
    for u in left:
        g = _gf_mul(g, u, p)
    h = [1]
    for u in right:
        h = _gf_mul(h, u, p)
    s, t = _gf_bezout(g, h, p)
    g_l, h_l, _ = _hensel_pair_lift(f_mod, g, h, s, t, p, m)
    return _hensel_split(g_l, left, p, m) + _hensel_split(h_l, right, p, m)


def _gf_bezout(g, h, p):
    """s, t with s*g + t*h = 1 mod p for coprime g, h."""
    r0, r1 = list(g), list(h)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _gf_divmod(r0, r1, p)
        r0, r1 = r1, r
        qs = _gf_mul(q, s1, p)
        s0, s1 = s1, _gf_trim([(a - b) % p for a, b in zip(s0 + [0] * len(qs), qs + [0] * len(s0))])
        qt = _gf_mul(q, t1, p)
        t0, t1 = t1, _gf_trim([(a - b) % p for a, b in zip(t0 + [0] * len(qt), qt + [0] * len(t0))])
    inv = pow(r0[0] if len(r0) == 1 else 0, p - 2, p)
    if len(r0) != 1:
        raise AlgebraError("factors not coprime mod p")
    return [c * inv % p for c in s0], [c * inv % p for c in t0]


_FACTOR_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
                  61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127]


def _factor_squarefree_int(f: list[int]) -> list[list[int]]:
    """Zassenhaus factorization of a primitive squarefree integer polynomial.

    Picks a prime keeping f squarefree mod p (trying a handful and taking
    the one with the fewest modular factors), Hensel-lifts past twice the
    Mignotte bound, then recombines subsets of the lifted factors.
    """
    n = len(f) - 1
    if n <= 1:
        return [f]
    best = None
    tried = 0
    for p in _FACTOR_PRIMES:
        if f[-1] % p == 0:
            continue
        fp = [c % p for c in f]
        dfp = _gf_trim([i * c % p for i, c in enumerate(fp)][1:])
        if not dfp or len(_gf_gcd(fp, dfp, p)) > 1:
            continue
        inv = pow(fp[-1], p - 2, p)
        monic = [c * inv % p for c in fp]
        facs = _gf_factor_squarefree(monic, p, rng_state=0x9E3779B97F4A7C15 ^ p)
        if best is None or len(facs) < len(best[1]):
            best = (p, facs)
        tried += 1
        if tried >= 4 or (best and len(best[1]) == 1):
            break
    if best is None:  # pragma: no cover - would need pathological input
        raise AlgebraError("no suitable factorization prime found")
    p, modular = best
    if len(modular) == 1:
        return [f]
    # Mignotte-style bound on coefficients of any factor, times lc
    norm = math.isqrt(sum(c * c for c in f)) + 1
    bound = (1 << n) * norm * abs(f[-1])
    target = 2 * bound + 1
    lifted, m = _hensel_multilift(f, sorted(modular), p, target)
    # recombination
    result = []
    current = f[:]
    pool = lifted
    r = 1
    while 2 * r <= len(pool):
        found = True
        while found and 2 * r <= len(pool):
            found = False
            for subset in _subsets(len(pool), r):
                cand = [current[-1] % m]
                for i in subset:
                    cand = _zz_mul_mod(cand, pool[i], m)
                cand = [_sym(c, m) for c in cand]
                g = 0
                for c in cand:
                    g = math.gcd(g, c)
                if g:
                    cand = [c // g for c in cand]
                if cand[-1] < 0:
                    cand = [-c for c in cand]
                q, ok = _int_poly_trial_div(current, cand)
                if ok:
                    result.append(cand)
                    current = q
                    pool = [u for i, u in enumerate(pool) if i not in set(subset)]
                    found = True
                    break
        r += 1
    if len(current) > 1:
        g = 0
        for c in current:
            g = math.gcd(g, c)
        result.append([c // (g if current[-1] > 0 else -g) for c in current])
    return result


def _subsets(n: int, r: int):
    import itertools
    return itertools.combinations(range(n), r)


def _int_poly_trial_div(a: list[int], b: list[int]):
    """Exact division of integer polynomials; returns (quotient, success)."""
    if b[-1] == 0:
        return None, False
    a = list(a)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and a:
        if a[-1] == 0:
            a.pop()
            continue
        if a[-1] % b[-1] != 0:
            return None, False
        k = len(a) - 1 - db
        c = a[-1] // b[-1]
        q[k] = c
        for i in range(db + 1):
            a[k + i] -= c * b[i]
        if a[-1] != 0:
            return None, False
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return (q, True) if not a else (None, False)


# ---------------------------------------------------------------------------
# Factored form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactoredPoly:
    """content * prod(factor^multiplicity), factors irreducible and normalized."""

    content: Fraction
    factors: tuple  # of (UniPoly | WHomPoly, int)

    def expand(self):
        out = None
        for f, m in self.factors:
            piece = f ** m
            out = piece if out is None else out * piece
        if out is None:
            if isinstance(self.content, Fraction) and not self.factors:
                return UniPoly([self.content])
        return out * self.content

    def multiplicity_of(self, q) -> int:
        for f, m in self.factors:
            if f == q:
                return m
        return 0

    def __iter__(self):
        return iter(self.factors)


def _factor_key(p: UniPoly):
    return (p.degree, tuple(p.coeffs))


def poly_factor(p: UniPoly) -> FactoredPoly:
    """Complete factorization over Q into irreducibles.

    Returns content and a deterministically ordered tuple of
    (irreducible primitive integer polynomial with positive lc, multiplicity).
    The content is reconstructed exactly so that
    content * prod(factor^mult) == p coefficient for coefficient.
    """
    if p.is_zero:
        raise AlgebraError("cannot factor the zero polynomial")
    if p.degree == 0:
        return FactoredPoly(p.coeffs[0], ())
    factors: dict[tuple, tuple[UniPoly, int]] = {}
    prim = p.primitive()[1]
    for sqf, mult in _squarefree_decomposition(prim):
        if sqf.degree == 0:
            continue
        for irr in _factor_squarefree_int(sqf.primitive()[1].int_coeffs()):
            q = UniPoly(irr)
            key = _factor_key(q)
            if key in factors:
                factors[key] = (q, factors[key][1] + mult)
            else:
                factors[key] = (q, mult)
    ordered = tuple(sorted(factors.values(), key=lambda fm: _factor_key(fm[0])))
    lc_prod = Fraction(1)
    for f, m in ordered:
        lc_prod *= f.lc ** m
    content = p.lc / lc_prod
    return FactoredPoly(content, ordered)


def _squarefree_decomposition(p: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm: p = unit * prod a_i^i, a_i squarefree, pairwise coprime."""
    deriv = p.derivative()
    g = poly_gcd(p, deriv)
    if g.degree == 0:
        return [(p, 1)]
    out = []
    b = p.exact_div(g)
    c = deriv.exact_div(g)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        i += 1
    return out


def rational_roots(p: UniPoly) -> list[Fraction]:
    """All rational roots (with multiplicity collapsed), via full factorization."""
    roots = []
    for f, _ in poly_factor(p).factors:
        if f.degree == 1:
            roots.append(Fraction(-f[0], f[1]))
    return sorted(roots)


# ---------------------------------------------------------------------------
# Weighted-homogeneous bivariate polynomials, weights (tau, 1)
# ---------------------------------------------------------------------------

class WHomPoly:
    """Weighted-homogeneous polynomial in (x, y) with weights (tau, 1).

    Every stored term c * x^i * y^j satisfies i*tau + j = weighted_degree.
    """

    __slots__ = ("tau", "wdeg", "terms")

    def __init__(self, tau: int, wdeg: int, terms: dict):
        clean = {}
        for (i, j), c in terms.items():
            c = _frac(c)
            if c == 0:
                continue
            if i * tau + j != wdeg:
                raise AlgebraError(
                    f"term x^{i} y^{j} violates weighted degree {wdeg} (tau={tau})")
            clean[(i, j)] = c
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "wdeg", wdeg)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("WHomPoly is immutable")

    def __reduce__(self):
        return (WHomPoly, (self.tau, self.wdeg, self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, WHomPoly):
            return NotImplemented
        return (self.tau, self.terms) == (other.tau, other.terms) and \
            (self.is_zero or self.wdeg == other.wdeg)

    def __hash__(self):
        return hash((self.tau, self.wdeg, tuple(self.terms.items())))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return WHomPoly(self.tau, self.wdeg,
                            {k: c * other for k, c in self.terms.items()})
        if self.tau != other.tau:
            raise AlgebraError("mismatched weights")
        out: dict = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return WHomPoly(self.tau, self.wdeg + other.wdeg, out)

    __rmul__ = __mul__

    def __add__(self, other):
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if (self.tau, self.wdeg) != (other.tau, other.wdeg):
            raise AlgebraError("can only add equal weighted degrees")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return WHomPoly(self.tau, self.wdeg, out)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __pow__(self, n: int):
        out = WHomPoly(self.tau, 0, {(0, 0): 1})
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, a, b):
        """Exact evaluation at integers or rationals."""
        acc = Fraction(0)
        for (i, j), c in self.terms.items():
            acc += c * Fraction(a) ** i * Fraction(b) ** j
        if acc.denominator == 1:
            return int(acc)
        return acc

    def eval_int(self, a: int, b: int) -> int:
        acc = 0
        for (i, j), c in self.terms.items():
            if c.denominator != 1:
                raise AlgebraError("eval_int needs integer coefficients")
            acc += c.numerator * a ** i * b ** j
        return acc

    def int_terms(self) -> list[tuple[int, int, int]]:
        out = []
        for (i, j), c in self.terms.items():
            if c.denominator != 1:
                raise AlgebraError("non-integer coefficients")
            out.append((i, j, c.numerator))
        return out

    def y_multiplicity(self) -> int:
        if self.is_zero:
            raise AlgebraError("zero polynomial")
        return min(j for (_, j) in self.terms)

    def dehomogenize(self) -> tuple[int, UniPoly]:
        """Return (e, P(t,1)/1) where self = y^e * lift(P) and y does not divide lift."""
        e = self.y_multiplicity()
        maxi = max(i for (i, _) in self.terms)
        coeffs = [Fraction(0)] * (maxi + 1)
        for (i, j), c in self.terms.items():
            coeffs[i] = c
        return e, UniPoly(coeffs)

    def content(self) -> Fraction:
        num, den = 0, 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> tuple[Fraction, "WHomPoly"]:
        """(signed content, primitive part whose dehomogenized lc is positive)."""
        if self.is_zero:
            return Fraction(0), self
        c = self.content()
        _, dh = self.dehomogenize()
        if dh.lc < 0:
            c = -c
        return c, self * (1 / c)

    def to_json(self) -> dict:
        return {"tau": self.tau, "weighted_degree": self.wdeg,
                "terms": {f"{i},{j}": (str(c) if c.denominator != 1 else str(c.numerator))
                          for (i, j), c in self.terms.items()}}

    @classmethod
    def from_json(cls, data: dict) -> "WHomPoly":
        terms = {}
        for key, val in data["terms"].items():
            i, j = key.split(",")
            terms[(int(i), int(j))] = Fraction(val)
        return cls(data["tau"], data["weighted_degree"], terms)

    def pretty(self, xv: str = "a", yv: str = "b") -> str:
        if self.is_zero:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
            mag = [] if abs(c) == 1 and (i or j) else [str(abs(c))]
            if i:
                mag.append(xv + (f"^{i}" if i > 1 else ""))
            if j:
                mag.append(yv + (f"^{j}" if j > 1 else ""))
            term = "*".join(mag)
            parts.append(("-" if c < 0 else ("+" if parts else "")) + term)
        return "".join(parts)

    def __repr__(self):
        return f"WHomPoly({self.pretty()})"


def whom_constant(tau: int, value: Coeff = 1) -> WHomPoly:
    return WHomPoly(tau, 0, {(0, 0): value})


def whom_x(tau: int) -> WHomPoly:
    return WHomPoly(tau, tau, {(1, 0): 1})


def whom_y(tau: int) -> WHomPoly:
    return WHomPoly(tau, 1, {(0, 1): 1})


def whom_from_univariate(h: UniPoly, tau: int, varsigma: int, power: int) -> WHomPoly:
    """Build y^(power*varsigma) * h(x / y^tau), the weighted homogenization.

    ``power`` is 2 for the x-coefficient position and 3 for the constant
    position of a short Weierstrass model; the exponent condition
    power*varsigma >= tau*deg(h) must hold for the result to be polynomial.
    """
    if power not in (2, 3):
        raise AlgebraError("power must be 2 or 3")
    if h.is_zero:
        return WHomPoly(tau, power * varsigma, {})
    w = power * varsigma
    if w < tau * h.degree:
        raise AlgebraError(
            f"degree condition violated: {power}*{varsigma} < {tau}*{h.degree}")
    terms = {}
    for i, c in enumerate(h.coeffs):
        if c:
            terms[(i, w - i * tau)] = c
    return WHomPoly(tau, w, terms)


def whom_lift(h: UniPoly, tau: int) -> WHomPoly:
    """Minimal weighted-homogeneous lift of h: y^(tau*deg h) * h(x/y^tau)."""
    return whom_from_univariate(h, tau, 0, 2) if h.is_zero else \
        WHomPoly(tau, tau * h.degree,
                 {(i, tau * (h.degree - i)): c for i, c in enumerate(h.coeffs) if c})


def whom_factor(P: WHomPoly) -> FactoredPoly:
    """Factor into y^e times lifts of the irreducible factors of P(t, 1)."""
    if P.is_zero:
        raise AlgebraError("cannot factor zero polynomial")
    e, dh = P.dehomogenize()
    uni = poly_factor(dh)
    factors = []
    if e:
        factors.append((whom_y(P.tau), e))
    for f, m in uni.factors:
        factors.append((whom_lift(f, P.tau), m))
    return FactoredPoly(uni.content, tuple(factors))


def whom_divides(Q: WHomPoly, P: WHomPoly) -> bool:
    """True iff Q divides P in Q[x, y]."""
    if Q.is_zero:
        return P.is_zero
    if P.is_zero:
        return True
    eq, q = Q.dehomogenize()
    ep, p = P.dehomogenize()
    return eq <= ep and q.divides(p)


def multiplicity(P: WHomPoly, Q: WHomPoly) -> int:
    """Largest e with Q^e dividing P; Q must be irreducible and nonzero."""
    if P.is_zero:
        raise AlgebraError("multiplicity in zero polynomial")
    eq, q = Q.dehomogenize()
    ep, p = P.dehomogenize()
    if eq > 0 and q.degree == 0:
        return ep // eq
    count = 0
    while q.divides(p):
        p = p.exact_div(q)
        count += 1
    return count


def whom_resultant_primes_bound(P: WHomPoly, Q: WHomPoly) -> int:
    """A nonzero integer whose prime divisors include every prime p for which
    P and Q acquire a common projective zero mod p (P, Q coprime over Q).

    Combines the t-resultant of the dehomogenized parts with the values at
    [1:0] and the leading coefficients; over-inclusive, which is safe for
    building excluded-prime sets.
    """
    ep, dp = P.dehomogenize()
    eq, dq = Q.dehomogenize()
    if ep > 0 and eq > 0:
        raise AlgebraError("polynomials share the factor y")
    out = 1
    if dp.degree > 0 and dq.degree > 0:
        r = poly_resultant(dp, dq)
        out *= r.numerator
    # common zero at [1:0] mod p needs p | both pure-x coefficients
    vp = dp.lc.numerator if ep == 0 else 0
    vq = dq.lc.numerator if eq == 0 else 0
    g = math.gcd(vp, vq)
    if g > 1:
        out *= g
    # degree-drop safety at primes dividing both leading coefficients
    g2 = math.gcd(dp.lc.numerator, dq.lc.numerator)
    if g2 > 1:
        out *= g2
    if out == 0:
        raise AlgebraError("resultant vanished: polynomials not coprime")
    return abs(out)
