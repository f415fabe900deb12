"""Integer number theory: primality, factorization, residue symbols, square tests.

All routines are exact and deterministic; the Pollard rho cycle parameters
are derived from a caller-supplied seed so factorizations are reproducible.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


class ArithError(ValueError):
    pass


# -- primes ------------------------------------------------------------------

_TRIAL_LIMIT = 100_000


@lru_cache(maxsize=None)
def primes_up_to(n: int) -> tuple:
    """All primes <= n by a sieve of Eratosthenes."""
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p:: p] = bytearray(len(sieve[p * p:: p]))
    return tuple(i for i in range(n + 1) if sieve[i])


_SMALL_PRIMES = None


def _small_primes():
    global _SMALL_PRIMES
    if _SMALL_PRIMES is None:
        _SMALL_PRIMES = primes_up_to(_TRIAL_LIMIT)
    return _SMALL_PRIMES


# deterministic Miller-Rabin witness set, valid below 3.3 * 10^24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int, seed: int) -> int:
    """One nontrivial factor of odd composite n by Brent's cycle variant."""
    if n % 2 == 0:
        return 2
    state = seed or 1
    while True:
        state = (state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        y = state % (n - 1) + 1
        state = (state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        c = state % (n - 1) + 1
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor_integer(n: int, seed: int = 1) -> list[tuple[int, int]]:
    """Complete factorization of |n| as a sorted list of (prime, exponent).

    Trial division to 10^5, then Miller-Rabin plus Brent-cycled Pollard rho.
    The sign of n is ignored (use n < 0 checks at call sites).
    """
    if n == 0:
        raise ArithError("cannot factor zero")
    n = abs(n)
    out: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if m < _TRIAL_LIMIT * _TRIAL_LIMIT or is_prime(m):
                out[m] = out.get(m, 0) + 1
                continue
            root = _perfect_power_root(m)
            if root is not None:
                b, k = root
                stack.extend([b] * k)
                continue
            d = _brent_rho(m, seed)
            stack.append(d)
            stack.append(m // d)
    return sorted(out.items())


def _perfect_power_root(n: int):
    for k in range(2, n.bit_length() + 1):
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand > 1 and cand ** k == n:
                return cand, k
    return None


def divisors_from_factorization(fact: list[tuple[int, int]]) -> list[int]:
    out = [1]
    for p, e in fact:
        out = [d * p ** k for d in out for k in range(e + 1)]
    return sorted(out)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ArithError("valuation of zero")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


# -- residue symbols -----------------------------------------------------------

def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd n > 0, by quadratic reciprocity."""
    if n <= 0 or n % 2 == 0:
        raise ArithError("jacobi requires odd positive n")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p); validates that p is an odd prime."""
    if p == 2 or not is_prime(p):
        raise ArithError(f"{p} is not an odd prime")
    return jacobi(a, p)


def sqrt_mod_p(a: int, p: int) -> int:
    """A square root of a mod p (p odd prime, (a|p) = 1), by Tonelli-Shanks."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # find a quadratic nonresidue
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def roots_mod_p(coeffs: list[int], p: int) -> list[int]:
    """Roots in F_p of the integer polynomial with the given ascending coefficients.

    Degree <= 2 is solved directly; higher degrees go through gcd with x^p - x
    followed by equal-degree splitting into linear factors.
    """
    cs = [c % p for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ArithError("zero polynomial mod p")
    deg = len(cs) - 1
    if deg == 0:
        return []
    if deg == 1:
        return [-cs[0] * pow(cs[1], p - 2, p) % p]
    if deg == 2 and p > 2:
        a, b, c = cs[2], cs[1], cs[0]
        disc = (b * b - 4 * a * c) % p
        chi = jacobi(disc, p) if disc else 0
        if chi == -1:
            return []
        s = sqrt_mod_p(disc, p)
        inv = pow(2 * a, p - 2, p)
        roots = {(-b + s) * inv % p, (-b - s) * inv % p}
        return sorted(roots)
    from .algebra import _gf_gcd, _gf_pow_mod, _gf_divmod  # dense mod-p helpers

    inv = pow(cs[-1], p - 2, p)
    f = [c * inv % p for c in cs]
    xp = _gf_pow_mod([0, 1], p, f, p)
    xp = list(xp)
    if len(xp) < 2:
        xp = xp + [0] * (2 - len(xp))
    xp[1] = (xp[1] - 1) % p
    g = _gf_gcd(xp, f, p)
    roots = []
    stack = [g]
    state = 0xC0FFEE ^ p
    while stack:
        u = stack.pop()
        d = len(u) - 1
        if d <= 0:
            continue
        if d == 1:
            roots.append(-u[0] % p)
            continue
        while True:
            state = (state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
            r = state % p
            h = _gf_pow_mod([r, 1], (p - 1) // 2, u, p)
            h = list(h)
            if h:
                h[0] = (h[0] - 1) % p
            w = _gf_gcd(h, u, p)
            if 0 < len(w) - 1 < d:
                stack.append(w)
                stack.append(_gf_divmod(u, w, p)[0])
                break
    return sorted(roots)


# -- square tests ----------------------------------------------------------------

def is_square_rational(q: Fraction) -> bool:
    q = Fraction(q)
    if q < 0:
        return False
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    return rn * rn == q.numerator and rd * rd == q.denominator


def squarefree_part(n: int) -> int:
    """The squarefree integer d with n = d * square, keeping the sign of n."""
    if n == 0:
        raise ArithError("squarefree part of zero")
    sign = -1 if n < 0 else 1
    d = 1
    for p, e in factor_integer(n):
        if e % 2:
            d *= p
    return sign * d


def is_square_in_quadratic_field(d: int, z: tuple[Fraction, Fraction]) -> bool:
    """Whether z = z0 + z1*sqrt(d) is a square in Q(sqrt(d)).

    d must be squarefree and not 0 or 1.  For z1 != 0, z is a square iff
    u^4 - z0 u^2 + z1^2 d / 4 has a rational root u (then z = (u + w sqrt d)^2
    with w = z1 / (2u)).  For rational z, test z in Q^2 or z/d in Q^2.
    """
    if d in (0, 1) or squarefree_part(d) != d:
        raise ArithError("d must be squarefree and different from 0, 1")
    z0, z1 = Fraction(z[0]), Fraction(z[1])
    if z1 == 0:
        return is_square_rational(z0) or is_square_rational(z0 / d)
    # u^2 = (z0 +- s)/2 where s^2 = z0^2 - z1^2 d
    disc = z0 * z0 - z1 * z1 * d
    if disc < 0:
        return False
    if not is_square_rational(disc):
        return False
    s = Fraction(math.isqrt(disc.numerator), math.isqrt(disc.denominator))
    for u_sq in ((z0 + s) / 2, (z0 - s) / 2):
        if u_sq > 0 and is_square_rational(u_sq):
            return True
    return False


class QuadExpr:
    """Element z0 + z1*sqrt(d) of Q(sqrt d), exact arithmetic for evaluation."""

    __slots__ = ("d", "a", "b")

    def __init__(self, d: int, a=0, b=0):
        self.d = d
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadExpr(self.d, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadExpr(self.d, self.a * o.a + self.b * o.b * self.d,
                        self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, QuadExpr):
            if other.d != self.d:
                raise ArithError("mixed quadratic fields")
            return other
        return QuadExpr(self.d, other, 0)

    def as_pair(self) -> tuple[Fraction, Fraction]:
        return (self.a, self.b)
