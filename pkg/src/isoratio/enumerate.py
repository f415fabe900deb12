"""Exact enumeration of parameter points and the local density machinery.

Enumerates the representative set of a family up to height N (with the
twelfth-power height correction when delta = 1), tests congruence
equidistribution against the matching prediction, and computes the local
densities rho(p^k) and lambda(p) by brute-force class counting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .arith import divisors_from_factorization, factor_integer, valuation
from .curves import m_of
from .family import FamilySpec, FamilyError


class EnumError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Membership in the representative set
# ---------------------------------------------------------------------------

def in_coprimality_set(a: int, b: int, upsilon: int, tau: int) -> bool:
    """Exact membership in the representative set: no prime p has
    p^(upsilon*tau) dividing gcd(a, b^tau)."""
    if a == 0 and b == 0:
        raise EnumError("(0, 0) is not a parameter point")
    k = upsilon * tau
    if a == 0:
        # gcd(0, b^tau) = |b|^tau: need v_p(b) * tau < k, i.e. v_p(b) < upsilon
        return all(e < upsilon for _, e in factor_integer(b))
    if b == 0:
        return all(e < k for _, e in factor_integer(a))
    g = math.gcd(a, b)
    if g == 1:
        return True
    for p, _ in factor_integer(g):
        if min(valuation(a, p), tau * valuation(b, p)) >= k:
            return False
    return True


# ---------------------------------------------------------------------------
# Region geometry
# ---------------------------------------------------------------------------

_BOX_CACHE: dict = {}


def region_box(fam: FamilySpec) -> tuple[float, float]:
    """Bounding box (xmax, ymax) of the N = 1 region, by dense grid scan.

    The region |A| <= (1/4)^(1/3), |B| <= (1/27)^(1/2) is bounded because f
    and g share no real roots; the scan at resolution ~1e-3 is inflated by
    one percent.
    """
    key = fam.name
    if key in _BOX_CACHE:
        return _BOX_CACHE[key]
    terms_a = fam.A.int_terms()
    terms_b = fam.B.int_terms()
    bound_a = (1 / 4) ** (1 / 3)
    bound_b = (1 / 27) ** (1 / 2)

    def eval_terms(terms, xs, ys):
        out = np.zeros_like(xs)
        for i, j, c in terms:
            out += c * xs ** i * ys ** j
        return out

    L = 1.0
    for _ in range(40):
        edge = np.linspace(-L, L, 801)
        xs, ys = np.meshgrid(edge, np.array([-L, L]))
        xs2, ys2 = np.meshgrid(np.array([-L, L]), edge)
        on_edge = False
        for X, Y in ((xs, ys), (xs2.T, ys2.T)):
            inside = (np.abs(eval_terms(terms_a, X, Y)) <= bound_a) & \
                     (np.abs(eval_terms(terms_b, X, Y)) <= bound_b)
            if inside.any():
                on_edge = True
        if not on_edge:
            break
        L *= 2
    xmax = ymax = 0.0
    ys_all = np.arange(-L, L + 1e-9, max(2 * L / 4000, 1e-3))
    xs_all = np.arange(-L, L + 1e-9, max(2 * L / 4000, 1e-3))
    for chunk in np.array_split(ys_all, 32):
        X, Y = np.meshgrid(xs_all, chunk)
        inside = (np.abs(eval_terms(terms_a, X, Y)) <= bound_a) & \
                 (np.abs(eval_terms(terms_b, X, Y)) <= bound_b)
        if inside.any():
            xmax = max(xmax, float(np.abs(X[inside]).max()))
            ymax = max(ymax, float(np.abs(Y[inside]).max()))
    box = (xmax * 1.01 + 1e-6, ymax * 1.01 + 1e-6)
    _BOX_CACHE[key] = box
    return box


def _nth_root_ceil(n: int, k: int) -> int:
    if n < 0:
        raise EnumError("negative radicand")
    r = int(round(n ** (1.0 / k)))
    while r ** k < n:
        r += 1
    while r > 0 and (r - 1) ** k >= n:
        r -= 1
    return r


def scan_bounds(fam: FamilySpec, height_bound: int) -> tuple[int, int]:
    """Integer box |a| <= xb, |b| <= yb containing the region for H0 <= bound."""
    xm, ym = region_box(fam)
    vs = fam.varsigma
    xb = int(xm * float(height_bound) ** (fam.tau / (6 * vs))) + 1
    yb = int(ym * float(height_bound) ** (1 / (6 * vs))) + 1
    return xb, yb


# ---------------------------------------------------------------------------
# Exact maximal twelfth-power correction per prime
# ---------------------------------------------------------------------------

def _max_joint_power(fam: FamilySpec, p: int, cap: int,
                     budget: int = 300_000) -> Optional[int]:
    """Largest k <= cap such that some admissible (a, b) has
    p^(4k) | A(a,b) and p^(6k) | B(a,b); None when the search exceeds budget.

    Depth-first search over residues mod p^j, enforcing the divisibility
    conditions truncated at level j and pruning classes that already violate
    the coprimality condition.  When A and B acquire no deep common p-adic
    zero the live set collapses quickly; families where it does not are the
    callers' business (they get None and must fall back to a provable bound).
    """
    if cap <= 0:
        return 0
    terms_a = fam.A.int_terms()
    terms_b = fam.B.int_terms()
    k = cap
    while k >= 1:
        depth = 6 * k
        ut = fam.upsilon * fam.tau
        live = [(0, 0)]
        mod = 1
        ok = True
        for j in range(1, depth + 1):
            mod *= p
            need_a = p ** min(4 * k, j)
            need_b = p ** min(6 * k, j)
            nxt = []
            seen = set()
            for (a0, b0) in live:
                for da in range(p):
                    a = a0 + da * (mod // p)
                    for db in range(p):
                        b = b0 + db * (mod // p)
                        if (a, b) in seen:
                            continue
                        # coprimality: committed violation once both residues
                        # vanish to the required depths
                        if j >= ut and a % p ** min(ut, j) == 0 and \
                                b % p ** min(fam.upsilon, j) == 0:
                            continue
                        va = sum(c * pow(a, i, need_a) * pow(b, jj, need_a)
                                 for i, jj, c in terms_a) % need_a
                        if va:
                            continue
                        vb = sum(c * pow(a, i, need_b) * pow(b, jj, need_b)
                                 for i, jj, c in terms_b) % need_b
                        if vb:
                            continue
                        seen.add((a, b))
                        nxt.append((a, b))
                        if len(nxt) > budget:
                            return None
            live = nxt
            if not live:
                ok = False
                break
        if ok and live:
            return k
        k -= 1
    return 0


_EFF_LAMBDA_CACHE: dict = {}


def effective_lambda(fam: FamilySpec) -> int:
    """Exact closure of the possible values of m(A(a,b), B(a,b)).

    Divides lambda_cap; each prime's exponent is the exact maximum found by
    _max_joint_power, so every enumerated point's correction e divides it.
    """
    if fam.name in _EFF_LAMBDA_CACHE:
        return _EFF_LAMBDA_CACHE[fam.name]
    if fam.lam_hat is None:
        raise FamilyError("effective lambda needs a class with coprime f, g")
    out = 1
    for p, e in factor_integer(fam.lam_hat):
        kp = _max_joint_power(fam, p, e)
        out *= p ** (e if kp is None else kp)
    _EFF_LAMBDA_CACHE[fam.name] = out
    return out


# ---------------------------------------------------------------------------
# Point enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParamPoint:
    a: int
    b: int
    A_val: int
    B_val: int
    Delta_val: int
    e: int
    H: int  # exact; an int because e^12 divides the height numerator

    def csv_row(self) -> str:
        return f"{self.a},{self.b},{self.A_val},{self.B_val},{self.Delta_val},{self.e},{self.H}"


@dataclass
class EnumResult:
    family: str
    N: int
    delta: int
    points: list
    degenerate: list  # (a, b) with Delta = 0
    box: tuple

    @property
    def count(self) -> int:
        return len(self.points)


def _sign_classes(fam: FamilySpec, a: int, b: int) -> bool:
    """Whether (a, b) is the canonical representative of its class."""
    if a == 0 and b == 0:
        return False
    if fam.upsilon == 2:
        return True  # units act trivially: every integral point is its own class
    if b > 0:
        return True
    if b < 0:
        return False
    # b == 0: for odd tau the points (a,0) and (-a,0) coincide as classes
    if fam.tau % 2 == 1:
        return a > 0
    return True


def enumerate_family(fam: FamilySpec, N: int, delta: Optional[int] = None,
                     collect: bool = True) -> EnumResult:
    """All parameter points of the family with height at most N.

    delta overrides the family's setting (0: raw height H0 <= N; 1: the
    corrected bound H0 <= N e^12 with e = m(A, B)).  Points are emitted
    sorted by (b, a); degenerate points (Delta = 0) are tracked separately.
    """
    if N < 1:
        raise EnumError("N must be at least 1")
    d = fam.delta if delta is None else delta
    e_cap = 1
    if d == 1:
        e_cap = effective_lambda(fam) if fam.lam_hat is not None else 1
        if fam.lam_hat is None:
            # no divisor structure available (A3/A4); bound e via the gcd of
            # values inside the box, iterating until the cap stabilizes
            e_cap = _a3_e_cap(fam, N)
    bound = N * e_cap ** 12
    xb, yb = scan_bounds(fam, bound)
    small_primes = [p for p, _ in factor_integer(e_cap)] if e_cap > 1 else []
    pts = []
    degen = []
    amax4 = _nth_root_ceil(bound // 4, 3)
    bmax27 = math.isqrt(bound // 27)
    use_numpy = _int64_safe(fam, xb, yb)
    for b in range(-yb, yb + 1):
        cands = _row_candidates(fam, b, xb, amax4, bmax27, use_numpy)
        for a in cands:
            if not _sign_classes(fam, a, b):
                continue
            if not in_coprimality_set(a, b, fam.upsilon, fam.tau):
                continue
            A = fam.A.eval_int(a, b)
            B = fam.B.eval_int(a, b)
            if A == 0 and B == 0:
                continue
            h0 = max(4 * abs(A) ** 3, 27 * B * B)
            if d == 0:
                if h0 > N:
                    continue
                e = m_of(A, B)
            else:
                if h0 > bound:
                    continue
                e = _m_from_primes(A, B, small_primes) if small_primes else 1
                if h0 > N * e ** 12:
                    continue
            delta_val = 4 * A ** 3 + 27 * B * B
            if delta_val == 0:
                degen.append((a, b))
                continue
            h = h0 // e ** 12
            pts.append(ParamPoint(a, b, A, B, delta_val, e, h))
    pts.sort(key=lambda pt: (pt.b, pt.a))
    return EnumResult(fam.name, N, d, pts, degen, (xb, yb))


def _m_from_primes(A: int, B: int, primes: list[int]) -> int:
    if A == 0 or B == 0:
        return m_of(A, B)
    m = 1
    for p in primes:
        if A % p ** 4 == 0 and B % p ** 6 == 0:
            m *= p ** min(valuation(A, p) // 4, valuation(B, p) // 6)
    return m


_A3_PROFILE_CACHE: dict = {}


def _a3_prime_profile(fam: FamilySpec):
    """Per-family one-time analysis for the A3 correction cap.

    Returns (e_special, c4_boost, c6_boost, K-lift, i, j): exact exponents at
    the structurally special primes where the witness search terminates, and
    the resultant-valuation boosts for those where it does not.
    """
    if fam.name in _A3_PROFILE_CACHE:
        return _A3_PROFILE_CACHE[fam.name]
    from .algebra import whom_lift, whom_resultant_primes_bound
    from .family import _mult_in, _whom_exact_div

    K = fam.kernel_radical
    if K is None:
        raise FamilyError("A3 profile needs a nontrivial common factor")
    KW = whom_lift(K, fam.tau)
    i = _mult_in(fam.f, K)
    j = _mult_in(fam.g, K)
    cf, _ = fam.f.primitive()
    cg, _ = fam.g.primitive()
    V = _whom_exact_div(fam.A, KW ** i) if i else fam.A
    W = _whom_exact_div(fam.B, KW ** j) if j else fam.B

    def safe_res(P, Q):
        try:
            return abs(whom_resultant_primes_bound(P, Q))
        except Exception:
            return 1

    rv = safe_res(KW, V)
    rw = safe_res(KW, W)
    rvw = safe_res(V, W)
    cf_n, cg_n = abs(cf.numerator), abs(cg.numerator)
    special = 6 * cf_n * cg_n * rv * rw * rvw
    e_special = 1
    c4_boost = 1
    c6_boost = 1
    for p, _ in factor_integer(special):
        kp = _max_joint_power(fam, p, 8, budget=20_000)
        if kp is not None:
            e_special *= p ** kp
        else:
            c4_boost *= p ** (valuation(cf_n, p) if cf_n > 1 and cf_n % p == 0 else 0)
            c4_boost *= p ** (valuation(rv * rvw, p) if (rv * rvw) % p == 0 else 0)
            c6_boost *= p ** (valuation(cg_n, p) if cg_n > 1 and cg_n % p == 0 else 0)
            c6_boost *= p ** (valuation(rw * rvw, p) if (rw * rvw) % p == 0 else 0)
    out = (e_special, c4_boost, c6_boost, KW, i, j)
    _A3_PROFILE_CACHE[fam.name] = out
    return out


def _a3_e_cap(fam: FamilySpec, N: int) -> int:
    """Upper bound on e = m(A, B) inside the search region for delta = 1
    families with a nontrivial common factor K of the two models.

    Writing A = cA K^i V and B = cB K^j W, any prime power p^k with
    p^(4k) | A and p^(6k) | B satisfies, via the pairwise resultant
    obstructions between K, V, W on admissible pairs,

        p^(4k) <= |cA| R1 |K(a,b)|^i   and   p^(6k) <= |cB| R2 |K(a,b)|^j,

    so e is capped by the 4th/6th roots of those quantities maximized over
    the search box; the cap is iterated until stable (the box depends on it).
    """
    if fam.kernel_radical is None:
        raise EnumError(
            "height-corrected enumeration unsupported: no divisor closure and "
            "no power-shaped common factor")
    e_special, c4_boost, c6_boost, KW, i, j = _a3_prime_profile(fam)
    # any other prime contribution satisfies p^(4k) <= c4 |K(a,b)|^i and
    # p^(6k) <= c6 |K(a,b)|^j, multiplicatively across primes
    cap = 1
    for _ in range(8):
        bound = N * cap ** 12
        xb, yb = scan_bounds(fam, bound)
        kmax = 1
        for x, y in ((xb, yb), (xb, 1), (1, yb), (xb, -yb)):
            kmax = max(kmax, abs(KW.eval_int(x, y)))
        root = min(_nth_root_ceil(c4_boost * kmax ** i, 4),
                   _nth_root_ceil(c6_boost * kmax ** j, 6))
        new_cap = max(1, e_special * root)
        if new_cap <= cap:
            return cap
        cap = new_cap
    return cap


def _int64_safe(fam: FamilySpec, xb: int, yb: int) -> bool:
    bound = 0
    for i, j, c in fam.A.int_terms() + fam.B.int_terms():
        bound += abs(c) * xb ** i * yb ** j
    return bound < 2 ** 62


def _row_candidates(fam: FamilySpec, b: int, xb: int,
                    amax4: int, bmax27: int, use_numpy: bool):
    """Integer a with |A(a,b)| and |B(a,b)| inside the raw height box."""
    if not use_numpy or xb < 64:
        return range(-xb, xb + 1)
    avals = np.arange(-xb, xb + 1, dtype=np.int64)
    A = np.zeros_like(avals)
    for i, j, c in fam.A.int_terms():
        A += c * avals ** i * int(b) ** j
    B = np.zeros_like(avals)
    for i, j, c in fam.B.int_terms():
        B += c * avals ** i * int(b) ** j
    mask = (np.abs(A) <= amax4) & (np.abs(B) <= bmax27)
    return [int(v) for v in avals[mask]]


def enum_points(fam: FamilySpec, N: int, delta: Optional[int] = None) -> Iterator[ParamPoint]:
    """Generator over the enumerated points (sorted deterministically)."""
    yield from enumerate_family(fam, N, delta).points


def brute_force_points(fam: FamilySpec, N: int, delta: Optional[int] = None,
                       margin: int = 3) -> list:
    """Shortcut-free oracle enumerator: plain double loop with full m(A, B).

    Uses an inflated box and the honest factorization-based correction; meant
    for cross-checking enumerate_family at small N.
    """
    d = fam.delta if delta is None else delta
    e_cap = 1
    if d == 1:
        e_cap = effective_lambda(fam) if fam.lam_hat is not None else _a3_e_cap(fam, N)
    xb, yb = scan_bounds(fam, N * e_cap ** 12)
    xb += margin
    yb += margin
    out = []
    for b in range(-yb, yb + 1):
        for a in range(-xb, xb + 1):
            if (a, b) == (0, 0) or not _sign_classes(fam, a, b):
                continue
            if not in_coprimality_set(a, b, fam.upsilon, fam.tau):
                continue
            A = fam.A.eval_int(a, b)
            B = fam.B.eval_int(a, b)
            if A == 0 and B == 0:
                continue
            if 4 * A ** 3 + 27 * B * B == 0:
                continue
            e = m_of(A, B)
            h0 = max(4 * abs(A) ** 3, 27 * B * B)
            if h0 <= N * (e ** 12 if d == 1 else 1):
                out.append((a, b))
    return sorted(out)


def sample_points(fam: FamilySpec, count: int, seed: int,
                  box: Optional[tuple[int, int]] = None) -> list:
    """Seeded uniform draw of distinct admissible points with Delta != 0.

    When no box is given, one is sized so that roughly 4x count candidates
    exist.  Used where full enumeration up to the interesting height is not
    feasible; heights of sampled points may exceed any given N.
    """
    import random
    rng = random.Random(seed)
    if box is None:
        area = 8 * count
        ratio = fam.tau  # x roughly scales as y^tau in the region
        yb = max(2, int(area ** (1 / (1 + ratio + 1e-9)) / 2))
        xb = max(2, area // (4 * yb))
        box = (xb, yb)
    xb, yb = box
    seen = set()
    out = []
    attempts = 0
    while len(out) < count and attempts < 400 * count:
        attempts += 1
        a = rng.randint(-xb, xb)
        b = rng.randint(-yb, yb)
        if (a, b) in seen or (a, b) == (0, 0):
            continue
        seen.add((a, b))
        if not _sign_classes(fam, a, b):
            continue
        if not in_coprimality_set(a, b, fam.upsilon, fam.tau):
            continue
        A = fam.A.eval_int(a, b)
        B = fam.B.eval_int(a, b)
        if A == 0 and B == 0:
            continue
        dv = 4 * A ** 3 + 27 * B * B
        if dv == 0:
            continue
        e = m_of(A, B)
        h0 = max(4 * abs(A) ** 3, 27 * B * B)
        out.append(ParamPoint(a, b, A, B, dv, e, h0 // e ** 12))
    if len(out) < count:
        raise EnumError(f"sampling exhausted: got {len(out)} of {count}")
    out.sort(key=lambda pt: (pt.b, pt.a))
    return out


# ---------------------------------------------------------------------------
# Congruence class counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityReport:
    modulus: int
    representative: tuple
    observed_count: int
    total_count: int
    predicted: Fraction
    proposition: str

    @property
    def observed(self) -> Fraction:
        return Fraction(self.observed_count, self.total_count)

    def ratio(self) -> float:
        return float(self.observed / self.predicted) if self.predicted else math.inf


def projective_size(q: int) -> int:
    out = q
    for p, _ in factor_integer(q):
        out = out // p * (p + 1)
    return out


def _projective_class(a: int, b: int, q: int):
    a %= q
    b %= q
    if math.gcd(math.gcd(a, b), q) != 1:
        return None
    best = None
    for lam in range(1, q):
        if math.gcd(lam, q) != 1:
            continue
        cand = (a * lam % q, b * lam % q)
        if best is None or cand < best:
            best = cand
    return best


def count_congruence(fam: FamilySpec, N: int, q: int,
                     delta: Optional[int] = None,
                     representative: Optional[tuple] = None) -> list[DensityReport]:
    """Observed vs predicted frequency for congruence classes mod q.

    delta = 0 runs (and class A4) use the projective equidistribution
    prediction 1/#P1(Z/q); classes A1/A2 use the affine product over p | q of
    p^-2 (1 - p^-upsilon(1+tau))^-1; class A3 uses the lambda(p)-corrected
    projective prediction.
    """
    d = fam.delta if delta is None else delta
    res = enumerate_family(fam, N, delta=d)
    if res.count == 0:
        raise EnumError("no points enumerated")
    if d == 0 or fam.admissibility_class in ("A4",):
        prop = "projective-uniform"
        predicted_all = Fraction(1, projective_size(q))
    elif fam.admissibility_class in ("A1", "A2"):
        prop = "affine-coprime"
        if fam.lam_hat is not None and math.gcd(q, fam.lam_hat) != 1:
            raise EnumError(
                f"inapplicable: modulus {q} shares a factor with the correction "
                f"closure {fam.lam_hat}")
        predicted_all = Fraction(1)
        for p, _ in factor_integer(q):
            predicted_all *= Fraction(1, p * p) / (1 - Fraction(1, p ** (fam.upsilon * (1 + fam.tau))))
    else:  # A3
        from math import gcd as _g
        prop = "projective-lambda"
        lam_prod = Fraction(1)
        for p, _ in factor_integer(q):
            lo, hi = lambda_p(fam, p, 3)
            mid = (lo + hi) / 2
            lam_prod *= Fraction(mid).limit_denominator(10 ** 12)
        predicted_all = lam_prod / projective_size(q)
    buckets: dict = {}
    usable = 0
    for pt in res.points:
        if prop == "affine-coprime":
            key = (pt.a % q, pt.b % q)
            if math.gcd(math.gcd(key[0], key[1]), q) != 1:
                continue
        else:
            key = _projective_class(pt.a, pt.b, q)
            if key is None:
                continue
            if prop == "projective-lambda":
                av = fam.A.eval_int(key[0], key[1])
                bv = fam.B.eval_int(key[0], key[1])
                if math.gcd(math.gcd(av ** 3, bv ** 2), q) != 1:
                    continue
        usable += 1
        buckets[key] = buckets.get(key, 0) + 1
    out = []
    keys = [representative] if representative else sorted(buckets)
    for key in keys:
        out.append(DensityReport(q, key, buckets.get(key, 0), res.count,
                                 predicted_all, prop))
    return out


# ---------------------------------------------------------------------------
# Local densities: nu, psi, rho, lambda
# ---------------------------------------------------------------------------

_VALID_R = (1, 2, 3, 4, 6, 12)


def nu_of(r: int, vR: int, k: int) -> int:
    """nu(k) = max(ceil(12k / r), v_p(R))."""
    if r not in _VALID_R:
        raise EnumError(f"invalid power r = {r}")
    if k < 1 or vR < 0:
        raise EnumError("need k >= 1 and vR >= 0")
    return max(-(-12 * k // r), vR)


def psi_of(n: int, r: int, R: int) -> int:
    """psi(n) = prod over p | n of p^nu(v_p(n))."""
    if r not in _VALID_R:
        raise EnumError(f"invalid power r = {r}")
    out = 1
    for p, k in factor_integer(n):
        out *= p ** nu_of(r, valuation(R, p) if R % p == 0 else 0, k)
    return out


def _good_prime_root_count(fam: FamilySpec, p: int):
    """Simple projective zeros of the common factor K mod p, when p is away
    from every obstruction (contents, resultants, disc K).  Returns None when
    the closed form does not apply."""
    from .arith import roots_mod_p
    from .algebra import poly_resultant
    K = fam.kernel_radical
    if K is None:
        return 0 if fam.resultant_R % p else None
    bad = 6 * fam.ell * abs(fam.resultant_R)
    disc = poly_resultant(K, K.derivative())
    bad *= abs(disc.numerator) * abs(K.lc.numerator) * abs(K.coeffs[0].numerator or 1)
    cf, _ = fam.f.primitive()
    cg, _ = fam.g.primitive()
    bad *= abs(cf.numerator) * abs(cg.numerator)
    if bad % p == 0:
        return None
    count = len(roots_mod_p(K.int_coeffs(), p))
    if K.degree * 1 < K.degree + 1 and int(K.lc) % p == 0:  # pragma: no cover
        count += 1
    return count


def rho_local(fam: FamilySpec, p: int, k: int,
              guard: int = 100_000) -> Fraction:
    """Exact rho(p^k): the fraction of projective classes mod psi(p^k) where
    p^(4k) divides A and p^(6k) divides B.

    Away from the finitely many obstruction primes, the condition is
    equivalent to p^ceil(12k/r) dividing the simple-zero factor K, giving the
    closed form  rho = (#zeros of K mod p) / (p^k0 (1 + 1/p)); otherwise the
    classes mod psi(p^k) are enumerated directly (resource-guarded).
    """
    if fam.tau != 1:
        raise EnumError("local densities implemented for tau = 1 families")
    good = _good_prime_root_count(fam, p)
    if good is not None:
        if good == 0:
            return Fraction(0)
        k0 = -(-12 * k // fam.power_r)
        return Fraction(good, p ** k0 * (p + 1) // p) if False else \
            Fraction(good * p, p ** k0 * (p + 1))
    psi = psi_of(p ** k, fam.power_r, fam.resultant_R)
    if psi > guard:
        raise EnumError(f"resource guard: psi(p^k) = {psi} exceeds {guard}")
    need_a = p ** (4 * k)
    need_b = p ** (6 * k)
    hits = 0
    total = 0
    terms_a = fam.A.int_terms()
    terms_b = fam.B.int_terms()

    def ok(a, b):
        va = sum(c * pow(a, i, need_a) * pow(b, j, need_a) for i, j, c in terms_a)
        if va % need_a:
            return False
        vb = sum(c * pow(a, i, need_b) * pow(b, j, need_b) for i, j, c in terms_b)
        return vb % need_b == 0

    for x in range(psi):
        total += 1
        if ok(x, 1):
            hits += 1
    for y in range(psi // p):
        total += 1
        if ok(1, p * y):
            hits += 1
    return Fraction(hits, total)


def lambda_p(fam: FamilySpec, p: int, k_max: int,
             guard: int = 100_000) -> tuple[float, float]:
    """Interval for lambda(p) = (1 + (1 - p^(-2/m)) sum p^(2k/m) rho(p^k))^-1.

    The truncation tail is bounded using rho(p^k) <= deg(K) p^-k0 with
    k0 = max(ceil((12k - v_p(R)) / r), 0).
    """
    if k_max < 1:
        raise EnumError("k_max must be at least 1")
    m = fam.m
    r = fam.power_r
    good = _good_prime_root_count(fam, p)
    if good is not None and r > 1:
        # closed form: the series is geometric with exact terms
        if good == 0:
            return (1.0, 1.0)
        if m not in (1, 2):
            raise EnumError("closed form needs m in {1, 2}")
        num = Fraction(good * p, p + 1)
        total = Fraction(0)
        for k in range(1, 400):
            k0 = -(-12 * k // r)
            term = p ** (2 * k // m) * num / p ** k0
            total += term
            if term < Fraction(1, 10 ** 30):
                break
        inv = 1 + (1 - Fraction(1, p ** (2 // m))) * total
        v = float(1 / inv)
        return (v, v)
    total = Fraction(0)
    for k in range(1, k_max + 1):
        rho = rho_local(fam, p, k, guard)
        if rho:
            exp = Fraction(2 * k, m)
            if exp.denominator != 1:
                raise EnumError("non-integral local exponent")
            total += p ** int(exp) * rho
    vR = valuation(fam.resultant_R, p) if fam.resultant_R % p == 0 else 0
    degK = fam.kernel_radical.degree if fam.kernel_radical is not None else 1
    xi = Fraction(12, r) - Fraction(2, m)
    if xi <= 0:
        raise EnumError("divergent local factor")
    k = k_max + 1
    # sum_{k > k_max} p^(2k/m) * degK * p^(vR/r - 12k/r) as a geometric bound
    lead = degK * float(p) ** (float(vR) / r - float(xi) * k)
    tail = lead / (1 - float(p) ** (-float(xi)))
    inv_lo = 1 + (1 - float(p) ** (-2.0 / m)) * float(total)
    inv_hi = inv_lo + (1 - float(p) ** (-2.0 / m)) * tail
    return (1.0 / inv_hi, 1.0 / inv_lo)


# ---------------------------------------------------------------------------
# Region volume
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VolumeEstimate:
    volume: float
    half_width: float  # 95 percent confidence half-width
    samples: int
    box: tuple


def region_volume(fam: FamilySpec, samples: int, seed: int) -> VolumeEstimate:
    """Monte Carlo estimate of the N = 1 region volume with a confidence interval."""
    if samples < 10 ** 4:
        raise EnumError("need at least 1e4 samples")
    xm, ym = region_box(fam)
    if xm <= 0 or ym <= 0:
        raise EnumError("degenerate region")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-xm, xm, samples)
    ys = rng.uniform(-ym, ym, samples)
    A = np.zeros(samples)
    for i, j, c in fam.A.int_terms():
        A += c * xs ** i * ys ** j
    B = np.zeros(samples)
    for i, j, c in fam.B.int_terms():
        B += c * xs ** i * ys ** j
    inside = (np.abs(A) <= (1 / 4) ** (1 / 3)) & (np.abs(B) <= (1 / 27) ** 0.5)
    frac = float(inside.mean())
    area = 4 * xm * ym
    se = math.sqrt(max(frac * (1 - frac), 1e-12) / samples)
    return VolumeEstimate(area * frac, 1.96 * se * area, samples, (xm, ym))
