"""Family registry, discriminant splitting, and the constants pipeline.

A family is a parametrized curve y^2 = x^3 + f(t) x + g(t) together with a
prime ell, a kernel specification for a degree-ell isogeny, and the shape
parameters (upsilon, tau, m, delta).  Loading a family validates its
admissibility class, derives the weighted-homogeneous models of both curves,
splits the two discriminants into the D+/D-/T parts, and computes the
constants (u, v, c, mu, sigma^2) that drive every statistic downstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

from .algebra import (AlgebraError, FactoredPoly, UniPoly, WHomPoly,
                      poly_factor, poly_gcd, poly_resultant,
                      sturm_real_root_count, whom_constant, whom_divides,
                      whom_factor, whom_from_univariate,
                      whom_resultant_primes_bound)
from .arith import (QuadExpr, factor_integer, is_prime, is_square_rational,
                    is_square_in_quadratic_field, jacobi, primes_up_to,
                    roots_mod_p, squarefree_part, valuation)
from .isogeny import IsogenyPair, KernelSpec, codomain_from_kernel


class FamilyError(ValueError):
    pass


class ClassificationError(FamilyError):
    """A discriminant factor fits none of the allowed splitting cases."""


class LowConfidenceError(FamilyError):
    """An empirical theta estimate was too close to the decision boundary."""


# ---------------------------------------------------------------------------
# Discriminant splitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscSplit:
    """Delta = c' T D+ D-^ell and Delta' = c T' D+^ell D- as exact identities."""

    ell: int
    tau: int
    cprime: Fraction
    c: Fraction
    dplus: tuple      # ((WHomPoly, mult in D+), ...)
    dminus: tuple
    tee: tuple        # ((WHomPoly, mult in T, mult in T'), ...)

    def _prod(self, items) -> WHomPoly:
        out = whom_constant(self.tau)
        for f, m in items:
            out = out * f ** m
        return out

    @property
    def Dplus(self) -> WHomPoly:
        return self._prod(self.dplus)

    @property
    def Dminus(self) -> WHomPoly:
        return self._prod(self.dminus)

    @property
    def T(self) -> WHomPoly:
        return self._prod([(f, m) for f, m, _ in self.tee])

    @property
    def Tprime(self) -> WHomPoly:
        return self._prod([(f, mp) for f, _, mp in self.tee])

    def parity_part(self, side: str, parity: int) -> tuple:
        """Factors of D+ or D- whose multiplicity is congruent to parity mod 2."""
        items = self.dplus if side == "+" else self.dminus
        return tuple(f for f, m in items if m % 2 == parity % 2)

    def radical(self) -> WHomPoly:
        """Product of the distinct irreducible factors of D+ D-."""
        out = whom_constant(self.tau)
        for f, _ in list(self.dplus) + list(self.dminus):
            out = out * f
        return out


def whom_sort_key(P: WHomPoly):
    return (P.wdeg, tuple(sorted((k, (v.numerator, v.denominator))
                                 for k, v in P.terms.items())))


def split_discriminant(ell: int, A: WHomPoly, B: WHomPoly,
                       Aprime: WHomPoly, Bprime: WHomPoly) -> DiscSplit:
    """Split Delta and Delta' by multiplicity ratios.

    Every shared irreducible factor P must fall into one of: ratio ell
    (P divides D-), ratio 1/ell (P divides D+), or equal multiplicities with
    P dividing both A and B (P belongs to T).  Anything else raises
    ClassificationError naming the factor.
    """
    delta = A ** 3 * 4 + B * B * 27
    delta_p = Aprime ** 3 * 4 + Bprime * Bprime * 27
    if delta.is_zero or delta_p.is_zero:
        raise FamilyError("vanishing discriminant")
    fd = whom_factor(delta)
    fdp = whom_factor(delta_p)
    mults: dict = {}
    for f, m in fd.factors:
        mults[f] = (m, 0)
    for f, m in fdp.factors:
        a, _ = mults.get(f, (0, 0))
        mults[f] = (a, m)
    dplus, dminus, tee = [], [], []
    for f in sorted(mults, key=whom_sort_key):
        m, mp = mults[f]
        if m == 0 and mp == 0:
            continue
        if m > 0 and mp == ell * m:
            dplus.append((f, m))
        elif mp > 0 and m == ell * mp:
            dminus.append((f, mp))
        elif m == mp and whom_divides(f, A) and whom_divides(f, B):
            tee.append((f, m, mp))
        else:
            raise ClassificationError(
                f"factor {f.pretty()} has multiplicities ({m}, {mp}) fitting no case")
    split = DiscSplit(ell, A.tau, fd.content, fdp.content,
                      tuple(dplus), tuple(dminus), tuple(tee))
    # re-verify the defining identities by multiplication
    lhs = split.T * split.Dplus * split.Dminus ** ell * split.cprime
    if lhs != delta:
        raise FamilyError("splitting identity failed for Delta")
    rhs = split.Tprime * split.Dplus ** ell * split.Dminus * split.c
    if rhs != delta_p:
        raise FamilyError("splitting identity failed for Delta'")
    return split


# ---------------------------------------------------------------------------
# Theta per irreducible factor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaValue:
    value: Fraction
    provenance: str      # "exact-rational" | "exact-quadratic" | "empirical"
    detail: str = ""


def theta_of_factor(fam: "FamilySpec", R: WHomPoly,
                    X: int = 10 ** 6, margin: float = 0.10) -> ThetaValue:
    """theta(R) in {1/2, 1}: whether 6B takes a square value at a zero of R.

    Exact for factors of dehomogenized degree <= 2 and for R = y (where the
    zero is [1:0]); otherwise estimated by counting roots mod p <= X weighted
    by the quadratic-residue condition, deciding by the nearest of {1/2, 1}
    with a loud failure inside the decision margin.
    """
    if whom_divides(R, fam.B):
        raise FamilyError("theta undefined: factor divides B")
    ey, r = R.dehomogenize()
    if ey > 0 and r.degree == 0:
        val = Fraction(6) * fam.B(1, 0)
        return ThetaValue(Fraction(1) if is_square_rational(val) else Fraction(1, 2),
                          "exact-rational", f"6B(1,0) = {val}")
    if r.degree == 1:
        t0 = Fraction(-r[0], r[1])
        val = Fraction(6) * Fraction(fam.g(t0))
        return ThetaValue(Fraction(1) if is_square_rational(val) else Fraction(1, 2),
                          "exact-rational", f"6g({t0}) = {val}")
    if r.degree == 2:
        a2, a1, a0 = r[2], r[1], r[0]
        disc = a1 * a1 - 4 * a2 * a0
        d = squarefree_part(disc.numerator * disc.denominator)
        # root (-a1 + sqrt(disc)) / (2 a2) written as e0 + e1 sqrt(d)
        scale = disc / d  # a positive rational square
        e = Fraction(math.isqrt(scale.numerator), math.isqrt(scale.denominator))
        t0 = QuadExpr(d, Fraction(-a1, 2 * a2), e / (2 * a2))
        acc = QuadExpr(d, 0, 0)
        for coeff in reversed(fam.g.coeffs):
            acc = acc * t0 + coeff
        z = (acc * 6).as_pair()
        ok = is_square_in_quadratic_field(d, z)
        return ThetaValue(Fraction(1) if ok else Fraction(1, 2), "exact-quadratic",
                          f"6g(root) = {z[0]} + {z[1]}*sqrt({d})")
    report = chebotarev_density_report(r, fam.g, X)
    est = report.qr_average
    dist_half, dist_one = abs(est - 0.5), abs(est - 1.0)
    if abs(est - 0.75) < margin:
        raise LowConfidenceError(
            f"empirical theta {est:.4f} within margin {margin} of the boundary")
    value = Fraction(1, 2) if dist_half < dist_one else Fraction(1)
    return ThetaValue(value, "empirical",
                      f"X={X} estimate={est:.4f} margin={abs(est - 0.75):.4f}")


# ---------------------------------------------------------------------------
# Family constants
# ---------------------------------------------------------------------------

V_BRANCHES = ("theta", "half-u", "definition")


@dataclass(frozen=True)
class FamilyConstants:
    v_branch: str
    u_plus: int
    u_minus: int
    u_plus_1: int
    u_plus_2: int
    u_minus_1: int
    u_minus_2: int
    v_plus: Fraction
    v_minus: Fraction
    v_plus_2: Fraction
    v_minus_2: Fraction
    c_plus: Fraction
    c_minus: Fraction
    mu: Fraction
    sigma_sq: Fraction
    thetas: tuple  # ((factor pretty string, ThetaValue), ...)

    def as_dict(self) -> dict:
        keys = ("u_plus", "u_minus", "u_plus_1", "u_plus_2", "u_minus_1",
                "u_minus_2", "v_plus", "v_minus", "v_plus_2", "v_minus_2",
                "c_plus", "c_minus", "mu", "sigma_sq")
        out = {k: str(getattr(self, k)) for k in keys}
        out["v_branch"] = self.v_branch
        return out


def _v_of(fam: "FamilySpec", factors: tuple, branch: str,
          theta_cache: dict) -> Fraction:
    """v applied to a squarefree product given as a tuple of irreducibles."""
    u = len(factors)
    if branch == "half-u":
        return Fraction(u, 2)
    if branch == "definition" and fam.B.wdeg % 2 == 1:
        return Fraction(u, 2)
    total = Fraction(0)
    for R in factors:
        key = R.pretty()
        if key not in theta_cache:
            theta_cache[key] = theta_of_factor(fam, R)
        total += theta_cache[key].value
    return total


def family_constants(fam: "FamilySpec", split: Optional[DiscSplit] = None,
                     v_branch: str = "theta") -> FamilyConstants:
    """u, v, c, mu, sigma^2 for a family under the chosen v branch."""
    if v_branch not in V_BRANCHES:
        raise FamilyError(f"unknown v branch {v_branch!r}")
    split = split or fam.split
    theta_cache: dict = {}
    up = len(split.dplus)
    um = len(split.dminus)
    up1 = len(split.parity_part("+", 1))
    up2 = len(split.parity_part("+", 2))
    um1 = len(split.parity_part("-", 1))
    um2 = len(split.parity_part("-", 2))
    v_plus = _v_of(fam, tuple(f for f, _ in split.dplus), v_branch, theta_cache)
    v_minus = _v_of(fam, tuple(f for f, _ in split.dminus), v_branch, theta_cache)
    v_plus_2 = _v_of(fam, split.parity_part("+", 2), v_branch, theta_cache)
    v_minus_2 = _v_of(fam, split.parity_part("-", 2), v_branch, theta_cache)
    if split.ell >= 3:
        c_plus, c_minus = v_plus, v_minus
    else:
        c_plus, c_minus = up1 + v_plus_2, um1 + v_minus_2
    return FamilyConstants(
        v_branch, up, um, up1, up2, um1, um2,
        v_plus, v_minus, v_plus_2, v_minus_2,
        Fraction(c_plus), Fraction(c_minus),
        Fraction(c_plus) - Fraction(c_minus), Fraction(c_plus) + Fraction(c_minus),
        tuple(sorted(theta_cache.items())))


def rho_exponent(constants: FamilyConstants, ell: int, k: int) -> Fraction:
    """rho(k) = (ell^k - 1) c+ - (1 - ell^-k) c-."""
    if k <= 0:
        raise FamilyError("k must be positive")
    lk = Fraction(ell) ** k
    return (lk - 1) * constants.c_plus - (1 - 1 / lk) * constants.c_minus


def delta_of_A(constants: FamilyConstants, ell: int, A) -> Fraction:
    """Tail exponent delta(A) = (alpha-1)^2 c+ + 2(1 - 1/alpha) c-, alpha = 1 + (A+c-)/c+."""
    if constants.c_plus == 0:
        raise FamilyError("delta(A) undefined when c+ = 0")
    A = Fraction(A)
    if A <= 0:
        raise FamilyError("A must be positive")
    alpha = 1 + (A + constants.c_minus) / constants.c_plus
    return (alpha - 1) ** 2 * constants.c_plus + 2 * (1 - 1 / alpha) * constants.c_minus


# ---------------------------------------------------------------------------
# Chebotarev-style density report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChebotarevReport:
    X: int
    primes_used: int
    root_average: float      # mean number of roots of h mod p
    qr_average: float        # mean number of roots with (6g|p) = 1
    root_slope: float        # fitted slope of sum 1/p #roots against loglog p
    qr_slope: float
    root_intercept: float
    qr_intercept: float


def chebotarev_density_report(h: UniPoly, g: UniPoly, X: int) -> ChebotarevReport:
    """Average root counts of h mod p, plain and weighted by (6g(t)|p) = 1.

    The running sums of (1/p) #roots are fitted against log log p by least
    squares; the direct averages estimate the number of irreducible factors
    of h and theta(h) respectively.
    """
    if X < 100:
        raise FamilyError("sample too small: X must be at least 100")
    if h.degree is None or h.degree < 1:
        raise FamilyError("h must be nonconstant")
    if poly_gcd(h, h.derivative()).degree > 0:
        raise FamilyError("h must be squarefree")
    if not g.is_zero and poly_gcd(h, g).degree > 0:
        raise FamilyError("h must be coprime to g")
    hc = h.int_coeffs()
    gc = g.int_coeffs()
    bad = abs(hc[-1])
    disc_h = poly_resultant(h, h.derivative())
    bad *= abs(disc_h.numerator)
    if not g.is_zero:
        bad *= abs(poly_resultant(h, g).numerator) or 1
    s_root = 0.0
    s_qr = 0.0
    n_root = 0
    n_qr = 0
    count = 0
    xs, ys_root, ys_qr = [], [], []
    for p in primes_up_to(X):
        if p < 5 or bad % p == 0:
            continue
        count += 1
        roots = roots_mod_p(hc, p)
        if roots:
            n_root += len(roots)
            s_root += len(roots) / p
            fixed = 0
            for t in roots:
                acc = 0
                for cg in reversed(gc):
                    acc = (acc * t + cg) % p
                if acc and jacobi(6 * acc % p, p) == 1:
                    fixed += 1
            n_qr += fixed
            s_qr += fixed / p
        if count % 256 == 0:
            xs.append(math.log(math.log(p)))
            ys_root.append(s_root)
            ys_qr.append(s_qr)
    if count == 0:
        raise FamilyError("no usable primes")
    xs.append(math.log(math.log(X)))
    ys_root.append(s_root)
    ys_qr.append(s_qr)

    def fit(ys):
        n = len(xs)
        if n < 2:
            return 0.0, ys[-1]
        mx = sum(xs) / n
        my = sum(ys) / n
        num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
        den = sum((x - mx) ** 2 for x in xs)
        slope = num / den if den else 0.0
        return slope, my - slope * mx

    rs, ri = fit(ys_root)
    qs, qi = fit(ys_qr)
    return ChebotarevReport(X, count, n_root / count, n_qr / count, rs, qs, ri, qi)


# ---------------------------------------------------------------------------
# The family record
# ---------------------------------------------------------------------------

ADMISSIBILITY_CLASSES = ("A1", "A2", "A3", "A4")


@dataclass
class FamilySpec:
    name: str
    label: str
    ell: int
    upsilon: int
    tau: int
    m: int
    delta: int
    admissibility_class: str
    f: UniPoly
    g: UniPoly
    kernel: KernelSpec
    varsigma: int = 0
    varsigma_prime: int = 0
    A: WHomPoly = None
    B: WHomPoly = None
    Aprime: WHomPoly = None
    Bprime: WHomPoly = None
    pair: IsogenyPair = None
    split: DiscSplit = None
    s_poly: UniPoly = None            # gcd(f^3, g^2), normalized
    kernel_radical: UniPoly = None    # squarefree k with s = k^r (None if deg s = 0)
    power_r: int = 1
    resultant_R: int = 1              # Res of the coprime parts (psi/nu machinery)
    lam_hat: Optional[int] = None     # provable multiple of the minimal Lambda
    s_bad: frozenset = frozenset()
    discrepancies: list = field(default_factory=list)

    @property
    def delta_poly(self) -> WHomPoly:
        return self.A ** 3 * 4 + self.B * self.B * 27

    @property
    def delta_prime_poly(self) -> WHomPoly:
        return self.Aprime ** 3 * 4 + self.Bprime * self.Bprime * 27

    def height_pair(self, a: int, b: int) -> tuple[int, int]:
        from .curves import naive_height
        return naive_height(self.A.eval_int(a, b), self.B.eval_int(a, b))

    def constants(self, v_branch: str = "theta") -> FamilyConstants:
        return family_constants(self, self.split, v_branch)


def _max_deg_ratio(f: UniPoly, g: UniPoly, df: int, dg: int) -> Fraction:
    cand = []
    if not f.is_zero:
        cand.append(Fraction(f.degree, df))
    if not g.is_zero:
        cand.append(Fraction(g.degree, dg))
    if not cand:
        raise FamilyError("f and g cannot both be zero")
    return max(cand)


def _render_split_side(content: Fraction, items) -> str:
    parts = [str(content if content.denominator != 1 else content.numerator)]
    for f, m in items:
        parts.append(f"({f.pretty()})" + (f"^{m}" if m > 1 else ""))
    return "*".join(parts)


def render_disc(split: DiscSplit, primed: bool = False) -> str:
    """Canonical rendering: content times ordered irreducible factor powers."""
    if not primed:
        items = [(f, m) for f, m, _ in split.tee] + list(split.dplus) + \
                [(f, m * split.ell) for f, m in split.dminus]
        content = split.cprime
    else:
        items = [(f, mp) for f, _, mp in split.tee] + \
                [(f, m * split.ell) for f, m in split.dplus] + list(split.dminus)
        content = split.c
    items = sorted(items, key=lambda fm: whom_sort_key(fm[0]))
    return _render_split_side(content, items)


def load_family(entry: dict) -> FamilySpec:
    """Validate a registry entry and derive every per-family artifact."""
    for key in ("name", "ell", "upsilon", "tau", "m", "delta", "class", "f", "g", "kernel"):
        if key not in entry:
            raise FamilyError(f"registry entry missing field {key!r}")
    fam = FamilySpec(
        name=entry["name"],
        label=entry.get("label", entry["name"]),
        ell=int(entry["ell"]),
        upsilon=int(entry["upsilon"]),
        tau=int(entry["tau"]),
        m=int(entry["m"]),
        delta=int(entry["delta"]),
        admissibility_class=entry["class"],
        f=UniPoly(entry["f"]),
        g=UniPoly(entry["g"]),
        kernel=KernelSpec.from_json(entry["kernel"]),
    )
    if not is_prime(fam.ell):
        raise FamilyError("ell must be prime")
    if fam.upsilon not in (1, 2) or fam.tau < 1 or fam.m < 1 or fam.delta not in (0, 1):
        raise FamilyError("invalid shape parameters")
    if fam.admissibility_class not in ADMISSIBILITY_CLASSES:
        raise FamilyError(f"unknown admissibility class {entry['class']!r}")
    fam.varsigma = 2 * fam.m if fam.upsilon == 1 else 1

    # global degree condition: max(deg f / 2, deg g / 3) = 2m / (upsilon tau)
    ratio = _max_deg_ratio(fam.f, fam.g, 2, 3)
    if ratio != Fraction(2 * fam.m, fam.upsilon * fam.tau):
        raise FamilyError(
            f"degree condition fails: max(deg f/2, deg g/3) = {ratio}, "
            f"expected {Fraction(2 * fam.m, fam.upsilon * fam.tau)}")
    if fam.m != 1 and fam.upsilon * fam.tau != 1:
        raise FamilyError("need m = 1 or upsilon * tau = 1")

    _validate_class(fam)

    fam.A = whom_from_univariate(fam.f, fam.tau, fam.varsigma, 2)
    fam.B = whom_from_univariate(fam.g, fam.tau, fam.varsigma, 3)
    fam.pair = codomain_from_kernel(fam.f, fam.g, fam.kernel, fam.ell)
    need = 0
    if not fam.pair.fprime.is_zero:
        need = max(need, -(-fam.tau * fam.pair.fprime.degree // 2))
    if not fam.pair.gprime.is_zero:
        need = max(need, -(-fam.tau * fam.pair.gprime.degree // 3))
    fam.varsigma_prime = need if need % 2 == fam.varsigma % 2 else need + 1
    fam.Aprime = whom_from_univariate(fam.pair.fprime, fam.tau, fam.varsigma_prime, 2)
    fam.Bprime = whom_from_univariate(fam.pair.gprime, fam.tau, fam.varsigma_prime, 3)

    fam.split = split_discriminant(fam.ell, fam.A, fam.B, fam.Aprime, fam.Bprime)

    if fam.admissibility_class in ("A1", "A2"):
        fam.lam_hat = lambda_cap(fam)
    _psi_parameters(fam)
    fam.s_bad = _excluded_primes(fam)
    _check_claims(fam, entry.get("tabulated", {}))
    return fam


def _validate_class(fam: FamilySpec) -> None:
    coprime = poly_gcd(fam.f, fam.g).degree == 0
    cls = fam.admissibility_class
    if cls == "A1":
        if fam.upsilon != 1 or fam.delta != 1:
            raise FamilyError("A1 requires upsilon = 1, delta = 1")
        if not coprime:
            raise FamilyError("A1 requires coprime f, g")
        if _max_deg_ratio(fam.f, fam.g, 4, 6) != Fraction(fam.m, fam.tau):
            raise FamilyError("A1 degree condition fails")
        if fam.m != 1 and fam.tau != 1:
            raise FamilyError("A1 needs m = 1 or tau = 1")
    elif cls == "A2":
        if fam.upsilon != 2 or fam.m != 1 or fam.delta != 1:
            raise FamilyError("A2 requires upsilon = 2, m = 1, delta = 1")
        if not coprime:
            raise FamilyError("A2 requires coprime f, g")
        if _max_deg_ratio(fam.f, fam.g, 2, 3) != Fraction(1, fam.tau):
            raise FamilyError("A2 degree condition fails")
    elif cls == "A3":
        if fam.upsilon != 1 or fam.tau != 1 or fam.delta != 1:
            raise FamilyError("A3 requires upsilon = tau = 1, delta = 1")
        if fam.ell < 5:
            raise FamilyError("A3 requires ell >= 5")
        if _max_deg_ratio(fam.f, fam.g, 4, 6) != fam.m:
            raise FamilyError("A3 requires integral m = max(deg f/4, deg g/6)")
        _common_real_roots_check(fam)
        s = poly_gcd(fam.f ** 3, fam.g * fam.g)
        fam.s_poly = s
        if s.degree < 4 or s.degree * (2 + fam.m) >= 24 * fam.m:
            raise FamilyError(
                f"A3 shape fails: deg s = {s.degree} outside [4, 24m/(2+m))")
        sf = poly_factor(s)
        exps = {m for _, m in sf.factors}
        if len(exps) != 1 or exps.pop() not in (2, 3, 4, 6):
            raise FamilyError("A3 shape fails: s is not k^r with r in {2,3,4,6}")
        r = sf.factors[0][1]
        k = UniPoly([1])
        for fac, _ in sf.factors:
            k = k * fac
        fam.kernel_radical, fam.power_r = k, r
        for fac, _ in sf.factors:
            mf = _mult_in(fam.f, fac)
            mg = _mult_in(fam.g, fac)
            if mf == 2 and mg == 3:
                dd = fam.f ** 3 * 4 + fam.g * fam.g * 27
                if _mult_in(dd, fac) != 6:
                    raise FamilyError("A3 multiplicity condition fails")
    elif cls == "A4":
        if fam.upsilon != 1 or fam.tau != 1 or fam.delta != 0:
            raise FamilyError("A4 requires upsilon = tau = 1, delta = 0")
        if _max_deg_ratio(fam.f, fam.g, 4, 6) != fam.m:
            raise FamilyError("A4 requires integral m = max(deg f/4, deg g/6)")
        if fam.ell in (2, 3) and not coprime:
            raise FamilyError("A4 with ell in {2,3} requires coprime f, g")
        _common_real_roots_check(fam)
        if not coprime:
            fam.s_poly = poly_gcd(fam.f ** 3, fam.g * fam.g)


def _common_real_roots_check(fam: FamilySpec) -> None:
    h = poly_gcd(fam.f, fam.g)
    if h.degree > 0 and sturm_real_root_count(h) > 0:
        raise FamilyError("f and g share a real root")


def _mult_in(p: UniPoly, q: UniPoly) -> int:
    count = 0
    while q.divides(p):
        p = p.exact_div(q)
        count += 1
    return count


# ---------------------------------------------------------------------------
# Lambda hat (classes A1/A2) and the psi/nu machinery parameters
# ---------------------------------------------------------------------------

def _binary_form_resultant(fc: list[Fraction], gc: list[Fraction],
                           m: int, n: int) -> int:
    """Resultant of two binary forms of degrees m, n given by ascending x-coefficients."""
    size = m + n
    rows = []
    fa = [fc[i] if i < len(fc) else Fraction(0) for i in range(m + 1)]
    ga = [gc[i] if i < len(gc) else Fraction(0) for i in range(n + 1)]
    den = 1
    for c in fa + ga:
        den = den * c.denominator // math.gcd(den, c.denominator)
    fi = [int(c * den) for c in fa]
    gi = [int(c * den) for c in ga]
    for k in range(n):
        rows.append([0] * k + fi + [0] * (size - m - 1 - k))
    for k in range(m):
        rows.append([0] * k + gi + [0] * (size - n - 1 - k))
    return _bareiss_det(rows)


def _bareiss_det(mat: list[list[int]]) -> int:
    n = len(mat)
    m = [row[:] for row in mat]
    prev = 1
    sign = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def lambda_cap(fam: FamilySpec) -> int:
    """A provable multiple of the least Lambda with: n^12 | gcd(A^3, B^2) => n | Lambda.

    Write A = cf * Ahat, B = cg * Bhat with primitive integer parts.  From
    12k <= min(3 v_p(cf) + 3 v_p(Ahat(a,b)), 2 v_p(cg) + 2 v_p(Bhat(a,b)))
    and the resultant bound on the primitive parts (which for general tau
    passes through the homogenized power forms and the coprimality defect
    of the representative set), each prime contributes

        e_max(p) = floor((max(3 v_p(cf), 2 v_p(cg)) + bound_p) / 12),

    with bound_p = 3 v_p(Res) when tau = upsilon = 1 and
    bound_p = (v_p(Res_pow) + 6 vs^2 (upsilon tau - 1)) / (vs tau) otherwise.
    """
    if poly_gcd(fam.f, fam.g).degree != 0:
        raise FamilyError("lambda_cap requires coprime f and g")
    vs, tau, ups = fam.varsigma, fam.tau, fam.upsilon
    cf, fhat = fam.f.primitive()
    cg, ghat = fam.g.primitive()
    cf_n = abs(cf.numerator)
    cg_n = abs(cg.numerator)
    Ahat = whom_from_univariate(fhat, tau, vs, 2) if False else None
    A_hat = _whom_min_lift(fhat, tau)
    B_hat = _whom_min_lift(ghat, tau)
    # pad with y powers so the weighted degrees match 2vs, 3vs
    from .algebra import whom_y
    if A_hat.wdeg < 2 * vs:
        A_hat = A_hat * whom_y(tau) ** (2 * vs - A_hat.wdeg)
    if B_hat.wdeg < 3 * vs:
        B_hat = B_hat * whom_y(tau) ** (3 * vs - B_hat.wdeg)
    if tau == 1 and ups == 1:
        res = whom_resultant_primes_bound(A_hat, B_hat)

        def bound_of(v: int) -> Fraction:
            return Fraction(3 * v)

        threshold_large = 4  # v_p(res) >= 4 needed for e >= 1 at content-free p
    else:
        j, i = 3 * vs, 2 * vs
        PF = A_hat ** (tau * j)
        QG = B_hat ** (tau * i)

        def collapse(P: WHomPoly) -> list[Fraction]:
            deg = P.wdeg // tau
            out = [Fraction(0)] * (deg + 1)
            for (ii, jj), cc in P.terms.items():
                if jj % tau:
                    raise FamilyError("power form not a polynomial in y^tau")
                out[ii] = cc
            return out

        res = abs(_binary_form_resultant(collapse(PF), collapse(QG), i * j, i * j))
        if res == 0:
            raise FamilyError("power-form resultant vanished")
        shift = 6 * vs * vs * (ups * tau - 1)
        if Fraction(shift, vs * tau) >= 12:
            raise FamilyError("unsupported shape: unbounded prime-independent part")

        def bound_of(v: int) -> Fraction:
            return Fraction(v + shift, vs * tau)

        threshold_large = max(1, math.ceil((12 - Fraction(shift, vs * tau)) * vs * tau))

    # collect candidate primes: content primes plus small divisors of res
    vals: dict[int, int] = {}
    work = res
    for p in primes_up_to(100_000):
        if p * p > work:
            break
        if work % p == 0:
            v = 0
            while work % p == 0:
                work //= p
                v += 1
            vals[p] = v
    if work > 1:
        if work < 100_000 ** threshold_large and is_prime(work):
            vals[work] = 1
        elif work < 100_000 ** threshold_large:
            pass  # every prime power in the cofactor stays below the threshold
        else:
            for p, v in factor_integer(work):
                vals[p] = v
    candidates = set(vals)
    for n in (cf_n, cg_n):
        if n > 1:
            for p, _ in factor_integer(n):
                candidates.add(p)
    lam = 1
    for p in sorted(candidates):
        content_part = max(3 * valuation(cf_n, p) if cf_n > 1 else 0,
                           2 * valuation(cg_n, p) if cg_n > 1 else 0)
        e = int((content_part + bound_of(vals.get(p, 0))) // 12)
        if e > 0:
            lam *= p ** e
    return lam


def _psi_parameters(fam: FamilySpec) -> None:
    """K, r, and the resultant constant for the local-density machinery.

    With s = gcd(f^3, g^2) = k^r (r = 1, k = 1 when s is constant), the
    constant is Res(A^3 / K^r, B^2 / K^r) up to the excluded-prime closure.
    """
    if fam.s_poly is None:
        s = poly_gcd(fam.f ** 3, fam.g * fam.g)
        fam.s_poly = s
    s = fam.s_poly
    if s.degree == 0:
        fam.kernel_radical = None
        fam.power_r = 1
        a3 = fam.A ** 3
        b2 = fam.B * fam.B
        try:
            fam.resultant_R = whom_resultant_primes_bound(a3, b2)
        except AlgebraError:
            fam.resultant_R = 1
        return
    if fam.kernel_radical is None:
        sf = poly_factor(s)
        exps = {m for _, m in sf.factors}
        if len(exps) == 1:
            fam.power_r = exps.pop()
            k = UniPoly([1])
            for fac, _ in sf.factors:
                k = k * fac
            fam.kernel_radical = k
        else:
            fam.power_r = 1
            fam.kernel_radical = None
            fam.resultant_R = 1
            return
    K = whom_from_univariate(fam.kernel_radical, fam.tau,
                             fam.tau * fam.kernel_radical.degree, 2) \
        if False else _whom_min_lift(fam.kernel_radical, fam.tau)
    a3 = fam.A ** 3
    b2 = fam.B * fam.B
    kr = K ** fam.power_r
    a_red = _whom_exact_div(a3, kr)
    b_red = _whom_exact_div(b2, kr)
    ea, da = a_red.dehomogenize()
    eb, db = b_red.dehomogenize()
    res = poly_resultant(da, db) if da.degree > 0 and db.degree > 0 else Fraction(1)
    fam.resultant_R = abs(res.numerator) or 1


def _whom_min_lift(h: UniPoly, tau: int) -> WHomPoly:
    from .algebra import whom_lift
    return whom_lift(h, tau)


def _whom_exact_div(P: WHomPoly, Q: WHomPoly) -> WHomPoly:
    ep, dp = P.dehomogenize()
    eq, dq = Q.dehomogenize()
    if eq > ep:
        raise AlgebraError("y-multiplicity does not divide")
    quot = dp.exact_div(dq)
    from .algebra import whom_lift, whom_y
    lift = whom_lift(quot, P.tau)
    extra_y = P.wdeg - Q.wdeg - lift.wdeg
    if extra_y < 0:
        raise AlgebraError("inconsistent weighted degrees in division")
    out = lift
    if extra_y:
        out = out * whom_y(P.tau) ** extra_y
    # restore content lost by lifting the primitive quotient
    cp = dp.lc / (dq.lc * quot.lc)
    if cp != 1:
        out = out * cp
    return out


def _excluded_primes(fam: FamilySpec) -> frozenset:
    """Static excluded primes: 6 ell, contents, Lambda hat, and the resultant
    obstructions from the sandwich construction."""
    bad = set()

    def add_int(n: int):
        if n in (0, 1, -1):
            return
        for p, _ in factor_integer(n):
            bad.add(p)

    add_int(6 * fam.ell)
    add_int(fam.split.cprime.numerator)
    add_int(fam.split.cprime.denominator)
    add_int(fam.split.c.numerator)
    add_int(fam.split.c.denominator)
    if fam.lam_hat:
        add_int(fam.lam_hat)
    dp, dm = fam.split.Dplus, fam.split.Dminus
    if not dp.wdeg == 0 and not dm.wdeg == 0:
        try:
            add_int(whom_resultant_primes_bound(dp, dm))
        except AlgebraError:
            pass
    if fam.tau == 1 and fam.upsilon == 1:
        if fam.kernel_radical is None:
            try:
                add_int(whom_resultant_primes_bound(fam.A, fam.B))
            except AlgebraError:
                pass
        else:
            K = _whom_min_lift(fam.kernel_radical, fam.tau)
            i = _mult_in(fam.f, fam.kernel_radical)
            jm = _mult_in(fam.g, fam.kernel_radical)
            a_red = _whom_exact_div(fam.A, K ** i) if i else fam.A
            b_red = _whom_exact_div(fam.B, K ** jm) if jm else fam.B
            for pairing in ((K, a_red * b_red), (a_red, b_red)):
                try:
                    add_int(whom_resultant_primes_bound(pairing[0], pairing[1]))
                except AlgebraError:
                    pass
    add_int(fam.resultant_R)
    return frozenset(bad)


def _check_claims(fam: FamilySpec, claims: dict) -> None:
    """Compare computed renderings against tabulated source claims.

    Mismatches are recorded with both forms; the computed value always wins
    downstream (the claims never feed any derivation).
    """
    rendered = {
        "disc": render_disc(fam.split, primed=False),
        "disc_prime": render_disc(fam.split, primed=True),
    }
    if fam.s_poly is not None and fam.s_poly.degree > 0:
        rendered["common_factor"] = fam.s_poly.pretty()
    if "mu" in claims:
        rendered["mu"] = str(family_constants(fam, fam.split, "theta").mu)
    for key, claim in claims.items():
        computed = rendered.get(key)
        if computed is None:
            continue
        if claim.replace(" ", "") != computed.replace(" ", ""):
            fam.discrepancies.append(
                {"field": key, "tabulated": claim, "computed": computed})


# ---------------------------------------------------------------------------
# Registry access
# ---------------------------------------------------------------------------

def default_registry_text() -> str:
    return resources.files(__package__).joinpath("registry.json").read_text()


def load_registry(path: Optional[str] = None) -> dict[str, FamilySpec]:
    """Load and validate every family in the registry (bundled by default)."""
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = json.loads(default_registry_text())
    out = {}
    for entry in data["families"]:
        fam = load_family(entry)
        out[fam.name] = fam
    return out


# Expected constants for the bundled families; verify-tables diffs computed
# values against these rows (zero tolerance).  rho2 is recorded only where a
# reference value exists.
EXPECTED_CONSTANTS: dict[str, dict] = {
    "z3":      {"ell": 3, "deg_disc": 12, "u_plus": 1, "u_minus": 1,
                "v_plus": "1/2", "v_minus": "1", "mu": "-1/2", "sigma_sq": "3/2",
                "rho1": "1/3"},
    "z5":      {"ell": 5, "deg_disc": 12, "u_plus": 1, "u_minus": 2,
                "v_plus": "1/2", "v_minus": "2", "mu": "-3/2", "sigma_sq": "5/2",
                "rho1": "2/5"},
    "iso7":    {"ell": 7, "deg_disc": 12, "u_plus": 1, "u_minus": 1,
                "v_plus": "1/2", "v_minus": "1/2", "mu": "0", "sigma_sq": "1",
                "rho1": "18/7"},
    "iso13":   {"ell": 13, "deg_disc": 24, "u_plus": 1, "u_minus": 1,
                "v_plus": "1/2", "v_minus": "1", "mu": "-1/2", "sigma_sq": "3/2",
                "rho1": "66/13"},
    "z2":      {"ell": 2, "deg_disc": 6, "u_plus_1": 1, "u_plus_2": 0,
                "u_minus_1": 1, "u_minus_2": 0, "v_plus_2": "0", "v_minus_2": "0",
                "mu": "0", "sigma_sq": "2", "rho1": "1/2"},
    "z4":      {"ell": 2, "deg_disc": 12, "u_plus_1": 1, "u_plus_2": 1,
                "u_minus_1": 0, "u_minus_2": 1, "v_plus_2": "1/2", "v_minus_2": "1",
                "mu": "1/2", "sigma_sq": "5/2", "rho1": "1"},
    "z2z2-k1": {"ell": 2, "deg_disc": 6, "u_plus_1": 0, "u_plus_2": 1,
                "u_minus_1": 2, "u_minus_2": 0, "v_plus_2": "1", "v_minus_2": "0",
                "mu": "-1", "sigma_sq": "3", "rho1": "0", "rho2": "3/2"},
    "z2z2-k2": {"ell": 2, "deg_disc": 6, "u_plus_1": 0, "u_plus_2": 1,
                "u_minus_1": 2, "u_minus_2": 0, "v_plus_2": "1/2", "v_minus_2": "0",
                "mu": "-3/2", "sigma_sq": "5/2", "rho1": "-1/2", "rho2": "0"},
    "z2z2-k3": {"ell": 2, "deg_disc": 6, "u_plus_1": 0, "u_plus_2": 1,
                "u_minus_1": 2, "u_minus_2": 0, "v_plus_2": "1/2", "v_minus_2": "0",
                "mu": "-3/2", "sigma_sq": "5/2", "rho1": "-1/2", "rho2": "0"},
    "cyclic4": {"ell": 2, "deg_disc": 6, "u_plus_1": 2, "u_plus_2": 0,
                "u_minus_1": 0, "u_minus_2": 1, "v_plus_2": "0", "v_minus_2": "1/2",
                "mu": "3/2", "sigma_sq": "5/2", "rho1": "7/4"},
}


def verify_constants(fam: FamilySpec, v_branch: str = "theta") -> list[dict]:
    """Diff derived constants against the expected row; empty list means clean."""
    expected = EXPECTED_CONSTANTS.get(fam.name)
    if expected is None:
        return [{"field": "name", "expected": "registered row", "computed": fam.name}]
    cn = fam.constants(v_branch)
    mismatches = []

    def check(field_name, computed, exp):
        if Fraction(str(exp)) != Fraction(computed):
            mismatches.append({"field": field_name, "expected": str(exp),
                               "computed": str(computed)})

    if fam.delta_poly.wdeg != expected["deg_disc"]:
        mismatches.append({"field": "deg_disc", "expected": expected["deg_disc"],
                           "computed": fam.delta_poly.wdeg})
    if fam.ell >= 3:
        check("u_plus", cn.u_plus, expected["u_plus"])
        check("u_minus", cn.u_minus, expected["u_minus"])
        check("v_plus", cn.v_plus, expected["v_plus"])
        check("v_minus", cn.v_minus, expected["v_minus"])
    else:
        check("u_plus_1", cn.u_plus_1, expected["u_plus_1"])
        check("u_plus_2", cn.u_plus_2, expected["u_plus_2"])
        check("u_minus_1", cn.u_minus_1, expected["u_minus_1"])
        check("u_minus_2", cn.u_minus_2, expected["u_minus_2"])
        check("v_plus_2", cn.v_plus_2, expected["v_plus_2"])
        check("v_minus_2", cn.v_minus_2, expected["v_minus_2"])
    check("mu", cn.mu, expected["mu"])
    check("sigma_sq", cn.sigma_sq, expected["sigma_sq"])
    check("rho1", rho_exponent(cn, fam.ell, 1), expected["rho1"])
    if "rho2" in expected:
        check("rho2", rho_exponent(cn, fam.ell, 2), expected["rho2"])
    return mismatches
