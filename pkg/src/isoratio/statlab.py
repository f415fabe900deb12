"""Per-curve local ratio exponents and the family-level experiments.

For each parameter point the local exponent at p records whether the
Tamagawa number ratio of the isogenous pair at p is ell, 1/ell, or 1; the
sum over primes is the additive statistic whose distribution, averages, and
tails the experiments measure.  Primes where the clean local law does not
apply are reported as excluded, never silently zeroed, and can be resolved
against the exact Tamagawa ratio oracle at multiplicative primes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .arith import factor_integer, jacobi, valuation
from .curves import CurveModel, Reduction, minimal_at_p, reduction_type, tamagawa_mult
from .enumerate import EnumError, ParamPoint, enumerate_family
from .family import FamilySpec


class StatError(ValueError):
    pass


EXCLUDED = "excluded"


# ---------------------------------------------------------------------------
# Local exponents
# ---------------------------------------------------------------------------

def _part_value(fam: FamilySpec, side: str, parity: Optional[int],
                a: int, b: int) -> int:
    split = fam.split
    items = split.dplus if side == "+" else split.dminus
    out = 1
    for f, m in items:
        if parity is not None and m % 2 != parity % 2:
            continue
        out *= f.eval_int(a, b) ** (1 if parity is not None else m)
    return out


def local_exponent(fam: FamilySpec, a: int, b: int, p: int):
    """Local ratio exponent at p: +1, -1, 0, or (EXCLUDED, reason).

    Mirrors the clean local law: for ell >= 3 the exponent is +-1 exactly
    when p divides the matching side and 6B is a nonzero square mod p; for
    ell = 2 factors of odd multiplicity give +-1 unconditionally and factors
    of even multiplicity require the square condition.  Excluded cases: the
    static bad set, common divisors of the two sides, common divisors of
    (A, B) when ell is 2 or 3, and square hits p^2 | radical for ell = 2.
    """
    split = fam.split
    if p in fam.s_bad:
        return (EXCLUDED, "static bad prime")
    dp = _part_value(fam, "+", None, a, b)
    dm = _part_value(fam, "-", None, a, b)
    if dp % p == 0 and dm % p == 0:
        return (EXCLUDED, "common divisor of both sides")
    A_val = fam.A.eval_int(a, b)
    B_val = fam.B.eval_int(a, b)
    if fam.ell in (2, 3) and A_val % p == 0 and B_val % p == 0:
        return (EXCLUDED, "common divisor of (A, B)")
    if fam.ell == 2:
        rad = 1
        for f, _ in list(split.dplus) + list(split.dminus):
            rad *= f.eval_int(a, b)
        if rad % (p * p) == 0:
            return (EXCLUDED, "square hit on the radical")
    if fam.ell >= 5 and A_val % p == 0 and B_val % p == 0:
        return 0
    chi = jacobi(6 * B_val % p, p) if (6 * B_val) % p else 0
    if fam.ell >= 3:
        if dp % p == 0:
            return 1 if chi == 1 else 0
        if dm % p == 0:
            return -1 if chi == 1 else 0
        return 0
    # ell = 2: parity-split law
    dp1 = _part_value(fam, "+", 1, a, b)
    dp2 = _part_value(fam, "+", 2, a, b)
    dm1 = _part_value(fam, "-", 1, a, b)
    dm2 = _part_value(fam, "-", 2, a, b)
    if dp1 % p == 0 or (dp2 % p == 0 and chi == 1):
        return 1
    if dm1 % p == 0 or (dm2 % p == 0 and chi == 1):
        return -1
    return 0


@dataclass(frozen=True)
class CurveRecord:
    point: ParamPoint
    local_exponents: tuple   # ((p, exponent), ...) for nonzero exponents
    excluded_hits: tuple     # ((p, reason), ...)
    exponent_sum: int

    @property
    def n_plus(self) -> int:
        return sum(1 for _, e in self.local_exponents if e == 1)

    @property
    def n_minus(self) -> int:
        return sum(1 for _, e in self.local_exponents if e == -1)

    def csv_row(self) -> str:
        pt = self.point
        return (f"{pt.a},{pt.b},{pt.H},{self.exponent_sum},"
                f"{self.n_plus},{self.n_minus},{len(self.excluded_hits)}")


def curve_exponent_sum(fam: FamilySpec, point: ParamPoint) -> CurveRecord:
    """Assemble the record for one curve: factor the two side values and
    evaluate the local exponent at every prime divisor plus the bad set."""
    a, b = point.a, point.b
    primes = set(fam.s_bad)
    for f, _ in list(fam.split.dplus) + list(fam.split.dminus):
        v = f.eval_int(a, b)
        if v == 0:
            raise StatError("degenerate point reached the statistics path")
        for p, _ in factor_integer(v):
            primes.add(p)
    exps = []
    hits = []
    total = 0
    for p in sorted(primes):
        if p in fam.s_bad and point.Delta_val % p != 0:
            continue  # a bad prime of good reduction contributes nothing
        val = local_exponent(fam, a, b, p)
        if isinstance(val, tuple):
            hits.append((p, val[1]))
            continue
        if val:
            exps.append((p, val))
            total += val
    return CurveRecord(point, tuple(exps), tuple(hits), total)


# ---------------------------------------------------------------------------
# Exact Tamagawa ratio oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    p: int
    status: str         # "agree" | "disagree" | "skipped"
    detail: str
    exponent: Optional[int] = None
    ratio_valuation: Optional[int] = None


def oracle_cross_check(fam: FamilySpec, point: ParamPoint, p: int) -> OracleResult:
    """Compare the local exponent against the ell-adic valuation of the exact
    Tamagawa ratio c_p(E') / c_p(E) computed from minimal models.

    Additive reduction is reported as skipped, matching the policy that
    those Tamagawa numbers are not computed.
    """
    if p <= 3:
        return OracleResult(p, "skipped", "p <= 3 outside the local law")
    a, b = point.a, point.b
    E = CurveModel(fam.A.eval_int(a, b), fam.B.eval_int(a, b))
    Ep = CurveModel(fam.Aprime.eval_int(a, b), fam.Bprime.eval_int(a, b))
    rt = reduction_type(E, p)
    rtp = reduction_type(Ep, p)
    if rt.kind == Reduction.ADDITIVE or rtp.kind == Reduction.ADDITIVE:
        return OracleResult(p, "skipped", "additive reduction")
    c = 1 if rt.kind == Reduction.GOOD else tamagawa_mult(E, p).tamagawa
    cp = 1 if rtp.kind == Reduction.GOOD else tamagawa_mult(Ep, p).tamagawa
    ratio = Fraction(cp, c)
    v = valuation(ratio.numerator, fam.ell) - valuation(ratio.denominator, fam.ell)
    loc = local_exponent(fam, a, b, p)
    if isinstance(loc, tuple):
        return OracleResult(p, "skipped", f"excluded: {loc[1]}", None, v)
    status = "agree" if v == loc else "disagree"
    return OracleResult(p, status, f"c_p ratio {ratio}", loc, v)


def oracle_sweep(fam: FamilySpec, records: list, progress: bool = False) -> dict:
    """Run the oracle at every candidate prime of every record.

    Candidate primes: all divisors of Delta(a, b), found by factoring the
    split parts (never Delta itself).  Returns counters plus any disagreements.
    """
    agree = skipped = 0
    disagreements = []
    excluded_total = 0
    for rec in records:
        a, b = rec.point.a, rec.point.b
        primes = set()
        for f, _ in (list(fam.split.dplus) + list(fam.split.dminus) +
                     [(f, m) for f, m, _ in fam.split.tee]):
            v = f.eval_int(a, b)
            if v:
                for p, _ in factor_integer(v):
                    primes.add(p)
        for p, _ in factor_integer(fam.split.cprime.numerator or 1):
            primes.add(p)
        excluded_total += len(rec.excluded_hits)
        for p in sorted(primes):
            if p <= 3 or rec.point.Delta_val % p != 0:
                continue
            res = oracle_cross_check(fam, rec.point, p)
            if res.status == "agree":
                agree += 1
            elif res.status == "skipped":
                skipped += 1
            else:
                disagreements.append((rec.point.a, rec.point.b, p, res))
    return {"agree": agree, "skipped": skipped,
            "excluded_hits": excluded_total, "disagreements": disagreements}


# ---------------------------------------------------------------------------
# Exact per-prime class densities
# ---------------------------------------------------------------------------

def theoretical_profile(fam: FamilySpec, p_cut: int) -> dict:
    """Exact class densities d+(p), d-(p) over F_p^2 minus the origin.

    Counts follow the clean local law read on residue classes: zero on
    classes where both sides or both models vanish, the square condition via
    a residue table.  Bad primes are omitted.  Returns
    {p: (d_plus, d_minus)} with exact fractions.
    """
    if p_cut > 1000:
        raise StatError("profile guard: p_cut above 1000")
    from .arith import primes_up_to
    out = {}
    for p in primes_up_to(p_cut):
        if p in fam.s_bad or p <= 3:
            continue
        ar = np.arange(p, dtype=np.int64)
        Ag, Bg = np.meshgrid(ar, ar, indexing="ij")

        def grid_eval(poly):
            total = np.zeros((p, p), dtype=np.int64)
            for i, j, c in poly.int_terms():
                term = (c % p) * pow_mod_grid(Ag, i, p) * pow_mod_grid(Bg, j, p)
                total = (total + term) % p
            return total

        sq = np.zeros(p, dtype=bool)
        sq[(ar * ar) % p] = True
        Av = grid_eval(fam.A)
        Bv = grid_eval(fam.B)
        chi1 = np.zeros((p, p), dtype=bool)
        six_b = (6 * Bv) % p
        chi1 = (six_b != 0) & sq[six_b]
        both_models = (Av == 0) & (Bv == 0)
        dp_all = np.ones((p, p), dtype=np.int64)
        dm_all = np.ones((p, p), dtype=np.int64)
        dp_parts = {1: np.ones((p, p), dtype=np.int64),
                    2: np.ones((p, p), dtype=np.int64)}
        dm_parts = {1: np.ones((p, p), dtype=np.int64),
                    2: np.ones((p, p), dtype=np.int64)}
        for f, m in fam.split.dplus:
            v = grid_eval(f)
            dp_all = (dp_all * v) % p
            dp_parts[2 - (m % 2)] = (dp_parts[2 - (m % 2)] * v) % p
        for f, m in fam.split.dminus:
            v = grid_eval(f)
            dm_all = (dm_all * v) % p
            dm_parts[2 - (m % 2)] = (dm_parts[2 - (m % 2)] * v) % p
        origin = (Ag == 0) & (Bg == 0)
        excluded = ((dp_all == 0) & (dm_all == 0)) | both_models | origin
        if fam.ell >= 3:
            plus = (dp_all == 0) & chi1 & ~excluded
            minus = (dm_all == 0) & chi1 & ~excluded
        else:
            plus = ((dp_parts[1] == 0) | ((dp_parts[2] == 0) & chi1)) & ~excluded
            minus = ((dm_parts[1] == 0) | ((dm_parts[2] == 0) & chi1)) & ~excluded
            minus = minus & ~plus
        out[p] = (Fraction(int(plus.sum()), p * p - 1),
                  Fraction(int(minus.sum()), p * p - 1))
    return out


def pow_mod_grid(grid, e: int, p: int):
    if e == 0:
        return np.ones_like(grid)
    result = np.ones_like(grid)
    base = grid % p
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

@dataclass
class ExperimentSummary:
    family: str
    N: int
    effective_N: int
    curve_count: int
    mean: Fraction
    variance: Fraction
    skewness: Optional[float]
    excess_kurtosis: Optional[float]
    predicted_mean: float
    predicted_variance: float
    per_prime: dict          # p -> {observed_plus, observed_minus, d_plus, d_minus, in_band}
    band_fraction: float
    tv_distance: Optional[float]
    sum_histogram: dict
    seed: int

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "N": str(self.N),
            "effective_N": str(self.effective_N),
            "curve_count": self.curve_count,
            "moments": {
                "mean": str(self.mean),
                "variance": str(self.variance),
                "skewness": self.skewness,
                "excess_kurtosis": self.excess_kurtosis,
            },
            "predicted": {"mean": self.predicted_mean,
                          "variance": self.predicted_variance},
            "per_prime": {str(p): {k: (str(v) if isinstance(v, Fraction) else v)
                                   for k, v in row.items()}
                          for p, row in self.per_prime.items()},
            "band_fraction": self.band_fraction,
            "tv_distance": self.tv_distance,
            "sum_histogram": {str(k): v for k, v in sorted(self.sum_histogram.items())},
            "seed": self.seed,
        }


def _escalated_enumeration(fam: FamilySpec, N: int, min_curves: int,
                           max_doublings: int = 40):
    """Enumerate at N, doubling the box (N *= 2^12) until enough curves exist.

    Full enumeration stays exact; the effective height bound is reported so
    runs are reproducible.  Raises when the budget is exhausted.
    """
    eff = N
    for _ in range(max_doublings):
        res = enumerate_family(fam, eff)
        if res.count >= min_curves:
            return res, eff
        eff *= 4096
    raise StatError(f"could not reach {min_curves} curves (last N = {eff})")


def truncated_sums(fam: FamilySpec, points: list, p_cut: int) -> np.ndarray:
    """Sum over non-excluded p <= p_cut of the class-law exponent, vectorized."""
    from .arith import primes_up_to
    a = np.array([pt.a for pt in points], dtype=np.int64)
    b = np.array([pt.b for pt in points], dtype=np.int64)
    total = np.zeros(len(points), dtype=np.int64)
    for p in primes_up_to(p_cut):
        if p in fam.s_bad or p <= 3:
            continue
        total += per_prime_values(fam, a, b, p)
    return total


def per_prime_values(fam: FamilySpec, a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Vector of class-law exponents at p for arrays of parameter points."""
    ar = np.arange(p, dtype=np.int64)
    sq = np.zeros(p, dtype=bool)
    sq[(ar * ar) % p] = True
    am = a % p
    bm = b % p

    def vec_eval(poly):
        total = np.zeros(len(a), dtype=np.int64)
        for i, j, c in poly.int_terms():
            total = (total + (c % p) * pow_mod_vec(am, i, p) * pow_mod_vec(bm, j, p)) % p
        return total

    Av = vec_eval(fam.A)
    Bv = vec_eval(fam.B)
    six_b = (6 * Bv) % p
    chi1 = (six_b != 0) & sq[six_b]
    dp_all = np.ones(len(a), dtype=np.int64)
    dm_all = np.ones(len(a), dtype=np.int64)
    dp_parts = {1: np.ones(len(a), dtype=np.int64), 2: np.ones(len(a), dtype=np.int64)}
    dm_parts = {1: np.ones(len(a), dtype=np.int64), 2: np.ones(len(a), dtype=np.int64)}
    for f, mm in fam.split.dplus:
        v = vec_eval(f)
        dp_all = (dp_all * v) % p
        dp_parts[2 - (mm % 2)] = (dp_parts[2 - (mm % 2)] * v) % p
    for f, mm in fam.split.dminus:
        v = vec_eval(f)
        dm_all = (dm_all * v) % p
        dm_parts[2 - (mm % 2)] = (dm_parts[2 - (mm % 2)] * v) % p
    excluded = ((dp_all == 0) & (dm_all == 0)) | ((Av == 0) & (Bv == 0))
    out = np.zeros(len(a), dtype=np.int64)
    if fam.ell >= 3:
        out[(dp_all == 0) & chi1 & ~excluded] = 1
        out[(dm_all == 0) & chi1 & ~excluded] = -1
    else:
        plus = ((dp_parts[1] == 0) | ((dp_parts[2] == 0) & chi1)) & ~excluded
        minus = ((dm_parts[1] == 0) | ((dm_parts[2] == 0) & chi1)) & ~excluded & ~plus
        out[plus] = 1
        out[minus] = -1
    return out


def pow_mod_vec(vec, e: int, p: int):
    if e == 0:
        return np.ones_like(vec)
    result = np.ones_like(vec)
    base = vec % p
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def exact_moments(values) -> tuple:
    """(mean, variance, skewness, excess kurtosis); the first two exact."""
    n = len(values)
    if n == 0:
        raise StatError("no values")
    s1 = sum(values)
    mean = Fraction(int(s1), n)
    c2 = sum((Fraction(int(v)) - mean) ** 2 for v in values) / n
    if c2 == 0:
        return mean, c2, None, None
    c3 = sum((Fraction(int(v)) - mean) ** 3 for v in values) / n
    c4 = sum((Fraction(int(v)) - mean) ** 4 for v in values) / n
    skew = float(c3) / float(c2) ** 1.5
    kurt = float(c4) / float(c2) ** 2 - 3.0
    return mean, c2, skew, kurt


def convolution_model(profile: dict) -> dict:
    """Distribution of the sum of independent per-prime exponents."""
    dist = {0: Fraction(1)}
    for p, (dp, dm) in sorted(profile.items()):
        nxt: dict = {}
        probs = ((1, dp), (-1, dm), (0, 1 - dp - dm))
        for s, q in dist.items():
            for step, w in probs:
                if w == 0:
                    continue
                nxt[s + step] = nxt.get(s + step, Fraction(0)) + q * w
        dist = nxt
    return dist


def tv_distance(empirical: dict, model: dict, n: int) -> float:
    keys = set(empirical) | set(model)
    return 0.5 * sum(abs(Fraction(empirical.get(k, 0), n) - model.get(k, Fraction(0)))
                     for k in keys)


def distribution_experiment(fam: FamilySpec, N: int, p_cut: int = 300,
                            seed: int = 0, min_curves: int = 1000,
                            curves_target: Optional[int] = None) -> ExperimentSummary:
    """Per-prime frequencies, full-sum moments, and the independence check.

    Enumeration is exact; when the family has fewer than min_curves points up
    to N the bound is escalated (reported in effective_N).  The independence
    diagnostic is the total-variation distance between the distribution of
    the truncated sum and the convolution of the exact per-prime laws.
    """
    want = max(min_curves, curves_target or 0)
    res, eff = _escalated_enumeration(fam, N, want)
    pts = res.points
    profile = theoretical_profile(fam, p_cut)
    trunc = truncated_sums(fam, pts, p_cut)
    # full records for the moment statistics
    records = [curve_exponent_sum(fam, pt) for pt in pts]
    sums = [rec.exponent_sum for rec in records]
    mean, var, skew, kurt = exact_moments(sums)
    pm = float(sum(dp - dm for dp, dm in profile.values()))
    pv = float(sum(dp + dm - (dp - dm) ** 2 for dp, dm in profile.values()))
    a = np.array([pt.a for pt in pts], dtype=np.int64)
    b = np.array([pt.b for pt in pts], dtype=np.int64)
    per_prime = {}
    in_band = 0
    tested = 0
    n = len(pts)
    for p, (dp, dm) in sorted(profile.items()):
        vals = per_prime_values(fam, a, b, p)
        op = int((vals == 1).sum())
        om = int((vals == -1).sum())
        row = {"observed_plus": op, "observed_minus": om,
               "d_plus": dp, "d_minus": dm}
        ok = True
        for obs, dens in ((op, dp), (om, dm)):
            se = math.sqrt(float(dens) * (1 - float(dens)) * n)
            if abs(obs - float(dens) * n) > 3 * se + 1e-9:
                ok = False
        row["in_band"] = ok
        tested += 1
        in_band += ok
        per_prime[p] = row
    hist: dict = {}
    for v in trunc:
        hist[int(v)] = hist.get(int(v), 0) + 1
    model = convolution_model(profile)
    tv = float(tv_distance(hist, model, n))
    return ExperimentSummary(
        fam.name, N, eff, n, mean, var, skew, kurt, pm, pv, per_prime,
        in_band / tested if tested else 1.0, tv, hist, seed)


def average_power(fam: FamilySpec, N: int, k: int = 1,
                  min_curves: int = 1, records: Optional[list] = None) -> Fraction:
    """Exact average of ell^(k * exponent_sum) over the enumerated curves."""
    if k < 1:
        raise StatError("k must be a positive integer")
    if records is None:
        res = enumerate_family(fam, N)
        if res.count == 0:
            raise StatError("empty family slice")
        records = [curve_exponent_sum(fam, pt) for pt in res.points]
    total = Fraction(0)
    for rec in records:
        total += Fraction(fam.ell) ** (k * rec.exponent_sum)
    return total / len(records)


def tail_count(fam: FamilySpec, N: int, A,
               records: Optional[list] = None) -> dict:
    """Count of curves with exponent sum at least A log log N."""
    if N < 16:
        raise StatError("N must be at least 16")
    A = Fraction(A)
    threshold = float(A) * math.log(math.log(N))
    if records is None:
        res = enumerate_family(fam, N)
        records = [curve_exponent_sum(fam, pt) for pt in res.points]
    count = sum(1 for rec in records if rec.exponent_sum >= threshold - 1e-12)
    out = {"threshold": threshold, "count": count, "curves": len(records),
           "ratio": count / len(records) if records else 0.0}
    cn = fam.constants()
    if cn.c_plus > 0 and A > 0:
        from .family import delta_of_A
        out["delta_A"] = str(delta_of_A(cn, fam.ell, A))
    return out


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

CURVE_CSV_HEADER = "a,b,H,exponent_sum,n_plus,n_minus,n_excluded"
POINT_CSV_HEADER = "a,b,A,B,Delta,e,H"


def write_points_csv(path: str, points: list) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(POINT_CSV_HEADER + "\n")
        for pt in points:
            fh.write(pt.csv_row() + "\n")


def write_records_csv(path: str, records: list) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CURVE_CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def write_summary_json(path: str, summary) -> None:
    payload = summary.to_json() if hasattr(summary, "to_json") else summary
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def compute_records(fam: FamilySpec, points: list, threads: int = 1) -> list:
    """Curve records for a list of points, optionally across processes.

    The merge is order-preserving, so the thread count never changes output.
    """
    if threads <= 1 or len(points) < 64:
        return [curve_exponent_sum(fam, pt) for pt in points]
    from multiprocessing import Pool
    with Pool(threads) as pool:
        return pool.starmap(curve_exponent_sum,
                            [(fam, pt) for pt in points],
                            chunksize=max(1, len(points) // (8 * threads)))
