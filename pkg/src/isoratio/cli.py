"""Command line interface: family derivation, table verification, experiments.

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 I/O error.
All randomness flows from the single --seed; runs with identical
configuration are byte-identical regardless of --threads.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import enumerate as enum_mod
from . import statlab
from .family import (FamilyError, load_registry, render_disc, rho_exponent,
                     verify_constants)


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    registry: Optional[str] = None
    N: int = 10 ** 6
    q: int = 5
    klist: tuple = (1,)
    alist: tuple = (1,)
    p_cut: int = 300
    threads: int = 1
    seed: int = 0
    out: Optional[str] = None
    v_branch: str = "theta"
    kind: str = "distribution"
    delta: Optional[int] = None
    min_curves: int = 1000
    as_json: bool = False


def parse_exact_int(text: str) -> int:
    """Exact integer from decimal or scientific notation (1e10 -> 10**10)."""
    val = Fraction(text.replace("_", ""))
    if val.denominator != 1 or val <= 0:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return val.numerator


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="isoratio",
        description="Discriminant splitting and Tamagawa-ratio statistics "
                    "for elliptic-curve families with a prime-degree isogeny")
    ap.add_argument("--registry", help="path to a family registry JSON")
    sub = ap.add_subparsers(dest="command", required=True)

    fi = sub.add_parser("family-info", help="derive and print one family")
    fi.add_argument("--family", required=True)
    fi.add_argument("--v-branch", choices=["theta", "half-u", "definition"],
                    default="theta")
    fi.add_argument("--json", action="store_true", dest="as_json")
    fi.add_argument("--out")

    vt = sub.add_parser("verify-tables", help="diff all families against the "
                                              "expected constant rows")
    vt.add_argument("--v-branch", choices=["theta", "half-u", "definition"],
                    default="theta")

    ex = sub.add_parser("experiment", help="run a statistics experiment")
    ex.add_argument("--family", required=True)
    ex.add_argument("--kind", choices=["distribution", "average", "tail", "density"],
                    default="distribution")
    ex.add_argument("--N", type=parse_exact_int, default=10 ** 6)
    ex.add_argument("--q", type=int, default=5)
    ex.add_argument("--k", type=int, nargs="+", default=[1])
    ex.add_argument("--A", type=str, nargs="+", default=["1"])
    ex.add_argument("--p-cut", type=int, default=300, dest="p_cut")
    ex.add_argument("--threads", type=int, default=1)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--min-curves", type=int, default=1000, dest="min_curves")
    ex.add_argument("--delta", type=int, choices=[0, 1])
    ex.add_argument("--out", help="output prefix for CSV/JSON files")

    en = sub.add_parser("enum", help="enumerate parameter points to CSV")
    en.add_argument("--family", required=True)
    en.add_argument("--N", type=parse_exact_int, default=10 ** 6)
    en.add_argument("--delta", type=int, choices=[0, 1])
    en.add_argument("--out")
    return ap


def _fmt(x) -> str:
    return str(x)


def cmd_family_info(cfg: RunConfig, registry) -> int:
    fam = registry.get(cfg.family)
    if fam is None:
        print(f"unknown family {cfg.family!r}; known: {', '.join(sorted(registry))}",
              file=sys.stderr)
        return 2
    cn = fam.constants(cfg.v_branch)
    lines = [
        f"family {fam.name} ({fam.label})",
        f"  ell = {fam.ell}  class {fam.admissibility_class}  "
        f"(upsilon, tau, m, delta) = ({fam.upsilon}, {fam.tau}, {fam.m}, {fam.delta})",
        f"  f  = {fam.f.pretty()}",
        f"  g  = {fam.g.pretty()}",
        f"  f' = {fam.pair.fprime.pretty()}",
        f"  g' = {fam.pair.gprime.pretty()}",
        f"  Delta  = {render_disc(fam.split)}",
        f"  Delta' = {render_disc(fam.split, primed=True)}",
        f"  D+ = {fam.split.Dplus.pretty()}   D- = {fam.split.Dminus.pretty()}",
        f"  u+ = {cn.u_plus}  u- = {cn.u_minus}  "
        f"u+(1),u+(2),u-(1),u-(2) = {cn.u_plus_1},{cn.u_plus_2},{cn.u_minus_1},{cn.u_minus_2}",
        f"  v+ = {cn.v_plus}  v- = {cn.v_minus}  v+(2) = {cn.v_plus_2}  v-(2) = {cn.v_minus_2}",
        f"  c+ = {cn.c_plus}  c- = {cn.c_minus}  mu = {cn.mu}  sigma^2 = {cn.sigma_sq}",
        f"  rho(1) = {rho_exponent(cn, fam.ell, 1)}  rho(2) = {rho_exponent(cn, fam.ell, 2)}",
        f"  excluded primes: {sorted(fam.s_bad)}"
        + (f"  correction closure: {fam.lam_hat}" if fam.lam_hat else ""),
    ]
    for d in fam.discrepancies:
        lines.append(f"  tabulated-form mismatch [{d['field']}]: "
                     f"tabulated {d['tabulated']} vs computed {d['computed']}")
    text = "\n".join(lines)
    payload = {
        "name": fam.name, "label": fam.label, "ell": fam.ell,
        "class": fam.admissibility_class,
        "upsilon": fam.upsilon, "tau": fam.tau, "m": fam.m, "delta": fam.delta,
        "f": fam.f.to_strings(), "g": fam.g.to_strings(),
        "fprime": fam.pair.fprime.to_strings(),
        "gprime": fam.pair.gprime.to_strings(),
        "disc": render_disc(fam.split),
        "disc_prime": render_disc(fam.split, primed=True),
        "constants": cn.as_dict(),
        "rho1": str(rho_exponent(cn, fam.ell, 1)),
        "rho2": str(rho_exponent(cn, fam.ell, 2)),
        "excluded_primes": sorted(fam.s_bad),
        "lambda_cap": fam.lam_hat,
        "discrepancies": fam.discrepancies,
    }
    if cfg.as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            print(f"cannot write {cfg.out}: {exc}", file=sys.stderr)
            return 3
    return 0


def cmd_verify_tables(cfg: RunConfig, registry) -> int:
    failures = 0
    for name in sorted(registry):
        fam = registry[name]
        try:
            mismatches = verify_constants(fam, cfg.v_branch)
        except FamilyError as exc:
            print(f"FAIL {name}: {exc}")
            failures += 1
            continue
        if mismatches:
            failures += 1
            for mm in mismatches:
                print(f"FAIL {name}: {mm['field']} expected {mm['expected']} "
                      f"computed {mm['computed']}")
        else:
            print(f"PASS {name}")
    return 1 if failures else 0


def cmd_experiment(cfg: RunConfig, registry) -> int:
    fam = registry.get(cfg.family)
    if fam is None:
        print(f"unknown family {cfg.family!r}", file=sys.stderr)
        return 2
    try:
        if cfg.kind == "distribution":
            summary = statlab.distribution_experiment(
                fam, cfg.N, cfg.p_cut, seed=cfg.seed, min_curves=cfg.min_curves)
            payload = summary.to_json()
            if cfg.out:
                res = enum_mod.enumerate_family(fam, summary.effective_N)
                records = statlab.compute_records(fam, res.points, cfg.threads)
                statlab.write_records_csv(cfg.out + ".curves.csv", records)
                statlab.write_summary_json(cfg.out + ".summary.json", summary)
            print(json.dumps(payload, indent=2, sort_keys=True))
        elif cfg.kind == "average":
            res = enum_mod.enumerate_family(fam, cfg.N)
            if res.count == 0:
                print("empty family slice", file=sys.stderr)
                return 2
            records = statlab.compute_records(fam, res.points, cfg.threads)
            payload = {"family": fam.name, "N": str(cfg.N),
                       "curves": len(records), "averages": {}, "rho": {}}
            cn = fam.constants(cfg.v_branch)
            for k in cfg.klist:
                avg = statlab.average_power(fam, cfg.N, k, records=records)
                payload["averages"][str(k)] = str(avg)
                payload["rho"][str(k)] = str(rho_exponent(cn, fam.ell, k))
            if cfg.out:
                statlab.write_records_csv(cfg.out + ".curves.csv", records)
                statlab.write_summary_json(cfg.out + ".summary.json", payload)
            print(json.dumps(payload, indent=2, sort_keys=True))
        elif cfg.kind == "tail":
            res = enum_mod.enumerate_family(fam, cfg.N)
            records = statlab.compute_records(fam, res.points, cfg.threads)
            payload = {"family": fam.name, "N": str(cfg.N), "tails": {}}
            for A in cfg.alist:
                payload["tails"][str(A)] = statlab.tail_count(
                    fam, cfg.N, Fraction(A), records=records)
            if cfg.out:
                statlab.write_records_csv(cfg.out + ".curves.csv", records)
                statlab.write_summary_json(cfg.out + ".summary.json", payload)
            print(json.dumps(payload, indent=2, sort_keys=True, default=str))
        elif cfg.kind == "density":
            reports = enum_mod.count_congruence(fam, cfg.N, cfg.q, delta=cfg.delta)
            payload = {
                "family": fam.name, "N": str(cfg.N), "q": cfg.q,
                "proposition": reports[0].proposition if reports else "",
                "classes": [
                    {"representative": list(r.representative),
                     "observed": r.observed_count, "total": r.total_count,
                     "predicted": str(r.predicted), "ratio": r.ratio()}
                    for r in reports],
            }
            if cfg.out:
                statlab.write_summary_json(cfg.out + ".summary.json", payload)
            print(json.dumps(payload, indent=2, sort_keys=True))
        else:  # pragma: no cover
            return 2
    except (enum_mod.EnumError, statlab.StatError, FamilyError) as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_enum(cfg: RunConfig, registry) -> int:
    fam = registry.get(cfg.family)
    if fam is None:
        print(f"unknown family {cfg.family!r}", file=sys.stderr)
        return 2
    res = enum_mod.enumerate_family(fam, cfg.N, delta=cfg.delta)
    print(f"{res.count} points (degenerate: {len(res.degenerate)}) "
          f"box {res.box}")
    if cfg.out:
        try:
            statlab.write_points_csv(cfg.out, res.points)
        except OSError as exc:
            print(f"I/O failure: {exc}", file=sys.stderr)
            return 3
    return 0


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    cfg = RunConfig(
        command=ns.command,
        family=getattr(ns, "family", None),
        registry=ns.registry,
        N=getattr(ns, "N", 10 ** 6),
        q=getattr(ns, "q", 5),
        klist=tuple(getattr(ns, "k", [1])),
        alist=tuple(getattr(ns, "A", ["1"])),
        p_cut=getattr(ns, "p_cut", 300),
        threads=getattr(ns, "threads", 1),
        seed=getattr(ns, "seed", 0),
        out=getattr(ns, "out", None),
        v_branch=getattr(ns, "v_branch", "theta"),
        kind=getattr(ns, "kind", "distribution"),
        delta=getattr(ns, "delta", None),
        min_curves=getattr(ns, "min_curves", 1000),
        as_json=getattr(ns, "as_json", False),
    )
    try:
        registry = load_registry(cfg.registry)
    except FileNotFoundError as exc:
        print(f"cannot read registry: {exc}", file=sys.stderr)
        return 3
    except FamilyError as exc:
        print(f"invalid registry: {exc}", file=sys.stderr)
        return 2
    if cfg.command == "family-info":
        return cmd_family_info(cfg, registry)
    if cfg.command == "verify-tables":
        return cmd_verify_tables(cfg, registry)
    if cfg.command == "experiment":
        return cmd_experiment(cfg, registry)
    if cfg.command == "enum":
        return cmd_enum(cfg, registry)
    return 2  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
