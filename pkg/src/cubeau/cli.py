"""Command-line front door.

Exit codes: 0 on success/pass, 1 on verification failure, 2 on usage error.
Structured mode prints line-delimited JSON records with sorted keys, so
identical invocations produce byte-identical output.

Optional environment overrides (all integers):
  CUBEAU_SIEVE_LIMIT   ceiling for sieve construction
  CUBEAU_BRANCH_CAP    solver branch cap
  CUBEAU_VALUE_BOUND   solver integer search bound
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from . import cubes, harness, poly, richmond
from .arith import check_gcd_facts
from .engine import (
    SolverConfig,
    cube_class_resolve,
    free_variables,
    generate_equations,
    seed_names,
    seed_system,
    solve,
)


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise SystemExit(f"{name} must be an integer, got {raw!r}")
    if value <= 0:
        raise SystemExit(f"{name} must be positive")
    return value


def _config() -> SolverConfig:
    return SolverConfig(
        value_bound=_env_int("CUBEAU_VALUE_BOUND", SolverConfig.value_bound),
        branch_cap=_env_int("CUBEAU_BRANCH_CAP", SolverConfig.branch_cap),
    )


def _sieve_ceiling() -> int:
    return _env_int("CUBEAU_SIEVE_LIMIT", cubes.DEFAULT_SIEVE_CEILING)


def _emit(args, record: dict, text: str) -> None:
    if args.format == "structured":
        print(json.dumps(record, sort_keys=True, default=str))
    else:
        print(text)


def _cmd_reps(args) -> int:
    found = cubes.representations(args.n, args.k)
    note = ""
    if args.k == 2 and args.n % 9 in (3, 6) and not found:
        note = f"note: {args.n} = {args.n % 9} (mod 9); two cubes sum to 0 or +-1 (mod 9)"
    _emit(
        args,
        {"kind": "representations", "n": args.n, "k": args.k,
         "representations": [list(t) for t in found], "note": note},
        "\n".join(" + ".join(f"{a}^3" for a in t) for t in found)
        or f"no representations{chr(10) + note if note else ''}",
    )
    return 0


def _cmd_sieve(args) -> int:
    sieve = cubes.build_sieve(args.N, args.k, ceiling=_sieve_ceiling())
    members = sieve.count_members(args.N)
    if args.save:
        cubes.save_sieve(sieve, args.save)
    _emit(
        args,
        {"kind": "sieve", "N": args.N, "k": args.k, "members": members,
         "saved": args.save or None},
        f"members up to {args.N}: {members}" + (f"\nsaved to {args.save}" if args.save else ""),
    )
    return 0


def _cmd_stats(args) -> int:
    if args.sieve:
        sieve = cubes.load_sieve(args.sieve)
        if sieve.k != args.k:
            print(f"snapshot is for k={sieve.k}, requested k={args.k}", file=sys.stderr)
            return 2
    else:
        sieve = cubes.build_sieve(max(args.checkpoints), args.k, ceiling=_sieve_ceiling())
    rows = cubes.exceptional_stats(sieve, sorted(args.checkpoints))
    for nc, count, ratio in rows:
        _emit(
            args,
            {"kind": "exceptional", "k": args.k, "N": nc, "count": count,
             "ratio": f"{ratio.numerator}/{ratio.denominator}"},
            f"N={nc}: {count} non-members, ratio {count}/{nc} = {float(ratio):.6f}",
        )
    return 0


def _cmd_witness(args) -> int:
    try:
        m = cubes.find_witness(args.p, args.r, args.k, args.limit, ceiling=_sieve_ceiling())
    except cubes.NotFound as exc:
        _emit(args, {"kind": "witness", "error": str(exc)}, str(exc))
        return 1
    _emit(
        args,
        {"kind": "witness", "p": args.p, "r": args.r, "k": args.k, "M": m},
        f"M = {m}: gcd({m}, {args.p}) = 1, both {m} and {args.p}^{args.r}*{m} "
        f"are sums of {args.k} positive cubes",
    )
    return 0


def _report_out(args, report) -> int:
    resolved = cube_class_resolve(report)
    record = {
        "kind": "solution",
        "status": report.status,
        "branches": report.branches,
        "caps_hit": report.caps_hit,
        "free": sorted(str(v) for v in report.free),
        "values": {
            str(v): [str(x) for x in vs] for v, vs in sorted(resolved.value_sets.items())
        },
        "non_cube": {str(v): str(c) for v, c in resolved.non_cube.items()},
        "solution_count": len(report.solutions),
    }
    lines = [report.to_text().rstrip()]
    for v, vs in sorted(resolved.value_sets.items()):
        if len(vs) > 1:
            lines.append(f"cube-class: {v} in {{{', '.join(str(x) for x in vs)}}}")
    _emit(args, record, "\n".join(lines))
    return 0 if report.status in ("unique", "multiple") else 1


def _cmd_solve(args) -> int:
    system = generate_equations(args.k, args.n, args.form)
    report = solve(system, _config())
    return _report_out(args, report)


def _cmd_seed(args) -> int:
    report = solve(seed_system(args.name), _config())
    return _report_out(args, report)


def _cmd_identity(args) -> int:
    ids = list(poly.load_catalog()) if args.id in (None, "all") else [args.id]
    worst = 0
    for entry_id in ids:
        result = poly.verify_identity(entry_id)
        _emit(
            args,
            {"kind": "identity", "id": entry_id, "ok": result.ok,
             "difference": str(result.difference)},
            f"{entry_id}: " + ("zero polynomial" if result.ok
                               else f"NONZERO difference: {result.difference}"),
        )
        worst = max(worst, 0 if result.ok else 1)
    return worst


def _cmd_richmond(args) -> int:
    lams = [args.lam] if args.lam else richmond.lambda_candidates(args.R)
    if not lams:
        _emit(
            args,
            {"kind": "decomposition", "R": args.R, "error": "no admissible lambda"},
            f"no admissible lambda for R = {args.R}",
        )
        return 1
    for lam in lams:
        try:
            dec = richmond.decompose(args.R, lam)
        except richmond.NonPositiveTerm as exc:
            _emit(args, {"kind": "decomposition", "R": args.R, "lam": lam,
                         "error": str(exc)}, str(exc))
            return 1
        _emit(
            args,
            {"kind": "decomposition", "R": dec.R, "lam": dec.lam, "D": dec.D,
             "terms": list(dec.terms), "equation": dec.equation()},
            f"lam = {dec.lam}, D = {dec.D}\n{dec.equation()}",
        )
    return 0


def _cmd_scenario(args) -> int:
    params = {}
    if args.n is not None:
        params["N"] = args.n
    if args.a is not None:
        params["A"] = args.a
    if args.k is not None:
        params["k"] = args.k
    if args.p_max is not None:
        params["p_max"] = args.p_max
    if args.r_max is not None:
        params["r_max"] = args.r_max
    if args.limit is not None:
        params["limit"] = args.limit
    try:
        report = harness.run_scenario(args.name, config=_config(), **params)
    except (KeyError, TypeError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    if args.save:
        harness.write_report(report, args.save)
    if args.format == "structured":
        print(report.to_json())
    else:
        print(f"scenario {report.scenario}: {'PASS' if report.passed else 'FAIL'} "
              f"({report.elapsed_s:.1f}s)")
        for c in report.checks:
            mark = "ok " if c.passed else "FAIL"
            print(f"  [{mark}] {c.id} ({c.anchor}) {c.detail}")
    return 0 if report.passed else 1


def _cmd_gcd_facts(args) -> int:
    from .arith import primes_up_to

    bad = 0
    for p in primes_up_to(args.max):
        if p < 5:
            continue
        report = check_gcd_facts(p)
        if not report.all_pass:
            bad += 1
            for claim in report.claims:
                if not claim.passed:
                    _emit(args, {"kind": "gcd-fact", "p": p, "claim": claim.label,
                                 "computed": claim.computed, "expected": claim.expected},
                          f"p={p}: {claim.label}: got {claim.computed}, "
                          f"expected {claim.expected}")
    _emit(
        args,
        {"kind": "gcd-facts", "max": args.max, "failures": bad},
        f"gcd facts for primes 5..{args.max}: " + ("all pass" if not bad else f"{bad} failures"),
    )
    return 0 if bad == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubeau",
        description="exact computations around multiplicative functions "
                    "additive on sums of k positive cubes",
    )
    parser.add_argument("--format", choices=("text", "structured"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reps", help="representations of n as a sum of k positive cubes")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.set_defaults(fn=_cmd_reps)

    p = sub.add_parser("sieve", help="build the membership sieve up to N")
    p.add_argument("N", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--save", metavar="PATH")
    p.set_defaults(fn=_cmd_sieve)

    p = sub.add_parser("stats", help="exceptional-set counts at checkpoints")
    p.add_argument("k", type=int)
    p.add_argument("--checkpoints", type=int, nargs="+", required=True)
    p.add_argument("--sieve", metavar="PATH", help="reuse a sieve snapshot")
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("witness", help="smallest witness M for a prime power")
    p.add_argument("p", type=int)
    p.add_argument("r", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--limit", type=int, default=10**4)
    p.set_defaults(fn=_cmd_witness)

    p = sub.add_parser("solve", help="generate and solve the additivity system")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True, metavar="N")
    p.add_argument("--form", choices=("f", "g"), default="f")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("seed", help="solve a named fixture system")
    p.add_argument("name", choices=seed_names())
    p.set_defaults(fn=_cmd_seed)

    p = sub.add_parser("identity", help="verify catalog identities")
    p.add_argument("id", nargs="?", default="all")
    p.set_defaults(fn=_cmd_identity)

    p = sub.add_parser("richmond", help="three-cube decomposition of R * D^3")
    p.add_argument("R", type=int)
    p.add_argument("--lam", type=int, help="use this lambda instead of searching")
    p.set_defaults(fn=_cmd_richmond)

    p = sub.add_parser("scenario", help="run a named scenario")
    p.add_argument("name", choices=harness.SCENARIOS)
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p-max", type=int, dest="p_max")
    p.add_argument("--r-max", type=int, dest="r_max")
    p.add_argument("--limit", type=int)
    p.add_argument("--save", metavar="PATH", help="write the JSON report here")
    p.set_defaults(fn=_cmd_scenario)

    p = sub.add_parser("gcd-facts", help="sweep the gcd case-split claims")
    p.add_argument("--max", type=int, default=1000)
    p.set_defaults(fn=_cmd_gcd_facts)

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, cubes.ResourceLimit, poly.ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
