"""Command line entry point: ``chevlab <verb> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chevrep import build_rep, reference_mismatches, structure_constants
from .grouplab import (
    cache_bytes,
    elementary_subgroup,
    read_cache,
    relative_elementary,
)
from .identities import load_bank, verify_identity, verify_identity_over_ring
from .rings import FiniteRing
from .verifier import ALL_SUITES, Context, Report, load_scenario, run_scenario, scenario_names

SUBGROUPS = {
    "E_A": "E(Phi, A)",
    "E_B": "E(Phi, B)",
    "E_AB": "E(Phi, AB)",
    "E_R_A": "E(Phi, R, A)",
    "E_R_B": "E(Phi, R, B)",
    "E_R_AB": "E(Phi, R, AB)",
    "whole": "E(Phi, R)",
    "mixed": "[E(A), E(B)]",
    "mixed_relative": "[E(R,A), E(R,B)]",
}


def cmd_constants(args) -> int:
    bad = 0
    for label in args.systems:
        rep = build_rep(label)
        table = structure_constants(rep)
        mism = reference_mismatches(rep)
        bad += len(mism)
        print(f"{label}: {len(table)} ordered pairs, reference formulas {'match' if not mism else 'MISMATCH'}")
        for m in mism:
            print(f"  {m}")
        if args.all:
            for f in table.values():
                print(f"  {f}")
        else:
            for (a, b), f in table.items():
                if rep.system.is_positive(a) and rep.system.is_positive(b) and f.factors:
                    print(f"  {f}")
    return 1 if bad else 0


def cmd_identities(args) -> int:
    failures = 0
    ring = FiniteRing(tuple(args.ring)) if args.ring else None
    for entry in load_bank(args.bank):
        if args.system and entry.system != args.system:
            continue
        rep = build_rep(entry.system)
        res = verify_identity(rep, entry)
        status = "ok" if res.ok else "UNEXPECTED"
        line = f"{entry.name:<18} {entry.system}  {'holds' if res.holds else 'fails'} (expect {entry.expect})  {status}"
        if res.witness is not None:
            line += f"\n    witness {res.witness}"
        if ring is not None:
            rr = verify_identity_over_ring(rep, entry, ring, args.samples, args.seed)
            line += f"\n    over {ring}: {'holds' if rr.holds else 'fails'} on {args.samples} assignments"
            failures += not rr.ok
        failures += not res.ok
        print(line)
    return 1 if failures else 0


def build_named_subgroup(ctx: Context, name: str):
    amb, budget = ctx.amb, ctx.budget
    if name == "E_A":
        return elementary_subgroup(amb, ctx.A, budget)
    if name == "E_B":
        return elementary_subgroup(amb, ctx.B, budget)
    if name == "E_AB":
        return elementary_subgroup(amb, ctx.AB, budget)
    if name == "whole":
        return elementary_subgroup(amb, ctx.ring.whole(), budget)
    if name in ("E_R_A", "E_R_B", "E_R_AB"):
        ideal = {"E_R_A": ctx.A, "E_R_B": ctx.B, "E_R_AB": ctx.AB}[name]
        return relative_elementary(amb, ideal, budget).group
    if name == "mixed":
        return ctx.mixed_plain
    if name == "mixed_relative":
        return ctx.mixed_relative
    raise ValueError(f"unknown subgroup {name}")


def cmd_enumerate(args) -> int:
    sc = load_scenario(args.scenario)
    if args.budget:
        sc.budget = args.budget
    ctx = Context(sc)
    S = build_named_subgroup(ctx, args.subgroup)
    data = cache_bytes(S)
    print(f"{SUBGROUPS[args.subgroup]} in {ctx.amb.descriptor()}: {len(S)} elements, complete={S.complete}")
    print(f"fingerprint {S.fingerprint()}")
    if args.out:
        out = Path(args.out)
        if out.exists():
            same = out.read_bytes() == data
            print(f"cache {out}: {'identical' if same else 'DIFFERS from this run'}")
            if not same:
                return 1
        else:
            out.write_bytes(data)
            print(f"wrote {out} ({len(data)} bytes)")
        back = read_cache(out)
        if back.elements != S.elements:
            print("cache read-back does not match")
            return 1
    return 0 if S.complete else 1


def cmd_verify(args) -> int:
    names = scenario_names() if args.all else args.scenarios
    if not names:
        print("no scenarios given; packaged: " + ", ".join(scenario_names()))
        return 2
    failed = False
    reports = []
    for name in names:
        sc = load_scenario(name)
        if args.all and sc.optional and not args.include_optional:
            print(f"scenario {sc.name}: optional, skipped (use --include-optional)")
            continue
        if args.seed is not None:
            sc.seed = args.seed
        rep = run_scenario(sc, args.suites)
        reports.append(rep)
        print(rep.to_text())
        failed |= rep.failed
    if args.json:
        payload = [r.to_dict(timings=not args.no_timings) for r in reports]
        Path(args.json).write_text(json.dumps(payload if len(payload) != 1 else payload[0], indent=2, sort_keys=True))
    return 1 if failed else 0


def cmd_report(args) -> int:
    data = json.loads(Path(args.path).read_text())
    items = data if isinstance(data, list) else [data]
    failed = False
    for d in items:
        r = Report.from_dict(d)
        if args.json:
            print(r.to_json())
        else:
            print(r.to_text())
        failed |= r.failed
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chevlab", description="Chevalley group verification workbench")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("constants", help="print and check structure-constant tables")
    c.add_argument("systems", nargs="*", default=["A2", "C2", "G2"])
    c.add_argument("--all", action="store_true", help="print every ordered pair, not only positive ones")
    c.set_defaults(func=cmd_constants)

    i = sub.add_parser("identities", help="verify the identity bank")
    i.add_argument("--system")
    i.add_argument("--bank", help="path to an alternative bank file")
    i.add_argument("--ring", type=int, nargs="+", metavar="M", help="also check over Z/M1 x Z/M2 ...")
    i.add_argument("--samples", type=int, default=100)
    i.add_argument("--seed", type=int, default=0)
    i.set_defaults(func=cmd_identities)

    e = sub.add_parser("enumerate", help="enumerate and cache a subgroup of a scenario")
    e.add_argument("scenario")
    e.add_argument("subgroup", choices=sorted(SUBGROUPS))
    e.add_argument("--out", help="cache file; an existing file is compared byte for byte")
    e.add_argument("--budget", type=int)
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="run scenario suites")
    v.add_argument("scenarios", nargs="*")
    v.add_argument("--all", action="store_true", help="run every packaged scenario")
    v.add_argument("--include-optional", action="store_true")
    v.add_argument("--suites", nargs="+", choices=ALL_SUITES)
    v.add_argument("--seed", type=int)
    v.add_argument("--json", help="write the structured report here")
    v.add_argument("--no-timings", action="store_true", help="omit durations from the JSON report")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="render a saved JSON report")
    r.add_argument("path")
    r.add_argument("--json", action="store_true", help="re-emit normalised JSON instead of text")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
