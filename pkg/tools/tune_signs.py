"""Search root sign tables that reproduce the reference commutator formulas.

A candidate assigns +1 or -1 to every root. It is accepted when the
extracted formulas match REFERENCE_FORMULAS and every bank entry for the
system that is expected to pass does pass. Candidates are tried with the
fewest minus signs first, so the output is deterministic.

    python3 tools/tune_signs.py C2 G2
"""

from __future__ import annotations

import argparse
import itertools

from chevlab.chevrep import ChevRep, reference_mismatches
from chevlab.identities import load_bank, verify_identity
from chevlab.rootsys import build_root_system


def candidates(roots):
    n = len(roots)
    for k in range(n + 1):
        for minus in itertools.combinations(range(n), k):
            yield {r.coords: (-1 if i in minus else 1) for i, r in enumerate(roots)}


def tune(label: str, limit: int | None = None):
    system = build_root_system(label)
    roots = sorted(system.roots, key=lambda r: (-system.height(r), r.coords))
    entries = [e for e in load_bank() if e.system == label and e.expect == "pass"]
    tried = 0
    for signs in candidates(roots):
        tried += 1
        if limit is not None and tried > limit:
            break
        rep = ChevRep(system, signs)
        if reference_mismatches(rep):
            continue
        if all(verify_identity(rep, e).holds for e in entries):
            return signs, tried
    return None, tried


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("labels", nargs="+")
    args = ap.parse_args()
    for label in args.labels:
        signs, tried = tune(label)
        if signs is None:
            print(f"{label}: no sign table found after {tried} candidates")
            continue
        minus = {c: s for c, s in signs.items() if s < 0}
        print(f"{label}: found after {tried} candidates")
        print(f'    "{label}": {minus},')


if __name__ == "__main__":
    main()
