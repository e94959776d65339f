"""Run the orbifold solver for a range of l and compare with the closed-form tables.

Usage: python scripts/solver_sweep.py [--lmin 3] [--lmax 8]
"""

import argparse
import time

from modular_orbifold.families import build_orbifold_u1, build_spin_m_level2
from modular_orbifold.orbifold_solver import match_up_to_twisted_permutation, orbifold_u1_problem, solve, spin_problem


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lmin", type=int, default=3)
    p.add_argument("--lmax", type=int, default=8)
    args = p.parse_args()
    print(f"{'problem':<18} {'params':>6} {'solutions':>9} {'max |S - table|':>16} {'seconds':>8}")
    for l in range(args.lmin, args.lmax + 1):
        for make, build in ((spin_problem, build_spin_m_level2), (orbifold_u1_problem, build_orbifold_u1)):
            problem = make(l)
            start = time.perf_counter()
            sols = solve(problem)
            elapsed = time.perf_counter() - start
            ref = build(l)
            devs = [match_up_to_twisted_permutation(s.md, ref, list(problem.twisted_labels))[0] for s in sols]
            search = next((line for line in sols[0].log if line.startswith("phase search")), "") if sols else ""
            nparams = search.split(":")[1].split()[0] if search else "-"
            dev = f"{max(devs):.2e}" if devs else "-"
            print(f"{problem.name:<18} {nparams:>6} {len(sols):>9} {dev:>16} {elapsed:8.3f}")


if __name__ == "__main__":
    main()
