"""Print sqrt(8l) * S for Spin(2l) level 2 (equivalently the Z2-orbifold of u1(2l)).

Usage: python scripts/spin_level2_table.py [l ...]   (default: 3 4)

Entries are shown in the canonical sector order, followed by the arbitration
notes recorded during construction and the twists as conformal weights mod 1.
"""

import argparse
import cmath
import math

from modular_orbifold.families import build_orbifold_u1, build_spin_m_level2


def fmt(z: complex) -> str:
    z = complex(round(z.real, 6), round(z.imag, 6))
    if abs(z.imag) < 1e-9:
        return f"{z.real:g}"
    if abs(z.real) < 1e-9:
        return f"{z.imag:g}i"
    return f"{z.real:g}{z.imag:+g}i"


def show(l: int) -> None:
    spin, orb = build_spin_m_level2(l), build_orbifold_u1(l)
    scale = math.sqrt(8 * l)
    names = [s.replace("_hat", "") for s in spin.labels]
    width = max(9, max(len(fmt(z * scale)) for z in spin.S.flat) + 1)
    print(f"l = {l}: sqrt({8 * l}) * S   (identical for spin_level2 and orbifold_u1)")
    print(" " * 8 + "".join(f"{n:>{width}}" for n in names))
    for n, row in zip(names, spin.S):
        print(f"{n:<8}" + "".join(f"{fmt(z * scale):>{width}}" for z in row))
    for md in (spin, orb):
        h = [(cmath.phase(w) / (2 * math.pi)) % 1 for w in md.twists]
        print(f"{md.name} weights mod 1: " + ", ".join(f"{n}={x:.6g}" for n, x in zip(names, h)))
        for note in md.report:
            print(f"  - {note}")
    print()


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("l", nargs="*", type=int, default=[3, 4])
    for l in p.parse_args().l:
        show(l)


if __name__ == "__main__":
    main()
