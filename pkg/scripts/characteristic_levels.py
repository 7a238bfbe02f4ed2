"""Characteristic levels: closed form against the brute-force lattice oracle.

The characteristic level for index bound n is the d with d.Z^2 equal to
the intersection of all subgroups of Z^2 of index at most n.  The closed
form is lcm(1..n); the oracle enumerates every sublattice by its Hermite
basis and intersects them all.

    python3 scripts/characteristic_levels.py --max 10
"""

import argparse

from procong.torus import characteristic_level, characteristic_level_bruteforce


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max", type=int, default=10,
                        help="largest index bound (default 10)")
    args = parser.parse_args()

    print(" n | closed form | brute force")
    ok = True
    for n in range(1, args.max + 1):
        fast = characteristic_level(n)
        slow = characteristic_level_bruteforce(n)
        mark = "" if fast == slow else "   <-- MISMATCH"
        ok = ok and fast == slow
        print(f"{n:2d} | {fast:11d} | {slow:11d}{mark}")
    print("all levels agree" if ok else "MISMATCH FOUND")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
